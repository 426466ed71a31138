#pragma once

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "citeground/citeground.hpp"

namespace testing_support {

// Independent MD5 for oracle comparisons.
inline std::string openssl_md5_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_md5(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

inline citeground::template_store templates() {
  return citeground::template_store(CITEGROUND_TEMPLATE_DIR, citeground::ignore_warnings());
}

inline citeground::tagged_document doc_from(const std::string& text, const std::string& id = "doc",
                                            citeground::language lang = citeground::language::en) {
  return citeground::tag_document({text, lang, id});
}

// "Sentence <i> of the sample text is here." for i in [0, n).
inline std::string numbered_text(int n, const std::string& stem = "Sentence") {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += stem + " number " + std::to_string(i) + " states a distinct fact.";
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

class temp_dir {
public:
  temp_dir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("citeground-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~temp_dir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  temp_dir(const temp_dir&) = delete;
  temp_dir& operator=(const temp_dir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

// Random UTF-8 sentence: ASCII words with occasional accented, CJK and emoji
// code points.
inline std::string random_utf8_sentence(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"a", "b", "k", "z", "Q", "7", "ä", "ö", "ß", "é", "ñ", "ç",
                                                  "ł", "Ж", "中", "文", "😀", "€", "-", ",", "'"};
  std::uniform_int_distribution<int> words(1, 12), letters(1, 9), pick(0, static_cast<int>(pieces.size()) - 1);
  std::string out;
  int n = words(rng);
  for (int w = 0; w < n; ++w) {
    if (w) out += ' ';
    int m = letters(rng);
    for (int k = 0; k < m; ++k) out += pieces[pick(rng)];
  }
  out += '.';
  return out;
}

} // namespace testing_support
