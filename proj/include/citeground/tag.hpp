#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "citeground/error.hpp"
#include "citeground/md5.hpp"

namespace citeground {

constexpr bool is_lower_hex(char c) noexcept {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
}

constexpr bool is_tag_text(std::string_view s) noexcept {
  return s.size() == 8 && std::all_of(s.begin(), s.end(), is_lower_hex);
}

// Sentence identifier: always exactly eight lowercase hex characters.
class sentence_tag {
public:
  static constexpr std::size_t length = 8;

  static std::optional<sentence_tag> parse(std::string_view s) noexcept {
    if (!is_tag_text(s)) return std::nullopt;
    sentence_tag t;
    std::copy(s.begin(), s.end(), t.chars_.begin());
    return t;
  }

  static sentence_tag from_string(std::string_view s) {
    if (auto t = parse(s)) return *t;
    throw invalid_argument("not an 8-character lowercase hex tag: '" + std::string(s) + "'");
  }

  std::string_view view() const noexcept { return {chars_.data(), chars_.size()}; }
  std::string str() const { return std::string(view()); }

  // <xxxxxxxx>
  std::string open() const { return "<" + str() + ">"; }
  std::string close() const { return "</" + str() + ">"; }

  friend auto operator<=>(const sentence_tag&, const sentence_tag&) = default;

  friend std::ostream& operator<<(std::ostream& os, const sentence_tag& t) { return os << t.view(); }

private:
  sentence_tag() = default;
  std::array<char, length> chars_{};
};

// First 8 hex characters of the MD5 digest of the UTF-8 bytes.
inline sentence_tag make_tag(std::string_view sentence) {
  if (sentence.empty()) throw invalid_argument("cannot tag an empty sentence");
  return sentence_tag::from_string(std::string_view(md5::hex(sentence)).substr(0, sentence_tag::length));
}

} // namespace citeground

template <>
struct std::hash<citeground::sentence_tag> {
  std::size_t operator()(const citeground::sentence_tag& t) const noexcept {
    return std::hash<std::string_view>{}(t.view());
  }
};
