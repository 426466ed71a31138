#pragma once

// Prompt templates are plain text files with {name} placeholders, stored as
// templates/<family>/<language>.txt. Lines starting with ";;" are header
// comments and never reach the model. "{{" and "}}" render literal braces.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "citeground/diagnostics.hpp"
#include "citeground/error.hpp"
#include "citeground/language.hpp"

namespace citeground {

using template_bindings = std::map<std::string, std::string, std::less<>>;

namespace detail {

inline bool is_placeholder_char(char c, bool first) {
  return (c >= 'a' && c <= 'z') || c == '_' || (!first && c >= '0' && c <= '9');
}

// Length of the placeholder name starting at pos (after '{'), or 0 if the
// text there is not "{name}".
inline std::size_t placeholder_length(std::string_view text, std::size_t pos) {
  std::size_t n = 0;
  while (pos + n < text.size() && is_placeholder_char(text[pos + n], n == 0)) ++n;
  if (n == 0 || pos + n >= text.size() || text[pos + n] != '}') return 0;
  return n;
}

} // namespace detail

// Single pass: bound values are inserted verbatim and never rescanned, so a
// document containing braces cannot break rendering.
inline std::string render_template(std::string_view text, const template_bindings& bindings) {
  std::string out;
  out.reserve(text.size() + 256);
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
      out += '{';
      i += 2;
    } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      out += '}';
      i += 2;
    } else if (c == '{') {
      std::size_t n = detail::placeholder_length(text, i + 1);
      if (n == 0) {
        out += c;
        ++i;
        continue;
      }
      std::string_view name = text.substr(i + 1, n);
      auto it = bindings.find(name);
      if (it == bindings.end())
        throw template_error("unbound placeholder {" + std::string(name) + "}", std::string(name));
      out += it->second;
      i += n + 2;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

// Strips ";;" header lines.
inline std::string strip_template_comments(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::size_t len = (end == std::string_view::npos ? text.size() : end + 1) - pos;
    std::string_view line = text.substr(pos, len);
    if (!line.starts_with(";;")) out += line;
    pos += len;
  }
  return out;
}

class template_store {
public:
  explicit template_store(std::filesystem::path root, warning_sink warn = stderr_warnings())
      : root_(std::move(root)), warn_(std::move(warn)) {}

  const std::filesystem::path& root() const noexcept { return root_; }

  // Falls back to English, with a warning, when the language file is missing.
  std::string load(std::string_view family, language lang) const {
    auto path = root_ / std::string(family) / (std::string(language_code(lang)) + ".txt");
    if (!std::filesystem::exists(path)) {
      auto fallback = root_ / std::string(family) / "en.txt";
      if (lang != language::en && std::filesystem::exists(fallback)) {
        if (warn_)
          warn_("no " + std::string(family) + " template for '" + std::string(language_code(lang)) +
                "', using English");
        path = fallback;
      } else {
        throw template_error("missing template " + path.string(), std::string(family));
      }
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return strip_template_comments(buf.str());
  }

  std::string render(std::string_view family, language lang, const template_bindings& bindings) const {
    return render_template(load(family, lang), bindings);
  }

private:
  std::filesystem::path root_;
  warning_sink warn_;
};

} // namespace citeground
