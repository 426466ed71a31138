#pragma once

// Parsing of model responses: reasoning/summary pairs and yes/no verdicts.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace citeground {

inline std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

struct generation_output {
  std::string reasoning;
  std::string summary;
};

namespace detail {

// Body of <name>...</name>; an unclosed element runs to the end of text.
inline std::optional<std::string_view> element_body(std::string_view text, std::string_view name,
                                                    std::size_t* element_begin = nullptr,
                                                    std::size_t* element_end = nullptr) {
  std::string open = "<" + std::string(name) + ">";
  std::string close = "</" + std::string(name) + ">";
  auto o = text.find(open);
  if (o == std::string_view::npos) return std::nullopt;
  auto body = o + open.size();
  auto c = text.find(close, body);
  if (element_begin) *element_begin = o;
  if (element_end) *element_end = c == std::string_view::npos ? text.size() : c + close.size();
  return text.substr(body, c == std::string_view::npos ? std::string_view::npos : c - body);
}

} // namespace detail

// Splits "<reasoning>...</reasoning><summary>...</summary>". Without a summary
// element, everything outside the reasoning element is the summary.
inline generation_output parse_generation(std::string_view content) {
  generation_output out;
  std::size_t rb = 0, re = 0;
  auto reasoning = detail::element_body(content, "reasoning", &rb, &re);
  if (reasoning) out.reasoning = trim(*reasoning);
  if (auto summary = detail::element_body(content, "summary")) {
    out.summary = trim(*summary);
  } else if (reasoning) {
    out.summary = trim(std::string(content.substr(0, rb)) + std::string(content.substr(re)));
  } else {
    out.summary = trim(content);
  }
  return out;
}

struct yes_no_verdict {
  std::optional<bool> answer; // empty when neither yes nor no leads the text
  std::string explanation;
};

// Accepts a leading yes/no token, case-insensitively, after optional
// markdown or quote characters: "Yes, because ...", "**No**. ...".
inline yes_no_verdict parse_yes_no(std::string_view content) {
  std::size_t i = 0;
  auto skippable = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '_' || c == '"' || c == '\'' || c == '`' ||
           c == '#' || c == '>' || c == '-' || c == '(' || c == '[';
  };
  while (i < content.size() && skippable(content[i])) ++i;
  std::size_t start = i;
  while (i < content.size() && std::isalpha(static_cast<unsigned char>(content[i]))) ++i;
  std::string word(content.substr(start, i - start));
  for (auto& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));

  yes_no_verdict v;
  if (word == "yes") v.answer = true;
  else if (word == "no") v.answer = false;
  if (v.answer) {
    auto rest = content.substr(i);
    auto skip = rest.find_first_not_of("*_\"'`.,:;!- \t\r\n");
    v.explanation = skip == std::string_view::npos ? std::string() : trim(rest.substr(skip));
  } else {
    v.explanation = trim(content);
  }
  return v;
}

} // namespace citeground
