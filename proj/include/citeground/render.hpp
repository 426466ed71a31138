#pragma once

// Annotated output: the summary with its citation markers, followed by the
// source sentence behind each cited tag in order of first citation.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "citeground/error.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/record.hpp"
#include "citeground/verify.hpp"

namespace citeground {

enum class render_format { text, markdown, html };

inline render_format parse_render_format(std::string_view s) {
  if (s == "text") return render_format::text;
  if (s == "markdown" || s == "md") return render_format::markdown;
  if (s == "html") return render_format::html;
  throw invalid_argument("unknown render format '" + std::string(s) + "'");
}

struct resolved_citation {
  sentence_tag tag;
  std::string sentence;
};

// Cited tags in order of first citation, each paired with the first sentence
// carrying that tag. Unknown tags are an error.
inline std::vector<resolved_citation> resolve_citations(std::string_view summary, const tagged_document& doc) {
  std::vector<resolved_citation> out;
  std::set<sentence_tag> seen;
  for (const auto& c : extract_citations(summary)) {
    if (!seen.insert(c.tag).second) continue;
    const auto* s = doc.find(c.tag);
    if (!s) throw render_error("cited tag " + c.tag.str() + " is not in document '" + doc.doc_id() + "'");
    out.push_back({c.tag, s->text});
  }
  return out;
}

inline constexpr std::string_view citations_heading = "View Source Citations";
inline constexpr std::string_view no_citations_notice = "No citations in this summary.";

namespace detail {

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

// Escapes the summary and turns each citation into a link to its entry.
inline std::string html_summary_body(std::string_view summary) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& c : extract_citations(summary)) {
    out += html_escape(summary.substr(pos, c.char_offset - pos));
    out += "<a class=\"cite\" href=\"#src-" + c.tag.str() + "\">" + html_escape(c.raw) + "</a>";
    pos = c.end();
  }
  out += html_escape(summary.substr(pos));
  std::string paragraphs = "<p>";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '\n') {
      while (i + 1 < out.size() && out[i + 1] == '\n') ++i;
      paragraphs += "</p>\n<p>";
    } else {
      paragraphs += out[i];
    }
  }
  return paragraphs + "</p>";
}

} // namespace detail

inline std::string render_annotated(const summary_record& record, const tagged_document& doc, render_format format) {
  const auto cited = resolve_citations(record.summary, doc);
  std::string out;
  switch (format) {
  case render_format::text:
    out += record.summary + "\n\n" + std::string(citations_heading) + ":\n";
    if (cited.empty()) out += std::string(no_citations_notice) + "\n";
    for (const auto& c : cited) out += c.tag.open() + " " + c.sentence + "\n";
    break;
  case render_format::markdown:
    out += record.summary + "\n\n### " + std::string(citations_heading) + "\n\n";
    if (cited.empty()) out += "_" + std::string(no_citations_notice) + "_\n";
    for (const auto& c : cited) out += "- `" + c.tag.open() + "` " + c.sentence + "\n";
    break;
  case render_format::html:
    out += "<!DOCTYPE html>\n<html lang=\"" + std::string(language_code(record.lang)) + "\">\n<head>\n<meta charset=\"utf-8\">\n";
    out += "<title>" + detail::html_escape(record.doc_id) + "</title>\n";
    out += "<style>body{font-family:sans-serif;max-width:48em;margin:2em auto;line-height:1.5}"
           "a.cite{text-decoration:none;font-family:monospace;font-size:.85em}"
           "dt{font-family:monospace}dd{margin:0 0 .8em 1.5em}</style>\n</head>\n<body>\n";
    out += "<section class=\"summary\">\n" + detail::html_summary_body(record.summary) + "\n</section>\n";
    out += "<section class=\"citations\">\n<h3>" + std::string(citations_heading) + "</h3>\n";
    if (cited.empty()) {
      out += "<p>" + std::string(no_citations_notice) + "</p>\n";
    } else {
      out += "<dl>\n";
      for (const auto& c : cited)
        out += "<dt id=\"src-" + c.tag.str() + "\">" + detail::html_escape(c.tag.open()) + "</dt><dd>" +
               detail::html_escape(c.sentence) + "</dd>\n";
      out += "</dl>\n";
    }
    out += "</section>\n</body>\n</html>\n";
    break;
  }
  return out;
}

} // namespace citeground
