#pragma once

// Mechanical citation checks. A citation is a bracketed sentence tag such as
// [<a3f5e823>]. Angle-bracket tokens that are not eight lowercase hex digits
// (<b>, <i>, </p>, ...) are ordinary text.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "citeground/preprocess.hpp"
#include "citeground/tag.hpp"

namespace citeground {

struct citation_span {
  sentence_tag tag;
  std::size_t char_offset = 0; // byte offset of raw within the summary
  std::string raw;             // "[<a3f5e823>]", or "<a3f5e823>" inside a multi-tag bracket

  std::size_t end() const noexcept { return char_offset + raw.size(); }

  friend bool operator==(const citation_span&, const citation_span&) = default;
};

// A tag written without brackets. Reported for information only.
struct bare_tag {
  sentence_tag tag;
  std::size_t char_offset = 0;

  friend bool operator==(const bare_tag&, const bare_tag&) = default;
};

struct verification_report {
  std::vector<citation_span> citations;
  std::vector<sentence_tag> unknown_tags;     // cited but not in the document
  std::vector<sentence_tag> duplicate_tags;   // cited more than once
  std::vector<std::size_t> combined_refs;     // offsets of the second span of each combined pair
  std::vector<sentence_tag> missing_required; // requested but never cited
  std::vector<std::size_t> misplaced;         // citations with no preceding text in their paragraph
  std::vector<bare_tag> bare_tags;            // informational, never affects passed
  bool passed = true;

  bool violations_empty() const noexcept {
    return unknown_tags.empty() && duplicate_tags.empty() && combined_refs.empty() && missing_required.empty() &&
           misplaced.empty();
  }

  friend bool operator==(const verification_report&, const verification_report&) = default;

  std::set<sentence_tag> cited_set() const {
    std::set<sentence_tag> out;
    for (const auto& c : citations) out.insert(c.tag);
    return out;
  }
};

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Tag token "<xxxxxxxx>" at pos (not a closing tag).
inline bool tag_token_at(std::string_view s, std::size_t pos) {
  return pos + 10 <= s.size() && s[pos] == '<' && s[pos + 9] == '>' && is_tag_text(s.substr(pos + 1, 8));
}

struct bracket_group {
  std::size_t begin = 0; // '['
  std::size_t end = 0;   // one past ']'
  std::vector<std::size_t> tag_offsets;
};

// Parses "[" ws? <h> (ws? [,;]? ws? <h>)* ws? "]" at pos.
inline std::optional<bracket_group> bracket_group_at(std::string_view s, std::size_t pos) {
  if (s[pos] != '[') return std::nullopt;
  bracket_group g;
  g.begin = pos;
  std::size_t i = pos + 1;
  auto skip_blank = [&] {
    while (i < s.size() && is_blank(s[i])) ++i;
  };
  skip_blank();
  if (!tag_token_at(s, i)) return std::nullopt;
  g.tag_offsets.push_back(i);
  i += 10;
  for (;;) {
    std::size_t save = i;
    skip_blank();
    if (i < s.size() && (s[i] == ',' || s[i] == ';')) {
      ++i;
      skip_blank();
    }
    if (tag_token_at(s, i)) {
      g.tag_offsets.push_back(i);
      i += 10;
      continue;
    }
    i = save;
    break;
  }
  skip_blank();
  if (i >= s.size() || s[i] != ']') return std::nullopt;
  g.end = i + 1;
  return g;
}

inline std::vector<bracket_group> bracket_groups(std::string_view s) {
  std::vector<bracket_group> out;
  for (std::size_t pos = s.find('['); pos != std::string_view::npos; pos = s.find('[', pos + 1)) {
    if (auto g = bracket_group_at(s, pos)) {
      pos = g->end - 1;
      out.push_back(std::move(*g));
    }
  }
  return out;
}

} // namespace detail

// Every bracketed tag, in order. Tags unknown to the source are included.
inline std::vector<citation_span> extract_citations(std::string_view summary) {
  std::vector<citation_span> out;
  for (const auto& g : detail::bracket_groups(summary)) {
    if (g.tag_offsets.size() == 1) {
      auto off = g.tag_offsets.front();
      out.push_back({sentence_tag::from_string(summary.substr(off + 1, 8)), g.begin,
                     std::string(summary.substr(g.begin, g.end - g.begin))});
    } else {
      for (auto off : g.tag_offsets)
        out.push_back({sentence_tag::from_string(summary.substr(off + 1, 8)), off, std::string(summary.substr(off, 10))});
    }
  }
  return out;
}

// Tags written as <xxxxxxxx> outside any citation bracket.
inline std::vector<bare_tag> extract_bare_tags(std::string_view text) {
  auto groups = detail::bracket_groups(text);
  std::vector<bare_tag> out;
  std::size_t g = 0;
  for (std::size_t pos = text.find('<'); pos != std::string_view::npos; pos = text.find('<', pos + 1)) {
    while (g < groups.size() && groups[g].end <= pos) ++g;
    if (g < groups.size() && groups[g].begin <= pos) continue;
    if (detail::tag_token_at(text, pos)) out.push_back({sentence_tag::from_string(text.substr(pos + 1, 8)), pos});
  }
  return out;
}

// Tags listed in an <xml_tags>...</xml_tags> block, in order, deduplicated.
// Generation prompts ask the model to list its chosen tags there.
inline std::vector<sentence_tag> extract_tag_list(std::string_view reasoning) {
  std::vector<sentence_tag> out;
  auto open = reasoning.find("<xml_tags>");
  if (open == std::string_view::npos) return out;
  auto body = open + std::string_view("<xml_tags>").size();
  auto close = reasoning.find("</xml_tags>", body);
  auto block = reasoning.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
  std::set<sentence_tag> seen;
  for (std::size_t i = 0; i + 8 <= block.size(); ++i) {
    if (!is_tag_text(block.substr(i, 8))) continue;
    bool left_ok = i == 0 || !is_lower_hex(block[i - 1]);
    bool right_ok = i + 8 == block.size() || !is_lower_hex(block[i + 8]);
    if (!left_ok || !right_ok) continue;
    auto t = sentence_tag::from_string(block.substr(i, 8));
    if (seen.insert(t).second) out.push_back(t);
    i += 7;
  }
  return out;
}

// Two spans count as combined when they share a bracket or when at most one
// whitespace character separates them.
inline std::vector<std::size_t> find_combined_refs(std::string_view summary, const std::vector<citation_span>& spans) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    const auto& prev = spans[i - 1];
    const auto& cur = spans[i];
    auto gap = summary.substr(prev.end(), cur.char_offset - prev.end());
    bool same_bracket = cur.raw.front() == '<' && prev.raw.front() == '<' && gap.find(']') == std::string_view::npos;
    bool adjacent = gap.size() <= 1 && std::all_of(gap.begin(), gap.end(), detail::is_blank);
    if (same_bracket || adjacent) out.push_back(cur.char_offset);
  }
  return out;
}

inline verification_report verify_summary(std::string_view summary, const tagged_document& doc,
                                          const std::optional<std::vector<sentence_tag>>& required_tags = std::nullopt) {
  verification_report r;
  r.citations = extract_citations(summary);
  r.bare_tags = extract_bare_tags(summary);

  std::map<sentence_tag, int> counts;
  std::set<sentence_tag> unknown_seen;
  std::set<sentence_tag> duplicate_seen;
  for (const auto& c : r.citations) {
    if (!doc.contains(c.tag) && unknown_seen.insert(c.tag).second) r.unknown_tags.push_back(c.tag);
    if (++counts[c.tag] == 2 && duplicate_seen.insert(c.tag).second) r.duplicate_tags.push_back(c.tag);
  }

  r.combined_refs = find_combined_refs(summary, r.citations);

  if (required_tags)
    for (const auto& t : *required_tags)
      if (!counts.contains(t) &&
          std::find(r.missing_required.begin(), r.missing_required.end(), t) == r.missing_required.end())
        r.missing_required.push_back(t);

  // Each citation must follow some text in its own paragraph. Inside a
  // multi-tag bracket the bracket start is what counts.
  for (const auto& c : r.citations) {
    std::size_t start = c.char_offset;
    if (c.raw.front() == '<') start = summary.rfind('[', start);
    std::size_t i = start;
    bool preceded = false;
    while (i > 0) {
      char ch = summary[--i];
      if (ch == '\n') break;
      if (ch != ' ' && ch != '\t' && ch != '\r') {
        preceded = true;
        break;
      }
    }
    if (!preceded && (r.misplaced.empty() || r.misplaced.back() != start)) r.misplaced.push_back(start);
  }

  r.passed = r.violations_empty();
  return r;
}

} // namespace citeground
