#pragma once

// Sentence segmentation and tagging. Text is normalized, segmented, then each
// sentence is wrapped as <tag>text</tag> where tag is the MD5-derived
// identifier of the normalized sentence.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citeground/abbreviations.hpp"
#include "citeground/error.hpp"
#include "citeground/language.hpp"
#include "citeground/tag.hpp"

namespace citeground {

struct source_document {
  std::string raw_text;
  language lang = language::en;
  std::string doc_id;
};

struct tagged_sentence {
  sentence_tag tag;
  std::string text;
  std::size_t index = 0;

  // <tag>text</tag>
  std::string serialize() const { return tag.open() + text + tag.close(); }

  friend bool operator==(const tagged_sentence&, const tagged_sentence&) = default;
};

class tagged_document {
public:
  tagged_document(std::vector<tagged_sentence> sentences, language lang, std::string doc_id)
      : sentences_(std::move(sentences)), lang_(lang), doc_id_(std::move(doc_id)) {
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
      if (sentences_[i].index != i)
        throw invalid_argument("sentence index " + std::to_string(sentences_[i].index) +
                               " out of order at position " + std::to_string(i));
      tag_set_.insert(sentences_[i].tag);
      first_.try_emplace(sentences_[i].tag, i);
    }
  }

  const std::vector<tagged_sentence>& sentences() const noexcept { return sentences_; }
  const std::set<sentence_tag>& tag_set() const noexcept { return tag_set_; }
  language lang() const noexcept { return lang_; }
  const std::string& doc_id() const noexcept { return doc_id_; }
  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }

  bool contains(const sentence_tag& t) const { return tag_set_.contains(t); }

  // First occurrence when the same sentence appears more than once.
  const tagged_sentence* find(const sentence_tag& t) const {
    auto it = first_.find(t);
    return it == first_.end() ? nullptr : &sentences_[it->second];
  }

  // Sentences concatenated in order, single space between wrappers.
  std::string serialize() const {
    std::string out;
    for (const auto& s : sentences_) {
      if (!out.empty()) out += ' ';
      out += s.serialize();
    }
    return out;
  }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(sentences_.size());
    for (const auto& s : sentences_) out.push_back(s.text);
    return out;
  }

private:
  std::vector<tagged_sentence> sentences_;
  std::set<sentence_tag> tag_set_;
  std::unordered_map<sentence_tag, std::size_t> first_;
  language lang_;
  std::string doc_id_;
};

// Collapses space/tab runs to one space and line-break runs to one newline,
// then trims both ends.
inline std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n' || c == '\r') {
      while (i < text.size() && (text[i] == '\n' || text[i] == '\r')) ++i;
      out += '\n';
    } else if (c == ' ' || c == '\t' || c == '\f' || c == '\v') {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\f' || text[i] == '\v'))
        ++i;
      out += ' ';
    } else {
      out += c;
      ++i;
    }
  }
  auto first = out.find_first_not_of(" \n");
  if (first == std::string::npos) return {};
  auto last = out.find_last_not_of(" \n");
  return out.substr(first, last - first + 1);
}

class sentence_segmenter {
public:
  virtual ~sentence_segmenter() = default;
  // text must already be whitespace-normalized.
  virtual std::vector<std::string> split(std::string_view text, language lang) const = 0;
};

namespace detail {

// Decodes the first UTF-8 code point; returns 0xFFFD on malformed input.
inline char32_t first_code_point(std::string_view s) {
  if (s.empty()) return 0;
  auto b = static_cast<unsigned char>(s[0]);
  if (b < 0x80) return b;
  int extra = (b & 0xE0) == 0xC0 ? 1 : (b & 0xF0) == 0xE0 ? 2 : (b & 0xF8) == 0xF0 ? 3 : -1;
  if (extra < 0 || s.size() <= static_cast<std::size_t>(extra)) return 0xFFFD;
  char32_t cp = b & (0x3F >> extra);
  for (int k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[k]) & 0x3F);
  return cp;
}

// Latin lowercase letters, enough for the five supported languages.
inline bool starts_lowercase(std::string_view s) {
  char32_t cp = first_code_point(s);
  if (cp >= U'a' && cp <= U'z') return true;
  if (cp >= 0xDF && cp <= 0xFF && cp != 0xF7) return true;
  if (cp >= 0x100 && cp <= 0x17F) return (cp & 1) == 1;
  return false;
}

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

inline std::string_view strip_leading(std::string_view w) {
  static constexpr std::string_view openers[] = {"(", "[", "{", "\"", "'", "\xE2\x80\x9E" /* „ */,
                                                 "\xC2\xAB" /* « */, "\xE2\x80\x9C" /* “ */,
                                                 "\xE2\x80\x98" /* ‘ */};
  bool again = true;
  while (again && !w.empty()) {
    again = false;
    for (auto o : openers)
      if (w.starts_with(o) && w.size() > o.size()) {
        w.remove_prefix(o.size());
        again = true;
      }
  }
  return w;
}

inline std::string_view strip_trailing_closers(std::string_view w) {
  static constexpr std::string_view closers[] = {")", "]", "}", "\"", "'", "\xC2\xBB" /* » */,
                                                 "\xE2\x80\x9D" /* ” */, "\xE2\x80\x99" /* ’ */,
                                                 "\xE2\x80\x9C" /* “ */};
  bool again = true;
  while (again && !w.empty()) {
    again = false;
    for (auto c : closers)
      if (w.ends_with(c) && w.size() > c.size()) {
        w.remove_suffix(c.size());
        again = true;
      }
  }
  return w;
}

// "1.", "12.": enumeration markers. Protected only where they open a
// sentence; elsewhere "rose by 12." ends one.
inline bool is_number_marker(std::string_view word) {
  if (word.size() < 2 || word.size() > 4 || word.back() != '.') return false;
  auto body = word.substr(0, word.size() - 1);
  return std::all_of(body.begin(), body.end(), is_ascii_digit);
}

// "a.", "B.": initials and letter markers.
inline bool is_initial(std::string_view word) {
  return word.size() == 2 && word[1] == '.' && std::isalpha(static_cast<unsigned char>(word[0]));
}

} // namespace detail

// Terminator punctuation plus per-language protected abbreviations and
// enumeration markers. Line breaks always end a sentence.
class rule_segmenter final : public sentence_segmenter {
public:
  explicit rule_segmenter(abbreviation_table abbreviations = abbreviation_table::seeded())
      : abbreviations_(std::move(abbreviations)) {}

  std::vector<std::string> split(std::string_view text, language lang) const override {
    struct token {
      std::string_view word;
      bool newline_after = false;
    };
    std::vector<token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\n')) {
        if (text[i] == '\n' && !tokens.empty()) tokens.back().newline_after = true;
        ++i;
      }
      std::size_t start = i;
      while (i < text.size() && text[i] != ' ' && text[i] != '\n') ++i;
      if (i > start) tokens.push_back({text.substr(start, i - start)});
    }

    std::vector<std::string> sentences;
    std::string current;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (!current.empty()) current += ' ';
      current += tokens[t].word;
      bool last = t + 1 == tokens.size();
      bool opens = current.size() == tokens[t].word.size();
      if (last || tokens[t].newline_after || ends_sentence(tokens[t].word, tokens[t + 1].word, lang, opens)) {
        sentences.push_back(std::move(current));
        current.clear();
      }
    }
    return sentences;
  }

  const abbreviation_table& abbreviations() const noexcept { return abbreviations_; }

private:
  bool ends_sentence(std::string_view word, std::string_view next, language lang, bool opens) const {
    auto core = detail::strip_trailing_closers(word);
    if (core.empty()) return false;
    char last = core.back();
    if (last != '.' && last != '!' && last != '?') return false;
    if (detail::starts_lowercase(next)) return false;
    if (last == '.') {
      auto bare = detail::strip_leading(core);
      if (abbreviations_.contains(lang, bare)) return false;
      if (detail::is_initial(bare)) return false;
      if (opens && detail::is_number_marker(bare)) return false;
    }
    return true;
  }

  abbreviation_table abbreviations_;
};

inline const sentence_segmenter& default_segmenter() {
  static const rule_segmenter instance;
  return instance;
}

inline std::vector<std::string> segment(std::string_view text, language lang,
                                        const sentence_segmenter& segmenter = default_segmenter()) {
  return segmenter.split(text, lang);
}

inline std::vector<std::string> segment(std::string_view text, std::string_view language_code,
                                        const sentence_segmenter& segmenter = default_segmenter()) {
  return segmenter.split(text, parse_language(language_code));
}

// Normalize, segment, hash. Identical sentences share a tag; distinct texts
// that collide on the 8-hex prefix are rejected.
inline tagged_document tag_document(const source_document& doc,
                                    const sentence_segmenter& segmenter = default_segmenter()) {
  auto normalized = normalize_whitespace(doc.raw_text);
  if (normalized.empty()) throw invalid_argument("document '" + doc.doc_id + "' is empty after normalization");

  std::vector<tagged_sentence> out;
  std::unordered_map<sentence_tag, std::string_view> seen;
  auto texts = segmenter.split(normalized, doc.lang);
  out.reserve(texts.size()); // keeps the views in `seen` stable
  for (auto& text : texts) {
    auto tag = make_tag(text);
    out.push_back({tag, std::move(text), out.size()});
    auto [it, inserted] = seen.try_emplace(tag, out.back().text);
    if (!inserted && it->second != out.back().text)
      throw tag_collision(tag.str(), std::string(it->second), out.back().text);
  }
  return tagged_document(std::move(out), doc.lang, doc.doc_id);
}

struct tagged_span {
  sentence_tag tag;
  std::string text;
  std::size_t offset = 0; // byte offset of the opening tag
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; }

// Finds the next "<xxxxxxxx>" or "</xxxxxxxx>" at or after pos in [pos, end).
inline std::size_t find_tag_markup(std::string_view s, std::size_t pos, std::size_t end) {
  for (std::size_t i = s.find('<', pos); i != std::string_view::npos && i < end; i = s.find('<', i + 1)) {
    std::size_t body = s.compare(i, 2, "</") == 0 ? i + 2 : i + 1;
    if (body + 9 <= s.size() && s[body + 8] == '>' && is_tag_text(s.substr(body, 8))) return i;
  }
  return std::string_view::npos;
}

} // namespace detail

// Parses serialized tagged text into its wrappers. Whitespace between
// wrappers is allowed; anything else is a parse error.
inline std::vector<tagged_span> parse_tagged_spans(std::string_view text) {
  std::vector<tagged_span> spans;
  std::size_t pos = 0;
  for (;;) {
    while (pos < text.size() && detail::is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    if (text[pos] != '<' || pos + 10 > text.size() || text[pos + 9] != '>' ||
        !is_tag_text(text.substr(pos + 1, 8)))
      throw parse_error("expected an opening <xxxxxxxx> tag", pos);
    auto tag = sentence_tag::from_string(text.substr(pos + 1, 8));
    std::size_t body = pos + 10;
    std::size_t close = text.find(tag.close(), body);
    if (close == std::string_view::npos) throw parse_error("unclosed tag " + tag.open(), pos);
    if (auto stray = detail::find_tag_markup(text, body, close); stray != std::string_view::npos)
      throw parse_error("unbalanced tag markup inside " + tag.open(), stray);
    spans.push_back({tag, std::string(text.substr(body, close - body)), pos});
    pos = close + tag.close().size();
  }
  return spans;
}

// Removes wrappers; sentence texts joined with single spaces.
inline std::string strip_tags(std::string_view tagged_text) {
  std::string out;
  for (auto& span : parse_tagged_spans(tagged_text)) {
    if (!out.empty()) out += ' ';
    out += span.text;
  }
  return out;
}

// Rebuilds a tagged_document from its serialized form. Tags are taken as
// written; with verify_hashes each must equal make_tag(text).
inline tagged_document parse_tagged_document(std::string_view tagged_text, language lang, std::string doc_id,
                                             bool verify_hashes = false) {
  std::vector<tagged_sentence> sentences;
  for (auto& span : parse_tagged_spans(tagged_text)) {
    if (verify_hashes && (span.text.empty() || make_tag(span.text) != span.tag))
      throw parse_error("tag " + span.tag.str() + " does not match its sentence", span.offset);
    sentences.push_back({span.tag, std::move(span.text), sentences.size()});
  }
  return tagged_document(std::move(sentences), lang, std::move(doc_id));
}

} // namespace citeground
