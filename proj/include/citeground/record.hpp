#pragma once

// Training record schema and its JSON form. Field names are frozen; see
// docs/schema.md.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "citeground/error.hpp"
#include "citeground/language.hpp"
#include "citeground/plan.hpp"
#include "citeground/prompts.hpp"
#include "citeground/verify.hpp"

namespace citeground {

enum class quality_verdict { keep, drop };

struct judge_flags {
  std::optional<bool> coherence;
  std::optional<bool> specificity;

  friend bool operator==(const judge_flags&, const judge_flags&) = default;
};

struct quality_report {
  double evenness = 0.0;
  std::size_t max_gap_tokens = 0;
  std::vector<double> positions;
  judge_flags judge;
  quality_verdict verdict = quality_verdict::keep;
  std::optional<std::string> drop_reason;

  friend bool operator==(const quality_report&, const quality_report&) = default;
};

struct summary_record {
  std::string doc_id;
  std::string tagged_source;
  std::string reasoning;
  std::string summary;
  std::optional<std::string> instruction;
  instruction_category category = instruction_category::none;
  generation_mode mode = generation_mode::oneshot;
  language lang = language::en;
  std::optional<quality_report> quality;
  std::optional<verification_report> verification;
  // Union of tags cited by the partial summaries (iterative mode only).
  std::vector<sentence_tag> chunk_citations;
  // Unknown fields read from a file, written back unchanged.
  nlohmann::json extra = nlohmann::json::object();

  bool has_instruction() const noexcept { return instruction && !instruction->empty(); }

  // Records whose verification failed never enter a training file.
  bool exportable() const noexcept { return !verification || verification->passed; }

  friend bool operator==(const summary_record&, const summary_record&) = default;
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json tags_to_json(const std::vector<sentence_tag>& tags) {
  auto out = nlohmann::json::array();
  for (const auto& t : tags) out.push_back(t.str());
  return out;
}

inline std::vector<sentence_tag> tags_from_json(const nlohmann::json& j) {
  std::vector<sentence_tag> out;
  for (const auto& t : j) out.push_back(sentence_tag::from_string(t.get<std::string>()));
  return out;
}

} // namespace detail

inline nlohmann::json to_json(const verification_report& r) {
  auto citations = nlohmann::json::array();
  for (const auto& c : r.citations)
    citations.push_back({{"tag", c.tag.str()}, {"char_offset", c.char_offset}, {"raw", c.raw}});
  auto bare = nlohmann::json::array();
  for (const auto& b : r.bare_tags) bare.push_back({{"tag", b.tag.str()}, {"char_offset", b.char_offset}});
  return {{"passed", r.passed},
          {"citations", std::move(citations)},
          {"unknown_tags", detail::tags_to_json(r.unknown_tags)},
          {"duplicate_tags", detail::tags_to_json(r.duplicate_tags)},
          {"combined_refs", r.combined_refs},
          {"missing_required", detail::tags_to_json(r.missing_required)},
          {"misplaced", r.misplaced},
          {"bare_tags", std::move(bare)}};
}

inline verification_report verification_from_json(const nlohmann::json& j) {
  verification_report r;
  r.passed = j.at("passed").get<bool>();
  for (const auto& c : j.value("citations", nlohmann::json::array()))
    r.citations.push_back({sentence_tag::from_string(c.at("tag").get<std::string>()),
                           c.at("char_offset").get<std::size_t>(), c.at("raw").get<std::string>()});
  r.unknown_tags = detail::tags_from_json(j.value("unknown_tags", nlohmann::json::array()));
  r.duplicate_tags = detail::tags_from_json(j.value("duplicate_tags", nlohmann::json::array()));
  r.combined_refs = j.value("combined_refs", std::vector<std::size_t>{});
  r.missing_required = detail::tags_from_json(j.value("missing_required", nlohmann::json::array()));
  r.misplaced = j.value("misplaced", std::vector<std::size_t>{});
  for (const auto& b : j.value("bare_tags", nlohmann::json::array()))
    r.bare_tags.push_back({sentence_tag::from_string(b.at("tag").get<std::string>()), b.at("char_offset").get<std::size_t>()});
  return r;
}

inline nlohmann::json to_json(const quality_report& q) {
  nlohmann::json flags = nlohmann::json::object();
  if (q.judge.coherence) flags["coherence"] = *q.judge.coherence;
  if (q.judge.specificity) flags["specificity"] = *q.judge.specificity;
  nlohmann::json j = {{"evenness", q.evenness},
                      {"max_gap_tokens", q.max_gap_tokens},
                      {"positions", q.positions},
                      {"judge_flags", std::move(flags)},
                      {"verdict", q.verdict == quality_verdict::keep ? "keep" : "drop"}};
  if (q.drop_reason) j["drop_reason"] = *q.drop_reason;
  return j;
}

inline quality_report quality_from_json(const nlohmann::json& j) {
  quality_report q;
  q.evenness = j.at("evenness").get<double>();
  q.max_gap_tokens = j.at("max_gap_tokens").get<std::size_t>();
  q.positions = j.value("positions", std::vector<double>{});
  if (j.contains("judge_flags")) {
    const auto& f = j["judge_flags"];
    if (f.contains("coherence")) q.judge.coherence = f["coherence"].get<bool>();
    if (f.contains("specificity")) q.judge.specificity = f["specificity"].get<bool>();
  }
  auto verdict = j.at("verdict").get<std::string>();
  if (verdict != "keep" && verdict != "drop") throw invalid_argument("unknown quality verdict '" + verdict + "'");
  q.verdict = verdict == "keep" ? quality_verdict::keep : quality_verdict::drop;
  if (j.contains("drop_reason") && !j["drop_reason"].is_null()) q.drop_reason = j["drop_reason"].get<std::string>();
  return q;
}

inline const std::vector<std::string>& record_fields() {
  static const std::vector<std::string> fields = {
      "doc_id", "tagged_source", "reasoning", "summary",      "instruction",    "instruction_category",
      "mode",   "language",      "quality",   "verification", "chunk_citations"};
  return fields;
}

inline nlohmann::json to_json(const summary_record& r) {
  nlohmann::json j = r.extra.is_object() ? r.extra : nlohmann::json::object();
  j["doc_id"] = r.doc_id;
  j["tagged_source"] = r.tagged_source;
  j["reasoning"] = r.reasoning;
  j["summary"] = r.summary;
  j["instruction"] = r.instruction ? nlohmann::json(*r.instruction) : nlohmann::json(nullptr);
  j["instruction_category"] = std::string(to_string(r.category));
  j["mode"] = std::string(to_string(r.mode));
  j["language"] = std::string(language_code(r.lang));
  j["quality"] = r.quality ? to_json(*r.quality) : nlohmann::json(nullptr);
  j["verification"] = r.verification ? to_json(*r.verification) : nlohmann::json(nullptr);
  if (!r.chunk_citations.empty()) j["chunk_citations"] = detail::tags_to_json(r.chunk_citations);
  return j;
}

inline summary_record record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw invalid_argument("record must be a JSON object");
  summary_record r;
  r.doc_id = j.at("doc_id").get<std::string>();
  r.tagged_source = j.value("tagged_source", std::string());
  r.reasoning = j.value("reasoning", std::string());
  r.summary = j.at("summary").get<std::string>();
  if (r.summary.empty()) throw invalid_argument("record '" + r.doc_id + "' has an empty summary");
  if (j.contains("instruction") && !j["instruction"].is_null()) r.instruction = j["instruction"].get<std::string>();
  r.category = parse_instruction_category(j.value("instruction_category", std::string("none")));
  r.mode = parse_generation_mode(j.at("mode").get<std::string>());
  r.lang = parse_language(j.at("language").get<std::string>());
  if (j.contains("quality") && !j["quality"].is_null()) r.quality = quality_from_json(j["quality"]);
  if (j.contains("verification") && !j["verification"].is_null())
    r.verification = verification_from_json(j["verification"]);
  if (j.contains("chunk_citations")) r.chunk_citations = detail::tags_from_json(j["chunk_citations"]);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(record_fields().begin(), record_fields().end(), it.key()) == record_fields().end())
      r.extra[it.key()] = it.value();
  return r;
}

} // namespace citeground
