#pragma once

// Citation-distribution scoring, percentile filtering and judge-based quality
// annotation.
//
// Evenness: k sorted positions in [0,1] split [0,1] into k+1 gaps g_i. With
// the uniform gap u = 1/(k+1),
//     evenness = 1 - 0.5 * sum_i |g_i - u|
// i.e. one minus the total-variation distance from uniform spacing. It is
// 1 exactly for uniform gaps and 0 for k = 0.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citeground/diagnostics.hpp"
#include "citeground/error.hpp"
#include "citeground/gateway.hpp"
#include "citeground/record.hpp"
#include "citeground/responses.hpp"
#include "citeground/templates.hpp"
#include "citeground/tokens.hpp"
#include "citeground/verify.hpp"

namespace citeground {

inline constexpr const char* evenness_definition = "1 - 0.5 * sum_i |gap_i - 1/(k+1)|, gaps bounded by 0 and 1";

// Token index of each citation start over total summary tokens, sorted.
inline std::vector<double> citation_positions(std::string_view summary,
                                              const token_counter& counter = default_token_counter()) {
  auto total = counter.count(summary);
  std::vector<double> out;
  if (total == 0) return out;
  for (const auto& c : extract_citations(summary))
    out.push_back(static_cast<double>(counter.count(summary.substr(0, c.char_offset))) / static_cast<double>(total));
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline void check_positions(const std::vector<double>& positions) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    double p = positions[i];
    if (!(p >= 0.0 && p <= 1.0)) throw invalid_argument("citation position out of [0,1]: " + std::to_string(p));
    if (i > 0 && p < positions[i - 1]) throw invalid_argument("citation positions must be sorted ascending");
  }
}

inline std::vector<double> gaps(const std::vector<double>& positions) {
  std::vector<double> out;
  out.reserve(positions.size() + 1);
  double prev = 0.0;
  for (double p : positions) {
    out.push_back(p - prev);
    prev = p;
  }
  out.push_back(1.0 - prev);
  return out;
}

} // namespace detail

inline double evenness(const std::vector<double>& positions) {
  detail::check_positions(positions);
  if (positions.empty()) return 0.0;
  const double ideal = 1.0 / static_cast<double>(positions.size() + 1);
  double deviation = 0.0;
  for (double g : detail::gaps(positions)) deviation += std::abs(g - ideal);
  return std::clamp(1.0 - 0.5 * deviation, 0.0, 1.0);
}

// Largest gap, boundaries included, scaled to tokens and rounded.
inline std::size_t max_uncited_gap(const std::vector<double>& positions, std::size_t total_tokens) {
  detail::check_positions(positions);
  auto g = detail::gaps(positions);
  double largest = *std::max_element(g.begin(), g.end());
  return static_cast<std::size_t>(std::llround(largest * static_cast<double>(total_tokens)));
}

// Nearest-rank cut: with n scores sorted ascending, the threshold is the
// element at 0-based index min(ceil(p * n / 100), n - 1). Scores strictly
// below the threshold are dropped, so ceil(p * n / 100) distinct scores go
// and ties at the threshold stay.
inline double percentile_threshold(std::vector<double> scores, double percentile) {
  if (scores.empty()) throw invalid_argument("percentile filter needs at least one score");
  if (!(percentile >= 0.0 && percentile <= 100.0)) throw invalid_argument("percentile must lie in [0, 100]");
  std::sort(scores.begin(), scores.end());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(scores.size()) / 100.0 - 1e-9));
  return scores[std::min(rank, scores.size() - 1)];
}

// true = keep.
inline std::vector<bool> percentile_filter(const std::vector<double>& scores, double percentile = 15.0) {
  const double threshold = percentile_threshold(scores, percentile);
  std::vector<bool> keep;
  keep.reserve(scores.size());
  for (double s : scores) keep.push_back(!(s < threshold));
  return keep;
}

struct quality_options {
  double percentile = 15.0;
  std::size_t max_gap_tokens = 150;
  bool per_language = false;
  bool require_judge_flags = true; // drop when a judge flag is present and false
};

// Per-record scores without corpus-level percentile filtering. The verdict
// reflects the gap rule only.
inline quality_report score_summary(std::string_view summary, const quality_options& options = {},
                                    const token_counter& counter = default_token_counter()) {
  quality_report q;
  q.positions = citation_positions(summary, counter);
  q.evenness = evenness(q.positions);
  q.max_gap_tokens = max_uncited_gap(q.positions, counter.count(summary));
  if (q.max_gap_tokens > options.max_gap_tokens) {
    q.verdict = quality_verdict::drop;
    q.drop_reason = "uncited_gap";
  }
  return q;
}

// Scores every record (keeping existing judge flags), then applies the
// evenness percentile (globally or per language), the gap rule and judge
// flags. Returns the keep mask; each record's quality field is updated.
inline std::vector<bool> apply_quality_filter(std::vector<summary_record>& records, const quality_options& options = {},
                                              const token_counter& counter = default_token_counter()) {
  std::vector<bool> keep(records.size(), true);
  if (records.empty()) return keep;

  for (auto& r : records) {
    judge_flags flags = r.quality ? r.quality->judge : judge_flags{};
    r.quality = score_summary(r.summary, options, counter);
    r.quality->judge = flags;
  }

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i)
    groups[options.per_language ? std::string(language_code(records[i].lang)) : std::string()].push_back(i);
  for (const auto& [key, members] : groups) {
    std::vector<double> scores;
    for (auto i : members) scores.push_back(records[i].quality->evenness);
    auto mask = percentile_filter(scores, options.percentile);
    for (std::size_t k = 0; k < members.size(); ++k)
      if (!mask[k]) {
        auto& q = *records[members[k]].quality;
        q.verdict = quality_verdict::drop;
        q.drop_reason = "evenness_percentile";
      }
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& q = *records[i].quality;
    if (q.verdict == quality_verdict::keep && options.require_judge_flags) {
      if (q.judge.coherence == false) {
        q.verdict = quality_verdict::drop;
        q.drop_reason = "judge_coherence";
      } else if (q.judge.specificity == false) {
        q.verdict = quality_verdict::drop;
        q.drop_reason = "judge_specificity";
      }
    }
    keep[i] = q.verdict == quality_verdict::keep;
  }
  return keep;
}

// ---------------------------------------------------------------------------
// LLM-backed steps

inline constexpr const char* coherence_question =
    "Is the reasoning coherent, and does it plan a summary whose citations are spread across the whole text?";
inline constexpr const char* specificity_question =
    "Are the summary's claims specific and informative rather than generic filler (e.g., \"there are several "
    "points\")?";

// One yes/no judge request per flag. Unparseable answers count as false.
inline judge_flags annotate_quality(const summary_record& record, llm_gateway& gateway, const template_store& templates,
                                    const warning_sink& warn = stderr_warnings()) {
  auto ask = [&](const char* name, const char* question) {
    auto prompt = templates.render("quality", record.lang,
                                   {{"question", question}, {"reasoning", record.reasoning}, {"summary", record.summary}});
    auto response = gateway.chat({}, std::move(prompt), std::string("quality:") + name);
    auto verdict = parse_yes_no(response.content);
    if (!verdict.answer) {
      if (warn) warn("unparseable " + std::string(name) + " judgement for '" + record.doc_id + "'");
      return false;
    }
    return *verdict.answer;
  };
  judge_flags flags;
  flags.coherence = ask("coherence", coherence_question);
  flags.specificity = ask("specificity", specificity_question);
  return flags;
}

// Replaces the reasoning with a first-person rewrite. The rewrite is rejected
// (original returned, warning emitted) unless the model echoes the summary
// byte for byte.
inline summary_record rewrite_first_person(const summary_record& record, llm_gateway& gateway,
                                           const template_store& templates,
                                           const warning_sink& warn = stderr_warnings()) {
  if (trim(record.reasoning).empty()) return record;
  auto prompt = templates.render("rewrite", record.lang,
                                 {{"language", std::string(language_name(record.lang))},
                                  {"reasoning", record.reasoning},
                                  {"summary", record.summary}});
  auto response = gateway.chat({}, std::move(prompt), "rewrite");
  auto out = parse_generation(response.content);
  if (out.summary != record.summary) {
    if (warn) warn("first-person rewrite for '" + record.doc_id + "' changed the summary; keeping the original");
    return record;
  }
  if (out.reasoning.empty()) {
    if (warn) warn("first-person rewrite for '" + record.doc_id + "' returned no reasoning; keeping the original");
    return record;
  }
  summary_record updated = record;
  updated.reasoning = std::move(out.reasoning);
  return updated;
}

} // namespace citeground
