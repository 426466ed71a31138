#pragma once

// Five-criterion binary judge evaluation and its aggregation.

#include <array>
#include <cstdio>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "citeground/diagnostics.hpp"
#include "citeground/error.hpp"
#include "citeground/gateway.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/record.hpp"
#include "citeground/responses.hpp"
#include "citeground/templates.hpp"

namespace citeground {

enum class criterion { fact, coverage, specificity, format, instruction };

inline constexpr std::array<criterion, 5> all_criteria = {criterion::fact, criterion::coverage, criterion::specificity,
                                                          criterion::format, criterion::instruction};

struct criterion_info {
  std::string_view key;    // JSON / CLI key
  std::string_view label;  // report column
  std::string_view name;
  std::string_view question;
};

inline constexpr criterion_info describe(criterion c) noexcept {
  switch (c) {
  case criterion::fact:
    return {"fact", "Fact", "Factual Accuracy",
            "Does the summary avoid introducing new facts, entities, numbers, or claims not supported by the source "
            "content?"};
  case criterion::coverage:
    return {"coverage", "Cov.", "Coverage",
            "Does the summary cover the document's main points and key takeaways at appropriate granularity?"};
  case criterion::specificity:
    return {"specificity", "Spec.", "Specificity",
            "Are claims specific and informative rather than generic filler (e.g., \"there are several points\")?"};
  case criterion::format:
    return {"format", "Fmt.", "Format Compliance",
            "Is the output compliant with formatting instructions including language consistency, semantic-aware "
            "planning, and paragraph structure?"};
  case criterion::instruction:
    return {"instruction", "Instr.", "Instruction Following",
            "If a custom instruction is provided, is it followed appropriately?"};
  }
  return {};
}

inline criterion parse_criterion(std::string_view key) {
  for (auto c : all_criteria)
    if (describe(c).key == key) return c;
  throw invalid_argument("unknown criterion '" + std::string(key) + "'");
}

struct criterion_verdict {
  bool pass = false;
  std::string explanation;

  friend bool operator==(const criterion_verdict&, const criterion_verdict&) = default;
};

struct eval_result {
  std::string sample_id;
  std::map<criterion, criterion_verdict> verdicts; // keyed by exactly the applicable criteria

  std::set<criterion> applicable() const {
    std::set<criterion> out;
    for (const auto& [c, v] : verdicts) out.insert(c);
    return out;
  }

  friend bool operator==(const eval_result&, const eval_result&) = default;
};

// Instruction following applies only when the record carries an instruction.
inline std::set<criterion> applicable_criteria(const summary_record& record) {
  std::set<criterion> out(all_criteria.begin(), all_criteria.end());
  if (!record.has_instruction()) out.erase(criterion::instruction);
  return out;
}

// One judge request per applicable criterion, issued concurrently; the
// gateway enforces its own in-flight cap.
inline eval_result judge_sample(const summary_record& record, const tagged_document& doc, llm_gateway& gateway,
                                const template_store& templates, const warning_sink& warn = stderr_warnings()) {
  std::vector<std::pair<criterion, std::future<criterion_verdict>>> pending;
  for (auto c : applicable_criteria(record)) {
    auto info = describe(c);
    template_bindings b = {{"criterion_name", std::string(info.name)},
                           {"criterion_question", std::string(info.question)},
                           {"instruction_section",
                            record.has_instruction() ? "\nCustom instruction: " + *record.instruction + "\n" : ""},
                           {"source", doc.serialize()},
                           {"summary", record.summary}};
    auto prompt = templates.render("judge", language::en, b);
    pending.emplace_back(c, std::async(std::launch::async, [&gateway, &warn, &record, info, prompt = std::move(prompt)] {
                           auto response = gateway.chat({}, prompt, "judge:" + std::string(info.key));
                           auto v = parse_yes_no(response.content);
                           if (!v.answer) {
                             if (warn)
                               warn("unparseable " + std::string(info.key) + " verdict for '" + record.doc_id +
                                    "'; counted as fail");
                             return criterion_verdict{false, v.explanation};
                           }
                           return criterion_verdict{*v.answer, v.explanation};
                         }));
  }
  eval_result out;
  out.sample_id = record.doc_id;
  for (auto& [c, f] : pending) out.verdicts[c] = f.get();
  return out;
}

enum class averaging { micro, macro };

struct eval_report {
  std::map<criterion, double> per_criterion; // criteria with at least one applicable sample
  std::map<criterion, std::size_t> applicable_counts;
  double overall = 0.0;
  std::size_t n_samples = 0;
  averaging mode = averaging::micro;
};

// micro: total passes / total applicable checks.
// macro: mean of the per-criterion rates.
inline eval_report aggregate(const std::vector<eval_result>& results, averaging mode = averaging::micro) {
  if (results.empty()) throw invalid_argument("cannot aggregate zero evaluation results");
  std::map<criterion, std::size_t> passes, counts;
  std::size_t total_pass = 0, total = 0;
  for (const auto& r : results)
    for (const auto& [c, v] : r.verdicts) {
      ++counts[c];
      ++total;
      if (v.pass) {
        ++passes[c];
        ++total_pass;
      }
    }
  eval_report rep;
  rep.n_samples = results.size();
  rep.mode = mode;
  rep.applicable_counts = counts;
  for (const auto& [c, n] : counts) rep.per_criterion[c] = static_cast<double>(passes[c]) / static_cast<double>(n);
  if (mode == averaging::micro) {
    rep.overall = total == 0 ? 0.0 : static_cast<double>(total_pass) / static_cast<double>(total);
  } else {
    double sum = 0.0;
    for (const auto& [c, rate] : rep.per_criterion) sum += rate;
    rep.overall = rep.per_criterion.empty() ? 0.0 : sum / static_cast<double>(rep.per_criterion.size());
  }
  return rep;
}

inline std::string format_eval_table(const eval_report& rep, const std::string& model = "model") {
  auto cell = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s.starts_with("0.")) s.erase(0, 1);
    return s;
  };
  std::string out = "# overall = " +
                    std::string(rep.mode == averaging::micro ? "micro-average over all applicable checks"
                                                             : "macro-average of per-criterion rates") +
                    "; n = " + std::to_string(rep.n_samples) + "\n";
  std::string header = "Model";
  std::string row = model;
  std::size_t width = std::max<std::size_t>(model.size(), 5) + 2;
  header.resize(width, ' ');
  row.resize(width, ' ');
  for (auto c : all_criteria) {
    std::string h(describe(c).label);
    h.resize(8, ' ');
    header += h;
    auto it = rep.per_criterion.find(c);
    std::string v = it == rep.per_criterion.end() ? "n/a" : cell(it->second);
    v.resize(8, ' ');
    row += v;
  }
  header += "All\n";
  row += cell(rep.overall) + "\n";
  return out + header + row;
}

inline nlohmann::json to_json(const eval_result& r) {
  nlohmann::json verdicts = nlohmann::json::object();
  for (const auto& [c, v] : r.verdicts)
    verdicts[std::string(describe(c).key)] = {{"pass", v.pass}, {"explanation", v.explanation}};
  return {{"sample_id", r.sample_id}, {"verdicts", std::move(verdicts)}};
}

inline eval_result eval_result_from_json(const nlohmann::json& j) {
  eval_result r;
  r.sample_id = j.at("sample_id").get<std::string>();
  for (auto it = j.at("verdicts").begin(); it != j.at("verdicts").end(); ++it)
    r.verdicts[parse_criterion(it.key())] = {it.value().at("pass").get<bool>(),
                                             it.value().value("explanation", std::string())};
  return r;
}

inline nlohmann::json to_json(const eval_report& rep) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [c, rate] : rep.per_criterion) per[std::string(describe(c).key)] = rate;
  return {{"per_criterion", std::move(per)},
          {"overall", rep.overall},
          {"n_samples", rep.n_samples},
          {"averaging", rep.mode == averaging::micro ? "micro" : "macro"}};
}

} // namespace citeground
