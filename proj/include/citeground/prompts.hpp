#pragma once

// Prompt construction for generation, instruction sampling and relaxation.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "citeground/error.hpp"
#include "citeground/language.hpp"
#include "citeground/plan.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/rng.hpp"
#include "citeground/templates.hpp"

namespace citeground {

struct prompt_params {
  int word_count = 400;
  int number_of_xml_tags = 7;
  language lang = language::en;

  void validate() const {
    if (word_count <= 0) throw invalid_argument("word_count must be positive");
    if (number_of_xml_tags < 1) throw invalid_argument("number_of_xml_tags must be at least 1");
  }

  template_bindings bindings() const {
    return {{"word_count", std::to_string(word_count)},
            {"number_of_xml_tags", std::to_string(number_of_xml_tags)},
            {"language", std::string(language_name(lang))}};
  }
};

// ---------------------------------------------------------------------------
// Instruction categories

enum class instruction_category { none, positive, adversarial, bullets, short_summary };

inline constexpr std::array<instruction_category, 5> all_instruction_categories = {
    instruction_category::none, instruction_category::positive, instruction_category::adversarial,
    instruction_category::bullets, instruction_category::short_summary};

// Training mix in percent: 30 / 40 / 10 / 10 / 10.
inline constexpr std::array<int, 5> instruction_category_weights = {30, 40, 10, 10, 10};

static_assert(instruction_category_weights[0] + instruction_category_weights[1] + instruction_category_weights[2] +
                  instruction_category_weights[3] + instruction_category_weights[4] ==
              100);

constexpr double category_weight(instruction_category c) noexcept {
  return instruction_category_weights[static_cast<std::size_t>(c)] / 100.0;
}

constexpr std::string_view to_string(instruction_category c) noexcept {
  switch (c) {
  case instruction_category::none: return "none";
  case instruction_category::positive: return "positive";
  case instruction_category::adversarial: return "adversarial";
  case instruction_category::bullets: return "bullets";
  case instruction_category::short_summary: return "short";
  }
  return "none";
}

inline instruction_category parse_instruction_category(std::string_view s) {
  for (auto c : all_instruction_categories)
    if (to_string(c) == s) return c;
  throw invalid_argument("unknown instruction category '" + std::string(s) + "'");
}

inline instruction_category sample_instruction_category(seeded_rng& rng) {
  auto draw = static_cast<int>(rng.below(100));
  for (std::size_t i = 0; i < instruction_category_weights.size(); ++i) {
    if (draw < instruction_category_weights[i]) return all_instruction_categories[i];
    draw -= instruction_category_weights[i];
  }
  return instruction_category::none;
}

// Strict format instructions used at generation time. relax_instruction maps
// them to the looser wording stored in training records.
inline std::string strict_bullet_instruction(int n) {
  return "Summarize in exactly " + std::to_string(n) + " bullet points. Only bullets, no introduction or conclusion.";
}

inline std::string strict_short_instruction(int n) {
  return "Write a short summary of exactly " + std::to_string(n) + " sentences. No headings, no lists.";
}

namespace detail {

struct relaxation_rule {
  std::regex strict;
  const char* relaxed;
};

inline const std::vector<relaxation_rule>& relaxation_rules() {
  static const std::vector<relaxation_rule> rules = {
      {std::regex(R"(^Summarize in exactly (\d+) bullet points\. Only bullets, no introduction or conclusion\.?$)"),
       "Summarize in $1 bullet points."},
      {std::regex(R"(^Write a short summary of exactly (\d+) sentences\. No headings, no lists\.?$)"),
       "Write a short summary of $1 sentences."},
  };
  return rules;
}

} // namespace detail

// Strict -> relaxed via a fixed table; anything else passes through.
inline std::string relax_instruction(const std::string& strict) {
  for (const auto& rule : detail::relaxation_rules())
    if (std::regex_match(strict, rule.strict)) return std::regex_replace(strict, rule.strict, rule.relaxed);
  return strict;
}

struct generated_instruction_set {
  std::vector<std::string> positives;
  std::vector<std::string> adversarials;
  language lang = language::en;
};

class response_format_error : public error {
public:
  using error::error;
};

// Parses {"positive": [3 strings], "adversarial": [3 strings]}, tolerating
// surrounding prose or code fences.
inline generated_instruction_set parse_instruction_set(std::string_view response, language lang) {
  auto open = response.find('{');
  auto close = response.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw response_format_error("instruction response contains no JSON object");
  auto json = nlohmann::json::parse(response.substr(open, close - open + 1), nullptr, false);
  if (json.is_discarded() || !json.is_object()) throw response_format_error("instruction response is not valid JSON");

  auto take = [&](const char* key) {
    std::vector<std::string> out;
    if (!json.contains(key) || !json[key].is_array()) throw response_format_error(std::string("missing '") + key + "' list");
    for (const auto& item : json[key]) {
      if (!item.is_string() || item.get<std::string>().empty())
        throw response_format_error(std::string("'") + key + "' entries must be non-empty strings");
      out.push_back(item.get<std::string>());
    }
    if (out.size() != 3)
      throw response_format_error(std::string("expected 3 '") + key + "' instructions, got " + std::to_string(out.size()));
    return out;
  };
  return {take("positive"), take("adversarial"), lang};
}

// clamp(round(word_count / 60), 4, 30), capped by the distinct tags available.
inline int choose_tag_count(const tagged_document& doc, int word_count) {
  if (word_count <= 0) throw invalid_argument("word_count must be positive");
  auto n = static_cast<int>(std::lround(word_count / 60.0));
  n = std::clamp(n, 4, 30);
  return std::min(n, static_cast<int>(doc.tag_set().size()));
}

inline constexpr std::array<int, 4> default_word_counts = {200, 300, 400, 600};

// ---------------------------------------------------------------------------
// Prompt builders

class prompt_builder {
public:
  explicit prompt_builder(template_store store) : store_(std::move(store)) {}

  const template_store& store() const noexcept { return store_; }

  std::string system_prompt(language lang) const { return store_.render("system", lang, {}); }

  std::string oneshot(const tagged_document& doc, const prompt_params& params,
                      const std::optional<std::string>& instruction = std::nullopt) const {
    params.validate();
    auto b = params.bindings();
    b["document"] = doc.serialize();
    b["instruction_block"] = instruction_block(params.lang, instruction);
    return store_.render("oneshot", params.lang, b);
  }

  std::string chunk(const citeground::chunk& c, std::size_t chunk_count, const prompt_params& params) const {
    params.validate();
    auto b = params.bindings();
    b["document"] = c.serialize();
    b["chunk_number"] = std::to_string(c.chunk_index + 1);
    b["chunk_count"] = std::to_string(std::max<std::size_t>(chunk_count, c.chunk_index + 1));
    return store_.render("chunk", params.lang, b);
  }

  std::string merge(const std::vector<std::string>& partials, const prompt_params& params,
                    const std::optional<std::string>& instruction = std::nullopt) const {
    if (partials.empty()) throw invalid_argument("merge prompt needs at least one partial summary");
    params.validate();
    std::string listing;
    for (std::size_t i = 0; i < partials.size(); ++i) {
      if (i) listing += "\n\n";
      listing += "## Part " + std::to_string(i + 1) + "\n" + partials[i];
    }
    auto b = params.bindings();
    b["partials"] = std::move(listing);
    b["instruction_block"] = instruction_block(params.lang, instruction);
    return store_.render("merge", params.lang, b);
  }

  std::string instruction_generation(std::string_view excerpt, language lang) const {
    if (excerpt.empty()) throw invalid_argument("instruction generation needs a non-empty excerpt");
    return store_.render("instructions", lang,
                         {{"language", std::string(language_name(lang))}, {"excerpt", std::string(excerpt)}});
  }

private:
  std::string instruction_block(language lang, const std::optional<std::string>& instruction) const {
    if (!instruction || instruction->empty()) return {};
    return store_.render("instruction", lang, {{"instruction", *instruction}});
  }

  template_store store_;
};

} // namespace citeground
