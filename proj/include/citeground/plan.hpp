#pragma once

// Token budgets and sentence-aligned chunk planning.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citeground/error.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/tokens.hpp"

namespace citeground {

struct token_budget {
  std::size_t oneshot_limit = 30'000;
  std::size_t chunk_target = 15'000;
  std::size_t context_limit = 100'000;

  void validate() const {
    if (!(0 < chunk_target && chunk_target <= oneshot_limit && oneshot_limit <= context_limit))
      throw config_error("token budget requires 0 < chunk_target <= oneshot_limit <= context_limit (got " +
                         std::to_string(chunk_target) + ", " + std::to_string(oneshot_limit) + ", " +
                         std::to_string(context_limit) + ")");
  }
};

enum class generation_mode { oneshot, iterative };

constexpr std::string_view to_string(generation_mode m) noexcept {
  return m == generation_mode::oneshot ? "oneshot" : "iterative";
}

inline generation_mode parse_generation_mode(std::string_view s) {
  if (s == "oneshot") return generation_mode::oneshot;
  if (s == "iterative") return generation_mode::iterative;
  throw invalid_argument("unknown generation mode '" + std::string(s) + "'");
}

// A contiguous run of sentences. The span points into the planned document,
// which must outlive the chunk.
struct chunk {
  std::span<const tagged_sentence> sentences;
  std::size_t chunk_index = 0;
  std::size_t token_count = 0;

  std::string serialize() const {
    std::string out;
    for (const auto& s : sentences) {
      if (!out.empty()) out += ' ';
      out += s.serialize();
    }
    return out;
  }
};

struct chunk_plan {
  generation_mode mode = generation_mode::oneshot;
  std::vector<chunk> chunks;
  std::size_t document_tokens = 0;
};

// Sum of per-sentence counts; chunk sizes are measured the same way.
inline std::size_t document_tokens(const tagged_document& doc, const token_counter& counter = default_token_counter()) {
  std::size_t total = 0;
  for (const auto& s : doc.sentences()) total += counter.count(s.text);
  return total;
}

inline generation_mode choose_mode(std::size_t doc_tokens, const token_budget& budget) noexcept {
  return doc_tokens < budget.oneshot_limit ? generation_mode::oneshot : generation_mode::iterative;
}

// Greedy first-fit in document order. A sentence larger than chunk_target
// forms its own chunk.
inline chunk_plan plan_chunks(const tagged_document& doc, const token_budget& budget,
                              const token_counter& counter = default_token_counter()) {
  if (doc.empty()) throw invalid_argument("cannot plan chunks for an empty document");
  budget.validate();

  const auto& sentences = doc.sentences();
  std::vector<std::size_t> sizes;
  sizes.reserve(sentences.size());
  std::size_t total = 0;
  for (const auto& s : sentences) {
    sizes.push_back(counter.count(s.text));
    total += sizes.back();
  }

  chunk_plan plan;
  plan.document_tokens = total;
  plan.mode = choose_mode(total, budget);
  std::span<const tagged_sentence> all(sentences);
  if (plan.mode == generation_mode::oneshot) {
    plan.chunks.push_back({all, 0, total});
    return plan;
  }

  std::size_t begin = 0;
  std::size_t running = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > begin && running + sizes[i] > budget.chunk_target) {
      plan.chunks.push_back({all.subspan(begin, i - begin), plan.chunks.size(), running});
      begin = i;
      running = 0;
    }
    running += sizes[i];
  }
  plan.chunks.push_back({all.subspan(begin), plan.chunks.size(), running});
  return plan;
}

} // namespace citeground
