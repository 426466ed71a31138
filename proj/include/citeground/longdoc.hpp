#pragma once

// Single-pass and chunked (map, then merge) summary generation.

#include <algorithm>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "citeground/diagnostics.hpp"
#include "citeground/error.hpp"
#include "citeground/gateway.hpp"
#include "citeground/plan.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/prompts.hpp"
#include "citeground/record.hpp"
#include "citeground/responses.hpp"
#include "citeground/tokens.hpp"
#include "citeground/verify.hpp"

namespace citeground {

class verification_failed : public error {
public:
  verification_failed(const std::string& doc_id, summary_record record)
      : error("summary for '" + doc_id + "' failed citation verification" + describe(*record.verification)),
        record_(std::move(record)) {}

  const verification_report& report() const noexcept { return *record_.verification; }
  const summary_record& record() const noexcept { return record_; }

private:
  static std::string describe(const verification_report& r) {
    std::string out;
    auto add = [&](const char* name, std::size_t n) {
      if (n) out += (out.empty() ? " (" : ", ") + std::to_string(n) + " " + name;
    };
    add("unknown", r.unknown_tags.size());
    add("duplicate", r.duplicate_tags.size());
    add("combined", r.combined_refs.size());
    add("missing", r.missing_required.size());
    add("misplaced", r.misplaced.size());
    return out.empty() ? out : out + ")";
  }

  summary_record record_;
};

// Gateway failure during generation. chunk_index is empty for the single-pass
// request and for the merge request.
class pipeline_error : public error {
public:
  pipeline_error(const std::string& what, std::optional<std::size_t> chunk_index)
      : error(what), chunk_index_(chunk_index) {}

  std::optional<std::size_t> chunk_index() const noexcept { return chunk_index_; }

private:
  std::optional<std::size_t> chunk_index_;
};

struct longdoc_options {
  token_budget budget;
  double coverage_ratio = 0.8;
  const token_counter* counter = &default_token_counter();
};

struct generation_result {
  summary_record record;
  chunk_plan plan;
  bool merge_exceeds_context = false; // merge prompt larger than context_limit
};

namespace detail {

inline std::optional<std::vector<sentence_tag>> required_from(const std::string& reasoning) {
  auto tags = extract_tag_list(reasoning);
  if (tags.empty()) return std::nullopt;
  return tags;
}

inline summary_record base_record(const tagged_document& doc, generation_mode mode,
                                  const std::optional<std::string>& instruction) {
  summary_record r;
  r.doc_id = doc.doc_id();
  r.tagged_source = doc.serialize();
  r.lang = doc.lang();
  r.mode = mode;
  r.instruction = instruction;
  return r;
}

inline void finish_record(summary_record& r, const tagged_document& doc, generation_output out) {
  r.reasoning = std::move(out.reasoning);
  r.summary = std::move(out.summary);
  r.verification = verify_summary(r.summary, doc, required_from(r.reasoning));
  if (!r.verification->passed) throw verification_failed(doc.doc_id(), r);
}

} // namespace detail

// `instruction` goes into the prompt; the stored instruction is set by the
// caller (it may be the relaxed form).
inline summary_record summarize_oneshot(const tagged_document& doc, const prompt_params& params,
                                        const std::optional<std::string>& instruction, llm_gateway& gateway,
                                        const prompt_builder& prompts) {
  auto record = detail::base_record(doc, generation_mode::oneshot, instruction);
  chat_response response;
  try {
    response = gateway.chat(prompts.system_prompt(params.lang), prompts.oneshot(doc, params, instruction),
                            "generate:oneshot");
  } catch (const transport_error& e) {
    throw pipeline_error("generation for '" + doc.doc_id() + "' failed: " + e.what(), std::nullopt);
  } catch (const request_error& e) {
    throw pipeline_error("generation for '" + doc.doc_id() + "' failed: " + e.what(), std::nullopt);
  }
  detail::finish_record(record, doc, parse_generation(response.content));
  return record;
}

inline generation_result summarize_iterative(const tagged_document& doc, const chunk_plan& plan,
                                             const prompt_params& params,
                                             const std::optional<std::string>& instruction, llm_gateway& gateway,
                                             const prompt_builder& prompts, const longdoc_options& options = {},
                                             const warning_sink& warn = stderr_warnings()) {
  if (plan.chunks.empty()) throw invalid_argument("iterative summarization needs at least one chunk");
  const auto system = prompts.system_prompt(params.lang);

  std::vector<std::future<std::string>> pending;
  pending.reserve(plan.chunks.size());
  for (const auto& c : plan.chunks) {
    std::set<sentence_tag> distinct;
    for (const auto& s : c.sentences) distinct.insert(s.tag);
    prompt_params p = params;
    p.number_of_xml_tags = std::max(1, std::min(params.number_of_xml_tags, static_cast<int>(distinct.size())));
    auto prompt = prompts.chunk(c, plan.chunks.size(), p);
    pending.push_back(std::async(std::launch::async, [&gateway, &system, prompt = std::move(prompt)] {
      return gateway.chat(system, prompt, "generate:chunk").content;
    }));
  }

  // Wait for every chunk before reporting the first failure.
  std::vector<std::string> partials;
  std::optional<pipeline_error> failure;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      partials.push_back(parse_generation(pending[i].get()).summary);
    } catch (const error& e) {
      if (!failure)
        failure.emplace("chunk " + std::to_string(i) + " of '" + doc.doc_id() + "' failed: " + e.what(), i);
    }
  }
  if (failure) throw *failure;

  generation_result result;
  result.plan = plan;
  auto& record = result.record;
  record = detail::base_record(doc, generation_mode::iterative, instruction);

  std::set<sentence_tag> partial_union;
  for (const auto& p : partials)
    for (const auto& c : extract_citations(p))
      if (partial_union.insert(c.tag).second) record.chunk_citations.push_back(c.tag);

  auto merge_prompt = prompts.merge(partials, params, instruction);
  if (options.counter->count(merge_prompt) > options.budget.context_limit) {
    result.merge_exceeds_context = true;
    if (warn)
      warn("merge prompt for '" + doc.doc_id() + "' exceeds context_limit; multi-level merging is not implemented");
  }

  chat_response merged;
  try {
    merged = gateway.chat(system, std::move(merge_prompt), "generate:merge");
  } catch (const transport_error& e) {
    throw pipeline_error("merge for '" + doc.doc_id() + "' failed: " + e.what(), std::nullopt);
  } catch (const request_error& e) {
    throw pipeline_error("merge for '" + doc.doc_id() + "' failed: " + e.what(), std::nullopt);
  }
  detail::finish_record(record, doc, parse_generation(merged.content));

  if (!partial_union.empty()) {
    std::size_t kept = 0;
    for (const auto& t : record.verification->cited_set()) kept += partial_union.contains(t);
    double ratio = static_cast<double>(kept) / static_cast<double>(partial_union.size());
    if (ratio < options.coverage_ratio && warn)
      warn("merged summary for '" + doc.doc_id() + "' keeps " + std::to_string(kept) + " of " +
           std::to_string(partial_union.size()) + " partial citations");
  }
  return result;
}

// Plans the document and dispatches to the matching mode.
inline generation_result summarize(const tagged_document& doc, const prompt_params& params,
                                   const std::optional<std::string>& instruction, llm_gateway& gateway,
                                   const prompt_builder& prompts, const longdoc_options& options = {},
                                   const warning_sink& warn = stderr_warnings()) {
  auto plan = plan_chunks(doc, options.budget, *options.counter);
  if (plan.mode == generation_mode::iterative)
    return summarize_iterative(doc, plan, params, instruction, gateway, prompts, options, warn);
  generation_result result;
  result.record = summarize_oneshot(doc, params, instruction, gateway, prompts);
  result.plan = std::move(plan);
  return result;
}

} // namespace citeground
