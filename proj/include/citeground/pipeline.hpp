#pragma once

// End-to-end generation run over a directory of plain-text documents:
// tag, plan, sample an instruction, generate, verify, judge, filter, rewrite.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "citeground/config.hpp"
#include "citeground/dataset.hpp"
#include "citeground/diagnostics.hpp"
#include "citeground/error.hpp"
#include "citeground/gateway.hpp"
#include "citeground/http_transport.hpp"
#include "citeground/longdoc.hpp"
#include "citeground/mock.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/prompts.hpp"
#include "citeground/quality.hpp"
#include "citeground/rng.hpp"
#include "citeground/templates.hpp"

namespace citeground {

// Input file "<id>.txt" uses the configured language; "<id>.<lang>.txt"
// overrides it.
inline source_document read_source_document(const std::filesystem::path& path, language fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  source_document d;
  d.raw_text = buf.str();
  d.doc_id = path.stem().string();
  d.lang = fallback;
  auto dot = d.doc_id.rfind('.');
  if (dot != std::string::npos) {
    try {
      d.lang = parse_language(std::string_view(d.doc_id).substr(dot + 1));
      d.doc_id.resize(dot);
    } catch (const unsupported_language&) {
    }
  }
  return d;
}

inline std::vector<std::filesystem::path> list_input_documents(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw io_error("input directory not found: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Per-document random choices, drawn up front in document order so results do
// not depend on scheduling.
struct document_draw {
  instruction_category category = instruction_category::none;
  int word_count = 400;
  std::size_t pick = 0; // which generated instruction to use
  int count = 3;        // bullet or sentence count for strict instructions
};

inline std::vector<document_draw> draw_documents(std::size_t n, std::uint64_t seed, const std::vector<int>& word_counts) {
  seeded_rng rng(seed);
  std::vector<document_draw> out(n);
  for (auto& d : out) {
    d.category = sample_instruction_category(rng);
    d.word_count = word_counts[rng.below(word_counts.size())];
    d.pick = rng.below(3);
    d.count = static_cast<int>(rng.between(3, 7));
  }
  return out;
}

inline std::shared_ptr<chat_transport> make_transport(const run_config& c) {
  if (c.backend == "mock")
    return std::make_shared<mock_transport>(c.mock_rules.empty() ? std::vector<mock_rule>{} : read_mock_rules(c.mock_rules));
  if (c.model.empty()) throw config_error("model must be set for the http backend");
  return std::make_shared<http_transport>(c.base_url, std::chrono::seconds(c.timeout_secs));
}

inline gateway_options make_gateway_options(const run_config& c) {
  gateway_options o;
  o.max_attempts = c.retries;
  o.max_in_flight = static_cast<std::size_t>(c.max_in_flight);
  o.timeout = std::chrono::seconds(c.timeout_secs);
  o.model_name = c.model;
  return o;
}

struct run_options {
  bool keep_going = false;
  std::optional<std::filesystem::path> manifest_path; // default: <output>.manifest.json
};

struct run_manifest {
  std::uint64_t seed = 0;
  std::string config_md5;
  std::size_t documents = 0;
  std::size_t generated = 0;
  std::size_t verification_passed = 0;
  std::size_t quality_kept = 0;
  std::vector<std::string> verification_failures; // doc ids
  std::vector<std::pair<std::string, std::string>> failures; // doc id, error

  nlohmann::json to_json() const {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& [id, what] : failures) f.push_back({{"doc_id", id}, {"error", what}});
    return {{"seed", seed},
            {"config_md5", config_md5},
            {"documents", documents},
            {"generated", generated},
            {"verification_passed", verification_passed},
            {"quality_kept", quality_kept},
            {"verification_failures", verification_failures},
            {"failures", std::move(f)}};
  }

  std::string summary_line() const {
    return "documents " + std::to_string(documents) + ", generated " + std::to_string(generated) +
           ", verification passed " + std::to_string(verification_passed) + ", kept " + std::to_string(quality_kept) +
           ", failed " + std::to_string(failures.size());
  }
};

struct run_outcome {
  run_manifest manifest;
  int exit_code = 0;
};

namespace detail {

inline std::string instruction_excerpt(const tagged_document& doc, std::size_t max_tokens = 2000) {
  std::string out;
  std::size_t used = 0;
  for (const auto& s : doc.sentences()) {
    auto n = count_tokens(s.text);
    if (!out.empty() && used + n > max_tokens) break;
    if (!out.empty()) out += ' ';
    out += s.text;
    used += n;
  }
  return out;
}

// Prompt instruction and stored (relaxed) instruction.
struct chosen_instruction {
  std::optional<std::string> prompt;
  std::optional<std::string> stored;
};

inline chosen_instruction choose_instruction(const tagged_document& doc, const document_draw& draw,
                                             llm_gateway& gateway, const prompt_builder& prompts) {
  switch (draw.category) {
  case instruction_category::none: return {};
  case instruction_category::bullets: {
    auto strict = strict_bullet_instruction(draw.count);
    return {strict, relax_instruction(strict)};
  }
  case instruction_category::short_summary: {
    auto strict = strict_short_instruction(draw.count);
    return {strict, relax_instruction(strict)};
  }
  case instruction_category::positive:
  case instruction_category::adversarial: {
    auto response = gateway.chat({}, prompts.instruction_generation(instruction_excerpt(doc), doc.lang()), "instructions");
    auto set = parse_instruction_set(response.content, doc.lang());
    const auto& pool = draw.category == instruction_category::positive ? set.positives : set.adversarials;
    const auto& text = pool[draw.pick % pool.size()];
    return {text, text};
  }
  }
  return {};
}

struct document_outcome {
  std::string doc_id;
  bool generated = false;
  std::optional<summary_record> record; // verification passed
  std::optional<std::string> failure;
};

} // namespace detail

inline run_outcome run_pipeline(const run_config& config, const std::filesystem::path& input_dir,
                                const std::filesystem::path& output, const run_options& options = {},
                                const warning_sink& warn = stderr_warnings(),
                                std::shared_ptr<chat_transport> transport = nullptr) {
  config.validate();
  auto files = list_input_documents(input_dir);

  abbreviation_table abbreviations = abbreviation_table::seeded();
  if (!config.abbreviation_dir.empty()) abbreviations.extend_from_directory(config.abbreviation_dir);
  const rule_segmenter segmenter(abbreviations);
  const prompt_builder prompts{template_store(config.template_dir, warn)};
  llm_gateway gateway(transport ? std::move(transport) : make_transport(config), make_gateway_options(config));
  longdoc_options ldo;
  ldo.budget = config.budget;
  ldo.coverage_ratio = config.coverage_ratio;

  const auto draws = draw_documents(files.size(), config.seed, config.word_counts);
  std::vector<detail::document_outcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto process = [&](std::size_t i) {
    auto& out = outcomes[i];
    out.doc_id = files[i].stem().string();
    try {
      auto source = read_source_document(files[i], config.default_language);
      out.doc_id = source.doc_id;
      auto doc = tag_document(source, segmenter);
      const auto& draw = draws[i];
      prompt_params params;
      params.lang = doc.lang();
      params.word_count = draw.word_count;
      params.number_of_xml_tags = choose_tag_count(doc, draw.word_count);
      auto instruction = detail::choose_instruction(doc, draw, gateway, prompts);
      try {
        auto result = summarize(doc, params, instruction.prompt, gateway, prompts, ldo, warn);
        out.generated = true;
        auto& record = result.record;
        record.instruction = instruction.stored;
        record.category = draw.category;
        record.quality = quality_report{};
        record.quality->judge = annotate_quality(record, gateway, prompts.store(), warn);
        out.record = std::move(record);
      } catch (const verification_failed& e) {
        out.generated = true;
        if (warn) warn(e.what());
      }
    } catch (const std::exception& e) {
      out.failure = e.what();
      if (warn) warn("document '" + out.doc_id + "' failed: " + e.what());
      if (!options.keep_going) stop = true;
    }
  };

  auto worker = [&] {
    for (std::size_t i; !stop && (i = next++) < files.size();) process(i);
  };
  std::vector<std::thread> pool;
  auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), std::max<std::size_t>(files.size(), 1));
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  run_outcome result;
  auto& m = result.manifest;
  m.seed = config.seed;
  m.config_md5 = config.hash();
  m.documents = files.size();

  std::vector<summary_record> passed;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.failure) m.failures.emplace_back(o.doc_id, *o.failure);
    if (o.generated) ++m.generated;
    if (o.record) passed.push_back(*o.record);
    else if (o.generated) m.verification_failures.push_back(o.doc_id);
  }
  if (!m.failures.empty() && !options.keep_going)
    throw pipeline_error("document '" + m.failures.front().first + "' failed: " + m.failures.front().second, std::nullopt);
  m.verification_passed = passed.size();

  quality_options qo;
  qo.percentile = config.percentile;
  qo.max_gap_tokens = config.max_gap_tokens;
  qo.per_language = config.per_language_percentile;
  std::vector<bool> keep = apply_quality_filter(passed, qo);

  std::vector<std::size_t> kept_index;
  for (std::size_t i = 0; i < passed.size(); ++i)
    if (keep[i]) kept_index.push_back(i);
  std::vector<summary_record> kept(kept_index.size());
  next = 0;
  auto rewriter = [&] {
    for (std::size_t k; (k = next++) < kept_index.size();)
      kept[k] = rewrite_first_person(passed[kept_index[k]], gateway, prompts.store(), warn);
  };
  pool.clear();
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(rewriter);
  for (auto& t : pool) t.join();
  m.quality_kept = kept.size();

  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  write_records(kept, output);
  auto manifest_path = options.manifest_path.value_or(std::filesystem::path(output.string() + ".manifest.json"));
  std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
  if (!mf) throw io_error("cannot write manifest " + manifest_path.string());
  mf << m.to_json().dump(2) << '\n';

  result.exit_code = m.failures.empty() ? 0 : 2;
  return result;
}

} // namespace citeground
