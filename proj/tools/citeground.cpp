// citeground: sentence tagging, citation-grounded summary generation and
// dataset tooling.
//
// Exit status: 0 success, 1 fatal (configuration, I/O, bad input),
// 2 finished with failures (run --keep-going, verify with failing records).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "citeground/citeground.hpp"

namespace fs = std::filesystem;
using namespace citeground;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to the named file, or stdout for "" and "-".
class output_sink {
public:
  explicit output_sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw io_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

run_config config_or_default(const std::string& path) {
  run_config c = path.empty() ? run_config{} : load_config(path);
  return c;
}

tagged_document record_document(const summary_record& r) {
  return parse_tagged_document(r.tagged_source, r.lang, r.doc_id);
}

// Tagged source for eval: "<dir>/<doc_id>.txt" when present, else the
// record's own copy.
tagged_document eval_document(const summary_record& r, const std::string& sources) {
  if (!sources.empty()) {
    auto p = fs::path(sources) / (r.doc_id + ".txt");
    if (fs::exists(p)) return parse_tagged_document(read_file(p), r.lang, r.doc_id);
  }
  return record_document(r);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"citeground: citation-grounded summarization data toolkit"};
  app.require_subcommand(1);

  // tag
  std::string tag_input, tag_lang = "en", tag_output, tag_id;
  bool tag_jsonl = false;
  auto* tag = app.add_subcommand("tag", "Segment a text file and wrap each sentence in its tag");
  tag->add_option("input", tag_input, "Plain-text document")->required()->check(CLI::ExistingFile);
  tag->add_option("--lang", tag_lang, "Language code (de, en, fr, it, es)");
  tag->add_option("--id", tag_id, "Document id (default: file stem)");
  tag->add_option("-o,--output", tag_output, "Output file (default stdout)");
  tag->add_flag("--jsonl", tag_jsonl, "One JSON object per sentence instead of tagged text");

  // run
  std::string run_config_path, run_input, run_output, run_manifest_path, run_backend;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_workers;
  bool run_keep_going = false;
  auto* run = app.add_subcommand("run", "Generate verified, filtered training records for a directory of documents");
  run->add_option("-c,--config", run_config_path, "Configuration file")->check(CLI::ExistingFile);
  run->add_option("-i,--input", run_input, "Directory of .txt documents")->required();
  run->add_option("-o,--output", run_output, "Output JSONL")->required();
  run->add_option("--manifest", run_manifest_path, "Manifest path (default <output>.manifest.json)");
  run->add_option("--seed", run_seed, "Override the configured seed");
  run->add_option("--workers", run_workers, "Override the configured worker count");
  run->add_option("--backend", run_backend, "Override the configured backend (http|mock)");
  run->add_flag("--keep-going", run_keep_going, "Log and skip failing documents");

  // verify
  std::string verify_input, verify_output;
  auto* verify = app.add_subcommand("verify", "Check the citations of each record against its tagged source");
  verify->add_option("records", verify_input, "Record JSONL")->required()->check(CLI::ExistingFile);
  verify->add_option("-o,--output", verify_output, "Report JSONL (default stdout)");

  // score
  std::string score_input, score_output;
  std::size_t score_max_gap = 150;
  auto* score = app.add_subcommand("score", "Write one quality report per record");
  score->add_option("records", score_input, "Record JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("-o,--output", score_output, "Report JSONL (default stdout)");
  score->add_option("--max-gap", score_max_gap, "Largest allowed uncited gap in tokens");

  // filter
  std::string filter_input, filter_output;
  quality_options filter_options;
  bool filter_ignore_judge = false;
  auto* filter = app.add_subcommand("filter", "Apply the evenness percentile and gap rules; write kept records");
  filter->add_option("records", filter_input, "Record JSONL")->required()->check(CLI::ExistingFile);
  filter->add_option("-o,--output", filter_output, "Kept records (default stdout)");
  filter->add_option("--percentile", filter_options.percentile, "Drop scores below this percentile");
  filter->add_option("--max-gap", filter_options.max_gap_tokens, "Largest allowed uncited gap in tokens");
  filter->add_flag("--per-language", filter_options.per_language, "Compute the percentile per language");
  filter->add_flag("--ignore-judge", filter_ignore_judge, "Do not drop on negative judge flags");

  // render
  std::string render_input, render_output, render_id, render_format_name = "text";
  std::size_t render_index = 0;
  auto* render = app.add_subcommand("render", "Show a summary with the source sentence of each citation");
  render->add_option("records", render_input, "Record JSONL")->required()->check(CLI::ExistingFile);
  render->add_option("--format", render_format_name, "text, markdown or html");
  render->add_option("--id", render_id, "Record doc_id (default: first record)");
  render->add_option("--index", render_index, "0-based record index");
  render->add_option("-o,--output", render_output, "Output file (default stdout)");

  // stats
  std::string stats_input;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Dataset composition report");
  stats->add_option("records", stats_input, "Record JSONL")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", stats_json, "Print JSON instead of the table");

  // eval
  std::string eval_input, eval_config_path, eval_sources, eval_output, eval_model = "model", eval_backend;
  bool eval_macro = false;
  auto* eval = app.add_subcommand("eval", "Judge summaries on five binary criteria and aggregate");
  eval->add_option("records", eval_input, "Record JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("-c,--config", eval_config_path, "Configuration file (gateway settings)")->check(CLI::ExistingFile);
  eval->add_option("--sources", eval_sources, "Directory of tagged sources named <doc_id>.txt");
  eval->add_option("-o,--output", eval_output, "Per-sample results JSONL");
  eval->add_option("--model-name", eval_model, "Row label in the report");
  eval->add_option("--backend", eval_backend, "Override the configured backend (http|mock)");
  eval->add_flag("--macro", eval_macro, "Overall score as the mean of per-criterion rates");

  // merge
  std::string merge_config_path, merge_source, merge_lang = "en", merge_output, merge_instruction, merge_backend;
  std::vector<std::string> merge_partials;
  int merge_word_count = 400;
  auto* merge = app.add_subcommand("merge", "Merge partial summaries of one document and verify the result");
  merge->add_option("partials", merge_partials, "Partial summary files in document order")->required()->check(CLI::ExistingFile);
  merge->add_option("--source", merge_source, "Tagged source text")->required()->check(CLI::ExistingFile);
  merge->add_option("-c,--config", merge_config_path, "Configuration file")->check(CLI::ExistingFile);
  merge->add_option("--lang", merge_lang, "Language code");
  merge->add_option("--word-count", merge_word_count, "Target length in words");
  merge->add_option("--instruction", merge_instruction, "Custom instruction");
  merge->add_option("--backend", merge_backend, "Override the configured backend (http|mock)");
  merge->add_option("-o,--output", merge_output, "Output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tag) {
      source_document d{read_file(tag_input), parse_language(tag_lang),
                        tag_id.empty() ? fs::path(tag_input).stem().string() : tag_id};
      auto doc = tag_document(d);
      output_sink out(tag_output);
      if (tag_jsonl) {
        for (const auto& s : doc.sentences())
          out.stream() << nlohmann::json{{"index", s.index}, {"tag", s.tag.str()}, {"text", s.text}}.dump() << '\n';
      } else {
        out.stream() << doc.serialize() << '\n';
      }
      return 0;
    }

    if (*run) {
      auto config = config_or_default(run_config_path);
      if (run_seed) config.seed = *run_seed;
      if (run_workers) config.workers = *run_workers;
      if (!run_backend.empty()) config.backend = run_backend;
      run_options options;
      options.keep_going = run_keep_going;
      if (!run_manifest_path.empty()) options.manifest_path = run_manifest_path;
      auto outcome = run_pipeline(config, run_input, run_output, options);
      std::cout << "run: " << outcome.manifest.summary_line() << '\n';
      return outcome.exit_code;
    }

    if (*verify) {
      auto records = read_records(fs::path(verify_input));
      output_sink out(verify_output);
      std::size_t failed = 0;
      for (const auto& r : records) {
        auto doc = record_document(r);
        auto required = extract_tag_list(r.reasoning);
        auto report = verify_summary(r.summary, doc,
                                     required.empty() ? std::nullopt : std::optional(std::move(required)));
        if (!report.passed) ++failed;
        auto j = to_json(report);
        j["doc_id"] = r.doc_id;
        out.stream() << j.dump() << '\n';
      }
      std::cerr << "verify: " << records.size() - failed << " of " << records.size() << " records passed\n";
      return failed ? 2 : 0;
    }

    if (*score) {
      auto records = read_records(fs::path(score_input));
      output_sink out(score_output);
      quality_options options;
      options.max_gap_tokens = score_max_gap;
      for (const auto& r : records) {
        auto j = to_json(score_summary(r.summary, options));
        j["doc_id"] = r.doc_id;
        out.stream() << j.dump() << '\n';
      }
      return 0;
    }

    if (*filter) {
      auto records = read_records(fs::path(filter_input));
      filter_options.require_judge_flags = !filter_ignore_judge;
      auto keep = apply_quality_filter(records, filter_options);
      std::vector<summary_record> kept;
      for (std::size_t i = 0; i < records.size(); ++i)
        if (keep[i]) kept.push_back(records[i]);
      output_sink out(filter_output);
      write_records(kept, out.stream());
      std::cerr << "filter: kept " << kept.size() << " of " << records.size() << " records\n";
      return 0;
    }

    if (*render) {
      auto records = read_records(fs::path(render_input));
      const summary_record* chosen = nullptr;
      if (!render_id.empty()) {
        for (const auto& r : records)
          if (r.doc_id == render_id) {
            chosen = &r;
            break;
          }
        if (!chosen) throw invalid_argument("no record with doc_id '" + render_id + "'");
      } else {
        if (render_index >= records.size())
          throw invalid_argument("record index " + std::to_string(render_index) + " out of range");
        chosen = &records[render_index];
      }
      output_sink out(render_output);
      out.stream() << render_annotated(*chosen, record_document(*chosen), parse_render_format(render_format_name));
      return 0;
    }

    if (*stats) {
      auto s = compute_stats(read_records(fs::path(stats_input)));
      if (stats_json) std::cout << to_json(s).dump(2) << '\n';
      else std::cout << format_stats_table(s);
      return 0;
    }

    if (*eval) {
      auto config = config_or_default(eval_config_path);
      if (!eval_backend.empty()) config.backend = eval_backend;
      config.validate();
      auto records = read_records(fs::path(eval_input));
      template_store templates(config.template_dir);
      llm_gateway gateway(make_transport(config), make_gateway_options(config));
      std::vector<eval_result> results;
      for (const auto& r : records) results.push_back(judge_sample(r, eval_document(r, eval_sources), gateway, templates));
      if (!eval_output.empty()) {
        output_sink out(eval_output);
        for (const auto& r : results) out.stream() << to_json(r).dump() << '\n';
      }
      std::cout << format_eval_table(aggregate(results, eval_macro ? averaging::macro : averaging::micro), eval_model);
      return 0;
    }

    if (*merge) {
      auto config = config_or_default(merge_config_path);
      if (!merge_backend.empty()) config.backend = merge_backend;
      config.validate();
      auto lang = parse_language(merge_lang);
      auto doc = parse_tagged_document(read_file(merge_source), lang, fs::path(merge_source).stem().string());
      std::vector<std::string> partials;
      for (const auto& p : merge_partials) partials.push_back(parse_generation(read_file(p)).summary);

      prompt_builder prompts{template_store(config.template_dir)};
      llm_gateway gateway(make_transport(config), make_gateway_options(config));
      prompt_params params;
      params.lang = lang;
      params.word_count = merge_word_count;
      std::optional<std::string> instruction;
      if (!merge_instruction.empty()) instruction = merge_instruction;
      auto response =
          gateway.chat(prompts.system_prompt(lang), prompts.merge(partials, params, instruction), "generate:merge");
      auto merged = parse_generation(response.content);
      auto required = extract_tag_list(merged.reasoning);
      auto report =
          verify_summary(merged.summary, doc, required.empty() ? std::nullopt : std::optional(std::move(required)));
      output_sink out(merge_output);
      out.stream() << nlohmann::json{{"reasoning", merged.reasoning},
                                     {"summary", merged.summary},
                                     {"verification", to_json(report)}}
                          .dump(2)
                   << '\n';
      return report.passed ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "citeground: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
