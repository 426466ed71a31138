#pragma once

// Run configuration: a flat key = value file. "[section]" lines are accepted
// and ignored, "#" starts a comment line, values may be double-quoted.
//
//   [budget]
//   oneshot_limit = 30000
//   [gateway]
//   base_url = "http://localhost:8000/v1"
//   model = "my-model"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "citeground/error.hpp"
#include "citeground/language.hpp"
#include "citeground/md5.hpp"
#include "citeground/plan.hpp"
#include "citeground/responses.hpp"

#ifndef CITEGROUND_TEMPLATE_DIR
#define CITEGROUND_TEMPLATE_DIR "templates"
#endif

namespace citeground {

struct run_config {
  token_budget budget;

  std::string backend = "http"; // http | mock
  std::string base_url = "http://localhost:8000/v1";
  std::string model;
  int max_in_flight = 4;
  int retries = 3;
  int timeout_secs = 120;
  std::string mock_rules; // JSONL reply rules for the mock backend

  std::string template_dir = CITEGROUND_TEMPLATE_DIR;
  std::string abbreviation_dir;
  language default_language = language::en;

  std::uint64_t seed = 0;
  std::vector<int> word_counts = {200, 300, 400, 600};
  int workers = 4;

  double percentile = 15.0;
  std::size_t max_gap_tokens = 150;
  bool per_language_percentile = false;
  double coverage_ratio = 0.8;

  void validate() const {
    budget.validate();
    if (backend != "http" && backend != "mock") throw config_error("backend must be 'http' or 'mock', got '" + backend + "'");
    if (max_in_flight < 1) throw config_error("max_in_flight must be at least 1");
    if (retries < 1) throw config_error("retries must be at least 1");
    if (timeout_secs < 1) throw config_error("timeout_secs must be at least 1");
    if (workers < 1) throw config_error("workers must be at least 1");
    if (word_counts.empty()) throw config_error("word_counts must not be empty");
    for (int w : word_counts)
      if (w <= 0) throw config_error("word_counts entries must be positive");
    if (!(percentile >= 0.0 && percentile <= 100.0)) throw config_error("percentile must lie in [0, 100]");
    if (!(coverage_ratio >= 0.0 && coverage_ratio <= 1.0)) throw config_error("coverage_ratio must lie in [0, 1]");
  }

  // Canonical text; its MD5 identifies the effective configuration.
  std::string canonical() const {
    std::ostringstream out;
    out << "abbreviation_dir = " << abbreviation_dir << "\n"
        << "backend = " << backend << "\n"
        << "base_url = " << base_url << "\n"
        << "chunk_target = " << budget.chunk_target << "\n"
        << "context_limit = " << budget.context_limit << "\n"
        << "coverage_ratio = " << coverage_ratio << "\n"
        << "language = " << language_code(default_language) << "\n"
        << "max_gap_tokens = " << max_gap_tokens << "\n"
        << "max_in_flight = " << max_in_flight << "\n"
        << "mock_rules = " << mock_rules << "\n"
        << "model = " << model << "\n"
        << "oneshot_limit = " << budget.oneshot_limit << "\n"
        << "per_language_percentile = " << (per_language_percentile ? "true" : "false") << "\n"
        << "percentile = " << percentile << "\n"
        << "retries = " << retries << "\n"
        << "seed = " << seed << "\n"
        << "template_dir = " << template_dir << "\n"
        << "timeout_secs = " << timeout_secs << "\n"
        << "word_counts = ";
    for (std::size_t i = 0; i < word_counts.size(); ++i) out << (i ? "," : "") << word_counts[i];
    out << "\nworkers = " << workers << "\n";
    return out.str();
  }

  std::string hash() const { return md5::hex(canonical()); }
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size())
    throw config_error("bad value for " + key + ": '" + value + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw config_error("bad value for " + key + ": '" + value + "' (expected true or false)");
}

} // namespace detail

// Applies one key. Unknown keys are an error so typos do not pass silently.
inline void set_config_value(run_config& c, const std::string& key, std::string value) {
  using detail::parse_number;
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

  if (key == "oneshot_limit") c.budget.oneshot_limit = parse_number<std::size_t>(key, value);
  else if (key == "chunk_target") c.budget.chunk_target = parse_number<std::size_t>(key, value);
  else if (key == "context_limit") c.budget.context_limit = parse_number<std::size_t>(key, value);
  else if (key == "backend") c.backend = value;
  else if (key == "base_url") c.base_url = value;
  else if (key == "model") c.model = value;
  else if (key == "max_in_flight") c.max_in_flight = parse_number<int>(key, value);
  else if (key == "retries") c.retries = parse_number<int>(key, value);
  else if (key == "timeout_secs") c.timeout_secs = parse_number<int>(key, value);
  else if (key == "mock_rules") c.mock_rules = value;
  else if (key == "template_dir") c.template_dir = value;
  else if (key == "abbreviation_dir") c.abbreviation_dir = value;
  else if (key == "language") {
    try {
      c.default_language = parse_language(value);
    } catch (const error& e) {
      throw config_error(e.what());
    }
  } else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workers") c.workers = parse_number<int>(key, value);
  else if (key == "percentile") c.percentile = parse_number<double>(key, value);
  else if (key == "max_gap_tokens") c.max_gap_tokens = parse_number<std::size_t>(key, value);
  else if (key == "per_language_percentile") c.per_language_percentile = detail::parse_bool(key, value);
  else if (key == "coverage_ratio") c.coverage_ratio = parse_number<double>(key, value);
  else if (key == "word_counts") {
    c.word_counts.clear();
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) c.word_counts.push_back(parse_number<int>(key, trim(item)));
  } else {
    throw config_error("unknown configuration key '" + key + "'");
  }
}

inline run_config parse_config(std::string_view text, run_config base = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw config_error("line " + std::to_string(number) + ": unterminated section header");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(number) + ": expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw config_error("line " + std::to_string(number) + ": empty key");
    set_config_value(base, key, trim(std::string_view(t).substr(eq + 1)));
  }
  return base;
}

inline run_config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto c = parse_config(buf.str());
  // Relative paths in the file are relative to the file.
  auto base = path.parent_path();
  for (auto* p : {&c.template_dir, &c.mock_rules, &c.abbreviation_dir})
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  return c;
}

} // namespace citeground
