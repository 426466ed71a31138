#pragma once

// JSONL persistence and dataset statistics.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "citeground/error.hpp"
#include "citeground/record.hpp"
#include "citeground/tokens.hpp"

namespace citeground {

class record_file_error : public error {
public:
  record_file_error(const std::string& what, std::size_t line) : error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

inline std::string to_jsonl_line(const summary_record& r) { return to_json(r).dump(); }

inline std::size_t write_records(const std::vector<summary_record>& records, std::ostream& out) {
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
  return records.size();
}

inline std::size_t write_records(const std::vector<summary_record>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  auto n = write_records(records, out);
  if (!out) throw io_error("write failed for " + path.string());
  return n;
}

// Blank lines are skipped. Any other malformed line raises an error carrying
// its 1-based line number.
inline std::vector<summary_record> read_records(std::istream& in, const std::string& source = "<stream>") {
  std::vector<summary_record> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto json = nlohmann::json::parse(line, nullptr, false);
    if (json.is_discarded())
      throw record_file_error(source + ": line " + std::to_string(number) + " is not valid JSON", number);
    try {
      out.push_back(record_from_json(json));
    } catch (const std::exception& e) {
      throw record_file_error(source + ": line " + std::to_string(number) + ": " + e.what(), number);
    }
  }
  return out;
}

inline std::vector<summary_record> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  return read_records(in, path.string());
}

// Records that passed verification (or were never verified).
inline std::vector<summary_record> exportable_records(const std::vector<summary_record>& records) {
  std::vector<summary_record> out;
  for (const auto& r : records)
    if (r.exportable()) out.push_back(r);
  return out;
}

struct dataset_stats {
  std::size_t total_examples = 0;
  double avg_tokens = 0.0;
  double pct_iterative = 0.0;
  double pct_oneshot = 0.0;
  double pct_with_instruction = 0.0;
};

// One decimal, as displayed.
inline double round_percent(std::size_t part, std::size_t total) {
  if (total == 0) return 0.0;
  return std::round(1000.0 * static_cast<double>(part) / static_cast<double>(total)) / 10.0;
}

inline dataset_stats compute_stats(const std::vector<summary_record>& records,
                                   const token_counter& counter = default_token_counter()) {
  dataset_stats s;
  s.total_examples = records.size();
  if (records.empty()) return s;
  std::size_t tokens = 0, iterative = 0, oneshot = 0, instructed = 0;
  for (const auto& r : records) {
    tokens += counter.count(r.tagged_source);
    if (r.mode == generation_mode::iterative) ++iterative;
    else ++oneshot;
    if (r.has_instruction()) ++instructed;
  }
  s.avg_tokens = static_cast<double>(tokens) / static_cast<double>(records.size());
  s.pct_iterative = round_percent(iterative, records.size());
  s.pct_oneshot = round_percent(oneshot, records.size());
  s.pct_with_instruction = round_percent(instructed, records.size());
  return s;
}

namespace detail {

inline std::string with_thousands(long long v) {
  auto digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return v < 0 ? "-" + out : out;
}

inline std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

} // namespace detail

// Text report in the layout of the usual dataset statistics table.
inline std::string format_stats_table(const dataset_stats& s) {
  auto row = [](const std::string& label, const std::string& value) {
    std::string line = label;
    line.resize(std::max<std::size_t>(line.size() + 1, 28), ' ');
    return line + value + "\n";
  };
  std::string out;
  out += row("Attribute", "Value");
  out += row("Total Examples", detail::with_thousands(static_cast<long long>(s.total_examples)));
  out += row("Avg. Tokens", detail::with_thousands(std::llround(s.avg_tokens)));
  out += "Generation Mode\n";
  out += row("  Iterative", detail::one_decimal(s.pct_iterative) + "%");
  out += row("  Oneshot", detail::one_decimal(s.pct_oneshot) + "%");
  out += row("With Custom Instruction", detail::one_decimal(s.pct_with_instruction) + "%");
  return out;
}

inline nlohmann::json to_json(const dataset_stats& s) {
  return {{"total_examples", s.total_examples},
          {"avg_tokens", s.avg_tokens},
          {"pct_iterative", s.pct_iterative},
          {"pct_oneshot", s.pct_oneshot},
          {"pct_with_instruction", s.pct_with_instruction}};
}

} // namespace citeground
