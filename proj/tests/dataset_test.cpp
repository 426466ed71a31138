#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace citeground;

namespace {

summary_record sample(int i) {
  auto doc = testing_support::doc_from("Alpha " + std::to_string(i) + " rose. Beta fell.", "doc" + std::to_string(i));
  summary_record r;
  r.doc_id = doc.doc_id();
  r.tagged_source = doc.serialize();
  r.reasoning = "Plan.";
  r.summary = "Alpha rose [" + doc.sentences()[0].tag.open() + "].";
  if (i % 2) r.instruction = "Summarize in 3 bullet points.";
  r.category = i % 2 ? instruction_category::bullets : instruction_category::none;
  r.mode = i == 2 ? generation_mode::iterative : generation_mode::oneshot;
  r.lang = i == 1 ? language::de : language::en;
  r.verification = verify_summary(r.summary, doc);
  r.quality = score_summary(r.summary);
  r.quality->judge.coherence = true;
  if (i == 2) r.chunk_citations = {doc.sentences()[0].tag};
  return r;
}

} // namespace

TEST(Records, RoundTripThree) {
  std::vector<summary_record> records = {sample(0), sample(1), sample(2)};
  std::stringstream buf;
  EXPECT_EQ(write_records(records, buf), 3u);
  auto back = read_records(buf);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(to_json(back[i]), to_json(records[i]));
    EXPECT_EQ(back[i].verification, records[i].verification);
    EXPECT_EQ(back[i].quality, records[i].quality);
    EXPECT_EQ(back[i].instruction, records[i].instruction);
  }
}

TEST(Records, InstructionNullWhenAbsent) {
  auto j = to_json(sample(0));
  ASSERT_TRUE(j.contains("instruction"));
  EXPECT_TRUE(j["instruction"].is_null());
}

TEST(Records, UnknownFieldsPreserved) {
  auto j = to_json(sample(0));
  j["source_url"] = "https://example.org/a";
  j["extra_score"] = {{"x", 1}};
  std::stringstream in(j.dump() + "\n");
  auto back = read_records(in);
  std::stringstream out;
  write_records(back, out);
  EXPECT_EQ(nlohmann::json::parse(out.str()), j);
}

TEST(Records, TruncatedLineNamesLineTwo) {
  auto line = to_jsonl_line(sample(0));
  std::stringstream in(line + "\n" + line.substr(0, line.size() / 2) + "\n" + line + "\n");
  try {
    read_records(in);
    FAIL();
  } catch (const record_file_error& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Records, EmptyFileAndBlankLines) {
  std::stringstream empty;
  EXPECT_TRUE(read_records(empty).empty());
  std::stringstream blanks("\n  \n" + to_jsonl_line(sample(0)) + "\n\n");
  EXPECT_EQ(read_records(blanks).size(), 1u);
}

TEST(Records, InvalidFieldValues) {
  auto j = to_json(sample(0));
  j["mode"] = "sideways";
  std::stringstream in(j.dump() + "\n");
  EXPECT_THROW(read_records(in), record_file_error);
}

TEST(Records, FailedVerificationIsNotExportable) {
  auto r = sample(0);
  r.verification->passed = false;
  auto kept = exportable_records({r, sample(1)});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].doc_id, "doc1");
}

TEST(Records, FileRoundTrip) {
  testing_support::temp_dir dir;
  std::vector<summary_record> records = {sample(0), sample(1)};
  write_records(records, dir / "r.jsonl");
  EXPECT_EQ(read_records(dir / "r.jsonl").size(), 2u);
  EXPECT_THROW(read_records(dir / "missing.jsonl"), io_error);
}

TEST(Stats, KnownComposition) {
  std::vector<summary_record> records;
  for (int i = 0; i < 100; ++i) {
    summary_record r;
    r.doc_id = std::to_string(i);
    r.tagged_source = std::string(400, 'x');
    r.summary = "s";
    r.mode = i < 58 ? generation_mode::iterative : generation_mode::oneshot;
    if (i % 10 < 7) r.instruction = "Do it.";
    records.push_back(r);
  }
  auto s = compute_stats(records);
  EXPECT_EQ(s.total_examples, 100u);
  EXPECT_EQ(s.pct_iterative, 58.0);
  EXPECT_EQ(s.pct_oneshot, 42.0);
  EXPECT_EQ(s.pct_with_instruction, 70.0);
  EXPECT_EQ(s.avg_tokens, 100.0);
}

TEST(Stats, Empty) {
  auto s = compute_stats({});
  EXPECT_EQ(s.total_examples, 0u);
  EXPECT_EQ(s.pct_iterative, 0.0);
  EXPECT_EQ(s.pct_with_instruction, 0.0);
}

TEST(Stats, TableRows) {
  dataset_stats s{41560, 3412.4, 33.3, 66.7, 36.8};
  auto table = format_stats_table(s);
  for (const char* row : {"Total Examples", "Avg. Tokens", "Generation Mode", "Iterative", "Oneshot", "With Custom Instruction"})
    EXPECT_NE(table.find(row), std::string::npos) << row;
  EXPECT_NE(table.find("41,560"), std::string::npos);
  EXPECT_NE(table.find("3,412"), std::string::npos);
  EXPECT_NE(table.find("33.3%"), std::string::npos);
}
