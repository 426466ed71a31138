#include <gtest/gtest.h>

#include "support.hpp"

using namespace citeground;

namespace {

summary_record judged(bool instructed) {
  summary_record r;
  r.doc_id = instructed ? "with" : "without";
  r.summary = "A claim [<aaaaaaaa>].";
  if (instructed) r.instruction = "Focus on costs.";
  return r;
}

eval_result result(const std::string& id, std::initializer_list<std::pair<criterion, bool>> verdicts) {
  eval_result r;
  r.sample_id = id;
  for (auto [c, pass] : verdicts) r.verdicts[c] = {pass, ""};
  return r;
}

std::shared_ptr<scripted_transport> answering(const std::string& content) {
  return std::make_shared<scripted_transport>(
      [content](const chat_request&) { return chat_response{content, finish_reason::stop, {}}; });
}

} // namespace

TEST(JudgeSample, UninstructedHasFourVerdicts) {
  auto doc = testing_support::doc_from("A claim.");
  auto t = answering("Yes.");
  llm_gateway g(t);
  auto r = judge_sample(judged(false), doc, g, testing_support::templates(), ignore_warnings());
  EXPECT_EQ(r.verdicts.size(), 4u);
  EXPECT_FALSE(r.verdicts.contains(criterion::instruction));
  EXPECT_EQ(t->call_count(), 4u);
}

TEST(JudgeSample, InstructedAllYes) {
  auto doc = testing_support::doc_from("A claim.");
  auto t = answering("Yes, because the summary is faithful.");
  llm_gateway g(t);
  auto r = judge_sample(judged(true), doc, g, testing_support::templates(), ignore_warnings());
  ASSERT_EQ(r.verdicts.size(), 5u);
  for (const auto& [c, v] : r.verdicts) {
    EXPECT_TRUE(v.pass) << describe(c).key;
    EXPECT_EQ(v.explanation, "because the summary is faithful.");
  }
  bool saw_instruction = false;
  for (const auto& req : t->requests()) {
    if (req.purpose == "judge:instruction") {
      saw_instruction = true;
      EXPECT_NE(req.last_user_content().find("Focus on costs."), std::string::npos);
      EXPECT_NE(req.last_user_content().find("If a custom instruction is provided, is it followed appropriately?"),
                std::string::npos);
    }
  }
  EXPECT_TRUE(saw_instruction);
}

TEST(JudgeSample, UnparseableVerdictFailsWithWarning) {
  auto doc = testing_support::doc_from("A claim.");
  warning_log log;
  llm_gateway g(answering("Hard to say."));
  auto r = judge_sample(judged(false), doc, g, testing_support::templates(), log.sink());
  for (const auto& [c, v] : r.verdicts) EXPECT_FALSE(v.pass);
  EXPECT_EQ(log.messages().size(), 4u);
}

TEST(Aggregate, AllPass) {
  std::vector<eval_result> rs = {
      result("a", {{criterion::fact, true}, {criterion::coverage, true}, {criterion::specificity, true}, {criterion::format, true}}),
      result("b", {{criterion::fact, true}, {criterion::coverage, true}, {criterion::specificity, true}, {criterion::format, true},
                   {criterion::instruction, true}})};
  auto rep = aggregate(rs);
  for (const auto& [c, rate] : rep.per_criterion) EXPECT_EQ(rate, 1.0);
  EXPECT_EQ(rep.overall, 1.0);
}

TEST(Aggregate, FourOfFiveIsPointEight) {
  auto rep = aggregate({result("a", {{criterion::fact, true}, {criterion::coverage, false}, {criterion::specificity, true},
                                     {criterion::format, true}, {criterion::instruction, true}})});
  EXPECT_EQ(rep.overall, 0.8);
}

TEST(Aggregate, InstructionRateOnlyOverInstructed) {
  std::vector<eval_result> rs = {
      result("a", {{criterion::fact, true}, {criterion::coverage, true}, {criterion::specificity, true}, {criterion::format, true}}),
      result("b", {{criterion::fact, true}, {criterion::coverage, true}, {criterion::specificity, true}, {criterion::format, true},
                   {criterion::instruction, false}})};
  auto rep = aggregate(rs);
  EXPECT_EQ(rep.applicable_counts.at(criterion::instruction), 1u);
  EXPECT_EQ(rep.per_criterion.at(criterion::instruction), 0.0);
  EXPECT_EQ(rep.overall, 8.0 / 9.0);
  auto macro = aggregate(rs, averaging::macro);
  EXPECT_EQ(macro.overall, 4.0 / 5.0);
}

TEST(Aggregate, EmptyIsAnError) { EXPECT_THROW(aggregate({}), invalid_argument); }

TEST(EvalResult, JsonRoundTrip) {
  auto r = result("x", {{criterion::fact, true}, {criterion::instruction, false}});
  r.verdicts[criterion::fact].explanation = "fine";
  EXPECT_EQ(eval_result_from_json(to_json(r)), r);
}

TEST(EvalReport, TableShape) {
  auto rep = aggregate({result("a", {{criterion::fact, true}, {criterion::coverage, false}, {criterion::specificity, true},
                                     {criterion::format, true}, {criterion::instruction, true}})});
  auto table = format_eval_table(rep, "student");
  for (const char* col : {"Fact", "Cov.", "Spec.", "Fmt.", "Instr.", "All", "student", ".800", "micro-average"})
    EXPECT_NE(table.find(col), std::string::npos) << col;
}
