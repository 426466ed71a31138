#include <gtest/gtest.h>

#include "support.hpp"

using namespace citeground;
using testing_support::doc_from;

namespace {

prompt_builder builder() { return prompt_builder(testing_support::templates()); }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST(OneshotPrompt, Substitution) {
  auto doc = doc_from("Erster Satz. Zweiter Satz.", "d", language::de);
  prompt_params p{400, 8, language::de};
  auto prompt = builder().oneshot(doc, p);
  EXPECT_TRUE(contains(prompt, "400-word-long"));
  EXPECT_TRUE(contains(prompt, "the 8 XML tags"));
  EXPECT_TRUE(contains(prompt, "The reasoning should be in German."));
  EXPECT_TRUE(contains(prompt, doc.serialize()));
  EXPECT_FALSE(contains(prompt, "{"));
}

TEST(OneshotPrompt, PublishedRulesVerbatim) {
  auto prompt = builder().oneshot(doc_from("A claim."), prompt_params{});
  EXPECT_TRUE(contains(prompt, "must appear exactly once in the summary"));
  EXPECT_TRUE(contains(prompt, "Use only XML tags from the sentence-tagged input text!"));
  EXPECT_TRUE(contains(prompt, "Each reference must appear individually, never combine multiple references at once! "
                               "Always insert the corresponding citation immediately after the statement it supports."));
}

TEST(OneshotPrompt, InstructionBlockOnlyWhenGiven) {
  auto doc = doc_from("A claim.");
  auto without = builder().oneshot(doc, prompt_params{});
  auto with = builder().oneshot(doc, prompt_params{}, std::string("Focus on costs."));
  EXPECT_FALSE(contains(without, "Custom instruction"));
  EXPECT_FALSE(contains(without, "Focus on costs."));
  EXPECT_TRUE(contains(with, "# Custom instruction\nFocus on costs."));
  EXPECT_EQ(builder().oneshot(doc, prompt_params{}, std::string()), without);
}

TEST(OneshotPrompt, InvalidParams) {
  EXPECT_THROW(builder().oneshot(doc_from("A claim."), prompt_params{0, 5, language::en}), invalid_argument);
}

TEST(ChunkPrompt, WordTargetAndNoMergeMention) {
  auto doc = doc_from("Only sentence here.");
  auto plan = plan_chunks(doc, token_budget{});
  auto prompt = builder().chunk(plan.chunks[0], 3, prompt_params{});
  EXPECT_TRUE(contains(prompt, "300-600 words"));
  EXPECT_TRUE(contains(prompt, "part 1 of 3"));
  std::string lower = prompt;
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  EXPECT_FALSE(contains(lower, "merg"));
}

TEST(MergePrompt, ListsPartsInOrder) {
  auto prompt = builder().merge({"first [<aaaaaaaa>]", "second", "third"}, prompt_params{});
  auto p1 = prompt.find("## Part 1\nfirst"), p2 = prompt.find("## Part 2\nsecond"), p3 = prompt.find("## Part 3\nthird");
  ASSERT_NE(p1, std::string::npos);
  ASSERT_NE(p2, std::string::npos);
  ASSERT_NE(p3, std::string::npos);
  EXPECT_LT(p1, p2);
  EXPECT_LT(p2, p3);
  EXPECT_TRUE(contains(prompt, "preserve the citations"));
  EXPECT_NO_THROW(builder().merge({"only"}, prompt_params{}));
  EXPECT_THROW(builder().merge({}, prompt_params{}), invalid_argument);
}

TEST(InstructionGenerationPrompt, Contents) {
  auto prompt = builder().instruction_generation("Some excerpt.", language::de);
  EXPECT_TRUE(contains(prompt, "6 custom instructions in German"));
  for (const char* axis : {"Audience level", "Format preferences", "Focus areas", "Tone & Style", "Information density"})
    EXPECT_TRUE(contains(prompt, axis)) << axis;
  EXPECT_TRUE(contains(prompt, "{\"positive\""));
  EXPECT_THROW(builder().instruction_generation("", language::en), invalid_argument);
}

TEST(InstructionCategory, WeightsSumToOne) {
  double total = 0;
  for (auto c : all_instruction_categories) total += category_weight(c);
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(InstructionCategory, SeededSequenceReproducible) {
  seeded_rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_instruction_category(a), sample_instruction_category(b));
}

TEST(InstructionCategory, NamesRoundTrip) {
  for (auto c : all_instruction_categories) EXPECT_EQ(parse_instruction_category(to_string(c)), c);
  EXPECT_THROW(parse_instruction_category("other"), invalid_argument);
}

TEST(RelaxInstruction, Table) {
  EXPECT_EQ(relax_instruction("Summarize in exactly 5 bullet points. Only bullets, no introduction or conclusion."),
            "Summarize in 5 bullet points.");
  EXPECT_EQ(relax_instruction(strict_short_instruction(4)), "Write a short summary of 4 sentences.");
  EXPECT_EQ(relax_instruction("Focus on financial aspects."), "Focus on financial aspects.");
  for (int n = 1; n <= 12; ++n)
    for (const auto& s : {strict_bullet_instruction(n), strict_short_instruction(n), std::string("Be brief.")})
      EXPECT_EQ(relax_instruction(relax_instruction(s)), relax_instruction(s));
}

TEST(ParseInstructionSet, AcceptsWrappedJson) {
  auto set = parse_instruction_set(
      "Here you go:\n```json\n{\"positive\": [\"a\", \"b\", \"c\"], \"adversarial\": [\"d\", \"e\", \"f\"]}\n```",
      language::en);
  EXPECT_EQ(set.positives, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(set.adversarials[2], "f");
}

TEST(ParseInstructionSet, RejectsMalformed) {
  EXPECT_THROW(parse_instruction_set("no json", language::en), response_format_error);
  EXPECT_THROW(parse_instruction_set("{\"positive\": [\"a\"], \"adversarial\": [\"d\", \"e\", \"f\"]}", language::en),
               response_format_error);
  EXPECT_THROW(parse_instruction_set("{\"positive\": [\"a\", \"b\", \"c\"]}", language::en), response_format_error);
}

TEST(ChooseTagCount, Heuristic) {
  auto large = doc_from(testing_support::numbered_text(60));
  EXPECT_EQ(choose_tag_count(large, 400), 7);
  EXPECT_EQ(choose_tag_count(large, 6000), 30);
  EXPECT_EQ(choose_tag_count(large, 60), 4);
  EXPECT_EQ(choose_tag_count(doc_from("One. Two. Three."), 400), 3);
}
