#include <gtest/gtest.h>

#include <regex>
#include <thread>

#include "support.hpp"

using namespace citeground;
using namespace std::chrono_literals;

namespace {

struct setup {
  tagged_document doc = testing_support::doc_from(testing_support::numbered_text(9));
  prompt_builder prompts{testing_support::templates()};
  longdoc_options options;
  setup() { options.budget = token_budget{50, 40, 100000}; }
  chunk_plan plan() const { return plan_chunks(doc, options.budget); }
};

int part_number(const std::string& prompt) {
  std::smatch m;
  static const std::regex re(R"(part (\d+) of (\d+))");
  return std::regex_search(prompt, m, re) ? std::stoi(m[1]) : 0;
}

} // namespace

TEST(Iterative, DisjointChunksMergeInOrder) {
  setup s;
  auto plan = s.plan();
  ASSERT_EQ(plan.mode, generation_mode::iterative);
  ASSERT_EQ(plan.chunks.size(), 3u);

  // Later parts answer first; the merge prompt must still follow chunk order.
  auto t = std::make_shared<scripted_transport>([](const chat_request& r) {
    if (r.purpose == "generate:chunk") std::this_thread::sleep_for(std::chrono::milliseconds(30 * (4 - part_number(r.last_user_content()))));
    return synthetic_reply(r);
  });
  llm_gateway g(t);
  auto result = summarize_iterative(s.doc, plan, prompt_params{}, std::nullopt, g, s.prompts, s.options, ignore_warnings());
  const auto& rec = result.record;
  EXPECT_EQ(rec.mode, generation_mode::iterative);
  ASSERT_TRUE(rec.verification);
  EXPECT_TRUE(rec.verification->passed);

  std::set<sentence_tag> partial_union(rec.chunk_citations.begin(), rec.chunk_citations.end());
  EXPECT_EQ(partial_union.size(), 9u);
  for (const auto& tag : rec.verification->cited_set()) {
    EXPECT_TRUE(partial_union.contains(tag));
    EXPECT_TRUE(s.doc.contains(tag));
  }

  std::string merge_prompt;
  for (const auto& r : t->requests())
    if (r.purpose == "generate:merge") merge_prompt = r.last_user_content();
  ASSERT_FALSE(merge_prompt.empty());
  auto first = merge_prompt.find(s.doc.sentences()[0].tag.open());
  auto last = merge_prompt.find(s.doc.sentences()[8].tag.open());
  EXPECT_LT(merge_prompt.find("## Part 1"), first);
  EXPECT_LT(first, merge_prompt.find("## Part 2"));
  EXPECT_LT(merge_prompt.find("## Part 3"), last);
}

TEST(Iterative, SingleChunkStillMerges) {
  setup s;
  chunk_plan plan;
  plan.mode = generation_mode::iterative;
  plan.chunks.push_back({std::span<const tagged_sentence>(s.doc.sentences()).subspan(0, 3), 0, 36});
  auto t = std::make_shared<scripted_transport>(synthetic_reply);
  llm_gateway g(t);
  auto result = summarize_iterative(s.doc, plan, prompt_params{}, std::nullopt, g, s.prompts, s.options, ignore_warnings());
  EXPECT_EQ(t->call_count(), 2u);
  for (const auto& tag : result.record.verification->cited_set()) EXPECT_LT(s.doc.find(tag)->index, 3u);
}

TEST(Iterative, UnknownTagInMergeFailsVerification) {
  setup s;
  auto t = std::make_shared<scripted_transport>([](const chat_request& r) {
    if (r.purpose == "generate:merge")
      return chat_response{"<reasoning>x</reasoning><summary>Invented claim [<00000000>].</summary>", finish_reason::stop, {}};
    return synthetic_reply(r);
  });
  llm_gateway g(t);
  try {
    summarize_iterative(s.doc, s.plan(), prompt_params{}, std::nullopt, g, s.prompts, s.options, ignore_warnings());
    FAIL();
  } catch (const verification_failed& e) {
    EXPECT_EQ(e.report().unknown_tags, std::vector<sentence_tag>{sentence_tag::from_string("00000000")});
    EXPECT_FALSE(e.record().verification->passed);
  }
}

TEST(Iterative, GatewayFailureCarriesChunkIndex) {
  setup s;
  auto t = std::make_shared<scripted_transport>([](const chat_request& r) -> chat_response {
    if (r.purpose == "generate:chunk" && part_number(r.last_user_content()) == 2) throw transport_failure("boom", true);
    return synthetic_reply(r);
  });
  gateway_options o;
  o.sleep = [](std::chrono::milliseconds) {};
  llm_gateway g(t, o);
  try {
    summarize_iterative(s.doc, s.plan(), prompt_params{}, std::nullopt, g, s.prompts, s.options, ignore_warnings());
    FAIL();
  } catch (const pipeline_error& e) {
    ASSERT_TRUE(e.chunk_index());
    EXPECT_EQ(*e.chunk_index(), 1u);
  }
}

TEST(Iterative, LowCoverageMergeWarns) {
  setup s;
  auto tag0 = s.doc.sentences()[0].tag;
  auto t = std::make_shared<scripted_transport>([tag0](const chat_request& r) {
    if (r.purpose == "generate:merge")
      return chat_response{"<reasoning>x</reasoning><summary>Only one [" + tag0.open() + "].</summary>", finish_reason::stop, {}};
    return synthetic_reply(r);
  });
  llm_gateway g(t);
  warning_log log;
  auto result = summarize_iterative(s.doc, s.plan(), prompt_params{}, std::nullopt, g, s.prompts, s.options, log.sink());
  EXPECT_TRUE(result.record.verification->passed);
  EXPECT_TRUE(log.contains("keeps 1 of 9"));
}

TEST(Iterative, OversizedMergeIsFlagged) {
  setup s;
  s.options.budget = token_budget{50, 40, 60};
  llm_gateway g(std::make_shared<scripted_transport>(synthetic_reply));
  warning_log log;
  auto result = summarize_iterative(s.doc, s.plan(), prompt_params{}, std::nullopt, g, s.prompts, s.options, log.sink());
  EXPECT_TRUE(result.merge_exceeds_context);
  EXPECT_TRUE(log.contains("context_limit"));
}

TEST(Summarize, DispatchesOnMode) {
  setup s;
  llm_gateway g(std::make_shared<scripted_transport>(synthetic_reply));
  longdoc_options defaults;
  auto small = summarize(s.doc, prompt_params{}, std::nullopt, g, s.prompts, defaults, ignore_warnings());
  EXPECT_EQ(small.record.mode, generation_mode::oneshot);
  EXPECT_TRUE(small.record.verification->passed);
  EXPECT_TRUE(small.record.chunk_citations.empty());
  auto big = summarize(s.doc, prompt_params{}, std::nullopt, g, s.prompts, s.options, ignore_warnings());
  EXPECT_EQ(big.record.mode, generation_mode::iterative);
}

TEST(Oneshot, RequiredTagsComeFromReasoning) {
  setup s;
  auto t2 = s.doc.sentences()[2].tag;
  auto t = std::make_shared<scripted_transport>();
  t->reply("<reasoning>Plan\n<xml_tags>\n" + s.doc.sentences()[1].tag.open() + "\n" + t2.open() +
           "\n</xml_tags></reasoning><summary>Claim [" + t2.open() + "].</summary>");
  llm_gateway g(t);
  try {
    summarize_oneshot(s.doc, prompt_params{}, std::nullopt, g, s.prompts);
    FAIL();
  } catch (const verification_failed& e) {
    EXPECT_EQ(e.report().missing_required, std::vector<sentence_tag>{s.doc.sentences()[1].tag});
  }
}
