#include <gtest/gtest.h>

#include "support.hpp"

using namespace citeground;

namespace {

const std::string infra = "Infrastructure investments will increase by 12% next year.";

struct fixture {
  tagged_document doc = testing_support::doc_from("The council met on Monday. " + infra + " Parks stay open.");
  sentence_tag tag(std::size_t i) const { return doc.sentences()[i].tag; }
  summary_record record(const std::string& summary) const {
    summary_record r;
    r.doc_id = "city";
    r.tagged_source = doc.serialize();
    r.summary = summary;
    return r;
  }
};

} // namespace

TEST(Render, PairsTagWithSentence) {
  fixture f;
  auto r = f.record("Spending grows [" + f.tag(1).open() + "].");
  auto text = render_annotated(r, f.doc, render_format::text);
  EXPECT_NE(text.find("View Source Citations"), std::string::npos);
  EXPECT_NE(text.find(f.tag(1).open() + " " + infra), std::string::npos);
  auto cited = resolve_citations(r.summary, f.doc);
  ASSERT_EQ(cited.size(), 1u);
  EXPECT_EQ(cited[0].sentence, infra);
}

TEST(Render, NoCitationsNotice) {
  fixture f;
  auto text = render_annotated(f.record("Nothing cited."), f.doc, render_format::text);
  EXPECT_NE(text.find("No citations in this summary."), std::string::npos);
  auto html = render_annotated(f.record("Nothing cited."), f.doc, render_format::html);
  EXPECT_NE(html.find("No citations in this summary."), std::string::npos);
}

TEST(Render, OrderedByFirstCitation) {
  fixture f;
  auto r = f.record("Parks [" + f.tag(2).open() + "]. Council [" + f.tag(0).open() + "]. Again [" + f.tag(2).open() + "].");
  auto cited = resolve_citations(r.summary, f.doc);
  ASSERT_EQ(cited.size(), 2u);
  EXPECT_EQ(cited[0].tag, f.tag(2));
  EXPECT_EQ(cited[1].tag, f.tag(0));
  auto md = render_annotated(r, f.doc, render_format::markdown);
  EXPECT_LT(md.find("Parks stay open."), md.find("The council met"));
}

TEST(Render, UnknownTagIsAnError) {
  fixture f;
  try {
    render_annotated(f.record("Bad [<00000000>]."), f.doc, render_format::text);
    FAIL();
  } catch (const render_error& e) {
    EXPECT_NE(std::string(e.what()).find("00000000"), std::string::npos);
  }
}

TEST(Render, HtmlEscapesAndLinks) {
  fixture f;
  auto r = f.record("A <b>bold</b> & claim [" + f.tag(1).open() + "].");
  auto html = render_annotated(r, f.doc, render_format::html);
  EXPECT_NE(html.find("&lt;b&gt;bold&lt;/b&gt; &amp; claim"), std::string::npos);
  EXPECT_NE(html.find("href=\"#src-" + f.tag(1).str() + "\""), std::string::npos);
  EXPECT_NE(html.find("id=\"src-" + f.tag(1).str() + "\""), std::string::npos);
  EXPECT_EQ(html.find("<script"), std::string::npos);
}

TEST(Render, FormatNames) {
  EXPECT_EQ(parse_render_format("md"), render_format::markdown);
  EXPECT_THROW(parse_render_format("pdf"), invalid_argument);
}
