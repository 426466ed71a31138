#pragma once

// Offline chat backend. Replies are derived from the request alone, so a run
// against it is reproducible. Optional rules override the synthetic replies.

#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "citeground/error.hpp"
#include "citeground/gateway.hpp"
#include "citeground/responses.hpp"
#include "citeground/tag.hpp"
#include "citeground/verify.hpp"

namespace citeground {

// Rule: purpose prefix (empty matches all) and a substring of the last user
// message (empty matches all). First match wins.
struct mock_rule {
  std::string purpose;
  std::string contains;
  std::string content;
};

inline std::vector<mock_rule> read_mock_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read mock rules " + path.string());
  std::vector<mock_rule> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("content") || !j["content"].is_string())
      throw config_error(path.string() + ": line " + std::to_string(number) + " is not a mock rule");
    out.push_back({j.value("purpose", std::string()), j.value("contains", std::string()),
                   j["content"].get<std::string>()});
  }
  return out;
}

namespace detail {

// Tags that appear as closed sentence markup (<h>...</h>), in order.
inline std::vector<sentence_tag> tagged_sentences_in(std::string_view text) {
  std::vector<sentence_tag> out;
  std::set<sentence_tag> seen;
  for (auto pos = text.find("</"); pos != std::string_view::npos; pos = text.find("</", pos + 2)) {
    if (pos + 11 > text.size() || text[pos + 10] != '>') continue;
    auto t = sentence_tag::parse(text.substr(pos + 2, 8));
    if (t && seen.insert(*t).second) out.push_back(*t);
  }
  return out;
}

inline int requested_tag_count(std::string_view prompt, int fallback) {
  static const std::regex re(R"(Create a list of (\d+) XML tags)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(prompt.begin(), prompt.end(), m, re)) return std::stoi(m[1].str());
  return fallback;
}

// Evenly spaced picks, one point per tag, three points per paragraph.
inline std::string synthetic_generation(const std::vector<sentence_tag>& tags, std::size_t n) {
  std::vector<sentence_tag> chosen;
  n = std::min(n, tags.size());
  for (std::size_t i = 0; i < n; ++i) chosen.push_back(tags[i * tags.size() / n]);

  std::string reasoning = "The summary follows the order of the source and draws one point from each part.\n<xml_tags>\n";
  for (const auto& t : chosen) reasoning += t.open() + "\n";
  reasoning += "</xml_tags>";

  std::string summary;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (i) summary += i % 3 == 0 ? "\n\n" : " ";
    char label[24];
    std::snprintf(label, sizeof label, "%03zu", i + 1);
    summary += "Point " + std::string(label) + " restates one statement of the source [" + chosen[i].open() + "].";
  }
  return "<reasoning>\n" + reasoning + "\n</reasoning>\n<summary>\n" + summary + "\n</summary>";
}

inline std::string last_element(std::string_view text, std::string_view name) {
  auto open = "<" + std::string(name) + ">";
  auto close = "</" + std::string(name) + ">";
  auto o = text.rfind(open);
  if (o == std::string_view::npos) return {};
  auto c = text.find(close, o);
  return trim(text.substr(o + open.size(), c == std::string_view::npos ? std::string_view::npos : c - o - open.size()));
}

} // namespace detail

// Synthetic reply keyed on the request purpose.
inline chat_response synthetic_reply(const chat_request& request) {
  const auto& prompt = request.last_user_content();
  const auto& purpose = request.purpose;
  std::string content;
  if (purpose == "generate:oneshot" || purpose == "generate:chunk") {
    auto tags = detail::tagged_sentences_in(prompt);
    content = detail::synthetic_generation(tags, static_cast<std::size_t>(detail::requested_tag_count(prompt, 5)));
  } else if (purpose == "generate:merge") {
    auto at = prompt.find("# Part summaries");
    std::vector<sentence_tag> tags;
    std::set<sentence_tag> seen;
    for (const auto& c : extract_citations(at == std::string::npos ? std::string_view(prompt)
                                                                    : std::string_view(prompt).substr(at)))
      if (seen.insert(c.tag).second) tags.push_back(c.tag);
    content = detail::synthetic_generation(tags, tags.size());
  } else if (purpose.starts_with("quality:") || purpose.starts_with("judge:")) {
    content = "Yes. The item meets the stated criterion.";
  } else if (purpose == "rewrite") {
    content = "<reasoning>\nI will structure the summary as planned.\n" + detail::last_element(prompt, "reasoning") +
              "\n</reasoning>\n<summary>\n" + detail::last_element(prompt, "summary") + "\n</summary>";
  } else if (purpose == "instructions") {
    content = nlohmann::json{{"positive",
                              {"Summarize the text for a general audience.", "Focus on the figures and dates given.",
                               "Write the summary in a neutral news style."}},
                             {"adversarial",
                              {"Explain the ethical debate about the topic in detail.",
                               "Summarize the financial outlook for the next decade.",
                               "Compare the text with the views of international experts."}}}
                  .dump();
  } else {
    throw transport_failure("mock backend has no reply for purpose '" + purpose + "'", false);
  }
  return {std::move(content), finish_reason::stop, {}};
}

class mock_transport final : public chat_transport {
public:
  explicit mock_transport(std::vector<mock_rule> rules = {}) : rules_(std::move(rules)) {}

  chat_response send(const chat_request& request) override {
    const auto& prompt = request.last_user_content();
    for (const auto& r : rules_)
      if (request.purpose.starts_with(r.purpose) && prompt.find(r.contains) != std::string::npos)
        return {r.content, finish_reason::stop, {}};
    return synthetic_reply(request);
  }

private:
  std::vector<mock_rule> rules_;
};

} // namespace citeground
