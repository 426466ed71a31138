#pragma once

// HTTP transport for chat-completions-compatible endpoints:
//   POST <base_url>/chat/completions
//   {"model", "messages": [{"role", "content"}], "temperature", "max_tokens"}
// Authorization: Bearer $CITEGROUND_API_KEY (when set).

#include <chrono>
#include <cstdlib>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "citeground/error.hpp"
#include "citeground/gateway.hpp"

namespace citeground {

inline constexpr const char* api_key_env = "CITEGROUND_API_KEY";

inline nlohmann::json to_wire_json(const chat_request& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages)
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  return {{"model", request.model_name},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_output_tokens}};
}

// Reads the first choice of a chat-completions response body.
inline chat_response parse_wire_response(const std::string& body) {
  auto json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded() || !json.is_object()) throw transport_failure("response body is not JSON", false, 0, body);
  const auto& choices = json.value("choices", nlohmann::json::array());
  if (!choices.is_array() || choices.empty()) throw transport_failure("response has no choices", false, 0, body);
  const auto& first = choices.front();
  chat_response out;
  if (first.contains("message") && first["message"].is_object()) {
    const auto& content = first["message"].value("content", nlohmann::json());
    if (content.is_string()) out.content = content.get<std::string>();
  }
  std::string reason = first.value("finish_reason", std::string("stop"));
  if (first.contains("finish_reason") && first["finish_reason"].is_null()) reason = "stop";
  out.finish = reason == "length" ? finish_reason::length : reason == "stop" ? finish_reason::stop : finish_reason::error;
  if (json.contains("usage") && json["usage"].is_object()) {
    out.usage.prompt_tokens = json["usage"].value("prompt_tokens", 0);
    out.usage.completion_tokens = json["usage"].value("completion_tokens", 0);
  }
  if (out.finish == finish_reason::stop && out.content.empty() && !first.contains("message"))
    throw transport_failure("response choice has no message", false, 0, body);
  return out;
}

class http_transport final : public chat_transport {
public:
  http_transport(std::string base_url, std::chrono::seconds timeout, std::string api_key = env_api_key())
      : timeout_(timeout), api_key_(std::move(api_key)) {
    while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw config_error("base_url must start with http:// or https://");
    auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    path_ = (path_start == std::string::npos ? std::string() : base_url.substr(path_start)) + "/chat/completions";
  }

  static std::string env_api_key() {
    const char* key = std::getenv(api_key_env);
    return key ? key : "";
  }

  const std::string& endpoint_path() const noexcept { return path_; }

  chat_response send(const chat_request& request) override {
    httplib::Client client(origin_);
    auto secs = static_cast<time_t>(timeout_.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto result = client.Post(path_, headers, to_wire_json(request).dump(), "application/json");
    if (!result) throw transport_failure("HTTP request failed: " + httplib::to_string(result.error()), true);
    if (result->status != 200)
      throw transport_failure("HTTP " + std::to_string(result->status), is_retryable_status(result->status),
                              result->status, result->body);
    return parse_wire_response(result->body);
  }

private:
  std::string origin_;
  std::string path_;
  std::chrono::seconds timeout_;
  std::string api_key_;
};

} // namespace citeground
