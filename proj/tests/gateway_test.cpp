#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"
#include "support.hpp"

using namespace citeground;
using namespace std::chrono_literals;

namespace {

struct recorded_sleeps {
  std::vector<std::chrono::milliseconds> delays;
  gateway_options options(int attempts = 3) {
    gateway_options o;
    o.max_attempts = attempts;
    o.sleep = [this](std::chrono::milliseconds d) { delays.push_back(d); };
    return o;
  }
};

chat_request user(const std::string& text) {
  chat_request r;
  r.messages.push_back({chat_role::user, text});
  return r;
}

} // namespace

TEST(Gateway, Passthrough) {
  auto t = std::make_shared<scripted_transport>();
  t->reply("OK");
  llm_gateway g(t);
  auto r = g.chat(user("hi"));
  EXPECT_EQ(r.content, "OK");
  EXPECT_EQ(r.finish, finish_reason::stop);
}

TEST(Gateway, RetriesThenSucceeds) {
  recorded_sleeps s;
  auto t = std::make_shared<scripted_transport>();
  t->fail_status(503).fail_timeout().reply("done");
  llm_gateway g(t, s.options());
  EXPECT_EQ(g.chat(user("x")).content, "done");
  EXPECT_EQ(t->call_count(), 3u);
  EXPECT_EQ(s.delays, (std::vector<std::chrono::milliseconds>{1000ms, 2000ms}));
}

TEST(Gateway, ExhaustedRetriesCarryAttemptLog) {
  recorded_sleeps s;
  auto t = std::make_shared<scripted_transport>();
  t->fail_status(500).fail_status(502).fail_status(429).reply("too late");
  llm_gateway g(t, s.options());
  try {
    g.chat(user("x"));
    FAIL();
  } catch (const transport_error& e) {
    EXPECT_EQ(e.attempts().size(), 3u);
    EXPECT_NE(e.attempts()[1].find("502"), std::string::npos);
  }
  EXPECT_EQ(t->call_count(), 3u);
  ASSERT_EQ(s.delays.size(), 2u);
  EXPECT_LE(s.delays[0], s.delays[1]);
}

TEST(Gateway, ClientErrorIsNotRetried) {
  recorded_sleeps s;
  auto t = std::make_shared<scripted_transport>();
  t->fail_status(401, "{\"error\": \"bad key\"}").reply("never");
  llm_gateway g(t, s.options());
  try {
    g.chat(user("x"));
    FAIL();
  } catch (const request_error& e) {
    EXPECT_EQ(e.status(), 401);
    EXPECT_NE(std::string(e.what()).find("bad key"), std::string::npos);
  }
  EXPECT_EQ(t->call_count(), 1u);
  EXPECT_TRUE(s.delays.empty());
}

TEST(Gateway, RequestValidation) {
  auto t = std::make_shared<scripted_transport>();
  llm_gateway g(t);
  EXPECT_THROW(g.chat(chat_request{}), invalid_argument);
  auto r = user("x");
  r.temperature = -1;
  EXPECT_THROW(g.chat(r), invalid_argument);
}

TEST(Gateway, DoesNotAlterMessagesOrTemperature) {
  auto t = std::make_shared<scripted_transport>();
  t->reply("ok");
  gateway_options o;
  o.model_name = "m1";
  llm_gateway g(t, o);
  auto r = user("exact  text\n");
  r.messages.insert(r.messages.begin(), {chat_role::system, "sys"});
  r.temperature = 0.0;
  g.chat(r);
  auto seen = t->requests().at(0);
  ASSERT_EQ(seen.messages.size(), 2u);
  EXPECT_EQ(seen.messages[1].content, "exact  text\n");
  EXPECT_EQ(seen.temperature, 0.0);
  EXPECT_EQ(seen.model_name, "m1");
}

TEST(Gateway, InFlightCapHolds) {
  auto t = std::make_shared<scripted_transport>([](const chat_request&) { return chat_response{"ok", finish_reason::stop, {}}; });
  t->set_latency(20ms);
  gateway_options o;
  o.max_in_flight = 4;
  llm_gateway g(t, o);
  std::vector<std::thread> threads;
  for (int i = 0; i < 24; ++i) threads.emplace_back([&] { g.chat(user("x")); });
  for (auto& th : threads) th.join();
  EXPECT_EQ(t->call_count(), 24u);
  EXPECT_LE(t->max_in_flight(), 4u);
  EXPECT_GE(t->max_in_flight(), 2u);
}

TEST(WireFormat, RequestAndResponseShapes) {
  auto r = user("hello");
  r.model_name = "m";
  r.max_output_tokens = 77;
  auto j = to_wire_json(r);
  EXPECT_EQ(j["model"], "m");
  EXPECT_EQ(j["messages"][0]["role"], "user");
  EXPECT_EQ(j["messages"][0]["content"], "hello");
  EXPECT_EQ(j["temperature"], 0.0);
  EXPECT_EQ(j["max_tokens"], 77);
  EXPECT_FALSE(j.contains("purpose"));

  auto resp = parse_wire_response(
      R"({"choices":[{"message":{"role":"assistant","content":"hi"},"finish_reason":"length"}],"usage":{"prompt_tokens":3,"completion_tokens":1}})");
  EXPECT_EQ(resp.content, "hi");
  EXPECT_EQ(resp.finish, finish_reason::length);
  EXPECT_EQ(resp.usage.prompt_tokens, 3);
  EXPECT_THROW(parse_wire_response("not json"), transport_failure);
}

TEST(HttpTransport, LoopbackRoundTrip) {
  httplib::Server server;
  std::string seen_auth, seen_path;
  nlohmann::json seen_body;
  int failures_left = 1;
  server.Post(R"(/v1/chat/completions)", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_path = req.path;
    seen_body = nlohmann::json::parse(req.body);
    if (failures_left-- > 0) {
      res.status = 503;
      res.set_content("busy", "text/plain");
      return;
    }
    res.set_content(R"({"choices":[{"message":{"content":"pong"},"finish_reason":"stop"}]})", "application/json");
  });
  server.Post(R"(/bad/chat/completions)", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad request body", "text/plain");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  recorded_sleeps s;
  auto opts = s.options();
  opts.model_name = "local-model";
  llm_gateway g(std::make_shared<http_transport>("http://127.0.0.1:" + std::to_string(port) + "/v1/", 5s, "secret"), opts);
  auto reply = g.chat("sys", "ping", "test");
  EXPECT_EQ(reply.content, "pong");
  EXPECT_EQ(seen_path, "/v1/chat/completions");
  EXPECT_EQ(seen_auth, "Bearer secret");
  EXPECT_EQ(seen_body["model"], "local-model");
  EXPECT_EQ(seen_body["messages"].size(), 2u);
  EXPECT_EQ(s.delays.size(), 1u);

  llm_gateway bad(std::make_shared<http_transport>("http://127.0.0.1:" + std::to_string(port) + "/bad", 5s, ""), s.options());
  EXPECT_THROW(bad.chat("", "x"), request_error);

  server.stop();
  runner.join();
}

TEST(HttpTransport, ConnectionRefusedIsRetryable) {
  recorded_sleeps s;
  llm_gateway g(std::make_shared<http_transport>("http://127.0.0.1:1/v1", 1s, ""), s.options(2));
  EXPECT_THROW(g.chat("", "x"), transport_error);
  EXPECT_EQ(s.delays.size(), 1u);
}

TEST(HttpTransport, RejectsUrlWithoutScheme) {
  EXPECT_THROW(http_transport("localhost:8000", 1s, ""), config_error);
}
