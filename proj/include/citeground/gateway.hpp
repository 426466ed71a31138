#pragma once

// Chat-completions gateway: retries with exponential backoff and a cap on
// in-flight requests, over a pluggable transport.

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "citeground/error.hpp"

namespace citeground {

enum class chat_role { system, user, assistant };

constexpr std::string_view to_string(chat_role r) noexcept {
  switch (r) {
  case chat_role::system: return "system";
  case chat_role::user: return "user";
  case chat_role::assistant: return "assistant";
  }
  return "user";
}

struct chat_message {
  chat_role role = chat_role::user;
  std::string content;

  friend bool operator==(const chat_message&, const chat_message&) = default;
};

struct chat_request {
  std::vector<chat_message> messages;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  std::string model_name;
  // Routing label for scripted transports ("oneshot", "judge:fact", ...).
  // Not part of the wire format.
  std::string purpose;

  void validate() const {
    if (messages.empty()) throw invalid_argument("chat request needs at least one message");
    if (!(temperature >= 0.0)) throw invalid_argument("temperature must be >= 0");
  }

  const std::string& last_user_content() const {
    static const std::string empty;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
      if (it->role == chat_role::user) return it->content;
    return empty;
  }
};

enum class finish_reason { stop, length, error };

constexpr std::string_view to_string(finish_reason f) noexcept {
  switch (f) {
  case finish_reason::stop: return "stop";
  case finish_reason::length: return "length";
  case finish_reason::error: return "error";
  }
  return "error";
}

struct token_usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct chat_response {
  std::string content;
  finish_reason finish = finish_reason::stop;
  token_usage usage;
};

// Thrown by transports for a single failed attempt.
class transport_failure : public error {
public:
  transport_failure(const std::string& what, bool retryable, int status = 0, std::string body = {})
      : error(what), retryable_(retryable), status_(status), body_(std::move(body)) {}

  bool retryable() const noexcept { return retryable_; }
  int status() const noexcept { return status_; } // 0 when no HTTP status (timeout, connection)
  const std::string& body() const noexcept { return body_; }

private:
  bool retryable_;
  int status_;
  std::string body_;
};

// Retries exhausted.
class transport_error : public error {
public:
  explicit transport_error(std::vector<std::string> attempts)
      : error(summarize(attempts)), attempts_(std::move(attempts)) {}

  const std::vector<std::string>& attempts() const noexcept { return attempts_; }

private:
  static std::string summarize(const std::vector<std::string>& attempts) {
    std::string s = "chat request failed after " + std::to_string(attempts.size()) + " attempt(s)";
    for (std::size_t i = 0; i < attempts.size(); ++i) s += "; #" + std::to_string(i + 1) + ": " + attempts[i];
    return s;
  }
  std::vector<std::string> attempts_;
};

// Non-retryable rejection (HTTP 4xx other than 429).
class request_error : public error {
public:
  request_error(int status, std::string body_excerpt)
      : error("chat request rejected with HTTP " + std::to_string(status) + ": " + body_excerpt), status_(status),
        body_excerpt_(std::move(body_excerpt)) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_excerpt_; }

private:
  int status_;
  std::string body_excerpt_;
};

inline bool is_retryable_status(int status) noexcept { return status == 429 || (status >= 500 && status <= 599); }

class chat_transport {
public:
  virtual ~chat_transport() = default;
  // Returns the first completion or throws transport_failure.
  virtual chat_response send(const chat_request& request) = 0;
};

struct gateway_options {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{1000};
  double backoff_factor = 2.0;
  std::chrono::seconds timeout{120};
  std::size_t max_in_flight = 4;
  std::string model_name;
  // Replaceable so tests can observe delays without sleeping.
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

class llm_gateway {
public:
  llm_gateway(std::shared_ptr<chat_transport> transport, gateway_options options = {})
      : transport_(std::move(transport)), options_(std::move(options)) {
    if (!transport_) throw invalid_argument("gateway needs a transport");
    if (options_.max_attempts < 1) throw config_error("retries must be at least 1");
    if (options_.max_in_flight < 1) throw config_error("max_in_flight must be at least 1");
  }

  llm_gateway(const llm_gateway&) = delete;
  llm_gateway& operator=(const llm_gateway&) = delete;

  const gateway_options& options() const noexcept { return options_; }

  // Blocks while max_in_flight requests are outstanding. The request is
  // forwarded unchanged apart from filling an empty model name.
  chat_response chat(chat_request request) {
    request.validate();
    if (request.model_name.empty()) request.model_name = options_.model_name;

    slot guard(*this);
    std::vector<std::string> log;
    auto delay = options_.base_backoff;
    for (int attempt = 1;; ++attempt) {
      try {
        return transport_->send(request);
      } catch (const transport_failure& f) {
        if (!f.retryable()) {
          if (f.status() != 0) throw request_error(f.status(), excerpt(f.body()));
          throw transport_error({f.what()});
        }
        log.push_back(f.what());
        if (attempt >= options_.max_attempts) throw transport_error(std::move(log));
      }
      options_.sleep(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(delay.count() * options_.backoff_factor));
    }
  }

  // Convenience: system + user message.
  chat_response chat(std::string system, std::string user, std::string purpose = {}) {
    chat_request req;
    if (!system.empty()) req.messages.push_back({chat_role::system, std::move(system)});
    req.messages.push_back({chat_role::user, std::move(user)});
    req.purpose = std::move(purpose);
    return chat(std::move(req));
  }

private:
  static std::string excerpt(const std::string& body) { return body.size() <= 200 ? body : body.substr(0, 200) + "..."; }

  struct slot {
    explicit slot(llm_gateway& g) : g_(g) {
      std::unique_lock lock(g_.mu_);
      g_.cv_.wait(lock, [&] { return g_.in_flight_ < g_.options_.max_in_flight; });
      ++g_.in_flight_;
    }
    ~slot() {
      {
        std::lock_guard lock(g_.mu_);
        --g_.in_flight_;
      }
      g_.cv_.notify_one();
    }
    llm_gateway& g_;
  };

  std::shared_ptr<chat_transport> transport_;
  gateway_options options_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
};

// Scripted transport for tests and offline runs. Queued steps are consumed in
// order; once the queue is empty the handler (if any) answers.
class scripted_transport final : public chat_transport {
public:
  using handler = std::function<chat_response(const chat_request&)>;

  scripted_transport() = default;
  explicit scripted_transport(handler h) : handler_(std::move(h)) {}

  scripted_transport& reply(std::string content, finish_reason finish = finish_reason::stop) {
    std::lock_guard lock(mu_);
    steps_.push_back({step::kind::reply, std::move(content), finish, 0});
    return *this;
  }

  scripted_transport& fail_status(int status, std::string body = "error") {
    std::lock_guard lock(mu_);
    steps_.push_back({step::kind::status, std::move(body), finish_reason::error, status});
    return *this;
  }

  scripted_transport& fail_timeout() {
    std::lock_guard lock(mu_);
    steps_.push_back({step::kind::timeout, {}, finish_reason::error, 0});
    return *this;
  }

  void set_handler(handler h) {
    std::lock_guard lock(mu_);
    handler_ = std::move(h);
  }

  // Holds each call for this long, so concurrent callers overlap.
  void set_latency(std::chrono::milliseconds d) { latency_ = d; }

  chat_response send(const chat_request& request) override {
    step current;
    handler h;
    bool scripted = false;
    {
      std::lock_guard lock(mu_);
      requests_.push_back(request);
      ++in_flight_;
      max_in_flight_ = std::max(max_in_flight_, in_flight_);
      if (!steps_.empty()) {
        current = std::move(steps_.front());
        steps_.pop_front();
        scripted = true;
      } else {
        h = handler_;
      }
    }
    struct leave {
      scripted_transport& t;
      ~leave() {
        std::lock_guard lock(t.mu_);
        --t.in_flight_;
      }
    } on_exit{*this};

    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    if (!scripted) {
      if (!h) throw transport_failure("scripted transport has no reply left", false);
      return h(request);
    }
    switch (current.what) {
    case step::kind::reply: return {current.content, current.finish, {}};
    case step::kind::status:
      throw transport_failure("HTTP " + std::to_string(current.status), is_retryable_status(current.status),
                              current.status, current.content);
    case step::kind::timeout: throw transport_failure("request timed out", true);
    }
    throw transport_failure("unreachable", false);
  }

  std::size_t call_count() const {
    std::lock_guard lock(mu_);
    return requests_.size();
  }

  std::size_t max_in_flight() const {
    std::lock_guard lock(mu_);
    return max_in_flight_;
  }

  std::vector<chat_request> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

private:
  struct step {
    enum class kind { reply, status, timeout } what = kind::reply;
    std::string content;
    finish_reason finish = finish_reason::stop;
    int status = 0;
  };

  mutable std::mutex mu_;
  std::deque<step> steps_;
  handler handler_;
  std::vector<chat_request> requests_;
  std::size_t in_flight_ = 0;
  std::size_t max_in_flight_ = 0;
  std::chrono::milliseconds latency_{0};
};

} // namespace citeground
