#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

namespace citeground {

// Receives non-fatal warnings (template fallbacks, rejected rewrites, judge
// parse failures). Must be safe to call from several threads.
using warning_sink = std::function<void(const std::string&)>;

inline warning_sink stderr_warnings() {
  return [](const std::string& message) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::cerr << "warning: " << message << '\n';
  };
}

inline warning_sink ignore_warnings() {
  return [](const std::string&) {};
}

// Collects warnings; handy in tests.
class warning_log {
public:
  warning_sink sink() {
    return [this](const std::string& message) {
      std::lock_guard lock(mu_);
      messages_.push_back(message);
    };
  }

  std::vector<std::string> messages() const {
    std::lock_guard lock(mu_);
    return messages_;
  }

  bool contains(const std::string& needle) const {
    std::lock_guard lock(mu_);
    for (const auto& m : messages_)
      if (m.find(needle) != std::string::npos) return true;
    return false;
  }

private:
  mutable std::mutex mu_;
  std::vector<std::string> messages_;
};

} // namespace citeground
