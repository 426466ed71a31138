#pragma once

#include <cstddef>
#include <string_view>

namespace citeground {

class token_counter {
public:
  virtual ~token_counter() = default;
  virtual std::size_t count(std::string_view text) const = 0;
};

// ceil(bytes / bytes_per_token). Default 4 bytes per token.
class byte_ratio_counter final : public token_counter {
public:
  explicit byte_ratio_counter(std::size_t bytes_per_token = 4) : ratio_(bytes_per_token ? bytes_per_token : 1) {}

  std::size_t count(std::string_view text) const override { return (text.size() + ratio_ - 1) / ratio_; }

private:
  std::size_t ratio_;
};

inline const token_counter& default_token_counter() {
  static const byte_ratio_counter instance;
  return instance;
}

inline std::size_t count_tokens(std::string_view text, const token_counter& counter = default_token_counter()) {
  return counter.count(text);
}

} // namespace citeground
