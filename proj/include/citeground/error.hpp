#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citeground {

// Base for every error thrown by the toolkit.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class invalid_argument : public error {
public:
  using error::error;
};

class unsupported_language : public error {
public:
  explicit unsupported_language(std::string code)
      : error("unsupported language code '" + code + "'"), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// Malformed markup or file content. offset is a byte offset for markup and a
// 1-based line number for line-oriented files.
class parse_error : public error {
public:
  parse_error(const std::string& what, std::size_t offset)
      : error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class tag_collision : public error {
public:
  tag_collision(std::string tag, std::string first, std::string second)
      : error("tag " + tag + " collides: \"" + first + "\" vs \"" + second + "\""),
        tag_(std::move(tag)), first_(std::move(first)), second_(std::move(second)) {}

  const std::string& tag() const noexcept { return tag_; }
  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

private:
  std::string tag_;
  std::string first_;
  std::string second_;
};

class template_error : public error {
public:
  template_error(const std::string& what, std::string placeholder)
      : error(what), placeholder_(std::move(placeholder)) {}

  const std::string& placeholder() const noexcept { return placeholder_; }

private:
  std::string placeholder_;
};

class config_error : public error {
public:
  using error::error;
};

class io_error : public error {
public:
  using error::error;
};

class render_error : public error {
public:
  using error::error;
};

} // namespace citeground
