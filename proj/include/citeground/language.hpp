#pragma once

#include <array>
#include <string>
#include <string_view>

#include "citeground/error.hpp"

namespace citeground {

enum class language { de, en, fr, it, es };

inline constexpr std::array<language, 5> all_languages = {language::de, language::en, language::fr,
                                                          language::it, language::es};

constexpr std::string_view language_code(language lang) noexcept {
  switch (lang) {
  case language::de: return "de";
  case language::en: return "en";
  case language::fr: return "fr";
  case language::it: return "it";
  case language::es: return "es";
  }
  return "en";
}

// English display name, bound into prompts ("The reasoning should be in German").
constexpr std::string_view language_name(language lang) noexcept {
  switch (lang) {
  case language::de: return "German";
  case language::en: return "English";
  case language::fr: return "French";
  case language::it: return "Italian";
  case language::es: return "Spanish";
  }
  return "English";
}

inline language parse_language(std::string_view code) {
  for (auto lang : all_languages)
    if (language_code(lang) == code) return lang;
  throw unsupported_language(std::string(code));
}

} // namespace citeground
