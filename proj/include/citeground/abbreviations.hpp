#pragma once

// Protected abbreviations: a token that matches one of these never ends a
// sentence. The seed lists mirror data/abbreviations/<code>.txt; extra
// entries can be loaded from a directory in the same layout.

#include <array>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "citeground/error.hpp"
#include "citeground/language.hpp"

namespace citeground {

namespace detail {

inline const std::vector<std::string_view>& seed_abbreviations(language lang) {
  static const std::vector<std::string_view> de = {
      "Abb.",  "Abs.",  "Anm.",  "Art.",  "Aufl.", "Bd.",   "bspw.", "bzgl.", "bzw.",  "ca.",
      "d.h.",  "Dipl.", "Dr.",   "Drs.",  "ebd.",  "evtl.", "Fa.",   "ff.",   "gem.",  "ggf.",
      "Hrsg.", "i.d.R.", "inkl.", "Jh.",   "Kap.",  "lfd.",  "Mio.",  "Mrd.",  "Nr.",   "o.ä.",
      "Prof.", "S.",    "sog.",  "St.",   "Str.",  "Tel.",  "u.a.",  "u.U.",  "v.a.",  "vgl.",
      "z.B.",  "z.T.",  "Ziff.", "zzgl.", "Jan.",  "Feb.",  "Aug.",  "Sept.", "Okt.",  "Nov.",
      "Dez."};
  static const std::vector<std::string_view> en = {
      "Mr.",  "Mrs.", "Ms.",  "Dr.",  "Prof.", "Sr.",  "Jr.",   "St.",  "vs.",   "e.g.",
      "i.e.", "Inc.", "Ltd.", "Co.",  "Corp.", "No.",  "Nos.",  "Fig.", "Jan.",  "Feb.",
      "Mar.", "Apr.", "Jun.", "Jul.", "Aug.",  "Sep.", "Sept.", "Oct.", "Nov.",  "Dec.",
      "approx.", "Dept.", "Gov.", "Rep.", "Sen.", "U.S.", "U.K.", "cf.", "al.", "Art."};
  static const std::vector<std::string_view> fr = {
      "M.",   "MM.",  "Mme.", "Mlle.", "Dr.",  "Pr.",   "av.",  "apr.", "art.", "cf.",
      "chap.", "env.", "ex.", "fig.",  "janv.", "févr.", "oct.", "nov.", "déc.", "p.",
      "vol.", "éd.",  "St.",  "Ste."};
  static const std::vector<std::string_view> it = {
      "Sig.", "sig.", "Sigg.", "sigg.", "Dott.", "Prof.", "Avv.", "Ing.", "Arch.", "Geom.", "ecc.", "art.",
      "pag.", "pagg.", "cap.", "vol.",  "n.",   "gen.", "feb.", "sett.", "ott.", "nov.",
      "dic.", "cfr.",  "p.es.", "S."};
  static const std::vector<std::string_view> es = {
      "Sr.",  "Sra.", "Srta.", "Dr.",   "Dra.",  "Ud.",  "Uds.", "Lic.", "Ing.", "pág.",
      "págs.", "art.", "núm.",  "aprox.", "p.ej.", "cap.", "vol.", "Av.",  "ene.", "feb.",
      "sept.", "oct.", "nov.",  "dic.",  "Cía.",  "S.A."};
  switch (lang) {
  case language::de: return de;
  case language::en: return en;
  case language::fr: return fr;
  case language::it: return it;
  case language::es: return es;
  }
  return en;
}

} // namespace detail

class abbreviation_table {
public:
  // Built-in seed lists for all five languages.
  static abbreviation_table seeded() {
    abbreviation_table t;
    for (auto lang : all_languages)
      for (auto a : detail::seed_abbreviations(lang)) t.add(lang, a);
    return t;
  }

  void add(language lang, std::string_view abbreviation) {
    if (!abbreviation.empty()) entries_[lang].emplace(abbreviation);
  }

  bool contains(language lang, std::string_view token) const {
    auto it = entries_.find(lang);
    return it != entries_.end() && it->second.contains(std::string(token));
  }

  std::size_t size(language lang) const {
    auto it = entries_.find(lang);
    return it == entries_.end() ? 0 : it->second.size();
  }

  const std::set<std::string>& entries(language lang) const {
    static const std::set<std::string> empty;
    auto it = entries_.find(lang);
    return it == entries_.end() ? empty : it->second;
  }

  // Adds entries from <dir>/<code>.txt for every language file present.
  // One abbreviation per line; blank lines and lines starting with '#' skipped.
  void extend_from_directory(const std::filesystem::path& dir) {
    for (auto lang : all_languages) {
      auto file = dir / (std::string(language_code(lang)) + ".txt");
      if (!std::filesystem::exists(file)) continue;
      for (auto& entry : read_list(file)) add(lang, entry);
    }
  }

  static std::vector<std::string> read_list(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw io_error("cannot read abbreviation list " + file.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      std::size_t start = line.find_first_not_of(' ');
      if (start == std::string::npos || line[start] == '#') continue;
      out.push_back(line.substr(start));
    }
    return out;
  }

private:
  std::map<language, std::set<std::string>> entries_;
};

} // namespace citeground
