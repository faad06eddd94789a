#pragma once

#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "potion/error.hpp"
#include "potion/text.hpp"

namespace potion {

enum class FragmentKind { IngredientAddition, MixingInstruction, Other };

inline std::string_view to_string(FragmentKind k) {
  switch (k) {
    case FragmentKind::IngredientAddition: return "ingredient";
    case FragmentKind::MixingInstruction: return "mixing";
    case FragmentKind::Other: return "other";
  }
  return "other";
}

// Leading-verb lexicon deciding fragment kinds.
//
// File format, one entry per line:
//   # comment
//   version <n>
//   [ingredient]
//   add
//   [mixing]
//   stir
struct Lexicon {
  std::string version = "0";
  std::set<std::string> ingredient_verbs;
  std::set<std::string> mixing_verbs;

  FragmentKind classify(std::string_view verb) const {
    std::string key;
    key.reserve(verb.size());
    for (char c : verb) key.push_back(to_lower(c));
    if (ingredient_verbs.count(key)) return FragmentKind::IngredientAddition;
    if (mixing_verbs.count(key)) return FragmentKind::MixingInstruction;
    return FragmentKind::Other;
  }

  static Lexicon parse(std::istream& in) {
    Lexicon lex;
    std::set<std::string>* section = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string entry = collapse_whitespace(line);
      if (entry.empty() || entry.front() == '#') continue;
      if (entry == "[ingredient]") {
        section = &lex.ingredient_verbs;
      } else if (entry == "[mixing]") {
        section = &lex.mixing_verbs;
      } else if (entry.rfind("version ", 0) == 0 && section == nullptr) {
        lex.version = entry.substr(8);
      } else if (entry.front() == '[') {
        throw MalformedRecord(line_no, "unknown lexicon section " + entry);
      } else if (section == nullptr) {
        throw MalformedRecord(line_no, "lexicon entry outside of a section");
      } else if (entry.find(' ') != std::string::npos) {
        throw MalformedRecord(line_no, "lexicon entries must be single words");
      } else {
        std::string word;
        for (char c : entry) word.push_back(to_lower(c));
        section->insert(std::move(word));
      }
    }
    for (const auto& w : lex.ingredient_verbs)
      if (lex.mixing_verbs.count(w))
        throw InvalidConfig("lexicon verb '" + w + "' listed in both sections");
    return lex;
  }

  static Lexicon parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  static Lexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon file " + path);
    return parse(in);
  }
};

}  // namespace potion
