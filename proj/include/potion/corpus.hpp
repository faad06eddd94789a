#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "potion/category.hpp"
#include "potion/error.hpp"
#include "potion/lexicon.hpp"
#include "potion/text.hpp"

namespace potion {

struct Fragment {
  std::string text;
  FragmentKind kind = FragmentKind::Other;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct Recipe {
  std::string id;
  std::string raw_text;
  std::vector<Fragment> fragments;
  std::optional<CategoryId> label;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

using CategoryCountArray = std::array<std::size_t, kNumCategories>;

struct Dataset {
  std::vector<Recipe> recipes;
  CategoryCountArray counts_per_category{};

  std::size_t size() const { return recipes.size(); }
  bool empty() const { return recipes.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct FragmentPool {
  std::vector<Fragment> ingredients;
  std::vector<Fragment> mixings;

  friend bool operator==(const FragmentPool&, const FragmentPool&) = default;
};

namespace detail {

inline std::string_view leading_word(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && !is_alnum(s[b])) ++b;
  std::size_t e = b;
  while (e < s.size() && is_alnum(s[e])) ++e;
  return s.substr(b, e - b);
}

inline bool has_content(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_alnum(c); });
}

}  // namespace detail

// Splits recipe prose into sentences. A boundary is a run of '.', '!' or ';'
// followed either by the end of the text or by whitespace and an uppercase
// letter. Each sentence keeps its punctuation.
inline std::vector<Fragment> segment_recipe(std::string_view raw_text, const Lexicon& lexicon) {
  std::vector<Fragment> out;
  auto emit = [&](std::string_view piece) {
    std::string text = collapse_whitespace(piece);
    if (text.empty()) return;
    const FragmentKind kind = lexicon.classify(detail::leading_word(text));
    out.push_back(Fragment{std::move(text), kind});
  };

  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = raw_text.size();
  while (i < n) {
    if (!is_sentence_end(raw_text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_sentence_end(raw_text[j])) ++j;
    std::size_t k = j;
    while (k < n && is_space(raw_text[k])) ++k;
    if (k == n || (k > j && is_upper(raw_text[k]))) {
      emit(raw_text.substr(start, j - start));
      start = k;
    }
    i = k > j ? k : j;
  }
  if (start < n) emit(raw_text.substr(start));

  if (std::none_of(out.begin(), out.end(),
                   [](const Fragment& f) { return detail::has_content(f.text); }))
    throw NoFragments();
  return out;
}

inline CategoryCountArray count_labels(const std::vector<Recipe>& recipes) {
  CategoryCountArray counts{};
  for (const auto& r : recipes)
    if (r.label) ++counts[*r.label];
  return counts;
}

inline Dataset make_dataset(std::vector<Recipe> recipes) {
  Dataset d;
  d.counts_per_category = count_labels(recipes);
  d.recipes = std::move(recipes);
  return d;
}

// Reads newline-delimited JSON records {"id", "category", "text"}. Blank
// lines are skipped. With require_label false the category field may be
// omitted, which is the format used for generated recipes.
inline std::vector<Recipe> parse_records(std::istream& in, const Lexicon& lexicon,
                                         bool require_label) {
  std::vector<Recipe> recipes;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (collapse_whitespace(line).empty()) continue;

    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw MalformedRecord(line_no, "record is not an object");

    auto string_field = [&](const char* key, bool required) -> std::optional<std::string> {
      auto it = rec.find(key);
      if (it == rec.end()) {
        if (required) throw MalformedRecord(line_no, std::string("missing field '") + key + "'");
        return std::nullopt;
      }
      if (!it->is_string())
        throw MalformedRecord(line_no, std::string("field '") + key + "' is not a string");
      std::string value = it->get<std::string>();
      if (collapse_whitespace(value).empty())
        throw MalformedRecord(line_no, std::string("field '") + key + "' is empty");
      return value;
    };

    Recipe r;
    r.id = *string_field("id", true);
    r.raw_text = *string_field("text", true);
    if (auto cat = string_field("category", require_label)) {
      r.label = find_category(*cat);
      if (!r.label) throw UnknownCategory(*cat, line_no);
    }
    if (!seen.insert(r.id).second) throw DuplicateId(r.id);
    try {
      r.fragments = segment_recipe(r.raw_text, lexicon);
    } catch (const NoFragments&) {
      throw MalformedRecord(line_no, "text contains no sentence content");
    }
    recipes.push_back(std::move(r));
  }
  if (recipes.empty()) throw EmptyCorpus();
  return recipes;
}

inline Dataset parse_corpus(std::istream& in, const Lexicon& lexicon) {
  return make_dataset(parse_records(in, lexicon, true));
}

inline Dataset parse_corpus(const std::string& path, const Lexicon& lexicon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path);
  return parse_corpus(in, lexicon);
}

inline std::vector<Recipe> parse_recipes(const std::string& path, const Lexicon& lexicon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open recipe file " + path);
  return parse_records(in, lexicon, false);
}

inline void write_records(std::ostream& out, const std::vector<Recipe>& recipes) {
  for (const auto& r : recipes) {
    nlohmann::ordered_json rec;
    rec["id"] = r.id;
    if (r.label) rec["category"] = std::string(category_name(*r.label));
    rec["text"] = r.raw_text;
    out << rec.dump() << '\n';
  }
}

// Deduplicated ingredient and mixing fragments, sorted by normalized text.
// Where several spellings share a normalized form the lexicographically
// smallest one is kept, so the pool does not depend on recipe order.
inline FragmentPool build_pool(const Dataset& dataset) {
  if (dataset.empty()) throw DegenerateDataset();
  std::map<std::string, std::string> ingredients;
  std::map<std::string, std::string> mixings;
  for (const auto& r : dataset.recipes) {
    for (const auto& f : r.fragments) {
      std::map<std::string, std::string>* target = nullptr;
      if (f.kind == FragmentKind::IngredientAddition) target = &ingredients;
      if (f.kind == FragmentKind::MixingInstruction) target = &mixings;
      if (!target) continue;
      auto [it, inserted] = target->emplace(normalize_text(f.text), f.text);
      if (!inserted && f.text < it->second) it->second = f.text;
    }
  }
  if (ingredients.empty()) throw EmptyPool("ingredient");
  if (mixings.empty()) throw EmptyPool("mixing");

  FragmentPool pool;
  for (auto& [key, text] : ingredients)
    pool.ingredients.push_back({std::move(text), FragmentKind::IngredientAddition});
  for (auto& [key, text] : mixings)
    pool.mixings.push_back({std::move(text), FragmentKind::MixingInstruction});
  return pool;
}

}  // namespace potion
