#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "potion/text.hpp"

namespace potion {

inline constexpr std::size_t kNumCategories = 11;

using CategoryId = std::size_t;

struct Category {
  CategoryId id;
  std::string_view name;
  std::string_view atc_code;  // empty for Poison

  std::optional<std::string_view> atc() const {
    if (atc_code.empty()) return std::nullopt;
    return atc_code;
  }
};

// ATC first/second level groups plus the extra Poison class, in fixed id order.
inline constexpr std::array<Category, kNumCategories> kCategories{{
    {0, "Anesthetics", "N01"},
    {1, "Antiinfectives for systemic use", "J"},
    {2, "Antiparasitic products, insecticides and repellents", "P"},
    {3, "Dermatologicals", "D"},
    {4, "Musculo-skeletal system", "M"},
    {5, "Poison", ""},
    {6, "Psychoanaleptics", "N06"},
    {7, "Psycholeptics", "N05"},
    {8, "Respiratory system", "R"},
    {9, "Sensory organs", "S"},
    {10, "Various", "V"},
}};

inline std::string_view category_name(CategoryId id) { return kCategories.at(id).name; }

namespace detail {

inline std::string category_key(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(to_lower(c));
  }
  return out;
}

}  // namespace detail

// Case-insensitive lookup after whitespace collapse. Also accepts the
// alternative spellings found in the original taxonomy table.
inline std::optional<CategoryId> find_category(std::string_view name) {
  const std::string key = detail::category_key(name);
  for (const auto& c : kCategories)
    if (detail::category_key(c.name) == key) return c.id;
  if (key == "antiparasitic products, insecticides and repellants") return 2;
  if (key == "musco-sceletal system" || key == "musculoskeletal system") return 4;
  return std::nullopt;
}

}  // namespace potion
