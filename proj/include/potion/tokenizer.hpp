#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "potion/error.hpp"
#include "potion/text.hpp"

namespace potion {

struct TokenizerConfig {
  bool lowercase = true;
  std::set<std::size_t> ngram_orders{1, 2};

  void validate() const {
    if (ngram_orders.empty()) throw InvalidConfig("ngram_orders must not be empty");
    if (*ngram_orders.begin() < 1) throw InvalidConfig("ngram orders must be >= 1");
  }

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

// Maximal ASCII letter/digit runs, followed by n-grams of each configured
// order in ascending order, words joined with '_'.
inline std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_alnum(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_alnum(text[j])) ++j;
    std::string w(text.substr(i, j - i));
    if (cfg.lowercase)
      for (char& c : w) c = to_lower(c);
    words.push_back(std::move(w));
    i = j;
  }

  std::vector<std::string> tokens;
  for (std::size_t n : cfg.ngram_orders) {
    if (n == 0 || n > words.size()) continue;
    for (std::size_t s = 0; s + n <= words.size(); ++s) {
      std::string gram = words[s];
      for (std::size_t t = 1; t < n; ++t) {
        gram.push_back('_');
        gram += words[s + t];
      }
      tokens.push_back(std::move(gram));
    }
  }
  return tokens;
}

}  // namespace potion
