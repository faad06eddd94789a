#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "potion/corpus.hpp"
#include "potion/error.hpp"
#include "potion/parallel.hpp"
#include "potion/rng.hpp"
#include "potion/text.hpp"

namespace potion {

struct GeneratorConfig {
  std::uint64_t seed = 0;
  std::size_t count = 10000;
  std::size_t min_ingredients = 3;
  std::size_t max_ingredients = 8;
  std::size_t min_mixings = 1;
  std::size_t max_mixings = 3;
  std::size_t max_retries = 100;

  void validate() const {
    if (count < 1) throw InvalidConfig("generator count must be at least 1");
    if (min_ingredients < 1 || min_ingredients > max_ingredients)
      throw InvalidConfig("need 1 <= min_ingredients <= max_ingredients");
    if (min_mixings > max_mixings) throw InvalidConfig("need min_mixings <= max_mixings");
  }
};

namespace detail {

inline std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

inline Recipe draw_recipe(Rng& rng, const FragmentPool& pool, const GeneratorConfig& cfg) {
  const auto k = static_cast<std::size_t>(rng.between(cfg.min_ingredients, cfg.max_ingredients));
  const auto m = static_cast<std::size_t>(rng.between(cfg.min_mixings, cfg.max_mixings));
  Recipe r;
  r.fragments.reserve(k + m);
  for (std::size_t i : sample_distinct(rng, pool.ingredients.size(), k))
    r.fragments.push_back(pool.ingredients[i]);
  for (std::size_t i : sample_distinct(rng, pool.mixings.size(), m))
    r.fragments.push_back(pool.mixings[i]);
  rng.shuffle(r.fragments);
  for (const auto& f : r.fragments) {
    if (!r.raw_text.empty()) r.raw_text.push_back(' ');
    r.raw_text += f.text;
  }
  return r;
}

}  // namespace detail

// Recipe i is drawn from its own stream seeded with cfg.seed + i, so the
// output for a given index does not depend on count or on thread layout.
// Candidates whose normalized text matches a training recipe are redrawn
// from the same stream up to cfg.max_retries times.
inline std::vector<Recipe> generate(const FragmentPool& pool, const Dataset& training,
                                    const GeneratorConfig& cfg, std::size_t threads = 1) {
  cfg.validate();
  if (pool.ingredients.size() < cfg.max_ingredients)
    throw PoolTooSmall("pool has " + std::to_string(pool.ingredients.size()) +
                       " ingredient fragments, max_ingredients is " +
                       std::to_string(cfg.max_ingredients));
  if (pool.mixings.size() < cfg.max_mixings)
    throw PoolTooSmall("pool has " + std::to_string(pool.mixings.size()) +
                       " mixing fragments, max_mixings is " + std::to_string(cfg.max_mixings));

  std::unordered_set<std::string> known;
  for (const auto& r : training.recipes) known.insert(normalize_text(r.raw_text));

  std::vector<Recipe> out(cfg.count);
  parallel_for(cfg.count, threads, [&](std::size_t i) {
    Rng rng(cfg.seed + i);
    for (std::size_t attempt = 0;; ++attempt) {
      Recipe r = detail::draw_recipe(rng, pool, cfg);
      if (!known.count(normalize_text(r.raw_text))) {
        r.id = "gen-" + std::to_string(i);
        out[i] = std::move(r);
        return;
      }
      if (attempt == cfg.max_retries) throw ExhaustedRetries(i, cfg.max_retries);
    }
  });
  return out;
}

// Total fragments per recipe -> number of recipes.
inline std::map<std::size_t, std::size_t> fragment_count_histogram(
    const std::vector<Recipe>& recipes) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& r : recipes) ++hist[r.fragments.size()];
  return hist;
}

}  // namespace potion
