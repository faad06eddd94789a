#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "potion/corpus.hpp"
#include "potion/generator.hpp"
#include "potion/model.hpp"
#include "potion/model_io.hpp"
#include "potion/report.hpp"

namespace potion {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline std::string content_digest(std::string_view bytes) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + hex;
}

struct ReportConfig {
  std::size_t bins = 20;
  std::size_t top_k = 3;
  double ambiguity_threshold = 0.10;
};

struct ClassificationSummary {
  CategoryCounts counts;
  ProbHistogram hist;
  std::vector<AmbiguityEntry> ambiguity;
  double fraction_above_90 = 0.0;
  std::size_t ambiguous = 0;
};

inline ClassificationSummary summarize(const std::vector<Prediction>& preds, const std::vector<Recipe>& recipes,
                                       const ReportConfig& cfg) {
  ClassificationSummary s;
  s.counts = tally(preds);
  s.hist = histogram(preds, cfg.bins);
  s.ambiguity = ambiguity_report(preds, recipes, cfg.top_k, cfg.ambiguity_threshold);
  std::size_t above = 0;
  for (const auto& p : preds)
    if (p.top_prob > 0.9) ++above;
  s.fraction_above_90 = preds.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(preds.size());
  for (const auto& e : s.ambiguity)
    if (e.ambiguous) ++s.ambiguous;
  return s;
}

inline nlohmann::ordered_json train_config_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate}, {"epochs", t.epochs}, {"batch_size", t.batch_size},
          {"l2", t.l2},                       {"seed", t.seed},     {"hidden_size", t.hidden_size}};
}

inline nlohmann::ordered_json generator_config_json(const GeneratorConfig& g) {
  return {{"seed", g.seed},
          {"count", g.count},
          {"min_ingredients", g.min_ingredients},
          {"max_ingredients", g.max_ingredients},
          {"min_mixings", g.min_mixings},
          {"max_mixings", g.max_mixings},
          {"max_retries", g.max_retries},
          {"rng", std::string(Rng::kName)}};
}

inline nlohmann::ordered_json featurizer_json(const Featurizer& f, const TokenizerConfig& tok) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(f.mode));
  j["dim"] = f.dim;
  if (f.mode == FeatureMode::HashedNgrams) j["hash"] = std::string(Featurizer::kHashName);
  j["lowercase"] = tok.lowercase;
  j["ngram_orders"] = std::vector<std::size_t>(tok.ngram_orders.begin(), tok.ngram_orders.end());
  return j;
}

inline nlohmann::ordered_json report_config_json(const ReportConfig& r) {
  return {{"bins", r.bins}, {"top_k", r.top_k}, {"ambiguity_threshold", r.ambiguity_threshold}};
}

inline nlohmann::ordered_json summary_json(const ClassificationSummary& s) {
  nlohmann::ordered_json j;
  j["recipes"] = s.counts.total;
  j["modal_category"] = s.counts.total ? std::string(category_name(s.counts.modal())) : std::string();
  j["fraction_top_prob_above_0.9"] = format_fixed(s.fraction_above_90);
  j["ambiguous_recipes"] = s.ambiguous;
  return j;
}

}  // namespace potion
