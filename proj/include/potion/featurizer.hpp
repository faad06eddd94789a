#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "potion/error.hpp"
#include "potion/text.hpp"

namespace potion {

enum class FeatureMode { HashedNgrams, EmbeddingTable };

inline std::string_view to_string(FeatureMode m) {
  return m == FeatureMode::HashedNgrams ? "hashed" : "embedding";
}

// Frozen token -> vector table. Never updated by training.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

  // Header "<vocab_size> <dim>", then one "<token> v1 ... vdim" line per entry.
  static EmbeddingTable parse(std::istream& in) {
    EmbeddingTable t;
    std::string line;
    if (!std::getline(in, line)) throw MalformedRecord(1, "missing embedding header");
    std::size_t vocab = 0;
    {
      std::istringstream hs(line);
      long long v = -1, d = -1;
      if (!(hs >> v >> d) || v < 0 || d <= 0)
        throw MalformedRecord(1, "embedding header must be '<vocab_size> <dim>'");
      vocab = static_cast<std::size_t>(v);
      t.dim = static_cast<std::size_t>(d);
    }
    std::size_t line_no = 1;
    while (t.vectors.size() < vocab && std::getline(in, line)) {
      ++line_no;
      std::istringstream ls(line);
      std::string token;
      if (!(ls >> token)) continue;
      std::vector<double> vec(t.dim);
      for (auto& x : vec) {
        std::string num;
        if (!(ls >> num)) throw MalformedRecord(line_no, "embedding row too short");
        try {
          std::size_t used = 0;
          x = std::stod(num, &used);
          if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
          throw MalformedRecord(line_no, "bad number '" + num + "'");
        }
        if (!std::isfinite(x)) throw MalformedRecord(line_no, "non-finite embedding value");
      }
      std::string extra;
      if (ls >> extra) throw MalformedRecord(line_no, "embedding row too long");
      if (!t.vectors.emplace(std::move(token), std::move(vec)).second)
        throw MalformedRecord(line_no, "duplicate embedding token");
    }
    if (t.vectors.size() != vocab)
      throw MalformedRecord(line_no, "embedding file has fewer rows than its header states");
    return t;
  }

  static EmbeddingTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file " + path);
    return parse(in);
  }
};

struct Featurizer {
  static constexpr std::string_view kHashName = "fnv1a64";

  FeatureMode mode = FeatureMode::HashedNgrams;
  std::size_t dim = 4096;
  EmbeddingTable table;  // EmbeddingTable mode only

  static Featurizer hashed(std::size_t dim) { return {FeatureMode::HashedNgrams, dim, {}}; }
  static Featurizer embedding(EmbeddingTable table) {
    const std::size_t d = table.dim;
    return {FeatureMode::EmbeddingTable, d, std::move(table)};
  }

  std::size_t width() const { return dim; }

  void validate() const {
    if (dim == 0) throw InvalidConfig("feature dimension must be positive");
    if (mode == FeatureMode::EmbeddingTable && table.dim != dim)
      throw InvalidConfig("embedding table width does not match featurizer dim");
  }

  friend bool operator==(const Featurizer&, const Featurizer&) = default;
};

// Hashed mode: bucket = h mod dim, sign from the top hash bit, L2-normalized.
// Embedding mode: mean of in-vocabulary token vectors.
inline std::vector<double> featurize(const std::vector<std::string>& tokens, const Featurizer& f) {
  std::vector<double> x(f.width(), 0.0);
  if (f.mode == FeatureMode::HashedNgrams) {
    for (const auto& tok : tokens) {
      const std::uint64_t h = fnv1a64(tok);
      x[h % f.dim] += (h >> 63) ? -1.0 : 1.0;
    }
    double sq = 0.0;
    for (double v : x) sq += v * v;
    if (sq > 0.0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& v : x) v *= inv;
    }
    return x;
  }
  std::size_t hits = 0;
  for (const auto& tok : tokens) {
    auto it = f.table.vectors.find(tok);
    if (it == f.table.vectors.end()) continue;
    ++hits;
    for (std::size_t j = 0; j < f.dim; ++j) x[j] += it->second[j];
  }
  if (hits > 0)
    for (double& v : x) v /= static_cast<double>(hits);
  return x;
}

}  // namespace potion
