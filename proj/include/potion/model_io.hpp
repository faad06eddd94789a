#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "potion/error.hpp"
#include "potion/model.hpp"

namespace potion {

// Binary model container, all integers and floats little-endian:
//
//   magic      8 bytes  "POTNMODL"
//   version    u32
//   meta_len   u64, followed by meta_len bytes of JSON metadata
//   n_tensors  u32, then per tensor:
//     name_len u32, name bytes, rank u32, rank x u64 dims,
//     prod(dims) x f64 values
//
// Tensors in order: w1, b1, w2, b2, and for embedding featurizers the frozen
// table as "embedding" with rows in the metadata vocabulary order.
inline constexpr std::string_view kModelMagic = "POTNMODL";

namespace detail {

class ByteWriter {
 public:
  void raw(std::string_view s) { buf_.append(s); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  std::string take() { return std::move(buf_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw CorruptModel("unexpected end of file");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

struct Tensor {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

inline void write_tensor(ByteWriter& w, const Tensor& t) {
  w.u32(static_cast<std::uint32_t>(t.name.size()));
  w.raw(t.name);
  w.u32(static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) w.u64(d);
  for (double v : t.values) w.f64(v);
}

inline Tensor read_tensor(ByteReader& r) {
  Tensor t;
  const std::uint32_t name_len = r.u32();
  t.name = std::string(r.raw(name_len));
  const std::uint32_t rank = r.u32();
  if (rank > 2) throw CorruptModel("tensor '" + t.name + "' has rank " + std::to_string(rank));
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims.push_back(r.u64());
    if (t.dims.back() != 0 && count > (r.remaining() / 8) / t.dims.back())
      throw CorruptModel("tensor '" + t.name + "' is larger than the file");
    count *= t.dims.back();
  }
  if (count * 8 > r.remaining()) throw CorruptModel("tensor '" + t.name + "' is truncated");
  t.values.resize(count);
  for (auto& v : t.values) v = r.f64();
  return t;
}

inline nlohmann::ordered_json meta_to_json(const ModelMeta& m) {
  nlohmann::ordered_json j;
  j["format"] = "potion-model";
  j["tokenizer"] = {{"lowercase", m.tokenizer.lowercase},
                    {"ngram_orders", std::vector<std::size_t>(m.tokenizer.ngram_orders.begin(),
                                                              m.tokenizer.ngram_orders.end())}};
  nlohmann::ordered_json f;
  f["mode"] = std::string(to_string(m.featurizer.mode));
  f["dim"] = m.featurizer.dim;
  if (m.featurizer.mode == FeatureMode::HashedNgrams) {
    f["hash"] = std::string(Featurizer::kHashName);
  } else {
    std::vector<std::string> vocab;
    for (const auto& [tok, vec] : m.featurizer.table.vectors) vocab.push_back(tok);
    f["vocabulary"] = vocab;
  }
  j["featurizer"] = f;
  j["train"] = {{"learning_rate", m.train.learning_rate}, {"epochs", m.train.epochs},
                {"batch_size", m.train.batch_size},       {"l2", m.train.l2},
                {"seed", m.train.seed},                   {"hidden_size", m.train.hidden_size}};
  j["categories"] = m.categories;
  j["rng"] = m.rng;
  j["final_loss"] = m.final_loss;
  return j;
}

}  // namespace detail

inline std::string serialize_model(const ModelParams& m) {
  m.weights.check_shapes();
  detail::ByteWriter w;
  w.raw(kModelMagic);
  w.u32(ModelMeta::kVersion);
  const std::string meta = detail::meta_to_json(m.meta).dump();
  w.u64(meta.size());
  w.raw(meta);

  const auto& p = m.weights;
  std::vector<detail::Tensor> tensors{
      {"w1", {p.w1.rows, p.w1.cols}, p.w1.data},
      {"b1", {p.b1.size()}, p.b1},
      {"w2", {p.w2.rows, p.w2.cols}, p.w2.data},
      {"b2", {p.b2.size()}, p.b2},
  };
  if (m.meta.featurizer.mode == FeatureMode::EmbeddingTable) {
    const auto& table = m.meta.featurizer.table;
    detail::Tensor emb{"embedding", {table.vectors.size(), table.dim}, {}};
    for (const auto& [tok, vec] : table.vectors) emb.values.insert(emb.values.end(), vec.begin(), vec.end());
    tensors.push_back(std::move(emb));
  }
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) detail::write_tensor(w, t);
  return w.take();
}

inline ModelParams deserialize_model(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (bytes.size() < kModelMagic.size() || r.raw(kModelMagic.size()) != kModelMagic)
    throw CorruptModel("bad magic bytes");
  const std::uint32_t version = r.u32();
  if (version != ModelMeta::kVersion) throw VersionMismatch(version, ModelMeta::kVersion);

  const std::uint64_t meta_len = r.u64();
  if (meta_len > r.remaining()) throw CorruptModel("metadata block is truncated");
  ModelParams m;
  std::vector<std::string> vocab;
  try {
    const auto j = nlohmann::json::parse(r.raw(static_cast<std::size_t>(meta_len)));
    if (j.at("format").get<std::string>() != "potion-model") throw CorruptModel("unknown format tag");
    m.meta.tokenizer.lowercase = j.at("tokenizer").at("lowercase").get<bool>();
    m.meta.tokenizer.ngram_orders.clear();
    for (auto n : j.at("tokenizer").at("ngram_orders").get<std::vector<std::size_t>>())
      m.meta.tokenizer.ngram_orders.insert(n);
    const auto& f = j.at("featurizer");
    const auto mode = f.at("mode").get<std::string>();
    if (mode == "hashed") {
      m.meta.featurizer.mode = FeatureMode::HashedNgrams;
      if (f.at("hash").get<std::string>() != Featurizer::kHashName)
        throw CorruptModel("unsupported feature hash");
    } else if (mode == "embedding") {
      m.meta.featurizer.mode = FeatureMode::EmbeddingTable;
      vocab = f.at("vocabulary").get<std::vector<std::string>>();
    } else {
      throw CorruptModel("unknown featurizer mode '" + mode + "'");
    }
    m.meta.featurizer.dim = f.at("dim").get<std::size_t>();
    const auto& t = j.at("train");
    m.meta.train.learning_rate = t.at("learning_rate").get<double>();
    m.meta.train.epochs = t.at("epochs").get<std::size_t>();
    m.meta.train.batch_size = t.at("batch_size").get<std::size_t>();
    m.meta.train.l2 = t.at("l2").get<double>();
    m.meta.train.seed = t.at("seed").get<std::uint64_t>();
    m.meta.train.hidden_size = t.at("hidden_size").get<std::size_t>();
    m.meta.categories = j.at("categories").get<std::vector<std::string>>();
    m.meta.rng = j.at("rng").get<std::string>();
    m.meta.final_loss = j.at("final_loss").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("metadata: ") + e.what());
  }
  if (m.meta.categories.size() != kNumCategories) throw CorruptModel("category list must have 11 entries");

  const std::uint32_t n_tensors = r.u32();
  const std::uint32_t expected = m.meta.featurizer.mode == FeatureMode::EmbeddingTable ? 5 : 4;
  if (n_tensors != expected) throw CorruptModel("unexpected tensor count");
  auto next = [&](std::string_view name, std::size_t rank) {
    detail::Tensor t = detail::read_tensor(r);
    if (t.name != name) throw CorruptModel("expected tensor '" + std::string(name) + "', found '" + t.name + "'");
    if (t.dims.size() != rank) throw CorruptModel("tensor '" + t.name + "' has wrong rank");
    return t;
  };
  auto as_matrix = [](detail::Tensor t) {
    Matrix mat;
    mat.rows = static_cast<std::size_t>(t.dims[0]);
    mat.cols = static_cast<std::size_t>(t.dims[1]);
    mat.data = std::move(t.values);
    return mat;
  };
  m.weights.w1 = as_matrix(next("w1", 2));
  m.weights.b1 = next("b1", 1).values;
  m.weights.w2 = as_matrix(next("w2", 2));
  m.weights.b2 = next("b2", 1).values;
  if (m.meta.featurizer.mode == FeatureMode::EmbeddingTable) {
    detail::Tensor emb = next("embedding", 2);
    if (emb.dims[0] != vocab.size() || emb.dims[1] != m.meta.featurizer.dim)
      throw CorruptModel("embedding tensor does not match vocabulary");
    auto& table = m.meta.featurizer.table;
    table.dim = m.meta.featurizer.dim;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      auto first = emb.values.begin() + static_cast<std::ptrdiff_t>(i * table.dim);
      table.vectors.emplace(vocab[i], std::vector<double>(first, first + static_cast<std::ptrdiff_t>(table.dim)));
    }
    if (table.vectors.size() != vocab.size()) throw CorruptModel("duplicate embedding token");
  }
  if (r.remaining() != 0) throw CorruptModel("trailing bytes after tensors");

  try {
    m.weights.check_shapes();
  } catch (const ShapeMismatch& e) {
    throw CorruptModel(e.what());
  }
  if (m.weights.features() != m.meta.featurizer.width() ||
      m.weights.hidden() != m.meta.train.hidden_size)
    throw CorruptModel("tensor shapes disagree with metadata");
  return m;
}

inline void save_model(const ModelParams& m, const std::string& path) {
  const std::string bytes = serialize_model(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing model file " + path);
}

inline ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace potion
