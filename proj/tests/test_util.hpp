#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "potion/corpus.hpp"
#include "potion/lexicon.hpp"

namespace potion::test {

inline Lexicon shipped_lexicon() { return Lexicon::load(std::string(POTION_DATA_DIR) + "/lexicon.txt"); }

inline std::string canonical_corpus_path() { return std::string(POTION_DATA_DIR) + "/potions.jsonl"; }

inline Dataset canonical_dataset() { return parse_corpus(canonical_corpus_path(), shipped_lexicon()); }

inline Dataset dataset_from(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return parse_corpus(in, shipped_lexicon());
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("potion-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace potion::test
