#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "jet/rng.hpp"

namespace testutil {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("jet_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Two-topic synthetic corpus: each topic has its own content words and ten
// entities; every entity gets a unique single-token term plus a term shared
// by all entities of its topic (the ambiguous one).
struct SyntheticData {
  std::vector<std::string> corpus;
  std::vector<std::pair<std::string, std::string>> terminology;  // (surface, entity)
  std::unordered_map<std::string, int> entity_topic;
};

inline SyntheticData make_synthetic_corpus(size_t docs, size_t tokens_per_doc, uint64_t seed) {
  constexpr int kTopics = 2;
  constexpr int kEntitiesPerTopic = 10;
  constexpr int kWordsPerTopic = 30;

  SyntheticData data;
  for (int t = 0; t < kTopics; ++t) {
    for (int i = 0; i < kEntitiesPerTopic; ++i) {
      const std::string entity = "E" + std::to_string(t) + "x" + std::to_string(i);
      data.entity_topic[entity] = t;
      data.terminology.emplace_back("m" + std::to_string(t) + "u" + std::to_string(i), entity);
      data.terminology.emplace_back("shared" + std::to_string(t), entity);
    }
  }

  jet::Rng rng(seed, 0x535944);
  data.corpus.reserve(docs);
  for (size_t d = 0; d < docs; ++d) {
    const int topic = static_cast<int>(d % kTopics);
    std::string line;
    const size_t mention_a = 2 + rng.below(static_cast<uint32_t>(tokens_per_doc / 2 - 2));
    const size_t mention_b =
        tokens_per_doc / 2 + rng.below(static_cast<uint32_t>(tokens_per_doc / 2 - 2));
    for (size_t p = 0; p < tokens_per_doc; ++p) {
      if (!line.empty()) line.push_back(' ');
      if (p == mention_a || p == mention_b) {
        const int ent = static_cast<int>(rng.below(kEntitiesPerTopic));
        if (rng.next_double() < 0.6) {
          line += "m" + std::to_string(topic) + "u" + std::to_string(ent);
        } else {
          line += "shared" + std::to_string(topic);
        }
      } else {
        line += "w" + std::to_string(topic) + "c" + std::to_string(rng.below(kWordsPerTopic));
      }
    }
    data.corpus.push_back(std::move(line));
  }
  return data;
}

}  // namespace testutil
