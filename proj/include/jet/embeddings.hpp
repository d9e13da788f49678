#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jet/sgns.hpp"

namespace jet {

enum class PointKind : uint8_t { Word = 0, Term = 1, Entity = 2 };

inline constexpr std::array<PointKind, 3> kAllKinds = {PointKind::Word, PointKind::Term,
                                                       PointKind::Entity};

const char* kind_prefix(PointKind kind);   // "word:", "term:", "ent:"
const char* kind_name(PointKind kind);     // "word", "term", "entity"
std::optional<PointKind> parse_kind(std::string_view name);
std::string namespaced_key(PointKind kind, std::string_view key);
// Splits "ent:C123" into (Entity, "C123"); error on unknown prefix.
std::pair<PointKind, std::string> split_namespaced_key(std::string_view key);

// The trained vectors, keyed per kind. Word keys are tokens, term keys are
// underscore-joined tokens (see term_key), entity keys are entity ids.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(uint32_t dim) : dim_(dim) {}

  uint32_t dim() const { return dim_; }
  size_t size(PointKind kind) const { return keys_[idx(kind)].size(); }
  size_t size() const;

  // Throws on duplicate key within a kind or dimension mismatch.
  void add(PointKind kind, std::string key, std::span<const float> vec);

  std::optional<std::span<const float>> find(PointKind kind, std::string_view key) const;
  std::span<const float> at(PointKind kind, std::string_view key) const;  // throws if absent
  const std::vector<std::string>& keys(PointKind kind) const { return keys_[idx(kind)]; }
  std::span<const float> vector_at(PointKind kind, uint32_t row) const {
    return {data_[idx(kind)].data() + static_cast<size_t>(row) * dim_, dim_};
  }

  static constexpr size_t idx(PointKind kind) { return static_cast<size_t>(kind); }

 private:
  uint32_t dim_ = 0;
  std::array<std::vector<std::string>, 3> keys_;
  std::array<std::unordered_map<std::string, uint32_t>, 3> index_;
  std::array<std::vector<float>, 3> data_;
};

// x.y / (|x| |y|). Throws on a zero vector or dimension mismatch.
double cosine(std::span<const float> x, std::span<const float> y);
double cosine(std::span<const double> x, std::span<const double> y);

// Average word vector of the in-vocabulary tokens of s (after normalize).
// Throws when no token is known.
std::vector<float> string_vector(const EmbeddingSet& set, std::string_view s);

// Term vector when the normalized string is a known term, otherwise
// string_vector (back-off to words).
std::vector<float> term_or_backoff(const EmbeddingSet& set, std::string_view s);

struct Neighbor {
  std::string key;
  PointKind kind;
  double score;
};

// Exact top-k by descending cosine over the requested kinds, skipping
// excluded namespaced keys ("ent:C1"). Ties break by ascending namespaced
// key. Throws when no candidate remains.
std::vector<Neighbor> nearest(const EmbeddingSet& set, std::span<const float> query,
                              std::span<const PointKind> kinds, size_t topk,
                              const std::set<std::string>& exclude = {});

enum class EmbeddingFormat { Text, Binary };

// Text: header "count dim", then "key v1 .. vdim" with namespaced keys and 9
// significant digits. Binary: magic "JETE", version u32, dim u32, then per
// record kind byte, key length u32, key bytes, dim little-endian f32; binary
// round-trips bit-exactly. Writes go to a temporary file renamed on success.
void save_embeddings(const EmbeddingSet& set, const std::string& path, EmbeddingFormat format);
EmbeddingSet load_embeddings(const std::string& path);  // sniffs the magic
EmbeddingSet load_embeddings_text(const std::string& path);
EmbeddingSet load_embeddings_binary(const std::string& path);

}  // namespace jet
