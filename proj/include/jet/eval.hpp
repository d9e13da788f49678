#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jet/embeddings.hpp"

namespace jet {

// ---------------------------------------------------------------------------
// Similarity / relatedness ranking
// ---------------------------------------------------------------------------

struct SimRelPair {
  std::string string1, string2;
  std::string entity1, entity2;
  double gold;
};

// How a pair is scored. Entity+Word sums the entity-entity and string-string
// cosines; Cross additionally adds the two entity-to-other-string cosines.
enum class SimSetting { Entity, Word, Term, EntityPlusWord, Cross };

std::optional<SimSetting> parse_sim_setting(std::string_view name);
const char* sim_setting_name(SimSetting s);

// nullopt when some required vector is unrepresentable ("uncovered").
std::optional<double> pair_score(const SimRelPair& pair, const EmbeddingSet& set,
                                 SimSetting setting);

// Average-tie fractional ranks (1-based).
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation of fractional ranks. Throws when fewer than two values
// or either ranking has zero variance.
double spearman(std::span<const double> gold, std::span<const double> pred);

struct SimRelResult {
  double rho = 0.0;
  double coverage = 0.0;
  size_t covered = 0;
  size_t total = 0;
  std::vector<std::pair<size_t, double>> ranking;  // (pair index, score), score descending
};

// Scores covered pairs and correlates against gold. When `require_covered`
// is non-empty, only pairs representable under every listed setting enter the
// evaluation (the even-footing comparison mode). Throws when fewer than two
// pairs survive.
SimRelResult eval_simrel(std::span<const SimRelPair> pairs, const EmbeddingSet& set,
                         SimSetting setting, std::span<const SimSetting> require_covered = {});

std::vector<SimRelPair> load_simrel(const std::string& path);

// ---------------------------------------------------------------------------
// Analogy completion
// ---------------------------------------------------------------------------

struct AnalogyAnswer {
  std::string entity;
  std::string surface;
};

struct AnalogyInstance {
  std::string a_entity, a_surface;
  std::string b_entity, b_surface;
  std::string c_entity, c_surface;
  std::vector<AnalogyAnswer> answers;  // non-empty; any acceptable d
};

// Ranks candidates of `pool` kind by cosine to b - a + c, skipping excluded
// namespaced keys. Throws when the offset vector is zero.
std::vector<Neighbor> analogy_predict(std::span<const float> a, std::span<const float> b,
                                      std::span<const float> c, const EmbeddingSet& set,
                                      PointKind pool, const std::set<std::string>& exclude,
                                      size_t topk);

enum class AnalogyMode { Entity, Word, Oracle };
std::optional<AnalogyMode> parse_analogy_mode(std::string_view name);

struct AnalogyResult {
  double accuracy = 0.0;
  size_t correct = 0;
  size_t total = 0;
  size_t unrepresentable = 0;  // instances no evaluated path could score
};

// Entity mode ranks entity vectors over entity candidates; word mode ranks
// string vectors over word candidates; oracle counts an instance correct if
// either mode is. a, b, and c are excluded from the candidate pool.
// Unrepresentable instances count as incorrect.
AnalogyResult eval_analogy(std::span<const AnalogyInstance> instances, const EmbeddingSet& set,
                           AnalogyMode mode);

std::vector<AnalogyInstance> load_analogy(const std::string& path);

// ---------------------------------------------------------------------------
// Unsupervised entity disambiguation
// ---------------------------------------------------------------------------

struct WsdInstance {
  std::string mention;
  std::vector<std::string> context;     // normalized tokens
  std::vector<std::string> candidates;  // >= 2 entity ids
  std::string gold;                     // member of candidates
};

// entity id -> definition strings (possibly several per entity).
using DefinitionMap = std::unordered_map<std::string, std::vector<std::string>>;

// cos(C_avg, e) * |P(C_avg, e)| / |e| with P the orthogonal projection of
// C_avg onto e. Signed, unbounded above. Throws on a zero vector.
double wsd_score(std::span<const double> entity, std::span<const double> context_avg);

struct WsdOptions {
  bool use_entity = true;       // direct entity-embedding score
  bool use_definitions = false; // adds the definition-vector score
  bool use_surface = false;     // multiplies by cos(entity, mention vector)
};

struct WsdPrediction {
  std::string predicted;
  std::vector<std::pair<std::string, double>> scores;  // per candidate, input order
  size_t unscorable = 0;  // candidates with no representation (scored -inf)
};

// Scores every candidate against the averaged context vector and returns the
// argmax (ties by ascending entity id). Throws when no context token is in
// vocabulary.
WsdPrediction disambiguate(const WsdInstance& instance, const EmbeddingSet& set,
                           const DefinitionMap& definitions, const WsdOptions& opts);

struct MentionStats {
  size_t correct = 0;
  size_t total = 0;
};

struct WsdEvalResult {
  double accuracy = 0.0;
  size_t correct = 0;
  size_t total = 0;
  size_t failed = 0;  // instances that could not be scored at all
  // Filled in oracle mode: individual paths plus their union.
  std::optional<double> entity_accuracy;
  std::optional<double> definition_accuracy;
  std::optional<double> oracle_accuracy;
  std::vector<std::pair<std::string, MentionStats>> per_mention;  // ascending mention
};

// Accuracy under `opts`; with `oracle` also runs the entity-only and
// definitions-only scorers and counts an instance correct if either is.
WsdEvalResult eval_wsd(std::span<const WsdInstance> instances, const EmbeddingSet& set,
                       const DefinitionMap& definitions, const WsdOptions& opts,
                       bool oracle = false);

// Uniform-random candidate choice / per-mention majority gold.
double wsd_random_baseline(std::span<const WsdInstance> instances, uint64_t seed);
double wsd_majority_baseline(std::span<const WsdInstance> instances);

std::vector<WsdInstance> load_wsd(const std::string& path);
DefinitionMap load_definitions(const std::string& path);

}  // namespace jet
