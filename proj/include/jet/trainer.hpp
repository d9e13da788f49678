#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jet/corpus.hpp"
#include "jet/embeddings.hpp"
#include "jet/sgns.hpp"
#include "jet/terminology.hpp"

namespace jet {

struct TrainConfig {
  uint32_t window = 2;        // k: max context tokens per side
  uint32_t negatives = 5;     // d: negative samples per context word
  float learning_rate = 0.05f;
  uint32_t epochs = 10;
  uint64_t min_count = 10;
  double subsample = 1e-5;
  uint32_t dim = 100;
  uint64_t seed = 1;
  uint32_t workers = 1;
  bool log_progress = true;

  void validate() const;  // throws std::invalid_argument
};

// Input vectors for words, terms, and entities plus the shared context
// (output) vectors, which exist for words only: terms and entities are
// targets, never contexts. During multi-worker training the tables are
// shared mutable state updated without locks.
struct ModelParams {
  uint32_t dim = 0;
  sgns::Matrix<float> word_in;
  sgns::Matrix<float> term_in;
  sgns::Matrix<float> entity_in;
  sgns::Matrix<float> word_ctx;
};

// Input rows uniform in [-0.5/dim, +0.5/dim]; context rows zero.
ModelParams init_params(const Vocabulary& vocab, uint32_t dim, uint64_t seed);

// One applied update, as observed by tests. Entity events repeat their term's
// contexts and negatives object-for-object with weight 1/|E_t|.
struct UpdateEvent {
  PointKind kind;
  uint32_t target;
  uint32_t window;  // effective window b sampled for this position
  float weight;
  std::vector<uint32_t> contexts;
  std::vector<uint32_t> negatives;  // negatives.size() == contexts.size() * d
};

using EventSink = std::function<void(const UpdateEvent&)>;

struct EpochStats {
  uint32_t epoch = 0;
  uint64_t tokens = 0;        // positions processed
  uint64_t word_updates = 0;  // word events with a non-empty context
  uint64_t term_updates = 0;
  double mean_objective = 0.0;  // mean context objective over word updates
  double seconds = 0.0;
  double tokens_per_sec = 0.0;
  float lr_end = 0.0f;
};

// Runs one pass over the stream. `processed` and `total_planned` drive the
// linear learning-rate decay lr0 * max(1 - processed/total_planned, 1e-4)
// across epochs. With workers > 1 updates are hogwild (lock-free, racy, and
// nondeterministic); an event sink requires workers == 1.
EpochStats train_epoch(ModelParams& params, const TrainingStream& stream,
                       const Vocabulary& vocab, const TrainConfig& cfg, uint32_t epoch,
                       std::atomic<uint64_t>& processed, uint64_t total_planned,
                       const EventSink& sink = {});

struct TrainResult {
  ModelParams params;
  Vocabulary vocab;
  std::vector<EpochStats> epoch_stats;
};

using CheckpointFn = std::function<void(uint32_t epoch, const ModelParams&, const Vocabulary&)>;

// Full pipeline: vocabulary, automaton, then `epochs` passes with fresh
// subsampling randomness per pass. Deterministic (bit-identical parameters)
// for a fixed seed with workers == 1. An empty terminology degrades to plain
// skip-gram with negative sampling.
TrainResult train(const LineCorpus& corpus, const Terminology& terminology,
                  const TrainConfig& cfg, const EventSink& sink = {},
                  const CheckpointFn& checkpoint = {});

// Keys the trained rows: word tokens, underscore-joined term keys, entity ids.
EmbeddingSet export_embeddings(const ModelParams& params, const Vocabulary& vocab,
                               const Terminology& terminology);

}  // namespace jet
