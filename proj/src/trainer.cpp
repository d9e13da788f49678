#include "jet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "jet/text.hpp"

namespace jet {

void TrainConfig::validate() const {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be > 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (min_count < 1) throw std::invalid_argument("min-count must be >= 1");
  if (!(subsample > 0)) throw std::invalid_argument("subsample coefficient must be > 0");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

ModelParams init_params(const Vocabulary& vocab, uint32_t dim, uint64_t seed) {
  ModelParams params;
  params.dim = dim;
  params.word_in = sgns::Matrix<float>(static_cast<uint32_t>(vocab.words.size()), dim);
  params.term_in = sgns::Matrix<float>(static_cast<uint32_t>(vocab.terms.size()), dim);
  params.entity_in = sgns::Matrix<float>(static_cast<uint32_t>(vocab.entities.size()), dim);
  params.word_ctx = sgns::Matrix<float>(static_cast<uint32_t>(vocab.words.size()), dim);

  Rng rng(seed, rng_stream::kParamInit);
  const double scale = 1.0 / static_cast<double>(dim);
  for (sgns::Matrix<float>* m : {&params.word_in, &params.term_in, &params.entity_in}) {
    for (float& x : m->data) {
      x = static_cast<float>((rng.next_double() - 0.5) * scale);
    }
  }
  return params;
}

namespace {

struct WorkerTotals {
  uint64_t tokens = 0;
  uint64_t word_updates = 0;
  uint64_t term_updates = 0;
  double objective_sum = 0.0;
  float lr_end = 0.0f;
};

void run_worker(ModelParams& params, const TrainingStream& stream, const Vocabulary& vocab,
                const TrainConfig& cfg, uint32_t epoch, uint32_t worker,
                std::atomic<uint64_t>& processed, uint64_t total_planned, const EventSink& sink,
                WorkerTotals& totals) {
  Rng rng(cfg.seed, rng_stream::kTraining,
          (static_cast<uint64_t>(epoch) << 32) | worker);
  const float lr0 = cfg.learning_rate;
  const uint32_t d = cfg.negatives;
  std::vector<float> grad(params.dim);
  std::vector<uint32_t> contexts;
  std::vector<uint32_t> negatives;
  float lr = lr0;

  auto draw_negatives = [&](size_t n_contexts) {
    negatives.clear();
    for (size_t i = 0; i < n_contexts * d; ++i) negatives.push_back(vocab.negative_sample(rng));
  };
  auto emit = [&](PointKind kind, uint32_t target, uint32_t b, float weight) {
    if (sink) sink({kind, target, b, weight, contexts, negatives});
  };

  for (size_t di = worker; di < stream.documents.size(); di += cfg.workers) {
    const StreamDocument& doc = stream.documents[di];
    const uint32_t len = static_cast<uint32_t>(doc.words.size());
    size_t occ_cursor = 0;
    for (uint32_t p = 0; p < len; ++p) {
      const uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
      lr = lr0 * static_cast<float>(std::max(
                     1.0 - static_cast<double>(done) / static_cast<double>(total_planned), 1e-4));

      const uint32_t b = 1 + rng.below(cfg.window);

      // Word update at every position.
      contexts.clear();
      const uint32_t lo = p >= b ? p - b : 0;
      const uint32_t hi = std::min(len, p + b + 1);
      for (uint32_t q = lo; q < hi; ++q) {
        if (q != p) contexts.push_back(doc.words[q]);
      }
      if (!contexts.empty()) {
        draw_negatives(contexts.size());
        totals.objective_sum += sgns::apply_event<float>(params.word_in, doc.words[p],
                                                         params.word_ctx, contexts, negatives, lr,
                                                         1.0f, grad);
        ++totals.word_updates;
        emit(PointKind::Word, doc.words[p], b, 1.0f);
      }

      // Terms completed at this position, then their entities.
      while (occ_cursor < doc.occurrences.size() &&
             doc.occurrences[occ_cursor].trigger == p) {
        const StreamOccurrence& occ = doc.occurrences[occ_cursor++];
        contexts.clear();
        const uint32_t left_lo = occ.left_end >= b ? occ.left_end - b : 0;
        for (uint32_t q = left_lo; q < occ.left_end; ++q) contexts.push_back(doc.words[q]);
        const uint32_t right_hi = std::min(len, occ.right_begin + b);
        for (uint32_t q = occ.right_begin; q < right_hi; ++q) contexts.push_back(doc.words[q]);
        if (contexts.empty()) continue;
        draw_negatives(contexts.size());
        sgns::apply_event<float>(params.term_in, occ.term_row, params.word_ctx, contexts,
                                 negatives, lr, 1.0f, grad);
        ++totals.term_updates;
        emit(PointKind::Term, occ.term_row, b, 1.0f);
        for (uint32_t e = occ.ent_begin; e < occ.ent_end; ++e) {
          const uint32_t row = doc.entity_rows[e];
          sgns::apply_event<float>(params.entity_in, row, params.word_ctx, contexts, negatives,
                                   lr, occ.inv_entities, grad);
          emit(PointKind::Entity, row, b, occ.inv_entities);
        }
      }
      ++totals.tokens;
    }
  }
  totals.lr_end = lr;
}

}  // namespace

EpochStats train_epoch(ModelParams& params, const TrainingStream& stream,
                       const Vocabulary& vocab, const TrainConfig& cfg, uint32_t epoch,
                       std::atomic<uint64_t>& processed, uint64_t total_planned,
                       const EventSink& sink) {
  cfg.validate();
  if (sink && cfg.workers != 1) {
    throw std::invalid_argument("event capture requires a single worker");
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<WorkerTotals> totals(cfg.workers);
  if (cfg.workers == 1) {
    run_worker(params, stream, vocab, cfg, epoch, 0, processed, total_planned, sink, totals[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(cfg.workers);
    for (uint32_t w = 0; w < cfg.workers; ++w) {
      threads.emplace_back(run_worker, std::ref(params), std::cref(stream), std::cref(vocab),
                           std::cref(cfg), epoch, w, std::ref(processed), total_planned,
                           std::cref(sink), std::ref(totals[w]));
    }
    for (auto& t : threads) t.join();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  EpochStats stats;
  stats.epoch = epoch;
  for (const WorkerTotals& t : totals) {
    stats.tokens += t.tokens;
    stats.word_updates += t.word_updates;
    stats.term_updates += t.term_updates;
    stats.mean_objective += t.objective_sum;
  }
  stats.mean_objective =
      stats.word_updates ? stats.mean_objective / static_cast<double>(stats.word_updates) : 0.0;
  stats.seconds = seconds;
  stats.tokens_per_sec = seconds > 0 ? static_cast<double>(stats.tokens) / seconds : 0.0;
  stats.lr_end = totals[0].lr_end;
  return stats;
}

TrainResult train(const LineCorpus& corpus, const Terminology& terminology,
                  const TrainConfig& cfg, const EventSink& sink, const CheckpointFn& checkpoint) {
  cfg.validate();
  std::unique_ptr<MatchAutomaton> automaton;
  if (!terminology.empty()) automaton = std::make_unique<MatchAutomaton>(terminology);

  TrainResult result;
  result.vocab =
      build_vocabulary(corpus, terminology, automaton.get(), cfg.min_count, cfg.subsample);
  result.params = init_params(result.vocab, cfg.dim, cfg.seed);

  std::atomic<uint64_t> processed{0};
  uint64_t total_planned = 1;
  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    TrainingStream stream = prepare_stream(corpus, result.vocab, automaton.get(),
                                           Rng(cfg.seed, rng_stream::kStreamPrep, epoch));
    if (epoch == 0) {
      total_planned = std::max<uint64_t>(1, cfg.epochs * stream.total_tokens);
    }
    EpochStats stats =
        train_epoch(result.params, stream, result.vocab, cfg, epoch, processed, total_planned, sink);
    if (cfg.log_progress) {
      std::cerr << "epoch " << (epoch + 1) << "/" << cfg.epochs << " tokens " << stats.tokens
                << " tokens/s " << static_cast<uint64_t>(stats.tokens_per_sec) << " lr "
                << stats.lr_end << " objective " << stats.mean_objective << "\n";
    }
    result.epoch_stats.push_back(stats);
    if (checkpoint) checkpoint(epoch, result.params, result.vocab);
  }
  return result;
}

EmbeddingSet export_embeddings(const ModelParams& params, const Vocabulary& vocab,
                               const Terminology& terminology) {
  EmbeddingSet set(params.dim);
  for (uint32_t row = 0; row < vocab.words.size(); ++row) {
    set.add(PointKind::Word, vocab.words[row].token, params.word_in.row(row));
  }
  for (uint32_t row = 0; row < vocab.terms.size(); ++row) {
    set.add(PointKind::Term, term_key(terminology.term_tokens(vocab.terms[row].term)),
            params.term_in.row(row));
  }
  for (uint32_t row = 0; row < vocab.entities.size(); ++row) {
    set.add(PointKind::Entity, terminology.entity_id(vocab.entities[row]),
            params.entity_in.row(row));
  }
  return set;
}

}  // namespace jet
