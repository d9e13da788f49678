#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jet/matcher.hpp"
#include "jet/rng.hpp"
#include "jet/terminology.hpp"

namespace jet {

// Training corpus: UTF-8 plain text, one document per line. File-backed
// corpora are re-read on every pass; in-memory corpora serve tests and the
// bindings.
class LineCorpus {
 public:
  static LineCorpus from_file(std::string path);
  static LineCorpus from_lines(std::vector<std::string> lines);

  // Calls fn(doc_index, raw_line) for every document.
  void for_each(const std::function<void(uint64_t, std::string_view)>& fn) const;

 private:
  LineCorpus() = default;
  std::string path_;
  std::vector<std::string> lines_;
  bool file_backed_ = false;
};

// Walker alias table: O(1) exact sampling from a fixed discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  uint32_t sample(Rng& rng) const {
    const uint32_t i = rng.below(static_cast<uint32_t>(accept_.size()));
    return rng.next_double() < accept_[i] ? i : alias_[i];
  }

  size_t size() const { return accept_.size(); }
  // Probability the table actually assigns to index i (for verification).
  double probability(uint32_t i) const;

 private:
  std::vector<double> accept_;
  std::vector<uint32_t> alias_;
};

// p_keep = min(1, sqrt(coeff / r)) with r = freq / total. Words at or below
// the coefficient are always kept.
double keep_probability(uint64_t freq, uint64_t total, double coeff);

// Frequency-filtered word and term inventories plus the sampling tables the
// trainer needs. Word rows are ordered by (frequency desc, token asc), term
// rows by (frequency desc, key asc), entity rows by entity id asc; the
// ordering is part of the determinism contract.
struct Vocabulary {
  struct Word {
    std::string token;
    uint64_t freq;
  };
  struct Term {
    uint32_t term;  // terminology term index
    uint64_t freq;
  };

  std::vector<Word> words;
  std::vector<Term> terms;
  std::vector<uint32_t> entities;  // terminology entity indexes
  uint64_t min_count = 10;
  double subsample_coeff = 1e-5;
  uint64_t total_word_tokens = 0;  // all normalized tokens, retained or not
  std::vector<double> keep_prob;   // per word row
  AliasTable negative_table;       // unigram^0.75 over word rows

  std::unordered_map<std::string, uint32_t> word_index;
  std::vector<int32_t> term_row;    // terminology term -> row, -1 if dropped
  std::vector<int32_t> entity_row;  // terminology entity -> row, -1 if dropped

  int32_t find_word(std::string_view token) const;
  uint32_t negative_sample(Rng& rng) const { return negative_table.sample(rng); }

  // "kind TAB key TAB frequency" rows: words first, then terms.
  void dump(std::ostream& out, const Terminology& t) const;
};

// Counts words over normalized tokens and terms via the automaton, drops
// items below min_count, and builds the subsampling and negative tables.
// `automaton` may be null (no terminology supervision). Throws when the
// corpus is empty or nothing survives the frequency filter.
Vocabulary build_vocabulary(const LineCorpus& corpus, const Terminology& terminology,
                            const MatchAutomaton* automaton, uint64_t min_count,
                            double subsample_coeff);

// A term mention remapped into post-subsampling coordinates. Context comes
// from surviving tokens strictly outside the original span: left context
// positions are [left_end - b, left_end), right context [right_begin,
// right_begin + b). `trigger` is the stream position whose window update the
// mention rides on (the last surviving token before the span's end, or 0 when
// the whole prefix was deleted).
struct StreamOccurrence {
  uint32_t term_row;
  uint32_t trigger;
  uint32_t left_end;
  uint32_t right_begin;
  uint32_t ent_begin;  // range into StreamDocument::entity_rows
  uint32_t ent_end;
  float inv_entities;  // 1 / |E_t|
};

struct StreamDocument {
  std::vector<uint32_t> words;  // vocabulary word rows, post-subsampling
  std::vector<StreamOccurrence> occurrences;  // sorted by trigger, then (end, start)
  std::vector<uint32_t> entity_rows;
};

struct TrainingStream {
  std::vector<StreamDocument> documents;
  uint64_t total_tokens = 0;
};

// Normalizes and indexes every document, attaches term occurrences (detected
// before any deletion), drops out-of-vocabulary words, and deletes frequent
// words with probability 1 - p_keep. Deterministic for a fixed rng.
TrainingStream prepare_stream(const LineCorpus& corpus, const Vocabulary& vocab,
                              const MatchAutomaton* automaton, Rng rng);

}  // namespace jet
