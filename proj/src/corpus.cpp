#include "jet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "jet/text.hpp"

namespace jet {

LineCorpus LineCorpus::from_file(std::string path) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open corpus file: " + path);
  LineCorpus c;
  c.path_ = std::move(path);
  c.file_backed_ = true;
  return c;
}

LineCorpus LineCorpus::from_lines(std::vector<std::string> lines) {
  LineCorpus c;
  c.lines_ = std::move(lines);
  return c;
}

void LineCorpus::for_each(const std::function<void(uint64_t, std::string_view)>& fn) const {
  if (file_backed_) {
    std::ifstream in(path_);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path_);
    std::string line;
    uint64_t index = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      fn(index++, line);
    }
  } else {
    for (uint64_t i = 0; i < lines_.size(); ++i) fn(i, lines_[i]);
  }
}

AliasTable::AliasTable(std::span<const double> weights) {
  const size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table needs at least one weight");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw std::invalid_argument("alias table weights must be non-negative");
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("alias table weights sum to zero");

  accept_.assign(n, 1.0);
  alias_.resize(n);
  std::vector<double> scaled(n);
  for (size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

  std::vector<uint32_t> small, large;
  for (size_t i = 0; i < n; ++i) {
    alias_[i] = static_cast<uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const uint32_t s = small.back();
    const uint32_t l = large.back();
    small.pop_back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (uint32_t i : large) accept_[i] = 1.0;
  for (uint32_t i : small) accept_[i] = 1.0;  // numerical leftovers
}

double AliasTable::probability(uint32_t index) const {
  const double n = static_cast<double>(accept_.size());
  double p = accept_[index];
  for (size_t j = 0; j < accept_.size(); ++j) {
    if (alias_[j] == index && j != index) p += 1.0 - accept_[j];
  }
  return p / n;
}

double keep_probability(uint64_t freq, uint64_t total, double coeff) {
  if (total == 0 || freq == 0) throw std::invalid_argument("keep_probability: bad counts");
  const double r = static_cast<double>(freq) / static_cast<double>(total);
  if (r <= coeff) return 1.0;
  return std::sqrt(coeff / r);
}

int32_t Vocabulary::find_word(std::string_view token) const {
  const auto it = word_index.find(std::string(token));
  return it == word_index.end() ? -1 : static_cast<int32_t>(it->second);
}

void Vocabulary::dump(std::ostream& out, const Terminology& t) const {
  for (const Word& w : words) out << "word\t" << w.token << '\t' << w.freq << '\n';
  for (const Term& term : terms) {
    out << "term\t" << term_key(t.term_tokens(term.term)) << '\t' << term.freq << '\n';
  }
}

Vocabulary build_vocabulary(const LineCorpus& corpus, const Terminology& terminology,
                            const MatchAutomaton* automaton, uint64_t min_count,
                            double subsample_coeff) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  if (!(subsample_coeff > 0)) throw std::invalid_argument("subsample coefficient must be > 0");

  std::unordered_map<std::string, uint64_t> word_freq;
  std::vector<uint64_t> term_freq(terminology.term_count(), 0);
  uint64_t total_tokens = 0;
  uint64_t docs = 0;
  corpus.for_each([&](uint64_t, std::string_view line) {
    ++docs;
    const auto tokens = normalize(line);
    total_tokens += tokens.size();
    for (const auto& tok : tokens) ++word_freq[tok];
    if (automaton) automaton->accumulate_frequencies(tokens, term_freq);
  });
  if (docs == 0) throw std::runtime_error("corpus is empty");

  Vocabulary vocab;
  vocab.min_count = min_count;
  vocab.subsample_coeff = subsample_coeff;
  vocab.total_word_tokens = total_tokens;

  for (const auto& [token, freq] : word_freq) {
    if (freq >= min_count) vocab.words.push_back({token, freq});
  }
  std::sort(vocab.words.begin(), vocab.words.end(), [](const auto& a, const auto& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return a.token < b.token;
  });
  if (vocab.words.empty()) {
    throw std::runtime_error("no word meets the minimum frequency of " + std::to_string(min_count));
  }
  vocab.word_index.reserve(vocab.words.size());
  for (uint32_t i = 0; i < vocab.words.size(); ++i) vocab.word_index.emplace(vocab.words[i].token, i);

  vocab.keep_prob.resize(vocab.words.size());
  for (uint32_t i = 0; i < vocab.words.size(); ++i) {
    vocab.keep_prob[i] = keep_probability(vocab.words[i].freq, total_tokens, subsample_coeff);
  }
  std::vector<double> neg_weights(vocab.words.size());
  for (uint32_t i = 0; i < vocab.words.size(); ++i) {
    neg_weights[i] = std::pow(static_cast<double>(vocab.words[i].freq), 0.75);
  }
  vocab.negative_table = AliasTable(neg_weights);

  vocab.term_row.assign(terminology.term_count(), -1);
  vocab.entity_row.assign(terminology.entity_count(), -1);
  for (uint32_t term = 0; term < terminology.term_count(); ++term) {
    if (term_freq[term] >= min_count) vocab.terms.push_back({term, term_freq[term]});
  }
  std::sort(vocab.terms.begin(), vocab.terms.end(), [&](const auto& a, const auto& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return terminology.term_tokens(a.term) < terminology.term_tokens(b.term);
  });
  for (uint32_t row = 0; row < vocab.terms.size(); ++row) {
    vocab.term_row[vocab.terms[row].term] = static_cast<int32_t>(row);
  }

  // An entity is retained iff at least one of its terms is retained.
  for (const auto& term : vocab.terms) {
    for (uint32_t ent : terminology.entities_of(term.term)) {
      if (vocab.entity_row[ent] == -1) {
        vocab.entity_row[ent] = 0;  // mark; rows assigned below in id order
        vocab.entities.push_back(ent);
      }
    }
  }
  std::sort(vocab.entities.begin(), vocab.entities.end(), [&](uint32_t a, uint32_t b) {
    return terminology.entity_id(a) < terminology.entity_id(b);
  });
  for (uint32_t row = 0; row < vocab.entities.size(); ++row) {
    vocab.entity_row[vocab.entities[row]] = static_cast<int32_t>(row);
  }
  return vocab;
}

TrainingStream prepare_stream(const LineCorpus& corpus, const Vocabulary& vocab,
                              const MatchAutomaton* automaton, Rng rng) {
  TrainingStream stream;
  std::vector<uint32_t> survivors_before;  // prefix counts, size n+1
  corpus.for_each([&](uint64_t, std::string_view line) {
    const auto tokens = normalize(line);
    StreamDocument doc;

    // Match terms on the unfiltered token sequence.
    std::vector<TermOccurrence> occurrences;
    if (automaton) occurrences = automaton->scan(tokens);

    survivors_before.assign(tokens.size() + 1, 0);
    doc.words.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) {
      survivors_before[i] = static_cast<uint32_t>(doc.words.size());
      const int32_t row = vocab.find_word(tokens[i]);
      if (row < 0) continue;
      const double keep = vocab.keep_prob[row];
      if (keep < 1.0 && rng.next_double() >= keep) continue;
      doc.words.push_back(static_cast<uint32_t>(row));
    }
    survivors_before[tokens.size()] = static_cast<uint32_t>(doc.words.size());

    if (!doc.words.empty()) {
      for (const TermOccurrence& occ : occurrences) {
        const int32_t row = vocab.term_row[occ.term];
        if (row < 0) continue;
        StreamOccurrence so;
        so.term_row = static_cast<uint32_t>(row);
        so.left_end = survivors_before[occ.start];
        so.right_begin = survivors_before[occ.end];
        so.trigger = so.right_begin > 0 ? so.right_begin - 1 : 0;
        so.ent_begin = static_cast<uint32_t>(doc.entity_rows.size());
        for (uint32_t ent : occ.entities) {
          doc.entity_rows.push_back(static_cast<uint32_t>(vocab.entity_row[ent]));
        }
        so.ent_end = static_cast<uint32_t>(doc.entity_rows.size());
        so.inv_entities = 1.0f / static_cast<float>(occ.entities.size());
        doc.occurrences.push_back(so);
      }
      // scan() order is (end, start) ascending and trigger is monotone in
      // end, so occurrences are already grouped by trigger.
    }

    stream.total_tokens += doc.words.size();
    stream.documents.push_back(std::move(doc));
  });
  return stream;
}

}  // namespace jet
