#include "jet/matcher.hpp"

#include <deque>
#include <ostream>
#include <stdexcept>

#include "jet/text.hpp"

namespace jet {

MatchAutomaton::MatchAutomaton(const Terminology& terminology) : terminology_(&terminology) {
  if (terminology.empty()) {
    throw std::invalid_argument("cannot build a match automaton from an empty terminology");
  }
  nodes_.emplace_back();  // root
  term_length_.resize(terminology.term_count());

  for (uint32_t term = 0; term < terminology.term_count(); ++term) {
    const auto& tokens = terminology.term_tokens(term);
    term_length_[term] = static_cast<uint32_t>(tokens.size());
    int32_t state = 0;
    for (const std::string& tok : tokens) {
      const auto [it, inserted] = token_ids_.emplace(tok, static_cast<uint32_t>(token_ids_.size()));
      const uint32_t id = it->second;
      auto next = nodes_[state].next.find(id);
      if (next == nodes_[state].next.end()) {
        nodes_[state].next.emplace(id, static_cast<int32_t>(nodes_.size()));
        state = static_cast<int32_t>(nodes_.size());
        nodes_.emplace_back();
      } else {
        state = next->second;
      }
    }
    nodes_[state].term = static_cast<int32_t>(term);
  }

  // Failure links via BFS.
  std::deque<int32_t> queue;
  for (const auto& [token, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const int32_t state = queue.front();
    queue.pop_front();
    const int32_t fail = nodes_[state].fail;
    nodes_[state].output = nodes_[fail].term >= 0 ? fail : nodes_[fail].output;
    for (const auto& [token, child] : nodes_[state].next) {
      nodes_[child].fail = step(fail, token);
      queue.push_back(child);
    }
  }
}

int32_t MatchAutomaton::step(int32_t state, uint32_t token) const {
  while (true) {
    const auto it = nodes_[state].next.find(token);
    if (it != nodes_[state].next.end()) return it->second;
    if (state == 0) return 0;
    state = nodes_[state].fail;
  }
}

template <class Emit>
void MatchAutomaton::scan_impl(std::span<const std::string> tokens, Emit&& emit) const {
  int32_t state = 0;
  for (uint32_t j = 0; j < tokens.size(); ++j) {
    const auto it = token_ids_.find(tokens[j]);
    if (it == token_ids_.end()) {
      state = 0;  // token appears in no term; nothing can span it
      continue;
    }
    state = step(state, it->second);
    // Output chain walks from the longest match ending at j to shorter
    // suffixes, so starts come out ascending.
    int32_t out = nodes_[state].term >= 0 ? state : nodes_[state].output;
    while (out >= 0) {
      const uint32_t term = static_cast<uint32_t>(nodes_[out].term);
      emit(term, j + 1 - term_length_[term], j + 1);
      out = nodes_[out].output;
    }
  }
}

std::vector<TermOccurrence> MatchAutomaton::scan(std::span<const std::string> tokens) const {
  std::vector<TermOccurrence> occurrences;
  scan_impl(tokens, [&](uint32_t term, uint32_t start, uint32_t end) {
    occurrences.push_back({term, start, end, terminology_->entities_of(term)});
  });
  return occurrences;
}

void MatchAutomaton::accumulate_frequencies(std::span<const std::string> tokens,
                                            std::vector<uint64_t>& counts) const {
  scan_impl(tokens, [&](uint32_t term, uint32_t, uint32_t) { ++counts[term]; });
}

void MatchAutomaton::dump_annotations(std::span<const std::string> tokens, uint64_t doc_index,
                                      std::ostream& out) const {
  for (const TermOccurrence& occ : scan(tokens)) {
    out << doc_index << '\t' << occ.start << '\t' << occ.end << '\t'
        << term_key(terminology_->term_tokens(occ.term)) << '\t';
    for (size_t i = 0; i < occ.entities.size(); ++i) {
      if (i) out << ',';
      out << terminology_->entity_id(occ.entities[i]);
    }
    out << '\n';
  }
}

}  // namespace jet
