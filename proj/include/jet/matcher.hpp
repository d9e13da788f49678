#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jet/terminology.hpp"

namespace jet {

// One exact term match over a normalized token stream. Token offsets are
// half-open: stream[start..end) equals the term. `entities` views the
// terminology's candidate set and stays valid while the terminology lives.
struct TermOccurrence {
  uint32_t term;   // terminology term index
  uint32_t start;  // inclusive
  uint32_t end;    // exclusive
  std::span<const uint32_t> entities;
};

// Aho-Corasick automaton over the terminology's token alphabet. scan() emits
// every occurrence of every term, including overlapping and nested matches.
// Immutable after build; safe for concurrent scans.
class MatchAutomaton {
 public:
  // Throws when the terminology is empty. The terminology must outlive the
  // automaton and any occurrences produced from it.
  explicit MatchAutomaton(const Terminology& terminology);

  // All matches in `tokens`, sorted by (end, start) ascending.
  std::vector<TermOccurrence> scan(std::span<const std::string> tokens) const;

  // Occurrence counts per terminology term across a corpus of documents;
  // overlapping matches count separately.
  template <class DocumentRange>
  std::vector<uint64_t> term_frequencies(const DocumentRange& docs) const {
    std::vector<uint64_t> counts(terminology_->term_count(), 0);
    for (const auto& doc : docs) accumulate_frequencies(doc, counts);
    return counts;
  }

  void accumulate_frequencies(std::span<const std::string> tokens,
                              std::vector<uint64_t>& counts) const;

  const Terminology& terminology() const { return *terminology_; }

  // Annotation record: "doc_index TAB start TAB end TAB term-key TAB e1,e2,...".
  void dump_annotations(std::span<const std::string> tokens, uint64_t doc_index,
                        std::ostream& out) const;

 private:
  struct Node {
    std::unordered_map<uint32_t, int32_t> next;
    int32_t fail = 0;
    int32_t output = -1;  // nearest suffix state that ends a term
    int32_t term = -1;    // term ending exactly here (terms are unique sequences)
  };

  int32_t step(int32_t state, uint32_t token) const;
  template <class Emit>
  void scan_impl(std::span<const std::string> tokens, Emit&& emit) const;

  const Terminology* terminology_;
  std::unordered_map<std::string, uint32_t> token_ids_;
  std::vector<Node> nodes_;
  std::vector<uint32_t> term_length_;
};

}  // namespace jet
