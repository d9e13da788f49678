#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace jet {

// Many-to-many mapping between normalized terms and entity identifiers.
// Immutable after load; both directions are exact inverses of each other.
// Terms are stored in normalized form (see normalize()); duplicate
// (term, entity) pairs collapse to one.
class Terminology {
 public:
  struct LoadStats {
    uint64_t records = 0;         // well-formed (surface, entity) records seen
    uint64_t malformed = 0;       // lines with the wrong field count or a bad entity id
    uint64_t dropped_empty = 0;   // surfaces that normalized to nothing
    uint64_t duplicates = 0;      // repeated (term, entity) pairs
  };

  Terminology() = default;

  // Reads two-column TSV records "surface TAB entity-id". Malformed lines are
  // reported to `log` with their line number and skipped. Throws if no valid
  // record remains.
  static Terminology load(std::istream& in, std::string source_name,
                          LoadStats* stats = nullptr, std::ostream* log = nullptr);
  static Terminology load_file(const std::string& path, LoadStats* stats = nullptr,
                               std::ostream* log = nullptr);

  // In-memory construction for tests and bindings: records of (surface, entity).
  static Terminology from_records(const std::vector<std::pair<std::string, std::string>>& records,
                                  std::string source_name = "memory", LoadStats* stats = nullptr);

  // Writes canonical "surface TAB entity" records; loading them back
  // reproduces this terminology exactly.
  void save(std::ostream& out) const;

  uint32_t term_count() const { return static_cast<uint32_t>(term_tokens_.size()); }
  uint32_t entity_count() const { return static_cast<uint32_t>(entity_ids_.size()); }
  bool empty() const { return term_tokens_.empty(); }

  const std::string& source_name() const { return source_name_; }

  // Term lookup by normalized tokens; -1 when unknown.
  int32_t find_term(std::span<const std::string> tokens) const;
  const std::vector<std::string>& term_tokens(uint32_t term) const { return term_tokens_[term]; }
  // Candidate entity set E_t, sorted by ascending entity id string.
  std::span<const uint32_t> entities_of(uint32_t term) const { return term_entities_[term]; }

  int32_t find_entity(std::string_view id) const;
  const std::string& entity_id(uint32_t entity) const { return entity_ids_[entity]; }
  std::span<const uint32_t> terms_of(uint32_t entity) const { return entity_terms_[entity]; }

  // |E_t| for a normalized term; 0 when the term is unknown.
  size_t polysemy(std::span<const std::string> tokens) const;

 private:
  void finalize();

  std::vector<std::vector<std::string>> term_tokens_;
  std::vector<std::vector<uint32_t>> term_entities_;
  std::unordered_map<std::string, uint32_t> term_index_;  // keyed by space-joined tokens
  std::vector<std::string> entity_ids_;
  std::unordered_map<std::string, uint32_t> entity_index_;
  std::vector<std::vector<uint32_t>> entity_terms_;
  std::string source_name_;
};

// Frequency-weighted ambiguity of each entity's observed mentions.
// Entities whose terms never matched (Z = 0) are absent.
struct PolysemyReport {
  struct Entry {
    uint32_t entity;       // terminology entity index
    double cp;             // >= 1 whenever z > 0
    uint64_t mentions;     // Z: total matched occurrences of the entity's terms
  };
  std::vector<Entry> entries;  // sorted by descending cp, then ascending entity id

  // "entity-id TAB cp TAB mentions" rows in `entries` order.
  void save(std::ostream& out, const Terminology& t) const;
};

// term_freqs[term] counts matched occurrences of each terminology term in a
// corpus (see MatchAutomaton::term_frequencies). For entity e with terms T_e:
// CP(e) = sum_{t in T_e} f(t) * polysemy(t) / Z with Z = sum_{t in T_e} f(t).
PolysemyReport corpus_polysemy(const Terminology& t, std::span<const uint64_t> term_freqs);

}  // namespace jet
