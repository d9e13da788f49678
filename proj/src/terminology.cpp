#include "jet/terminology.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "jet/text.hpp"

namespace jet {

namespace {

bool valid_entity_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') return false;
  }
  return true;
}

}  // namespace

Terminology Terminology::load(std::istream& in, std::string source_name,
                              LoadStats* stats, std::ostream* log) {
  Terminology t;
  t.source_name_ = std::move(source_name);
  LoadStats local;
  std::ostream& err = log ? *log : std::cerr;

  std::vector<std::pair<uint32_t, uint32_t>> pairs;  // (term, entity)
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tsv(line);
    if (fields.size() != 2 || !valid_entity_id(fields[1])) {
      ++local.malformed;
      err << t.source_name_ << ":" << line_no << ": malformed record (expected "
          << "\"surface<TAB>entity-id\")\n";
      continue;
    }
    ++local.records;
    auto tokens = normalize(fields[0]);
    if (tokens.empty()) {
      ++local.dropped_empty;
      continue;
    }
    const std::string key = join_tokens(tokens);
    uint32_t term;
    if (auto it = t.term_index_.find(key); it != t.term_index_.end()) {
      term = it->second;
    } else {
      term = t.term_count();
      t.term_index_.emplace(key, term);
      t.term_tokens_.push_back(std::move(tokens));
    }
    const std::string entity(fields[1]);
    uint32_t ent;
    if (auto it = t.entity_index_.find(entity); it != t.entity_index_.end()) {
      ent = it->second;
    } else {
      ent = t.entity_count();
      t.entity_index_.emplace(entity, ent);
      t.entity_ids_.push_back(entity);
    }
    pairs.emplace_back(term, ent);
  }

  std::sort(pairs.begin(), pairs.end());
  const auto last = std::unique(pairs.begin(), pairs.end());
  local.duplicates = static_cast<uint64_t>(pairs.end() - last);
  pairs.erase(last, pairs.end());

  if (pairs.empty()) {
    throw std::runtime_error("terminology '" + t.source_name_ + "': no valid records");
  }

  t.term_entities_.resize(t.term_count());
  t.entity_terms_.resize(t.entity_count());
  for (const auto& [term, ent] : pairs) {
    t.term_entities_[term].push_back(ent);
    t.entity_terms_[ent].push_back(term);
  }
  t.finalize();
  if (stats) *stats = local;
  if (local.dropped_empty > 0) {
    err << t.source_name_ << ": dropped " << local.dropped_empty
        << " record(s) whose surface normalized to nothing\n";
  }
  return t;
}

Terminology Terminology::load_file(const std::string& path, LoadStats* stats, std::ostream* log) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open terminology file: " + path);
  return load(in, path, stats, log);
}

Terminology Terminology::from_records(const std::vector<std::pair<std::string, std::string>>& records,
                                      std::string source_name, LoadStats* stats) {
  std::ostringstream buffer;
  for (const auto& [surface, entity] : records) {
    buffer << surface << '\t' << entity << '\n';
  }
  std::istringstream in(buffer.str());
  std::ostringstream sink;
  return load(in, std::move(source_name), stats, &sink);
}

void Terminology::save(std::ostream& out) const {
  for (uint32_t term = 0; term < term_count(); ++term) {
    const std::string surface = join_tokens(term_tokens_[term]);
    for (uint32_t ent : term_entities_[term]) {
      out << surface << '\t' << entity_ids_[ent] << '\n';
    }
  }
}

void Terminology::finalize() {
  // Entity sets ordered by entity id string so scans and updates are
  // deterministic regardless of input order.
  for (auto& ents : term_entities_) {
    std::sort(ents.begin(), ents.end(),
              [&](uint32_t a, uint32_t b) { return entity_ids_[a] < entity_ids_[b]; });
  }
  for (auto& terms : entity_terms_) {
    std::sort(terms.begin(), terms.end());
  }
}

int32_t Terminology::find_term(std::span<const std::string> tokens) const {
  std::string key;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back(' ');
    key += tokens[i];
  }
  const auto it = term_index_.find(key);
  return it == term_index_.end() ? -1 : static_cast<int32_t>(it->second);
}

int32_t Terminology::find_entity(std::string_view id) const {
  const auto it = entity_index_.find(std::string(id));
  return it == entity_index_.end() ? -1 : static_cast<int32_t>(it->second);
}

size_t Terminology::polysemy(std::span<const std::string> tokens) const {
  const int32_t term = find_term(tokens);
  return term < 0 ? 0 : term_entities_[term].size();
}

PolysemyReport corpus_polysemy(const Terminology& t, std::span<const uint64_t> term_freqs) {
  PolysemyReport report;
  for (uint32_t ent = 0; ent < t.entity_count(); ++ent) {
    uint64_t z = 0;
    double weighted = 0.0;  // sum of f(t) * polysemy(t); divide by Z once at the end
    for (uint32_t term : t.terms_of(ent)) {
      const uint64_t f = term < term_freqs.size() ? term_freqs[term] : 0;
      z += f;
      weighted += static_cast<double>(f) * static_cast<double>(t.entities_of(term).size());
    }
    if (z == 0) continue;
    report.entries.push_back({ent, weighted / static_cast<double>(z), z});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [&](const PolysemyReport::Entry& a, const PolysemyReport::Entry& b) {
              if (a.cp != b.cp) return a.cp > b.cp;
              return t.entity_id(a.entity) < t.entity_id(b.entity);
            });
  return report;
}

void PolysemyReport::save(std::ostream& out, const Terminology& t) const {
  std::ostringstream line;
  for (const Entry& e : entries) {
    line.str("");
    line.precision(12);
    line << t.entity_id(e.entity) << '\t' << e.cp << '\t' << e.mentions << '\n';
    out << line.str();
  }
}

}  // namespace jet
