#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "jet/rng.hpp"
#include "jet/terminology.hpp"

using jet::Terminology;

namespace {

Terminology load_str(const std::string& tsv, Terminology::LoadStats* stats = nullptr) {
  std::istringstream in(tsv);
  std::ostringstream log;
  return Terminology::load(in, "test", stats, &log);
}

}  // namespace

TEST_CASE("many-to-many mapping with both directions") {
  const auto t = load_str("cold\tC0009443\ncold\tC0024117\nacute rhinitis\tC0009443\n");
  CHECK(t.term_count() == 2);
  CHECK(t.entity_count() == 2);
  const std::vector<std::string> cold = {"cold"};
  CHECK(t.polysemy(cold) == 2);
  const int32_t c443 = t.find_entity("C0009443");
  REQUIRE(c443 >= 0);
  CHECK(t.terms_of(c443).size() == 2);
}

TEST_CASE("surfaces normalize and duplicates collapse") {
  Terminology::LoadStats stats;
  const auto t = load_str("Cold\tC1\ncold\tC1\n", &stats);
  CHECK(t.term_count() == 1);
  CHECK(stats.duplicates == 1);
  CHECK(t.polysemy(std::vector<std::string>{"cold"}) == 1);
}

TEST_CASE("surfaces that normalize to nothing are dropped with a count") {
  Terminology::LoadStats stats;
  const auto t = load_str("!!\tX1\nreal term\tX1\n", &stats);
  CHECK(stats.dropped_empty == 1);
  CHECK(t.term_count() == 1);
}

TEST_CASE("malformed records are reported with their line and skipped") {
  Terminology::LoadStats stats;
  std::istringstream in("good\tE1\nbad line without tab\nthree\tfields\there\nws id\tE 2\n");
  std::ostringstream log;
  const auto t = Terminology::load(in, "fixture", &stats, &log);
  CHECK(stats.malformed == 3);
  CHECK(t.term_count() == 1);
  CHECK(log.str().find("fixture:2") != std::string::npos);
  CHECK(log.str().find("fixture:3") != std::string::npos);
}

TEST_CASE("zero valid records is a hard error") {
  CHECK_THROWS(load_str("!!\tX1\n"));
  CHECK_THROWS(load_str(""));
}

TEST_CASE("unknown term has polysemy zero") {
  const auto t = load_str("cold\tC1\n");
  CHECK(t.polysemy(std::vector<std::string>{"warm"}) == 0);
}

TEST_CASE("washington county style fan-out") {
  std::string tsv;
  for (int i = 0; i < 30; ++i) {
    tsv += "washington county\tCOUNTY" + std::to_string(i) + "\n";
  }
  const auto t = load_str(tsv);
  CHECK(t.polysemy(std::vector<std::string>{"washington", "county"}) == 30);
}

TEST_CASE("save then load reproduces the terminology") {
  const auto t = load_str("B term\tE2\na\tE1\na\tE2\nzed zed\tE1\n");
  std::ostringstream out;
  t.save(out);
  const auto t2 = load_str(out.str());
  CHECK(t2.term_count() == t.term_count());
  CHECK(t2.entity_count() == t.entity_count());
  std::ostringstream out2;
  t2.save(out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("inverse maps agree in both directions") {
  jet::Rng rng(11);
  std::string tsv;
  for (int i = 0; i < 200; ++i) {
    tsv += "t" + std::to_string(rng.below(40)) + "\tE" + std::to_string(rng.below(25)) + "\n";
  }
  const auto t = load_str(tsv);
  for (uint32_t term = 0; term < t.term_count(); ++term) {
    for (uint32_t ent : t.entities_of(term)) {
      const auto terms = t.terms_of(ent);
      CHECK(std::find(terms.begin(), terms.end(), term) != terms.end());
    }
  }
  for (uint32_t ent = 0; ent < t.entity_count(); ++ent) {
    CHECK(!t.terms_of(ent).empty());
    for (uint32_t term : t.terms_of(ent)) {
      const auto ents = t.entities_of(term);
      CHECK(std::find(ents.begin(), ents.end(), ent) != ents.end());
    }
  }
}

TEST_CASE("corpus polysemy worked examples") {
  // Entity A: terms "only" (poly 1) and "solo" (poly 1) -> CP = 1 exactly.
  // Entity B: term "mixed" f=3 poly=2 and "rare" f=1 poly=6 -> CP = 3.
  std::string tsv = "only\tA\nsolo\tA\nmixed\tB\nmixed\tB2\nrare\tB\n";
  for (int i = 0; i < 5; ++i) tsv += "rare\tR" + std::to_string(i) + "\n";
  const auto t = load_str(tsv);

  std::vector<uint64_t> freqs(t.term_count(), 0);
  auto freq_of = [&](const char* surface, uint64_t f) {
    const int32_t term = t.find_term(std::vector<std::string>{surface});
    REQUIRE(term >= 0);
    freqs[term] = f;
  };
  freq_of("only", 7);
  freq_of("solo", 2);
  freq_of("mixed", 3);
  freq_of("rare", 1);

  const auto report = jet::corpus_polysemy(t, freqs);
  auto cp_of = [&](const std::string& id) -> const jet::PolysemyReport::Entry& {
    for (const auto& e : report.entries) {
      if (t.entity_id(e.entity) == id) return e;
    }
    REQUIRE(false);
    return report.entries.front();
  };
  CHECK(cp_of("A").cp == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cp_of("A").mentions == 9);
  CHECK(cp_of("B").cp == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(cp_of("B").mentions == 4);

  // Z = 0 entities are absent: the R* entities share only "rare" (f=1), so
  // they are present, but an entity with no matched term must not be.
  const auto t2 = load_str("ghost\tG1\nonly\tA\n");
  std::vector<uint64_t> freqs2(t2.term_count(), 0);
  freqs2[static_cast<uint32_t>(t2.find_term(std::vector<std::string>{"only"}))] = 4;
  const auto report2 = jet::corpus_polysemy(t2, freqs2);
  REQUIRE(report2.entries.size() == 1);
  CHECK(t2.entity_id(report2.entries[0].entity) == "A");
}

TEST_CASE("corpus polysemy bounds hold on random terminologies") {
  jet::Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::string tsv;
    for (int i = 0; i < 120; ++i) {
      tsv += "t" + std::to_string(rng.below(30)) + "\tE" + std::to_string(rng.below(20)) + "\n";
    }
    const auto t = load_str(tsv);
    std::vector<uint64_t> freqs(t.term_count());
    for (auto& f : freqs) f = rng.below(50);  // zeros included
    const auto report = jet::corpus_polysemy(t, freqs);
    for (const auto& e : report.entries) {
      CHECK(e.mentions > 0);
      CHECK(e.cp >= 1.0);
      size_t max_poly = 0;
      bool all_mono = true;
      for (uint32_t term : t.terms_of(e.entity)) {
        if (freqs[term] == 0) continue;
        max_poly = std::max(max_poly, t.entities_of(term).size());
        all_mono = all_mono && t.entities_of(term).size() == 1;
      }
      CHECK(e.cp <= static_cast<double>(max_poly));
      if (all_mono) CHECK(e.cp == 1.0);
      if (e.cp == 1.0) CHECK(all_mono);
    }
  }
}

TEST_CASE("polysemy report serializes sorted by descending cp") {
  const auto t = load_str("amb\tP1\namb\tP2\namb\tP3\nplain\tQ\n");
  std::vector<uint64_t> freqs(t.term_count(), 5);
  const auto report = jet::corpus_polysemy(t, freqs);
  std::ostringstream out;
  report.save(out, t);
  const std::string text = out.str();
  CHECK(text.find("P1\t3\t5") != std::string::npos);
  CHECK(text.find("P1") < text.find("Q"));
}
