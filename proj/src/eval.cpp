#include "jet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "jet/rng.hpp"
#include "jet/text.hpp"

namespace jet {

namespace {

std::vector<double> to_double(std::span<const float> v) {
  return std::vector<double>(v.begin(), v.end());
}

std::optional<std::vector<float>> try_string_vector(const EmbeddingSet& set, std::string_view s) {
  try {
    return string_vector(set, s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<std::vector<float>> try_term_or_backoff(const EmbeddingSet& set,
                                                      std::string_view s) {
  try {
    return term_or_backoff(set, s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

[[noreturn]] void parse_error(const std::string& path, uint64_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(std::string_view text, double& out) {
  try {
    size_t used = 0;
    out = std::stod(std::string(text), &used);
    return used == text.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

template <class Fn>
void for_each_record(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line_no, line);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Similarity / relatedness
// ---------------------------------------------------------------------------

std::optional<SimSetting> parse_sim_setting(std::string_view name) {
  if (name == "entity") return SimSetting::Entity;
  if (name == "word") return SimSetting::Word;
  if (name == "term") return SimSetting::Term;
  if (name == "entity+word") return SimSetting::EntityPlusWord;
  if (name == "cross") return SimSetting::Cross;
  return std::nullopt;
}

const char* sim_setting_name(SimSetting s) {
  switch (s) {
    case SimSetting::Entity: return "entity";
    case SimSetting::Word: return "word";
    case SimSetting::Term: return "term";
    case SimSetting::EntityPlusWord: return "entity+word";
    case SimSetting::Cross: return "cross";
  }
  return "";
}

std::optional<double> pair_score(const SimRelPair& pair, const EmbeddingSet& set,
                                 SimSetting setting) {
  const auto e1 = set.find(PointKind::Entity, pair.entity1);
  const auto e2 = set.find(PointKind::Entity, pair.entity2);
  switch (setting) {
    case SimSetting::Entity: {
      if (!e1 || !e2) return std::nullopt;
      return cosine(*e1, *e2);
    }
    case SimSetting::Word: {
      const auto s1 = try_string_vector(set, pair.string1);
      const auto s2 = try_string_vector(set, pair.string2);
      if (!s1 || !s2) return std::nullopt;
      return cosine(std::span<const float>(*s1), std::span<const float>(*s2));
    }
    case SimSetting::Term: {
      const auto t1 = try_term_or_backoff(set, pair.string1);
      const auto t2 = try_term_or_backoff(set, pair.string2);
      if (!t1 || !t2) return std::nullopt;
      return cosine(std::span<const float>(*t1), std::span<const float>(*t2));
    }
    case SimSetting::EntityPlusWord:
    case SimSetting::Cross: {
      const auto s1 = try_string_vector(set, pair.string1);
      const auto s2 = try_string_vector(set, pair.string2);
      if (!e1 || !e2 || !s1 || !s2) return std::nullopt;
      double score = cosine(*e1, *e2) +
                     cosine(std::span<const float>(*s1), std::span<const float>(*s2));
      if (setting == SimSetting::Cross) {
        score += cosine(*e1, std::span<const float>(*s2));
        score += cosine(*e2, std::span<const float>(*s1));
      }
      return score;
    }
  }
  return std::nullopt;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> gold, std::span<const double> pred) {
  if (gold.size() != pred.size()) throw std::invalid_argument("spearman: length mismatch");
  if (gold.size() < 2) throw std::invalid_argument("spearman: need at least two scores");
  const auto rg = fractional_ranks(gold);
  const auto rp = fractional_ranks(pred);
  const double n = static_cast<double>(gold.size());
  double mg = 0, mp = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    mg += rg[i];
    mp += rp[i];
  }
  mg /= n;
  mp /= n;
  double num = 0, vg = 0, vp = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    const double dg = rg[i] - mg;
    const double dp = rp[i] - mp;
    num += dg * dp;
    vg += dg * dg;
    vp += dp * dp;
  }
  if (vg == 0 || vp == 0) throw std::invalid_argument("spearman: a ranking has zero variance");
  return num / std::sqrt(vg * vp);
}

SimRelResult eval_simrel(std::span<const SimRelPair> pairs, const EmbeddingSet& set,
                         SimSetting setting, std::span<const SimSetting> require_covered) {
  SimRelResult result;
  result.total = pairs.size();
  std::vector<double> gold, pred;
  for (size_t i = 0; i < pairs.size(); ++i) {
    bool eligible = true;
    for (SimSetting required : require_covered) {
      if (!pair_score(pairs[i], set, required).has_value()) {
        eligible = false;
        break;
      }
    }
    if (!eligible) continue;
    const auto score = pair_score(pairs[i], set, setting);
    if (!score) continue;
    gold.push_back(pairs[i].gold);
    pred.push_back(*score);
    result.ranking.emplace_back(i, *score);
  }
  result.covered = gold.size();
  result.coverage =
      pairs.empty() ? 0.0 : static_cast<double>(result.covered) / static_cast<double>(pairs.size());
  if (result.covered < 2) {
    throw std::runtime_error("similarity evaluation needs at least two covered pairs (got " +
                             std::to_string(result.covered) + ")");
  }
  result.rho = spearman(gold, pred);
  std::sort(result.ranking.begin(), result.ranking.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return result;
}

std::vector<SimRelPair> load_simrel(const std::string& path) {
  std::vector<SimRelPair> pairs;
  for_each_record(path, [&](uint64_t line_no, const std::string& line) {
    const auto f = split_tsv(line);
    if (f.size() != 5) parse_error(path, line_no, "expected 5 tab-separated fields");
    SimRelPair p;
    p.string1 = std::string(f[0]);
    p.string2 = std::string(f[1]);
    p.entity1 = std::string(f[2]);
    p.entity2 = std::string(f[3]);
    if (!parse_double(f[4], p.gold)) parse_error(path, line_no, "bad gold score");
    pairs.push_back(std::move(p));
  });
  return pairs;
}

// ---------------------------------------------------------------------------
// Analogy completion
// ---------------------------------------------------------------------------

std::vector<Neighbor> analogy_predict(std::span<const float> a, std::span<const float> b,
                                      std::span<const float> c, const EmbeddingSet& set,
                                      PointKind pool, const std::set<std::string>& exclude,
                                      size_t topk) {
  if (a.size() != b.size() || b.size() != c.size()) {
    throw std::invalid_argument("analogy: dimension mismatch");
  }
  std::vector<float> target(a.size());
  bool nonzero = false;
  for (size_t i = 0; i < a.size(); ++i) {
    target[i] = b[i] - a[i] + c[i];
    if (target[i] != 0.0f) nonzero = true;
  }
  if (!nonzero) throw std::invalid_argument("analogy: b - a + c is the zero vector");
  const PointKind kinds[1] = {pool};
  return nearest(set, target, kinds, topk, exclude);
}

std::optional<AnalogyMode> parse_analogy_mode(std::string_view name) {
  if (name == "entity") return AnalogyMode::Entity;
  if (name == "word") return AnalogyMode::Word;
  if (name == "oracle") return AnalogyMode::Oracle;
  return std::nullopt;
}

namespace {

// Single-token normalization of s, or nullopt (multi-token strings have no
// word-level candidate form).
std::optional<std::string> single_token(std::string_view s) {
  auto tokens = normalize(s);
  if (tokens.size() != 1) return std::nullopt;
  return tokens[0];
}

bool analogy_entity_correct(const AnalogyInstance& inst, const EmbeddingSet& set, bool& scored) {
  scored = false;
  const auto a = set.find(PointKind::Entity, inst.a_entity);
  const auto b = set.find(PointKind::Entity, inst.b_entity);
  const auto c = set.find(PointKind::Entity, inst.c_entity);
  if (!a || !b || !c) return false;
  std::set<std::string> exclude = {namespaced_key(PointKind::Entity, inst.a_entity),
                                   namespaced_key(PointKind::Entity, inst.b_entity),
                                   namespaced_key(PointKind::Entity, inst.c_entity)};
  std::vector<Neighbor> top;
  try {
    top = analogy_predict(*a, *b, *c, set, PointKind::Entity, exclude, 1);
  } catch (const std::exception&) {
    return false;
  }
  scored = true;
  for (const auto& answer : inst.answers) {
    if (top[0].key == answer.entity) return true;
  }
  return false;
}

bool analogy_word_correct(const AnalogyInstance& inst, const EmbeddingSet& set, bool& scored) {
  scored = false;
  const auto a = try_string_vector(set, inst.a_surface);
  const auto b = try_string_vector(set, inst.b_surface);
  const auto c = try_string_vector(set, inst.c_surface);
  if (!a || !b || !c) return false;
  std::set<std::string> exclude;
  for (const std::string* s : {&inst.a_surface, &inst.b_surface, &inst.c_surface}) {
    if (auto tok = single_token(*s)) exclude.insert(namespaced_key(PointKind::Word, *tok));
  }
  std::vector<Neighbor> top;
  try {
    top = analogy_predict(*a, *b, *c, set, PointKind::Word, exclude, 1);
  } catch (const std::exception&) {
    return false;
  }
  scored = true;
  for (const auto& answer : inst.answers) {
    if (auto tok = single_token(answer.surface); tok && top[0].key == *tok) return true;
  }
  return false;
}

}  // namespace

AnalogyResult eval_analogy(std::span<const AnalogyInstance> instances, const EmbeddingSet& set,
                           AnalogyMode mode) {
  AnalogyResult result;
  result.total = instances.size();
  for (const AnalogyInstance& inst : instances) {
    bool entity_scored = false, word_scored = false;
    bool ok = false;
    switch (mode) {
      case AnalogyMode::Entity:
        ok = analogy_entity_correct(inst, set, entity_scored);
        word_scored = true;  // not evaluated; don't count as unrepresentable
        break;
      case AnalogyMode::Word:
        ok = analogy_word_correct(inst, set, word_scored);
        entity_scored = true;
        break;
      case AnalogyMode::Oracle: {
        const bool e = analogy_entity_correct(inst, set, entity_scored);
        const bool w = analogy_word_correct(inst, set, word_scored);
        ok = e || w;
        break;
      }
    }
    if (!entity_scored && !word_scored) ++result.unrepresentable;
    if (ok) ++result.correct;
  }
  result.accuracy = result.total == 0
                        ? 0.0
                        : static_cast<double>(result.correct) / static_cast<double>(result.total);
  return result;
}

std::vector<AnalogyInstance> load_analogy(const std::string& path) {
  std::vector<AnalogyInstance> instances;
  for_each_record(path, [&](uint64_t line_no, const std::string& line) {
    const auto f = split_tsv(line);
    if (f.size() != 7) parse_error(path, line_no, "expected 7 tab-separated fields");
    AnalogyInstance inst;
    inst.a_entity = std::string(f[0]);
    inst.a_surface = std::string(f[1]);
    inst.b_entity = std::string(f[2]);
    inst.b_surface = std::string(f[3]);
    inst.c_entity = std::string(f[4]);
    inst.c_surface = std::string(f[5]);
    for (const std::string& part : split_list(f[6], ',')) {
      const size_t bar = part.find('|');
      if (bar == std::string::npos) {
        parse_error(path, line_no, "answer '" + part + "' is not of the form entity|surface");
      }
      inst.answers.push_back({part.substr(0, bar), part.substr(bar + 1)});
    }
    if (inst.answers.empty()) parse_error(path, line_no, "no answers");
    instances.push_back(std::move(inst));
  });
  return instances;
}

// ---------------------------------------------------------------------------
// Unsupervised entity disambiguation
// ---------------------------------------------------------------------------

double wsd_score(std::span<const double> entity, std::span<const double> context_avg) {
  if (entity.size() != context_avg.size()) {
    throw std::invalid_argument("wsd_score: dimension mismatch");
  }
  double ee = 0, ce = 0;
  for (size_t i = 0; i < entity.size(); ++i) {
    ee += entity[i] * entity[i];
    ce += context_avg[i] * entity[i];
  }
  if (ee == 0) throw std::invalid_argument("wsd_score: zero entity vector");
  // Orthogonal projection of the context average onto the entity direction.
  const double coeff = ce / ee;
  std::vector<double> projection(entity.size());
  double pp = 0;
  for (size_t i = 0; i < entity.size(); ++i) {
    projection[i] = coeff * entity[i];
    pp += projection[i] * projection[i];
  }
  return cosine(context_avg, entity) * std::sqrt(pp) / std::sqrt(ee);
}

namespace {

std::optional<std::vector<double>> context_average(const EmbeddingSet& set,
                                                   std::span<const std::string> tokens) {
  std::vector<double> sum(set.dim(), 0.0);
  size_t known = 0;
  for (const auto& tok : tokens) {
    if (auto v = set.find(PointKind::Word, tok)) {
      ++known;
      for (size_t i = 0; i < v->size(); ++i) sum[i] += (*v)[i];
    }
  }
  if (known == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(known);
  return sum;
}

std::optional<std::vector<double>> definition_vector(const EmbeddingSet& set,
                                                     const DefinitionMap& definitions,
                                                     const std::string& entity) {
  const auto it = definitions.find(entity);
  if (it == definitions.end()) return std::nullopt;
  std::vector<double> sum(set.dim(), 0.0);
  size_t used = 0;
  for (const std::string& def : it->second) {
    if (auto v = try_string_vector(set, def)) {
      ++used;
      for (size_t i = 0; i < v->size(); ++i) sum[i] += (*v)[i];
    }
  }
  if (used == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(used);
  return sum;
}

}  // namespace

WsdPrediction disambiguate(const WsdInstance& instance, const EmbeddingSet& set,
                           const DefinitionMap& definitions, const WsdOptions& opts) {
  const auto c_avg = context_average(set, instance.context);
  if (!c_avg) {
    throw std::runtime_error("no usable context for mention '" + instance.mention + "'");
  }
  const auto mention_vec = opts.use_surface ? try_string_vector(set, instance.mention)
                                            : std::nullopt;

  WsdPrediction result;
  double best = -std::numeric_limits<double>::infinity();
  for (const std::string& candidate : instance.candidates) {
    double score = 0.0;
    bool scorable = false;
    std::optional<std::vector<double>> entity_vec;
    if (auto v = set.find(PointKind::Entity, candidate)) entity_vec = to_double(*v);
    std::optional<std::vector<double>> def_vec;
    if (opts.use_definitions) def_vec = definition_vector(set, definitions, candidate);

    if (opts.use_entity && entity_vec) {
      score += wsd_score(*entity_vec, *c_avg);
      scorable = true;
    }
    if (opts.use_definitions && def_vec) {
      score += wsd_score(*def_vec, *c_avg);
      scorable = true;
    }
    if (!scorable) {
      ++result.unscorable;
      score = -std::numeric_limits<double>::infinity();
    } else if (opts.use_surface && mention_vec) {
      // The candidate's acting embedding: the entity row when present,
      // otherwise its definition vector.
      const std::vector<double>* base = entity_vec ? &*entity_vec : &*def_vec;
      const auto mention_d = to_double(*mention_vec);
      score *= cosine(std::span<const double>(*base), std::span<const double>(mention_d));
    }
    result.scores.emplace_back(candidate, score);
    if (score > best || (score == best && (result.predicted.empty() || candidate < result.predicted))) {
      best = score;
      result.predicted = candidate;
    }
  }
  return result;
}

WsdEvalResult eval_wsd(std::span<const WsdInstance> instances, const EmbeddingSet& set,
                       const DefinitionMap& definitions, const WsdOptions& opts, bool oracle) {
  WsdEvalResult result;
  result.total = instances.size();
  size_t entity_correct = 0, definition_correct = 0, oracle_correct = 0;
  std::map<std::string, MentionStats> per_mention;

  const WsdOptions entity_only{true, false, opts.use_surface};
  const WsdOptions definitions_only{false, true, opts.use_surface};

  for (const WsdInstance& inst : instances) {
    auto& stats = per_mention[inst.mention];
    ++stats.total;
    bool primary_ok = false;
    try {
      primary_ok = disambiguate(inst, set, definitions, opts).predicted == inst.gold;
    } catch (const std::exception&) {
      ++result.failed;
    }
    if (primary_ok) {
      ++result.correct;
      ++stats.correct;
    }
    if (oracle) {
      bool e_ok = false, d_ok = false;
      try {
        e_ok = disambiguate(inst, set, definitions, entity_only).predicted == inst.gold;
      } catch (const std::exception&) {
      }
      try {
        d_ok = disambiguate(inst, set, definitions, definitions_only).predicted == inst.gold;
      } catch (const std::exception&) {
      }
      entity_correct += e_ok;
      definition_correct += d_ok;
      oracle_correct += (e_ok || d_ok);
    }
  }
  const double n = result.total ? static_cast<double>(result.total) : 1.0;
  result.accuracy = static_cast<double>(result.correct) / n;
  if (oracle) {
    result.entity_accuracy = static_cast<double>(entity_correct) / n;
    result.definition_accuracy = static_cast<double>(definition_correct) / n;
    result.oracle_accuracy = static_cast<double>(oracle_correct) / n;
  }
  result.per_mention.assign(per_mention.begin(), per_mention.end());
  return result;
}

double wsd_random_baseline(std::span<const WsdInstance> instances, uint64_t seed) {
  if (instances.empty()) return 0.0;
  Rng rng(seed, 0x57534452);  // independent stream for the baseline
  size_t correct = 0;
  for (const WsdInstance& inst : instances) {
    const uint32_t pick = rng.below(static_cast<uint32_t>(inst.candidates.size()));
    correct += inst.candidates[pick] == inst.gold;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

double wsd_majority_baseline(std::span<const WsdInstance> instances) {
  if (instances.empty()) return 0.0;
  std::map<std::string, std::map<std::string, size_t>> gold_counts;
  for (const WsdInstance& inst : instances) ++gold_counts[inst.mention][inst.gold];
  std::map<std::string, std::string> majority;
  for (const auto& [mention, counts] : gold_counts) {
    size_t best = 0;
    for (const auto& [candidate, count] : counts) {
      if (count > best) {
        best = count;
        majority[mention] = candidate;  // ties resolve to the ascending-first id
      }
    }
  }
  size_t correct = 0;
  for (const WsdInstance& inst : instances) correct += majority[inst.mention] == inst.gold;
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

std::vector<WsdInstance> load_wsd(const std::string& path) {
  std::vector<WsdInstance> instances;
  for_each_record(path, [&](uint64_t line_no, const std::string& line) {
    const auto f = split_tsv(line);
    if (f.size() != 4) parse_error(path, line_no, "expected 4 tab-separated fields");
    WsdInstance inst;
    inst.mention = std::string(f[0]);
    inst.gold = std::string(f[1]);
    inst.candidates = split_list(f[2], ',');
    inst.context = normalize(f[3]);
    if (inst.candidates.size() < 2) parse_error(path, line_no, "need at least two candidates");
    if (std::find(inst.candidates.begin(), inst.candidates.end(), inst.gold) ==
        inst.candidates.end()) {
      parse_error(path, line_no, "gold entity is not among the candidates");
    }
    instances.push_back(std::move(inst));
  });
  return instances;
}

DefinitionMap load_definitions(const std::string& path) {
  DefinitionMap definitions;
  for_each_record(path, [&](uint64_t line_no, const std::string& line) {
    const auto f = split_tsv(line);
    if (f.size() != 2) parse_error(path, line_no, "expected 2 tab-separated fields");
    definitions[std::string(f[0])].emplace_back(f[1]);
  });
  return definitions;
}

}  // namespace jet
