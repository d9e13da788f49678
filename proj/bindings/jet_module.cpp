#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jet/corpus.hpp"
#include "jet/embeddings.hpp"
#include "jet/eval.hpp"
#include "jet/matcher.hpp"
#include "jet/terminology.hpp"
#include "jet/text.hpp"
#include "jet/trainer.hpp"

namespace py = pybind11;

namespace {

jet::PointKind kind_from_name(const std::string& name) {
  const auto kind = jet::parse_kind(name);
  if (!kind) throw std::invalid_argument("unknown point kind '" + name + "'");
  return *kind;
}

std::vector<jet::PointKind> kinds_from_names(const std::vector<std::string>& names) {
  std::vector<jet::PointKind> kinds;
  for (const auto& name : names) kinds.push_back(kind_from_name(name));
  return kinds;
}

py::list neighbors_to_list(const std::vector<jet::Neighbor>& neighbors) {
  py::list out;
  for (const auto& n : neighbors) {
    out.append(py::make_tuple(n.key, jet::kind_name(n.kind), n.score));
  }
  return out;
}

jet::EmbeddingSet run_train(const jet::LineCorpus& corpus, const jet::Terminology& terminology,
                            const jet::TrainConfig& cfg) {
  jet::TrainResult result;
  {
    py::gil_scoped_release release;
    result = jet::train(corpus, terminology, cfg);
  }
  return jet::export_embeddings(result.params, result.vocab, terminology);
}

}  // namespace

PYBIND11_MODULE(_jet, m) {
  m.doc() = "Joint word, term, and entity embeddings with terminology-based "
            "distant supervision";

  m.def("normalize", [](const std::string& s) { return jet::normalize(s); },
        "Lowercase and tokenize; punctuation acts as a token boundary.");
  m.def("term_key", &jet::term_key);

  py::class_<jet::Terminology>(m, "Terminology")
      .def_static("load", [](const std::string& path) { return jet::Terminology::load_file(path); },
                  py::arg("path"))
      .def_static(
          "from_records",
          [](const std::vector<std::pair<std::string, std::string>>& records,
             const std::string& name) { return jet::Terminology::from_records(records, name); },
          py::arg("records"), py::arg("name") = "memory")
      .def_property_readonly("num_terms", &jet::Terminology::term_count)
      .def_property_readonly("num_entities", &jet::Terminology::entity_count)
      .def_property_readonly("source_name", &jet::Terminology::source_name)
      .def("polysemy",
           [](const jet::Terminology& t, const std::string& surface) {
             return t.polysemy(jet::normalize(surface));
           },
           py::arg("surface"), "Number of entities the (normalized) surface can refer to.")
      .def("entities",
           [](const jet::Terminology& t, const std::string& surface) {
             std::vector<std::string> out;
             const int32_t term = t.find_term(jet::normalize(surface));
             if (term >= 0) {
               for (uint32_t e : t.entities_of(static_cast<uint32_t>(term)))
                 out.push_back(t.entity_id(e));
             }
             return out;
           },
           py::arg("surface"))
      .def("terms",
           [](const jet::Terminology& t, const std::string& entity) {
             std::vector<std::string> out;
             const int32_t e = t.find_entity(entity);
             if (e >= 0) {
               for (uint32_t term : t.terms_of(static_cast<uint32_t>(e)))
                 out.push_back(jet::join_tokens(t.term_tokens(term)));
             }
             return out;
           },
           py::arg("entity"))
      .def("save", [](const jet::Terminology& t) {
        std::ostringstream out;
        t.save(out);
        return out.str();
      });

  py::class_<jet::MatchAutomaton>(m, "MatchAutomaton")
      .def(py::init<const jet::Terminology&>(), py::arg("terminology"),
           py::keep_alive<1, 2>())
      .def("scan",
           [](const jet::MatchAutomaton& a, const std::vector<std::string>& tokens) {
             py::list out;
             for (const auto& occ : a.scan(tokens)) {
               std::vector<std::string> ents;
               for (uint32_t e : occ.entities) ents.push_back(a.terminology().entity_id(e));
               out.append(py::make_tuple(
                   jet::term_key(a.terminology().term_tokens(occ.term)), occ.start, occ.end,
                   ents));
             }
             return out;
           },
           py::arg("tokens"), "All matches as (term_key, start, end, entities), overlaps included.");

  m.def(
      "corpus_polysemy",
      [](const jet::Terminology& terminology, const std::string& corpus_path) {
        const jet::MatchAutomaton automaton(terminology);
        const auto corpus = jet::LineCorpus::from_file(corpus_path);
        std::vector<uint64_t> freqs(terminology.term_count(), 0);
        corpus.for_each([&](uint64_t, std::string_view line) {
          automaton.accumulate_frequencies(jet::normalize(line), freqs);
        });
        py::list out;
        for (const auto& e : jet::corpus_polysemy(terminology, freqs).entries) {
          out.append(py::make_tuple(terminology.entity_id(e.entity), e.cp, e.mentions));
        }
        return out;
      },
      py::arg("terminology"), py::arg("corpus_path"),
      "Entries (entity, cp, mentions) sorted by descending corpus polysemy.");

  py::class_<jet::TrainConfig>(m, "TrainConfig")
      .def(py::init([](uint32_t window, uint32_t negatives, float lr, uint32_t epochs,
                       uint64_t min_count, double subsample, uint32_t dim, uint64_t seed,
                       uint32_t workers, bool log_progress) {
             jet::TrainConfig cfg;
             cfg.window = window;
             cfg.negatives = negatives;
             cfg.learning_rate = lr;
             cfg.epochs = epochs;
             cfg.min_count = min_count;
             cfg.subsample = subsample;
             cfg.dim = dim;
             cfg.seed = seed;
             cfg.workers = workers;
             cfg.log_progress = log_progress;
             return cfg;
           }),
           py::arg("window") = 2, py::arg("negatives") = 5, py::arg("lr") = 0.05f,
           py::arg("epochs") = 10, py::arg("min_count") = 10, py::arg("subsample") = 1e-5,
           py::arg("dim") = 100, py::arg("seed") = 1, py::arg("workers") = 1,
           py::arg("log_progress") = false)
      .def_readwrite("window", &jet::TrainConfig::window)
      .def_readwrite("negatives", &jet::TrainConfig::negatives)
      .def_readwrite("learning_rate", &jet::TrainConfig::learning_rate)
      .def_readwrite("epochs", &jet::TrainConfig::epochs)
      .def_readwrite("min_count", &jet::TrainConfig::min_count)
      .def_readwrite("subsample", &jet::TrainConfig::subsample)
      .def_readwrite("dim", &jet::TrainConfig::dim)
      .def_readwrite("seed", &jet::TrainConfig::seed)
      .def_readwrite("workers", &jet::TrainConfig::workers)
      .def_readwrite("log_progress", &jet::TrainConfig::log_progress);

  m.def(
      "train",
      [](const std::string& corpus_path, const jet::Terminology& terminology,
         const jet::TrainConfig& cfg) {
        return run_train(jet::LineCorpus::from_file(corpus_path), terminology, cfg);
      },
      py::arg("corpus_path"), py::arg("terminology"), py::arg("config") = jet::TrainConfig{});
  m.def(
      "train_lines",
      [](const std::vector<std::string>& lines, const jet::Terminology& terminology,
         const jet::TrainConfig& cfg) {
        return run_train(jet::LineCorpus::from_lines(lines), terminology, cfg);
      },
      py::arg("lines"), py::arg("terminology"), py::arg("config") = jet::TrainConfig{});

  py::class_<jet::EmbeddingSet>(m, "EmbeddingSet")
      .def_static("load", &jet::load_embeddings, py::arg("path"))
      .def("save",
           [](const jet::EmbeddingSet& set, const std::string& path, const std::string& format) {
             jet::save_embeddings(set, path,
                                  format == "text" ? jet::EmbeddingFormat::Text
                                                   : jet::EmbeddingFormat::Binary);
           },
           py::arg("path"), py::arg("format") = "binary")
      .def_property_readonly("dim", &jet::EmbeddingSet::dim)
      .def("__len__", [](const jet::EmbeddingSet& set) { return set.size(); })
      .def("keys",
           [](const jet::EmbeddingSet& set, const std::string& kind) {
             return set.keys(kind_from_name(kind));
           },
           py::arg("kind"))
      .def("vector",
           [](const jet::EmbeddingSet& set, const std::string& key) {
             const auto [kind, bare] = jet::split_namespaced_key(key);
             const auto v = set.at(kind, bare);
             return std::vector<float>(v.begin(), v.end());
           },
           py::arg("key"), "Vector for a namespaced key like 'ent:C0009443'.")
      .def("cosine",
           [](const jet::EmbeddingSet& set, const std::string& key1, const std::string& key2) {
             const auto [k1, b1] = jet::split_namespaced_key(key1);
             const auto [k2, b2] = jet::split_namespaced_key(key2);
             return jet::cosine(set.at(k1, b1), set.at(k2, b2));
           },
           py::arg("key1"), py::arg("key2"))
      .def("string_vector",
           [](const jet::EmbeddingSet& set, const std::string& s) {
             return jet::string_vector(set, s);
           },
           py::arg("s"))
      .def("term_or_backoff",
           [](const jet::EmbeddingSet& set, const std::string& s) {
             return jet::term_or_backoff(set, s);
           },
           py::arg("s"))
      .def("nearest",
           [](const jet::EmbeddingSet& set, const std::string& query,
              const std::vector<std::string>& kinds, size_t topk,
              const std::vector<std::string>& exclude) {
             const auto [kind, bare] = jet::split_namespaced_key(query);
             std::set<std::string> excluded(exclude.begin(), exclude.end());
             excluded.insert(query);  // never return the query itself
             return neighbors_to_list(
                 jet::nearest(set, set.at(kind, bare), kinds_from_names(kinds), topk, excluded));
           },
           py::arg("query"), py::arg("kinds") = std::vector<std::string>{"word", "term", "entity"},
           py::arg("topk") = 10, py::arg("exclude") = std::vector<std::string>{})
      .def("nearest_vector",
           [](const jet::EmbeddingSet& set, const std::vector<float>& query,
              const std::vector<std::string>& kinds, size_t topk,
              const std::vector<std::string>& exclude) {
             std::set<std::string> excluded(exclude.begin(), exclude.end());
             return neighbors_to_list(
                 jet::nearest(set, query, kinds_from_names(kinds), topk, excluded));
           },
           py::arg("query"), py::arg("kinds") = std::vector<std::string>{"word", "term", "entity"},
           py::arg("topk") = 10, py::arg("exclude") = std::vector<std::string>{});

  m.def("cosine", [](const std::vector<float>& x, const std::vector<float>& y) {
    return jet::cosine(std::span<const float>(x), std::span<const float>(y));
  });
  m.def("spearman", [](const std::vector<double>& gold, const std::vector<double>& pred) {
    return jet::spearman(gold, pred);
  });
  m.def("wsd_score", [](const std::vector<double>& entity, const std::vector<double>& context) {
    return jet::wsd_score(entity, context);
  });

  m.def(
      "eval_simrel",
      [](const jet::EmbeddingSet& set, const std::string& dataset, const std::string& setting) {
        const auto parsed = jet::parse_sim_setting(setting);
        if (!parsed) throw std::invalid_argument("unknown setting '" + setting + "'");
        const auto result = jet::eval_simrel(jet::load_simrel(dataset), set, *parsed);
        py::dict out;
        out["spearman_rho"] = result.rho;
        out["coverage"] = result.coverage;
        out["covered"] = result.covered;
        out["pairs"] = result.total;
        return out;
      },
      py::arg("embeddings"), py::arg("dataset"), py::arg("setting") = "entity");

  m.def(
      "eval_analogy",
      [](const jet::EmbeddingSet& set, const std::string& dataset, const std::string& mode) {
        const auto parsed = jet::parse_analogy_mode(mode);
        if (!parsed) throw std::invalid_argument("unknown mode '" + mode + "'");
        const auto result = jet::eval_analogy(jet::load_analogy(dataset), set, *parsed);
        py::dict out;
        out["accuracy"] = result.accuracy;
        out["correct"] = result.correct;
        out["instances"] = result.total;
        out["unrepresentable"] = result.unrepresentable;
        return out;
      },
      py::arg("embeddings"), py::arg("dataset"), py::arg("mode") = "entity");

  m.def(
      "eval_wsd",
      [](const jet::EmbeddingSet& set, const std::string& dataset, const std::string& definitions,
         bool use_definitions, bool use_surface, bool oracle) {
        jet::DefinitionMap defs;
        if (!definitions.empty()) defs = jet::load_definitions(definitions);
        jet::WsdOptions opts;
        opts.use_definitions = use_definitions;
        opts.use_surface = use_surface;
        const auto result = jet::eval_wsd(jet::load_wsd(dataset), set, defs, opts, oracle);
        py::dict out;
        out["accuracy"] = result.accuracy;
        out["correct"] = result.correct;
        out["instances"] = result.total;
        out["failed"] = result.failed;
        if (oracle) {
          out["entity_accuracy"] = *result.entity_accuracy;
          out["definition_accuracy"] = *result.definition_accuracy;
          out["oracle_accuracy"] = *result.oracle_accuracy;
        }
        return out;
      },
      py::arg("embeddings"), py::arg("dataset"), py::arg("definitions") = std::string(),
      py::arg("use_definitions") = false, py::arg("use_surface") = false,
      py::arg("oracle") = false);
}
