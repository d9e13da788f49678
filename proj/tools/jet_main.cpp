// jet: train and probe joint word/term/entity embeddings.
//
// Subcommands: train, polysemy, annotate, vocab, neighbors,
// eval {simrel, analogy, wsd}. Exit codes: 0 success, 1 runtime failure,
// 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "jet/corpus.hpp"
#include "jet/embeddings.hpp"
#include "jet/eval.hpp"
#include "jet/matcher.hpp"
#include "jet/terminology.hpp"
#include "jet/text.hpp"
#include "jet/trainer.hpp"

namespace {

// All file outputs go through a temporary path renamed on success, so a
// failed run never leaves a partial file behind.
void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write to " + tmp);
    emit(out);
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void emit_or_print(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(std::cout);
  } else {
    write_atomic(path, emit);
  }
}

struct TrainFlags {
  std::string corpus, terminology, out;
  std::string format = "binary";
  std::string checkpoint;
  jet::TrainConfig cfg;
  bool quiet = false;
};

void add_train_command(CLI::App& app, TrainFlags& f) {
  auto* cmd = app.add_subcommand("train", "Train embeddings on a corpus with a terminology");
  cmd->add_option("--corpus", f.corpus, "Plain-text corpus, one document per line")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--terminology", f.terminology, "Term/entity TSV (surface TAB entity-id)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output embeddings path")->required();
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();
  cmd->add_option("--checkpoint", f.checkpoint,
                  "Prefix for per-epoch binary checkpoints (PREFIX.epochN.bin)");
  cmd->add_option("--window", f.cfg.window, "Max context window per side")
      ->check(CLI::Range(1u, 1000000u))
      ->capture_default_str()
      ->envname("JET_WINDOW");
  cmd->add_option("--negatives", f.cfg.negatives, "Negative samples per context word")
      ->capture_default_str()
      ->envname("JET_NEGATIVES");
  cmd->add_option("--lr", f.cfg.learning_rate, "Initial learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->envname("JET_LR");
  cmd->add_option("--epochs", f.cfg.epochs, "Passes over the corpus")
      ->check(CLI::Range(1u, 1000000u))
      ->capture_default_str()
      ->envname("JET_EPOCHS");
  cmd->add_option("--min-count", f.cfg.min_count, "Minimum frequency for words and terms")
      ->check(CLI::Range(uint64_t{1}, uint64_t{1} << 40))
      ->capture_default_str()
      ->envname("JET_MIN_COUNT");
  cmd->add_option("--subsample", f.cfg.subsample, "Subsampling coefficient for frequent words")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->envname("JET_SUBSAMPLE");
  cmd->add_option("--dim", f.cfg.dim, "Embedding dimensionality")
      ->check(CLI::Range(1u, 100000u))
      ->capture_default_str()
      ->envname("JET_DIM");
  cmd->add_option("--seed", f.cfg.seed, "Random seed")
      ->capture_default_str()
      ->envname("JET_SEED");
  cmd->add_option("--workers", f.cfg.workers, "Parallel workers (>1 is nondeterministic)")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str()
      ->envname("JET_WORKERS");
  cmd->add_flag("--quiet", f.quiet, "Suppress progress logging");

  cmd->callback([&f] {
    f.cfg.log_progress = !f.quiet;
    const auto corpus = jet::LineCorpus::from_file(f.corpus);
    const auto terminology = jet::Terminology::load_file(f.terminology);
    jet::CheckpointFn checkpoint;
    if (!f.checkpoint.empty()) {
      checkpoint = [&](uint32_t epoch, const jet::ModelParams& params,
                       const jet::Vocabulary& vocab) {
        const auto set = jet::export_embeddings(params, vocab, terminology);
        jet::save_embeddings(set, f.checkpoint + ".epoch" + std::to_string(epoch + 1) + ".bin",
                             jet::EmbeddingFormat::Binary);
      };
    }
    const auto result = jet::train(corpus, terminology, f.cfg, {}, checkpoint);
    const auto set = jet::export_embeddings(result.params, result.vocab, terminology);
    jet::save_embeddings(set, f.out,
                         f.format == "text" ? jet::EmbeddingFormat::Text
                                            : jet::EmbeddingFormat::Binary);
    if (!f.quiet) {
      std::cerr << "saved " << set.size() << " vectors (dim " << set.dim() << ") to " << f.out
                << "\n";
    }
  });
}

struct CorpusFlags {
  std::string corpus, terminology, out;
  uint64_t min_count = 10;
  double subsample = 1e-5;
};

void add_polysemy_command(CLI::App& app, CorpusFlags& f) {
  auto* cmd = app.add_subcommand("polysemy", "Corpus polysemy CP(e) per entity");
  cmd->add_option("--corpus", f.corpus)->required()->check(CLI::ExistingFile);
  cmd->add_option("--terminology", f.terminology)->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Report TSV: entity TAB cp TAB mentions")->required();
  cmd->callback([&f] {
    const auto corpus = jet::LineCorpus::from_file(f.corpus);
    const auto terminology = jet::Terminology::load_file(f.terminology);
    const jet::MatchAutomaton automaton(terminology);
    std::vector<uint64_t> freqs(terminology.term_count(), 0);
    corpus.for_each([&](uint64_t, std::string_view line) {
      automaton.accumulate_frequencies(jet::normalize(line), freqs);
    });
    const auto report = jet::corpus_polysemy(terminology, freqs);
    write_atomic(f.out, [&](std::ostream& out) { report.save(out, terminology); });
    if (report.entries.empty()) {
      std::cerr << "warning: no terminology term occurs in the corpus; report is empty\n";
    }

    // Band histogram; CP is 1 exactly when every observed mention is
    // unambiguous.
    const char* bands[] = {"=1", "(1,1.5]", "(1.5,2]", "(2,5]", ">5"};
    uint64_t counts[5] = {0, 0, 0, 0, 0};
    for (const auto& e : report.entries) {
      if (e.cp <= 1.0) ++counts[0];
      else if (e.cp <= 1.5) ++counts[1];
      else if (e.cp <= 2.0) ++counts[2];
      else if (e.cp <= 5.0) ++counts[3];
      else ++counts[4];
    }
    std::cout << "cp_band\tentities\n";
    for (int i = 0; i < 5; ++i) std::cout << bands[i] << '\t' << counts[i] << '\n';
  });
}

void add_annotate_command(CLI::App& app, CorpusFlags& f) {
  auto* cmd = app.add_subcommand(
      "annotate", "Dump term occurrences: doc TAB start TAB end TAB term TAB entities");
  cmd->add_option("--corpus", f.corpus)->required()->check(CLI::ExistingFile);
  cmd->add_option("--terminology", f.terminology)->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output path (stdout when omitted)");
  cmd->callback([&f] {
    const auto corpus = jet::LineCorpus::from_file(f.corpus);
    const auto terminology = jet::Terminology::load_file(f.terminology);
    const jet::MatchAutomaton automaton(terminology);
    emit_or_print(f.out, [&](std::ostream& out) {
      corpus.for_each([&](uint64_t doc, std::string_view line) {
        automaton.dump_annotations(jet::normalize(line), doc, out);
      });
    });
  });
}

void add_vocab_command(CLI::App& app, CorpusFlags& f) {
  auto* cmd = app.add_subcommand("vocab", "Dump the frequency-filtered vocabulary");
  cmd->add_option("--corpus", f.corpus)->required()->check(CLI::ExistingFile);
  cmd->add_option("--terminology", f.terminology)->required()->check(CLI::ExistingFile);
  cmd->add_option("--min-count", f.min_count)->capture_default_str()->envname("JET_MIN_COUNT");
  cmd->add_option("--out", f.out, "Output path (stdout when omitted)");
  cmd->callback([&f] {
    const auto corpus = jet::LineCorpus::from_file(f.corpus);
    const auto terminology = jet::Terminology::load_file(f.terminology);
    const jet::MatchAutomaton automaton(terminology);
    const auto vocab =
        jet::build_vocabulary(corpus, terminology, &automaton, f.min_count, f.subsample);
    emit_or_print(f.out, [&](std::ostream& out) { vocab.dump(out, terminology); });
  });
}

struct NeighborFlags {
  std::string embeddings, query;
  std::vector<std::string> kinds = {"word", "term", "entity"};
  size_t topk = 10;
};

void add_neighbors_command(CLI::App& app, NeighborFlags& f) {
  auto* cmd = app.add_subcommand("neighbors", "Nearest neighbors of a stored vector");
  cmd->add_option("--embeddings", f.embeddings)->required()->check(CLI::ExistingFile);
  cmd->add_option("--query", f.query, "Namespaced key, e.g. ent:C0009443 or word:cold")
      ->required();
  cmd->add_option("--kinds", f.kinds, "Candidate kinds: word, term, entity")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--topk", f.topk)->check(CLI::Range(size_t{1}, size_t{1} << 32))
      ->capture_default_str()
      ->envname("JET_TOPK");
  cmd->callback([&f] {
    const auto set = jet::load_embeddings(f.embeddings);
    const auto [kind, key] = jet::split_namespaced_key(f.query);
    const auto query = set.at(kind, key);
    std::vector<jet::PointKind> kinds;
    for (const std::string& name : f.kinds) {
      const auto k = jet::parse_kind(name);
      if (!k) throw CLI::ValidationError("--kinds", "unknown kind '" + name + "'");
      kinds.push_back(*k);
    }
    const auto result = jet::nearest(set, query, kinds, f.topk, {f.query});
    for (const auto& n : result) {
      std::ostringstream line;
      line.precision(6);
      line << jet::kind_prefix(n.kind) << n.key << '\t' << jet::kind_name(n.kind) << '\t'
           << std::fixed << n.score;
      std::cout << line.str() << '\n';
    }
  });
}

struct EvalFlags {
  std::string embeddings, dataset, definitions;
  std::string setting = "entity";
  std::string mode = "entity";
  std::vector<std::string> filter_covered;
  std::string ranking_out;
  bool use_definitions = false;
  bool use_surface = false;
  bool oracle = false;
  bool per_mention = false;
  bool baselines = false;
  uint64_t seed = 1;
};

void add_eval_command(CLI::App& app, EvalFlags& f) {
  auto* cmd = app.add_subcommand("eval", "Evaluation harnesses");
  cmd->require_subcommand(1);

  auto* simrel = cmd->add_subcommand("simrel", "Similarity/relatedness ranking (Spearman rho)");
  simrel->add_option("--embeddings", f.embeddings)->required()->check(CLI::ExistingFile);
  simrel->add_option("--dataset", f.dataset, "TSV: str1 TAB str2 TAB ent1 TAB ent2 TAB gold")
      ->required()
      ->check(CLI::ExistingFile);
  simrel->add_option("--setting", f.setting, "entity|word|term|entity+word|cross")
      ->check(CLI::IsMember({"entity", "word", "term", "entity+word", "cross"}))
      ->capture_default_str();
  simrel->add_option("--filter-covered", f.filter_covered,
                     "Keep only pairs covered by all of these settings")
      ->delimiter(',');
  simrel->add_option("--dump-ranking", f.ranking_out, "Write the scored ranking TSV here");
  simrel->callback([&f] {
    const auto set = jet::load_embeddings(f.embeddings);
    const auto pairs = jet::load_simrel(f.dataset);
    std::vector<jet::SimSetting> filters;
    for (const auto& name : f.filter_covered) {
      const auto s = jet::parse_sim_setting(name);
      if (!s) throw CLI::ValidationError("--filter-covered", "unknown setting '" + name + "'");
      filters.push_back(*s);
    }
    const auto result = jet::eval_simrel(pairs, set, *jet::parse_sim_setting(f.setting), filters);
    std::cout << "setting\t" << f.setting << "\n"
              << "pairs\t" << result.total << "\n"
              << "covered\t" << result.covered << "\n"
              << "coverage\t" << result.coverage << "\n"
              << "spearman_rho\t" << result.rho << "\n";
    if (!f.ranking_out.empty()) {
      write_atomic(f.ranking_out, [&](std::ostream& out) {
        size_t rank = 1;
        for (const auto& [index, score] : result.ranking) {
          out << rank++ << '\t' << pairs[index].string1 << '\t' << pairs[index].string2 << '\t'
              << score << '\t' << pairs[index].gold << '\n';
        }
      });
    }
  });

  auto* analogy = cmd->add_subcommand("analogy", "Analogy completion (b - a + c)");
  analogy->add_option("--embeddings", f.embeddings)->required()->check(CLI::ExistingFile);
  analogy->add_option("--dataset", f.dataset, "TSV with entity|surface answer lists")
      ->required()
      ->check(CLI::ExistingFile);
  analogy->add_option("--mode", f.mode, "entity|word|oracle")
      ->check(CLI::IsMember({"entity", "word", "oracle"}))
      ->capture_default_str();
  analogy->callback([&f] {
    const auto set = jet::load_embeddings(f.embeddings);
    const auto instances = jet::load_analogy(f.dataset);
    const auto result = jet::eval_analogy(instances, set, *jet::parse_analogy_mode(f.mode));
    std::cout << "mode\t" << f.mode << "\n"
              << "instances\t" << result.total << "\n"
              << "correct\t" << result.correct << "\n"
              << "unrepresentable\t" << result.unrepresentable << "\n"
              << "accuracy\t" << result.accuracy << "\n";
  });

  auto* wsd = cmd->add_subcommand("wsd", "Unsupervised entity disambiguation");
  wsd->add_option("--embeddings", f.embeddings)->required()->check(CLI::ExistingFile);
  wsd->add_option("--dataset", f.dataset,
                  "TSV: mention TAB gold TAB candidates TAB context text")
      ->required()
      ->check(CLI::ExistingFile);
  wsd->add_option("--definitions", f.definitions, "TSV: entity TAB definition text")
      ->check(CLI::ExistingFile);
  wsd->add_flag("--use-definitions", f.use_definitions, "Add the definition-based score");
  wsd->add_flag("--use-surface", f.use_surface,
                "Multiply by cos(entity, mention string vector)");
  wsd->add_flag("--oracle", f.oracle, "Also report entity/definition/oracle accuracies");
  wsd->add_flag("--per-mention", f.per_mention, "Print a per-mention accuracy table");
  wsd->add_flag("--baselines", f.baselines, "Print random and majority-class baselines");
  wsd->add_option("--seed", f.seed, "Seed for the random baseline")->envname("JET_SEED");
  wsd->callback([&f] {
    const auto set = jet::load_embeddings(f.embeddings);
    const auto instances = jet::load_wsd(f.dataset);
    jet::DefinitionMap definitions;
    if (!f.definitions.empty()) definitions = jet::load_definitions(f.definitions);
    if (f.use_definitions && definitions.empty()) {
      throw CLI::ValidationError("--use-definitions", "requires --definitions");
    }
    jet::WsdOptions opts;
    opts.use_definitions = f.use_definitions;
    opts.use_surface = f.use_surface;
    const auto result = jet::eval_wsd(instances, set, definitions, opts, f.oracle);
    std::cout << "instances\t" << result.total << "\n"
              << "correct\t" << result.correct << "\n"
              << "failed\t" << result.failed << "\n"
              << "accuracy\t" << result.accuracy << "\n";
    if (f.oracle) {
      std::cout << "entity_accuracy\t" << *result.entity_accuracy << "\n"
                << "definition_accuracy\t" << *result.definition_accuracy << "\n"
                << "oracle_accuracy\t" << *result.oracle_accuracy << "\n";
    }
    if (f.baselines) {
      std::cout << "random_baseline\t" << jet::wsd_random_baseline(instances, f.seed) << "\n"
                << "majority_baseline\t" << jet::wsd_majority_baseline(instances) << "\n";
    }
    if (f.per_mention) {
      for (const auto& [mention, stats] : result.per_mention) {
        std::cout << mention << '\t' << stats.correct << '\t' << stats.total << '\t'
                  << (stats.total ? static_cast<double>(stats.correct) / stats.total : 0.0)
                  << "\n";
      }
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jet: joint embeddings of words, terms, and entities"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CorpusFlags polysemy_flags, annotate_flags, vocab_flags;
  NeighborFlags neighbor_flags;
  EvalFlags eval_flags;

  add_train_command(app, train_flags);
  add_polysemy_command(app, polysemy_flags);
  add_annotate_command(app, annotate_flags);
  add_vocab_command(app, vocab_flags);
  add_neighbors_command(app, neighbor_flags);
  add_eval_command(app, eval_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
