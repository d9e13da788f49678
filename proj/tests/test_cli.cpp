#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>

#include "testutil.hpp"

namespace {

std::string cli_path() {
  const char* path = std::getenv("JET_CLI");
  REQUIRE_MESSAGE(path != nullptr, "JET_CLI must point at the jet binary");
  return path;
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  testutil::TempDir dir;
  const std::string out_path = dir.file("out" + std::to_string(counter));
  const std::string err_path = dir.file("err" + std::to_string(counter));
  ++counter;
  const std::string cmd =
      cli_path() + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_file(out_path);
  r.err = testutil::read_file(err_path);
  return r;
}

struct Fixture {
  testutil::TempDir dir;
  std::string corpus, terminology;

  Fixture() {
    const auto data = testutil::make_synthetic_corpus(80, 10, 17);
    std::string corpus_text, term_text;
    for (const auto& line : data.corpus) corpus_text += line + "\n";
    for (const auto& [surface, entity] : data.terminology) {
      term_text += surface + "\t" + entity + "\n";
    }
    corpus = dir.file("corpus.txt");
    terminology = dir.file("terms.tsv");
    testutil::write_file(corpus, corpus_text);
    testutil::write_file(terminology, term_text);
  }

  std::string train_args(const std::string& out, const std::string& extra = "") const {
    return "train --corpus " + corpus + " --terminology " + terminology + " --out " + out +
           " --dim 8 --epochs 2 --min-count 1 --subsample 1 --quiet " + extra;
  }
};

}  // namespace

TEST_CASE("help exits zero and lists defaults") {
  const auto top = run("--help");
  CHECK(top.exit_code == 0);
  CHECK(top.out.find("train") != std::string::npos);
  const auto train = run("train --help");
  CHECK(train.exit_code == 0);
  CHECK(train.out.find("--window") != std::string::npos);
  CHECK(train.out.find("2") != std::string::npos);   // default window
  CHECK(train.out.find("0.05") != std::string::npos);  // default lr
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("").exit_code == 2);           // missing subcommand
  CHECK(run("no-such-command").exit_code == 2);
  Fixture f;
  const auto bad_window = run(f.train_args(f.dir.file("m.bin"), "--window 0"));
  CHECK(bad_window.exit_code == 2);
  const auto missing = run("train --corpus /no/such/file --terminology " + f.terminology +
                           " --out " + f.dir.file("m.bin"));
  CHECK(missing.exit_code == 2);
  const auto unknown_flag = run(f.train_args(f.dir.file("m.bin"), "--frobnicate"));
  CHECK(unknown_flag.exit_code == 2);
}

TEST_CASE("runtime failures exit with code 1") {
  Fixture f;
  testutil::write_file(f.dir.file("bad.bin"), "XXXX not embeddings");
  const auto r = run("neighbors --embeddings " + f.dir.file("bad.bin") + " --query word:x");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("training is byte-identical across runs with the same seed") {
  Fixture f;
  const std::string m1 = f.dir.file("m1.bin"), m2 = f.dir.file("m2.bin");
  CHECK(run(f.train_args(m1, "--seed 7 --workers 1")).exit_code == 0);
  CHECK(run(f.train_args(m2, "--seed 7 --workers 1")).exit_code == 0);
  const auto b1 = testutil::read_file(m1);
  const auto b2 = testutil::read_file(m2);
  REQUIRE(!b1.empty());
  CHECK(b1 == b2);

  const std::string m3 = f.dir.file("m3.bin");
  CHECK(run(f.train_args(m3, "--seed 8 --workers 1")).exit_code == 0);
  CHECK(b1 != testutil::read_file(m3));
}

TEST_CASE("text format flag and checkpoints work") {
  Fixture f;
  const std::string out = f.dir.file("m.txt");
  const auto r = run(f.train_args(out, "--format text --checkpoint " + f.dir.file("ck")));
  CHECK(r.exit_code == 0);
  const auto text = testutil::read_file(out);
  CHECK(text.find("word:") != std::string::npos);
  CHECK(std::filesystem::exists(f.dir.file("ck.epoch1.bin")));
  CHECK(std::filesystem::exists(f.dir.file("ck.epoch2.bin")));
}

TEST_CASE("neighbors excludes the query key itself") {
  Fixture f;
  const std::string model = f.dir.file("m.bin");
  REQUIRE(run(f.train_args(model)).exit_code == 0);
  const auto r = run("neighbors --embeddings " + model +
                     " --query ent:E0x0 --kinds entity --topk 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("ent:E0x0\t") == std::string::npos);
  CHECK(r.out.find("entity") != std::string::npos);
}

TEST_CASE("polysemy subcommand writes the report and histogram") {
  Fixture f;
  const std::string report = f.dir.file("cp.tsv");
  const auto r = run("polysemy --corpus " + f.corpus + " --terminology " + f.terminology +
                     " --out " + report);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("cp_band") != std::string::npos);
  const auto rows = testutil::read_file(report);
  // Shared terms are 10-way ambiguous, so some entity has cp > 5.
  CHECK(rows.find("\t10\t") != std::string::npos);
}

TEST_CASE("eval simrel on an identity fixture yields rho 1") {
  Fixture f;
  // Hand-built embeddings: entity cosines ordered like gold.
  testutil::write_file(f.dir.file("emb.txt"),
                       "5 2\n"
                       "word:w 1 0\n"
                       "ent:P 1 0\n"
                       "ent:Q1 0.9950042 0.0998334\n"
                       "ent:Q2 0.9800666 0.1986693\n"
                       "ent:Q3 0.9553365 0.2955202\n");
  testutil::write_file(f.dir.file("pairs.tsv"),
                       "w\tw\tP\tQ3\t1\n"
                       "w\tw\tP\tQ2\t2\n"
                       "w\tw\tP\tQ1\t3\n");
  const auto r = run("eval simrel --embeddings " + f.dir.file("emb.txt") + " --dataset " +
                     f.dir.file("pairs.tsv") + " --setting entity");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("spearman_rho\t1\n") != std::string::npos);
  CHECK(r.out.find("coverage\t1\n") != std::string::npos);
}

TEST_CASE("eval wsd --oracle prints individual and oracle accuracies") {
  Fixture f;
  testutil::write_file(f.dir.file("emb.txt"),
                       "4 2\n"
                       "word:cx 1 0\n"
                       "word:cy 0 1\n"
                       "ent:X 1 0\n"
                       "ent:Y 0 1\n");
  testutil::write_file(f.dir.file("wsd.tsv"),
                       "m\tX\tX,Y\tcx cx\n"
                       "m\tY\tX,Y\tcy cy\n");
  testutil::write_file(f.dir.file("defs.tsv"), "X\tcx\nY\tcy\n");
  const auto r = run("eval wsd --embeddings " + f.dir.file("emb.txt") + " --dataset " +
                     f.dir.file("wsd.tsv") + " --definitions " + f.dir.file("defs.tsv") +
                     " --use-definitions --oracle --baselines");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("accuracy\t1\n") != std::string::npos);
  CHECK(r.out.find("entity_accuracy\t1\n") != std::string::npos);
  CHECK(r.out.find("definition_accuracy\t1\n") != std::string::npos);
  CHECK(r.out.find("oracle_accuracy\t1\n") != std::string::npos);
  CHECK(r.out.find("majority_baseline\t0.5\n") != std::string::npos);
}

TEST_CASE("annotate emits occurrence records") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("c.txt"), "in new york city\n");
  testutil::write_file(dir.file("t.tsv"), "new york\tQ60\nnew york city\tQ61\n");
  const auto r =
      run("annotate --corpus " + dir.file("c.txt") + " --terminology " + dir.file("t.tsv"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "0\t1\t3\tnew_york\tQ60\n0\t1\t4\tnew_york_city\tQ61\n");
}

TEST_CASE("vocab dump lists words and terms") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("c.txt"), "tea tea tea time\n");
  testutil::write_file(dir.file("t.tsv"), "tea\tT1\n");
  const auto r = run("vocab --corpus " + dir.file("c.txt") + " --terminology " + dir.file("t.tsv") +
                     " --min-count 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("word\ttea\t3") != std::string::npos);
  CHECK(r.out.find("term\ttea\t3") != std::string::npos);
}

TEST_CASE("environment variables fall back when flags are absent") {
  Fixture f;
  const std::string m1 = f.dir.file("env1.bin");
  const std::string cmd = "JET_SEED=7 " + cli_path() + " " + f.train_args(m1);
  CHECK(std::system((cmd + " >/dev/null 2>&1").c_str()) == 0);
  const std::string m2 = f.dir.file("env2.bin");
  CHECK(run(f.train_args(m2, "--seed 7")).exit_code == 0);
  CHECK(testutil::read_file(m1) == testutil::read_file(m2));
}
