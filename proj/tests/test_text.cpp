#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jet/rng.hpp"
#include "jet/text.hpp"

using jet::normalize;

TEST_CASE("normalize splits on punctuation and lowercases") {
  CHECK(normalize("New-York!") == std::vector<std::string>{"new", "york"});
  CHECK(normalize("") == std::vector<std::string>{});
  CHECK(normalize("acute  rhinitis") == std::vector<std::string>{"acute", "rhinitis"});
  CHECK(normalize("C0009443") == std::vector<std::string>{"c0009443"});
  CHECK(normalize("!!") == std::vector<std::string>{});
  CHECK(normalize("a_b") == std::vector<std::string>{"a", "b"});  // underscore is special
  CHECK(normalize("  spaced\tout\n") == std::vector<std::string>{"spaced", "out"});
}

TEST_CASE("normalize handles non-ascii codepoints") {
  // Needs the C.UTF-8 tables; accented letters stay, dashes split.
  CHECK(normalize("Caf\xc3\xa9\xe2\x80\x94noir") ==
        std::vector<std::string>{"caf\xc3\xa9", "noir"});
  CHECK(normalize("\xc3\x9cber") == std::vector<std::string>{"\xc3\xbc" "ber"});
  // Malformed UTF-8 bytes act as boundaries rather than crashing.
  CHECK(normalize("ab\xffzz") == std::vector<std::string>{"ab", "zz"});
}

TEST_CASE("normalize is idempotent") {
  jet::Rng rng(7);
  const std::string alphabet = "aZ9 .-_\tqE\xc3\xa9";
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    const uint32_t len = rng.below(40);
    for (uint32_t i = 0; i < len; ++i) raw.push_back(alphabet[rng.below(alphabet.size())]);
    const auto once = normalize(raw);
    const auto twice = normalize(jet::join_tokens(once));
    CHECK(once == twice);
  }
}

TEST_CASE("term keys escape underscores and round-trip") {
  CHECK(jet::term_key({"new", "york"}) == "new_york");
  CHECK(jet::term_key_tokens("new_york") == std::vector<std::string>{"new", "york"});
  CHECK(jet::term_key({"a_b", "c"}) == "a\\_b_c");
  CHECK(jet::term_key_tokens("a\\_b_c") == std::vector<std::string>{"a_b", "c"});
  CHECK(jet::term_key_tokens(jet::term_key({"x_", "_y"})) ==
        std::vector<std::string>{"x_", "_y"});
}

TEST_CASE("tsv and list splitting") {
  const auto f = jet::split_tsv("a\t\tc");
  REQUIRE(f.size() == 3);
  CHECK(f[0] == "a");
  CHECK(f[1] == "");
  CHECK(f[2] == "c");
  CHECK(jet::split_list("x,y,,z", ',') == std::vector<std::string>{"x", "y", "z"});
  CHECK(jet::split_list("", ',').empty());
}
