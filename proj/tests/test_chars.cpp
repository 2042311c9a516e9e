#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "entropybench/chars.hpp"
#include "entropybench/nist.hpp"
#include "oracles.hpp"

using namespace entropybench;
using namespace entropybench::chars;
using entropybench::oracle::naive_repeats;

namespace {

std::vector<std::string> random_corpus(std::size_t count, std::size_t len, const std::string& alphabet,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out(count);
  for (auto& p : out)
    for (std::size_t i = 0; i < len; ++i) p += alphabet[rng() % alphabet.size()];
  return out;
}

}  // namespace

TEST_CASE("default alphabet") {
  const auto a = default_alphabet();
  CHECK(a.size() == 74);
  CHECK(std::set<char>(a.begin(), a.end()).size() == 74);
  for (char c : std::string("!@#$%^&*()-_")) CHECK(a.find(c) != std::string::npos);
}

TEST_CASE("char_frequency examples") {
  SUBCASE("tiny alphabet") {
    const auto r = char_frequency({{"aaaa"}, "ab"});
    CHECK(r.counts == std::vector<std::size_t>{4, 0});
    CHECK(r.chi2 == doctest::Approx(4.0));
    CHECK(r.dof == 1);
    CHECK(r.p == doctest::Approx(boost::math::gamma_q(0.5, 2.0)).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(0.0455).epsilon(1e-3));
    CHECK(r.verdict.label == Label::suspect);
  }
  SUBCASE("alphabet violation") {
    const auto r = char_frequency({{"ab~", "b~{"}, "ab"});
    CHECK(r.other == 3);
    CHECK(r.other_characters == "{~");
    CHECK(r.total == 6);
    CHECK(r.counts[0] + r.counts[1] + r.other == r.total);
    CHECK(std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                      [](const std::string& d) { return d.find("other") != std::string::npos; }));
    CHECK(r.to_json().at("other") == 3);
  }
  SUBCASE("pooling") {
    // 74 characters, 100 draws: expected 1.35 per character, pooled by 4.
    const auto r = char_frequency({random_corpus(10, 10, default_alphabet(), 1)});
    CHECK(r.pooled);
    CHECK(r.pool_size == 4);
    CHECK(r.dof == 74 / 4 - 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS(char_frequency({{}, "ab"}));
    CHECK_THROWS(char_frequency({{""}, "ab"}));
  }
}

TEST_CASE("char_frequency positive control") {
  int ok = 0, not_ko = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = char_frequency({random_corpus(200, 12, default_alphabet(), seed)});
    std::size_t sum = r.other;
    for (auto c : r.counts) sum += c;
    CHECK(sum == r.total);
    ok += r.verdict.label == Label::ok;
    not_ko += r.verdict.label != Label::ko;
  }
  // An ideal source is OK with probability 0.89 and non-KO with 0.98.
  CHECK(ok >= 80);
  CHECK(not_ko >= 95);
}

TEST_CASE("repeated substrings") {
  SUBCASE("shared suffix") {
    const auto r = repeated_substring_scan({{"Xy7!Ab", "Qr7!Ab"}}, 3);
    REQUIRE(r.repeats.size() == 1);
    CHECK(r.repeats[0] == Repeat{"7!Ab", 2, 2});
    CHECK(r.duplicates == 0);
  }
  SUBCASE("exact duplicates") {
    const auto r = repeated_substring_scan({{"abc", "abc"}}, 2);
    CHECK(r.duplicates == 1);
    CHECK(r.duplicated == std::vector<std::string>{"abc"});
    const auto three = repeated_substring_scan({{"abc", "xyz", "abc", "abc", "xyz"}}, 2);
    CHECK(three.duplicates == 3);
  }
  SUBCASE("random corpus has no long repeats") {
    const auto r = repeated_substring_scan({random_corpus(100, 12, default_alphabet(), 5)}, 6);
    CHECK(r.repeats.empty());
    CHECK(r.duplicates == 0);
  }
  SUBCASE("min_len guard") { CHECK_THROWS_AS(repeated_substring_scan({{"ab"}}, 1), std::invalid_argument); }
  SUBCASE("matches the naive oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
      // Small alphabets force plenty of shared substrings.
      const std::string alphabet = std::string("abcdefgh").substr(0, 2 + trial % 6);
      const std::size_t count = 2 + rng() % 40;
      const std::size_t len = 2 + rng() % 30;
      auto corpus = random_corpus(count, len, alphabet, rng());
      if (trial % 5 == 0) corpus.push_back(corpus.front());
      std::size_t total = 0;
      for (const auto& p : corpus) total += p.size();
      REQUIRE(total <= 2000);
      for (std::size_t min_len : {2u, 3u, 5u}) {
        INFO("trial " << trial << " min_len " << min_len);
        CHECK(repeated_substring_scan({corpus, alphabet}, min_len).repeats == naive_repeats(corpus, min_len));
      }
    }
  }
}

TEST_CASE("corpus_to_bits") {
  CHECK(corpus_to_bits({{"A"}}).to_string() == "01000001");
  CHECK_THROWS(corpus_to_bits({{}}));

  // Duplicated passwords depress the serial test relative to distinct ones.
  // Printable ASCII always has a zero top bit, which fails serial on its own,
  // so the comparison uses every byte value.
  std::string bytes;
  for (int c = 0; c < 256; ++c) bytes += static_cast<char>(c);
  const auto distinct = random_corpus(1000, 12, bytes, 9);
  std::vector<std::string> repeated;
  for (std::size_t i = 0; i < 1000; ++i) repeated.push_back(distinct[i % 20]);
  const auto serial_distinct = nist::serial(corpus_to_bits({distinct}), 5);
  const auto serial_repeated = nist::serial(corpus_to_bits({repeated}), 5);
  CHECK(serial_repeated.p_values[0] < serial_distinct.p_values[0]);
  CHECK(serial_distinct.verdicts[0].label != Label::ko);
  CHECK(serial_repeated.verdicts[0].label == Label::ko);
}
