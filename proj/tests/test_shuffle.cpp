#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "entropybench/shuffle.hpp"

using namespace entropybench;
using namespace entropybench::shuffle;

namespace {

// H for N=10 straight from q_d = 2(N-d)/(N(N-1)).
double analytic_h(std::size_t n) {
  double h = 0;
  for (std::size_t d = 1; d < n; ++d) {
    const double q = 2.0 * static_cast<double>(n - d) / static_cast<double>(n * (n - 1));
    h -= q * std::log(q);
  }
  return h / std::log(static_cast<double>(n - 1));
}

PermutationTrialSet relabel(const PermutationTrialSet& set, const Ordering& mapping) {
  std::vector<Ordering> out;
  for (auto t : set.trials()) {
    for (auto& card : t) card = mapping[card];
    out.push_back(t);
  }
  return {set.cards(), out};
}

PermutationTrialSet reverse_all(const PermutationTrialSet& set) {
  std::vector<Ordering> out;
  for (auto t : set.trials()) {
    std::reverse(t.begin(), t.end());
    out.push_back(t);
  }
  return {set.cards(), out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "entropybench_shuffle_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("trial set validation") {
  CHECK_THROWS_AS(PermutationTrialSet(2, {{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(PermutationTrialSet(3, {{0, 1, 2}, {0, 0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(PermutationTrialSet(3, {{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(PermutationTrialSet(3, {{0, 1, 3}}), std::invalid_argument);
  try {
    PermutationTrialSet(3, {{0, 1, 2}, {2, 1, 0}, {1, 1, 0}});
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);  // zero-based index of the bad trial
  }
  CHECK(is_permutation_of({2, 0, 1}, 3));
  CHECK_FALSE(is_permutation_of({2, 0, 0}, 3));
  const PermutationTrialSet set(3, {{0, 1, 2}, {2, 1, 0}, {1, 0, 2}});
  CHECK(set.prefix(2).size() == 2);
  CHECK(set.prefix(2).trials()[1] == Ordering{2, 1, 0});
}

TEST_CASE("distance histogram examples") {
  const auto one = distance_histogram(PermutationTrialSet(3, {{0, 1, 2}}));
  CHECK(one.count(0, 1, 1) == 1);
  CHECK(one.count(1, 2, 1) == 1);
  CHECK(one.count(0, 2, 2) == 1);
  CHECK(one.count(2, 0, 2) == 1);
  CHECK(one.count(0, 2, 1) == 0);

  const auto two = distance_histogram(PermutationTrialSet(3, {{0, 1, 2}, {2, 1, 0}}));
  CHECK(two.count(0, 2, 2) == 2);
  CHECK(two.trials() == 2);
}

TEST_CASE("histogram mass, merge and uniform distance distribution") {
  const std::size_t trials = 10000;
  const auto set = uniform_shuffle_oracle(10, trials, 77);
  const auto hist = distance_histogram(set);
  int outside = 0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j) {
      CHECK(hist.pair_total(i, j) == trials);
      for (std::size_t d = 1; d < 10; ++d) {
        const double q = 2.0 * (10.0 - d) / 90.0;
        const double sigma = std::sqrt(trials * q * (1 - q));
        if (std::abs(hist.count(i, j, d) - trials * q) > 3 * sigma) ++outside;
      }
    }
  // 405 cells at 3 sigma: about 1.1 exceedances expected by chance alone.
  CHECK(outside <= 4);

  DistanceHistogram a(10), b(10);
  for (std::size_t t = 0; t < trials; ++t) (t % 3 ? a : b).add(set.trials()[t]);
  a.merge(b);
  CHECK(a == hist);
}

TEST_CASE("entropy score") {
  SUBCASE("degenerate shuffles score zero") {
    for (std::size_t n : {3u, 5u, 10u}) {
      Ordering identity(n);
      std::iota(identity.begin(), identity.end(), 0u);
      const PermutationTrialSet same(n, std::vector<Ordering>(50, identity));
      CHECK(entropy_score(distance_histogram(same)).h == 0.0);
    }
  }
  SUBCASE("closed-form distance distribution") {
    std::vector<double> q;
    for (int d = 1; d < 10; ++d) q.push_back(2.0 * (10 - d) / 90.0);
    CHECK(normalized_entropy(q) == doctest::Approx(analytic_h(10)).epsilon(1e-12));
    CHECK(normalized_entropy(q) == doctest::Approx(0.9330).epsilon(1e-4));
    const std::vector<double> uniform(9, 1.0 / 9);
    CHECK(normalized_entropy(uniform) == doctest::Approx(1.0));
    const std::vector<double> point{0, 0, 1, 0};
    CHECK(normalized_entropy(point) == 0.0);
  }
  SUBCASE("oracle single runs") {
    const double h128 = entropy_score(distance_histogram(uniform_shuffle_oracle(10, 128, 1))).h;
    CHECK(h128 >= 0.855);
    CHECK(h128 <= 0.895);
    const double h2048 = entropy_score(distance_histogram(uniform_shuffle_oracle(10, 2048, 1))).h;
    CHECK(h2048 >= 0.913);
    CHECK(h2048 <= 0.933);
  }
  SUBCASE("argmin pair is the weakest pair") {
    // Cards 0 and 1 always adjacent; the others shuffle freely.
    std::mt19937_64 rng(3);
    std::vector<Ordering> trials;
    for (int t = 0; t < 500; ++t) {
      Ordering rest{2, 3, 4, 5};
      std::shuffle(rest.begin(), rest.end(), rng);
      Ordering o{0, 1};
      o.insert(o.end(), rest.begin(), rest.end());
      trials.push_back(o);
    }
    const auto score = entropy_score(distance_histogram(PermutationTrialSet(6, trials)));
    CHECK(score.h == 0.0);
    CHECK(score.argmin_pair == std::pair<std::size_t, std::size_t>{0, 1});
  }
  SUBCASE("errors") {
    CHECK_THROWS(entropy_score(DistanceHistogram(10)));
  }
}

TEST_CASE("oracle uniformity and determinism") {
  const auto set = uniform_shuffle_oracle(3, 6000, 12);
  std::map<Ordering, int> counts;
  for (const auto& t : set.trials()) ++counts[t];
  CHECK(counts.size() == 6);
  const double sigma = std::sqrt(6000 * (1.0 / 6) * (5.0 / 6));
  for (const auto& [perm, c] : counts) CHECK(std::abs(c - 1000) <= 3 * sigma);

  CHECK(uniform_shuffle_oracle(10, 300, 5).trials() == uniform_shuffle_oracle(10, 300, 5).trials());
  CHECK(uniform_shuffle_oracle(10, 300, 5).trials() != uniform_shuffle_oracle(10, 300, 6).trials());
  CHECK_THROWS_AS(uniform_shuffle_oracle(2, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(uniform_shuffle_oracle(10, 0, 1), std::invalid_argument);
}

TEST_CASE("invariance under relabeling and reversal") {
  const auto set = uniform_shuffle_oracle(8, 400, 21);
  const double h = entropy_score(distance_histogram(set)).h;
  CHECK(distance_histogram(reverse_all(set)) == distance_histogram(set));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    Ordering mapping(8);
    std::iota(mapping.begin(), mapping.end(), 0u);
    std::shuffle(mapping.begin(), mapping.end(), rng);
    CHECK(entropy_score(distance_histogram(relabel(set, mapping))).h == doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("convergence sweep") {
  const std::vector<std::size_t> rounds{128, 256, 512, 1024, 2048};
  const auto series = convergence_sweep(10, rounds, oracle_provider(10, 1));
  REQUIRE(series.size() == rounds.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(series[i].rounds == rounds[i]);
    CHECK(series[i].h > 0.8);
    CHECK(series[i].h < 0.94);
  }

  Ordering identity(10);
  std::iota(identity.begin(), identity.end(), 0u);
  const TrialProvider constant = [&](std::size_t n) {
    return PermutationTrialSet(10, std::vector<Ordering>(n, identity));
  };
  for (const auto& point : convergence_sweep(10, rounds, constant)) CHECK(point.h == 0.0);

  const auto stored = uniform_shuffle_oracle(10, 2048, 8);
  const auto a = convergence_sweep(10, rounds, prefix_provider(stored));
  for (std::size_t i = 0; i < rounds.size(); ++i)
    CHECK(a[i].h == entropy_score(distance_histogram(stored.prefix(rounds[i]))).h);

  CHECK_THROWS_AS(convergence_sweep(10, {256, 128}, oracle_provider(10, 1)), std::invalid_argument);
}

TEST_CASE("mean H rises with trial count") {
  const std::vector<std::size_t> rounds{128, 256, 512, 1024, 2048};
  std::vector<double> mean(rounds.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto series = convergence_sweep(10, rounds, oracle_provider(10, seed));
    for (std::size_t i = 0; i < rounds.size(); ++i) mean[i] += series[i].h / 20;
  }
  for (std::size_t i = 1; i < mean.size(); ++i) CHECK(mean[i] >= mean[i - 1]);
}

TEST_CASE("parsing and ingesting trial files") {
  SUBCASE("json and csv agree with the oracle") {
    const auto set = uniform_shuffle_oracle(10, 2048, 3);
    nlohmann::json j = set.trials();
    std::string csv;
    for (const auto& t : set.trials()) {
      for (std::size_t k = 0; k < t.size(); ++k) csv += (k ? "," : "") + std::to_string(t[k]);
      csv += "\n";
    }
    const auto from_json = ingest_trials(temp_file("trials.json", j.dump()), 10);
    const auto from_csv = ingest_trials(temp_file("trials.csv", csv), 10);
    CHECK(from_json.trials.trials() == set.trials());
    CHECK(from_csv.trials.trials() == set.trials());
    CHECK(from_json.diagnostics.dropped == 0);
    CHECK(from_json.diagnostics.received == 2048);
    const std::vector<std::size_t> rounds{128, 512, 2048};
    const auto oracle = convergence_sweep(10, rounds, prefix_provider(set));
    const auto ingested = convergence_sweep(10, rounds, prefix_provider(from_csv.trials));
    for (std::size_t i = 0; i < rounds.size(); ++i) CHECK(oracle[i].h == ingested[i].h);
  }
  SUBCASE("duplicate-card row is dropped") {
    const auto r = parse_trials("0,1,2,3\n3,2,1,0\n1,1,2,3\n2,0,3,1\n", 4);
    CHECK(r.trials.size() == 3);
    CHECK(r.diagnostics.dropped == 1);
    CHECK(r.diagnostics.dropped_rows == std::vector<std::size_t>{3});
  }
  SUBCASE("short file with a shortfall") {
    std::string text;
    const auto set = uniform_shuffle_oracle(10, 50, 4);
    for (const auto& t : set.trials()) {
      for (auto c : t) text += std::to_string(c) + " ";
      text += "\n";
    }
    const auto r = parse_trials("Sure! Here are the shuffles:\n" + text + "Let me know!", 10, 1000);
    CHECK(r.trials.size() == 50);
    CHECK(r.diagnostics.shortfall() == 950);
    const auto j = r.diagnostics.to_json();
    CHECK(j.at("shortfall") == 950);
    CHECK(j.at("expected") == 1000);
    CHECK(j.at("received") == 50);
    CHECK(j.at("dropped") == 0);
  }
  SUBCASE("nothing valid") {
    CHECK_THROWS_AS(parse_trials("```python\nrandom.shuffle(deck)\n```", 10), std::runtime_error);
    CHECK_THROWS(ingest_trials("/nonexistent/trials.csv", 10));
  }
}
