#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropybench/source.hpp"

namespace entropybench::shuffle {

/// One deck ordering: ordering[position] = card label.
using Ordering = std::vector<std::uint32_t>;

/// Recorded deck orderings over N cards labeled 0..N-1.
class PermutationTrialSet {
 public:
  /// Throws std::invalid_argument if N < 3, or names the first trial that is
  /// not a permutation of 0..N-1.
  PermutationTrialSet(std::size_t cards, std::vector<Ordering> trials, SampleSource source = {});

  std::size_t cards() const { return cards_; }
  std::size_t size() const { return trials_.size(); }
  const std::vector<Ordering>& trials() const { return trials_; }
  const SampleSource& source() const { return source_; }

  /// First `count` trials (count <= size()).
  PermutationTrialSet prefix(std::size_t count) const;

 private:
  std::size_t cards_;
  std::vector<Ordering> trials_;
  SampleSource source_;
};

bool is_permutation_of(const Ordering& ordering, std::size_t cards);

/// K[i][j][d]: number of trials where cards i < j sat d positions apart.
class DistanceHistogram {
 public:
  explicit DistanceHistogram(std::size_t cards);

  std::size_t cards() const { return cards_; }
  std::size_t trials() const { return trials_; }

  void add(const Ordering& ordering);
  /// Adds another histogram's counts (sharded accumulation).
  void merge(const DistanceHistogram& other);

  /// Count for unordered pair (i, j), distance d in 1..N-1. Symmetric in i, j.
  std::uint64_t count(std::size_t i, std::size_t j, std::size_t d) const;
  std::uint64_t pair_total(std::size_t i, std::size_t j) const;

  friend bool operator==(const DistanceHistogram&, const DistanceHistogram&) = default;

 private:
  std::size_t pair_index(std::size_t i, std::size_t j) const;

  std::size_t cards_;
  std::size_t trials_ = 0;
  std::vector<std::uint64_t> counts_;  // [pair][d-1]
};

DistanceHistogram distance_histogram(const PermutationTrialSet& trials);

struct EntropyScore {
  double h = 0.0;  // fraction of the maximum entropy, in [0, 1]
  std::pair<std::size_t, std::size_t> argmin_pair{0, 1};
};

/// Minimum over card pairs of the base-(N-1) entropy of the pair's distance
/// distribution. 0 log 0 = 0. Throws for N < 3 or a pair with no counts.
EntropyScore entropy_score(const DistanceHistogram& hist);

/// Entropy of a single distance distribution q_1..q_{N-1} in base N-1.
double normalized_entropy(std::span<const double> distribution);

/// `trials` independent uniform shuffles (Fisher–Yates) of 0..N-1 driven by
/// a 64-bit Mersenne Twister seeded with `seed`.
PermutationTrialSet uniform_shuffle_oracle(std::size_t cards, std::size_t trials, std::uint64_t seed);

/// Supplies a trial set of the requested size.
using TrialProvider = std::function<PermutationTrialSet(std::size_t rounds)>;

struct ConvergencePoint {
  std::size_t rounds = 0;
  double h = 0.0;
};

/// Entropy score at each round count, each computed independently from the
/// provider's trials. round_counts must be ascending.
std::vector<ConvergencePoint> convergence_sweep(std::size_t cards, const std::vector<std::size_t>& round_counts,
                                                const TrialProvider& provider);

/// Fresh oracle batch per round count, seeded from (seed, rounds).
TrialProvider oracle_provider(std::size_t cards, std::uint64_t seed);

/// Nested prefixes of one stored trial set (cumulative reading).
TrialProvider prefix_provider(PermutationTrialSet trials);

struct IngestDiagnostics {
  std::size_t dropped = 0;
  std::size_t received = 0;
  std::optional<std::size_t> expected;
  std::vector<std::size_t> dropped_rows;  // 1-based row numbers of rejected candidates

  std::size_t shortfall() const;
  nlohmann::json to_json() const;
};

struct IngestedTrials {
  PermutationTrialSet trials;
  IngestDiagnostics diagnostics;
};

/// Parses orderings from text: a JSON array of arrays, or one ordering per
/// line (CSV or free text; each line's decimal-digit runs form the row, rows
/// without digits are ignored). Rows that are not permutations are dropped.
/// Throws std::runtime_error when nothing valid remains.
IngestedTrials parse_trials(std::string_view text, std::size_t cards, std::optional<std::size_t> expected = {});

/// File front end; transcripts (.jsonl) are read through their assistant replies.
IngestedTrials ingest_trials(const std::filesystem::path& path, std::size_t cards,
                             std::optional<std::size_t> expected = {});

}  // namespace entropybench::shuffle
