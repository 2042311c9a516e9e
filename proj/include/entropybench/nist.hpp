#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropybench/bitstream.hpp"
#include "entropybench/verdict.hpp"

namespace entropybench::nist {

/// Test parameters; the defaults suit 80,000-bit samples (10,000 bytes).
struct BatteryConfig {
  std::size_t block_frequency_m = 128;
  int serial_m = 5;
  std::size_t linear_complexity_m = 500;
  int bit_width = 8;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults.
  static BatteryConfig from_json(const nlohmann::json& j);
};

// Individual tests. Precondition violations throw std::invalid_argument;
// short-but-usable inputs produce a "warning:" diagnostic instead.

TestResult monobit(const BitSequence& seq);
TestResult block_frequency(const BitSequence& seq, std::size_t block_len);
TestResult runs(const BitSequence& seq);
TestResult longest_run_of_ones(const BitSequence& seq);
TestResult binary_rank(const BitSequence& seq);
TestResult linear_complexity(const BitSequence& seq, std::size_t block_len = 500);
TestResult serial(const BitSequence& seq, int m);
TestResult spectral(const BitSequence& seq);
TestResult sign_test(const IntegerSample& sample);

/// Runs all tests (sign only when `sample` is given). A test whose
/// preconditions fail yields a SKIPPED entry. Results are sorted by name.
std::vector<TestResult> run_battery(const BitSequence& seq, const IntegerSample* sample,
                                    const BatteryConfig& config = {});

// Building blocks, exposed for direct testing.

/// Block layout and category probabilities of the longest-run test for an
/// n-bit input: categories are "<= lowest", lowest+1, ..., ">= lowest+K".
/// Probabilities are exact for fair bits.
struct LongestRunTable {
  std::size_t block_len;
  int lowest;
  std::vector<double> probabilities;
};
LongestRunTable longest_run_table(std::size_t n);

/// Rank over GF(2) of a 32x32 matrix given as 32 row words.
int gf2_rank(std::array<std::uint32_t, 32> rows);

/// Probabilities that a random 32x32 GF(2) matrix has rank 32, 31, and <= 30.
std::array<double, 3> rank_probabilities();

/// Length of the shortest LFSR generating `bits` (Berlekamp–Massey over GF(2)).
std::size_t berlekamp_massey(std::span<const std::uint8_t> bits);

/// Cyclic overlapping k-bit pattern counts, indexed by pattern value
/// (first bit most significant). k = 0 yields {n}.
std::vector<std::size_t> serial_pattern_counts(const BitSequence& seq, int k);

/// psi^2_k = 2^k / n * sum(counts^2) - n; zero for k <= 0.
double serial_psi_squared(const BitSequence& seq, int k);

}  // namespace entropybench::nist
