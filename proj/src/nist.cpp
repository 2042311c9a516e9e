#include "entropybench/nist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "entropybench/numeric.hpp"

namespace entropybench::nist {

namespace {

using numeric::erfc;
using numeric::igamc;

// Category probabilities follow NIST SP 800-22 rev. 1a and its sts-2.1.2
// reference code, except where they are derived exactly below.

// Longest run of ones: block length and the first category (<= lowest);
// there are K+1 categories lowest, lowest+1, ..., >= lowest+K.
struct LongestRunLayout {
  std::size_t block_len;
  int lowest;
  int categories;
};

constexpr LongestRunLayout kLongestRunShort{8, 1, 4};
constexpr LongestRunLayout kLongestRunMedium{128, 4, 6};
constexpr LongestRunLayout kLongestRunLong{10000, 10, 7};

constexpr std::size_t kLongestRunMediumFrom = 6272;
constexpr std::size_t kLongestRunLongFrom = 750000;

const LongestRunLayout& longest_run_layout(std::size_t n) {
  return n < kLongestRunMediumFrom ? kLongestRunShort : n < kLongestRunLongFrom ? kLongestRunMedium : kLongestRunLong;
}

// P(longest run of ones in `len` fair bits <= k), by a DP over the length
// of the current trailing run.
double longest_run_cdf(std::size_t len, int k) {
  std::vector<double> state(static_cast<std::size_t>(k) + 1, 0.0), next(state.size());
  state[0] = 1.0;
  for (std::size_t i = 0; i < len; ++i) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < state.size(); ++r) {
      next[0] += 0.5 * state[r];
      if (r + 1 < state.size()) next[r + 1] += 0.5 * state[r];
    }
    state.swap(next);
  }
  double total = 0.0;
  for (double v : state) total += v;
  return total;
}

// Linear complexity: probabilities for the seven T categories
// (-inf,-2.5], (-2.5,-1.5], ..., (2.5, inf). Exact dyadic fractions.
constexpr std::array<double, 7> kLinearComplexityProbabilities{1.0 / 96, 1.0 / 32, 1.0 / 8, 1.0 / 2,
                                                               1.0 / 4,  1.0 / 16, 1.0 / 48};

constexpr std::size_t kRankDim = 32;
constexpr std::size_t kRankMinMatrices = 38;

constexpr double kSpectralThresholdAlpha = 0.05;

constexpr std::size_t kRecommendedMinBits = 100;
constexpr std::size_t kSpectralRecommendedMinBits = 1000;
constexpr std::size_t kLinearComplexityRecommendedBlocks = 200;

std::string warn_short(std::size_t n, std::size_t recommended) {
  return "warning: n=" + std::to_string(n) + " is below the recommended minimum of " + std::to_string(recommended);
}

void require_nonempty(const BitSequence& seq, const char* test) {
  if (seq.empty()) throw std::invalid_argument(std::string(test) + ": empty sequence");
}

double chi_squared(std::span<const std::size_t> observed, std::span<const double> probabilities, double total) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probabilities[i];
    const double diff = static_cast<double>(observed[i]) - expected;
    chi2 += diff * diff / expected;
  }
  return chi2;
}

// Multiword bitset helpers for Berlekamp–Massey.
using Words = std::vector<std::uint64_t>;

void shift_left_one(Words& w, std::uint64_t in_bit) {
  std::uint64_t carry = in_bit;
  for (auto& word : w) {
    const std::uint64_t next = word >> 63;
    word = (word << 1) | carry;
    carry = next;
  }
}

// target ^= source << shift
void xor_shifted(Words& target, const Words& source, std::size_t shift) {
  const std::size_t word_shift = shift / 64;
  const unsigned bit_shift = static_cast<unsigned>(shift % 64);
  for (std::size_t i = target.size(); i-- > word_shift;) {
    const std::size_t src = i - word_shift;
    std::uint64_t v = source[src] << bit_shift;
    if (bit_shift != 0 && src > 0) v |= source[src - 1] >> (64 - bit_shift);
    target[i] ^= v;
  }
}

bool parity_and(const Words& a, const Words& b) {
  int acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc ^= std::popcount(a[i] & b[i]) & 1;
  return acc != 0;
}

}  // namespace

nlohmann::json BatteryConfig::to_json() const {
  return {{"block_frequency_M", block_frequency_m},
          {"serial_m", serial_m},
          {"linear_complexity_M", linear_complexity_m},
          {"bit_width", bit_width}};
}

BatteryConfig BatteryConfig::from_json(const nlohmann::json& j) {
  BatteryConfig c;
  c.block_frequency_m = j.value("block_frequency_M", c.block_frequency_m);
  c.serial_m = j.value("serial_m", c.serial_m);
  c.linear_complexity_m = j.value("linear_complexity_M", c.linear_complexity_m);
  c.bit_width = j.value("bit_width", c.bit_width);
  return c;
}

TestResult monobit(const BitSequence& seq) {
  require_nonempty(seq, "monobit");
  const std::size_t n = seq.size();
  std::vector<std::string> diag;
  if (n < kRecommendedMinBits) diag.push_back(warn_short(n, kRecommendedMinBits));

  const auto ones = static_cast<double>(seq.count_ones());
  const double sum = 2.0 * ones - static_cast<double>(n);
  const double s_obs = std::fabs(sum) / std::sqrt(static_cast<double>(n));
  return make_result("monobit", {erfc(s_obs / std::numbers::sqrt2)}, s_obs, n, std::move(diag));
}

TestResult block_frequency(const BitSequence& seq, std::size_t block_len) {
  if (block_len < 2) throw std::invalid_argument("block_frequency: block length must be at least 2");
  if (seq.size() < block_len) throw std::invalid_argument("block_frequency: fewer bits than one block");
  const std::size_t blocks = seq.size() / block_len;
  const auto bits = seq.bits();

  double sum = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto first = bits.begin() + static_cast<std::ptrdiff_t>(b * block_len);
    const auto ones = std::count(first, first + static_cast<std::ptrdiff_t>(block_len), std::uint8_t{1});
    const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
    sum += (pi - 0.5) * (pi - 0.5);
  }
  const double chi2 = 4.0 * static_cast<double>(block_len) * sum;
  const double p = igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0);
  return make_result("block_frequency", {p}, chi2, blocks * block_len);
}

TestResult runs(const BitSequence& seq) {
  require_nonempty(seq, "runs");
  const std::size_t n = seq.size();
  const double nd = static_cast<double>(n);
  std::vector<std::string> diag;
  if (n < kRecommendedMinBits) diag.push_back(warn_short(n, kRecommendedMinBits));

  const double pi = static_cast<double>(seq.count_ones()) / nd;
  const double tau = 2.0 / std::sqrt(nd);
  // Frequency prerequisite; a constant sequence always fails it.
  if (std::fabs(pi - 0.5) >= tau || pi == 0.0 || pi == 1.0) {
    diag.push_back("gate failed: |pi - 1/2| = " + std::to_string(std::fabs(pi - 0.5)) +
                   " >= " + std::to_string(tau) + " or degenerate composition");
    return make_result("runs", {0.0}, 0.0, n, std::move(diag));
  }

  std::size_t v = 1;
  const auto bits = seq.bits();
  for (std::size_t i = 1; i < n; ++i)
    if (bits[i] != bits[i - 1]) ++v;

  const double vd = static_cast<double>(v);
  const double spread = pi * (1.0 - pi);
  const double p = erfc(std::fabs(vd - 2.0 * nd * spread) / (2.0 * std::sqrt(2.0 * nd) * spread));
  return make_result("runs", {p}, vd, n, std::move(diag));
}

TestResult longest_run_of_ones(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 128) throw std::invalid_argument("longest_run_of_ones: needs at least 128 bits");
  const auto& layout = longest_run_layout(n);
  const auto table = longest_run_table(n);
  const std::size_t m = layout.block_len;
  const std::size_t blocks = n / m;
  const int categories = layout.categories;
  std::vector<std::size_t> tally(table.probabilities.size(), 0);

  const auto bits = seq.bits();
  for (std::size_t b = 0; b < blocks; ++b) {
    int longest = 0;
    int current = 0;
    for (std::size_t i = b * m; i < (b + 1) * m; ++i) {
      current = bits[i] ? current + 1 : 0;
      longest = std::max(longest, current);
    }
    const int category = std::clamp(longest - table.lowest, 0, categories - 1);
    ++tally[static_cast<std::size_t>(category)];
  }

  const double chi2 = chi_squared(tally, table.probabilities, static_cast<double>(blocks));
  const double dof = static_cast<double>(categories - 1);
  const double p = igamc(dof / 2.0, chi2 / 2.0);
  return make_result("longest_run_of_ones", {p}, chi2, blocks * m,
                     {"block_len=" + std::to_string(m) + " blocks=" + std::to_string(blocks)});
}

LongestRunTable longest_run_table(std::size_t n) {
  const auto& layout = longest_run_layout(n);
  static std::array<std::optional<LongestRunTable>, 3> cache;
  static std::mutex mutex;
  const std::size_t slot = &layout == &kLongestRunShort ? 0 : &layout == &kLongestRunMedium ? 1 : 2;
  std::lock_guard lock(mutex);
  if (!cache[slot]) {
    LongestRunTable table{layout.block_len, layout.lowest, {}};
    double below = 0.0;
    for (int c = 0; c < layout.categories; ++c) {
      const double upto = c + 1 == layout.categories ? 1.0 : longest_run_cdf(layout.block_len, layout.lowest + c);
      table.probabilities.push_back(upto - below);
      below = upto;
    }
    cache[slot] = std::move(table);
  }
  return *cache[slot];
}

int gf2_rank(std::array<std::uint32_t, 32> rows) {
  int rank = 0;
  for (int col = 31; col >= 0 && rank < 32; --col) {
    const std::uint32_t mask = 1U << col;
    int pivot = -1;
    for (int r = rank; r < 32; ++r)
      if (rows[static_cast<std::size_t>(r)] & mask) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot)]);
    const std::uint32_t pivot_row = rows[static_cast<std::size_t>(rank)];
    for (int r = rank + 1; r < 32; ++r)
      if (rows[static_cast<std::size_t>(r)] & mask) rows[static_cast<std::size_t>(r)] ^= pivot_row;
    ++rank;
  }
  return rank;
}

std::array<double, 3> rank_probabilities() {
  // P(rank = r) = 2^{r(Q+M-r) - MQ} * prod_{i<r} (1-2^{i-Q})(1-2^{i-M}) / (1-2^{i-r})
  const auto exact = [](int r) {
    constexpr int dim = static_cast<int>(kRankDim);
    double product = 1.0;
    for (int i = 0; i < r; ++i) {
      const double row = 1.0 - std::ldexp(1.0, i - dim);
      product *= row * row / (1.0 - std::ldexp(1.0, i - r));
    }
    return std::ldexp(product, r * (2 * dim - r) - dim * dim);
  };
  const double full = exact(32);
  const double minus_one = exact(31);
  return {full, minus_one, 1.0 - full - minus_one};
}

TestResult binary_rank(const BitSequence& seq) {
  constexpr std::size_t matrix_bits = kRankDim * kRankDim;
  const std::size_t matrices = seq.size() / matrix_bits;
  if (matrices < kRankMinMatrices)
    throw std::invalid_argument("binary_rank: needs at least " + std::to_string(kRankMinMatrices * matrix_bits) +
                                " bits");
  const auto bits = seq.bits();
  std::array<std::size_t, 3> tally{0, 0, 0};
  for (std::size_t k = 0; k < matrices; ++k) {
    std::array<std::uint32_t, 32> rows{};
    for (std::size_t r = 0; r < kRankDim; ++r) {
      std::uint32_t word = 0;
      const std::size_t base = k * matrix_bits + r * kRankDim;
      for (std::size_t c = 0; c < kRankDim; ++c) word = (word << 1) | bits[base + c];
      rows[r] = word;
    }
    const int rank = gf2_rank(rows);
    ++tally[rank == 32 ? 0 : rank == 31 ? 1 : 2];
  }
  const auto probabilities = rank_probabilities();
  const double chi2 = chi_squared(tally, probabilities, static_cast<double>(matrices));
  return make_result("binary_rank", {std::exp(-chi2 / 2.0)}, chi2, matrices * matrix_bits);
}

std::size_t berlekamp_massey(std::span<const std::uint8_t> bits) {
  const std::size_t n = bits.size();
  const std::size_t words = n / 64 + 2;
  Words connection(words, 0);  // C(x), bit i = c_i
  Words previous(words, 0);    // B(x)
  Words window(words, 0);      // bit i = s_{k-i}
  connection[0] = previous[0] = 1;

  std::size_t length = 0;
  std::size_t last_change = 0;  // m + 1 in the textbook formulation, so shifts stay unsigned
  for (std::size_t k = 0; k < n; ++k) {
    shift_left_one(window, bits[k] & 1U);
    if (!parity_and(connection, window)) continue;
    // discrepancy: C(x) += x^{k-m} B(x)
    const std::size_t shift = k + 1 - last_change;
    if (2 * length <= k) {
      Words saved = connection;
      xor_shifted(connection, previous, shift);
      length = k + 1 - length;
      last_change = k + 1;
      previous = std::move(saved);
    } else {
      xor_shifted(connection, previous, shift);
    }
  }
  return length;
}

TestResult linear_complexity(const BitSequence& seq, std::size_t block_len) {
  if (block_len < 500 || block_len > 5000)
    throw std::invalid_argument("linear_complexity: block length must be in [500, 5000]");
  if (seq.size() < block_len) throw std::invalid_argument("linear_complexity: fewer bits than one block");
  const std::size_t blocks = seq.size() / block_len;
  std::vector<std::string> diag;
  if (blocks < kLinearComplexityRecommendedBlocks)
    diag.push_back("warning: " + std::to_string(blocks) + " blocks is below the recommended " +
                   std::to_string(kLinearComplexityRecommendedBlocks));

  const double m = static_cast<double>(block_len);
  const double sign = (block_len % 2 == 0) ? 1.0 : -1.0;  // (-1)^M
  const double mu = m / 2.0 + (9.0 - sign) / 36.0 - (m / 3.0 + 2.0 / 9.0) / std::pow(2.0, m);

  std::vector<std::size_t> tally(kLinearComplexityProbabilities.size(), 0);
  const auto bits = seq.bits();
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto length = berlekamp_massey(bits.subspan(b * block_len, block_len));
    const double t = sign * (static_cast<double>(length) - mu) + 2.0 / 9.0;
    std::size_t category = 0;
    if (t <= -2.5) category = 0;
    else if (t <= -1.5) category = 1;
    else if (t <= -0.5) category = 2;
    else if (t <= 0.5) category = 3;
    else if (t <= 1.5) category = 4;
    else if (t <= 2.5) category = 5;
    else category = 6;
    ++tally[category];
  }
  const double chi2 = chi_squared(tally, kLinearComplexityProbabilities, static_cast<double>(blocks));
  const double p = igamc(3.0, chi2 / 2.0);
  return make_result("linear_complexity", {p}, chi2, blocks * block_len, std::move(diag));
}

std::vector<std::size_t> serial_pattern_counts(const BitSequence& seq, int k) {
  const std::size_t n = seq.size();
  if (k <= 0) return {n};
  std::vector<std::size_t> counts(std::size_t{1} << k, 0);
  if (n == 0) return counts;
  const auto bits = seq.bits();
  const std::size_t mask = counts.size() - 1;
  std::size_t pattern = 0;
  // Prime with the first k-1 bits, then slide across the cyclic extension.
  for (int i = 0; i < k - 1; ++i) pattern = ((pattern << 1) | bits[static_cast<std::size_t>(i) % n]) & mask;
  for (std::size_t i = 0; i < n; ++i) {
    pattern = ((pattern << 1) | bits[(i + static_cast<std::size_t>(k) - 1) % n]) & mask;
    ++counts[pattern];
  }
  return counts;
}

double serial_psi_squared(const BitSequence& seq, int k) {
  if (k <= 0) return 0.0;
  const auto counts = serial_pattern_counts(seq, k);
  const double n = static_cast<double>(seq.size());
  double sum_sq = 0.0;
  std::size_t total = 0;
  for (const auto c : counts) {
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
    total += c;
  }
  if (total != seq.size()) throw std::logic_error("serial: pattern counts do not sum to n");
  return std::ldexp(sum_sq, k) / n - n;
}

TestResult serial(const BitSequence& seq, int m) {
  const std::size_t n = seq.size();
  if (m < 2 || m > 24) throw std::invalid_argument("serial: m must be in [2, 24]");
  if (n < static_cast<std::size_t>(m)) throw std::invalid_argument("serial: fewer bits than the pattern length");
  std::vector<std::string> diag;
  const int log2n = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
  if (m >= log2n - 2) diag.push_back("warning: m=" + std::to_string(m) + " is not below floor(log2 n) - 2");

  const double psi_m = serial_psi_squared(seq, m);
  const double psi_m1 = serial_psi_squared(seq, m - 1);
  const double psi_m2 = serial_psi_squared(seq, m - 2);
  const double del1 = std::max(0.0, psi_m - psi_m1);
  const double del2 = std::max(0.0, psi_m - 2.0 * psi_m1 + psi_m2);
  const double p1 = igamc(std::ldexp(1.0, m - 2), del1 / 2.0);
  const double p2 = igamc(std::ldexp(1.0, m - 3), del2 / 2.0);
  return make_result("serial", {p1, p2}, del1, n, std::move(diag));
}

TestResult spectral(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 2) throw std::invalid_argument("spectral: needs at least 2 bits");
  std::vector<std::string> diag;
  if (n < kSpectralRecommendedMinBits) diag.push_back(warn_short(n, kSpectralRecommendedMinBits));

  std::vector<double> signal(n);
  const auto bits = seq.bits();
  for (std::size_t i = 0; i < n; ++i) signal[i] = bits[i] ? 1.0 : -1.0;
  const auto moduli = numeric::dft_moduli(signal);

  const double nd = static_cast<double>(n);
  const double threshold = std::sqrt(std::log(1.0 / kSpectralThresholdAlpha) * nd);
  const auto below = std::count_if(moduli.begin(), moduli.end(), [&](double v) { return v < threshold; });
  const double expected = (1.0 - kSpectralThresholdAlpha) * nd / 2.0;
  const double d = (static_cast<double>(below) - expected) /
                   std::sqrt(nd * (1.0 - kSpectralThresholdAlpha) * kSpectralThresholdAlpha / 4.0);
  const double p = erfc(std::fabs(d) / std::numbers::sqrt2);
  return make_result("spectral", {p}, d, n, std::move(diag));
}

TestResult sign_test(const IntegerSample& sample) {
  if (sample.values.empty()) throw std::invalid_argument("sign: empty sample");
  if (sample.declared_max < 1) throw std::invalid_argument("sign: declared_max must be at least 1");
  // Reference median is the midpoint of the declared range, not the sample median.
  const double median = static_cast<double>(sample.declared_max) / 2.0;
  std::size_t above = 0;
  std::size_t below = 0;
  for (const auto v : sample.values) {
    const auto vd = static_cast<double>(v);
    if (vd > median) ++above;
    else if (vd < median) ++below;
  }
  const std::size_t ties = sample.values.size() - above - below;
  if (above + below == 0) throw std::invalid_argument("sign: every value ties the reference median");

  const double diff = std::fabs(static_cast<double>(above) - static_cast<double>(below));
  const double total = static_cast<double>(above + below);
  const double p = erfc(diff / std::sqrt(2.0 * total));
  std::vector<std::string> diag{"median=" + std::to_string(median) + " above=" + std::to_string(above) +
                                " below=" + std::to_string(below) + " ties=" + std::to_string(ties)};
  return make_result("sign", {p}, diff / std::sqrt(total), above + below, std::move(diag));
}

std::vector<TestResult> run_battery(const BitSequence& seq, const IntegerSample* sample,
                                    const BatteryConfig& config) {
  std::vector<TestResult> results;
  const auto guarded = [&](const char* name, auto&& test) {
    try {
      results.push_back(test());
    } catch (const std::invalid_argument& e) {
      results.push_back(make_skipped(name, e.what()));
    } catch (const std::domain_error& e) {
      results.push_back(make_skipped(name, e.what()));
    }
  };

  guarded("binary_rank", [&] { return binary_rank(seq); });
  guarded("block_frequency", [&] { return block_frequency(seq, config.block_frequency_m); });
  guarded("linear_complexity", [&] { return linear_complexity(seq, config.linear_complexity_m); });
  guarded("longest_run_of_ones", [&] { return longest_run_of_ones(seq); });
  guarded("monobit", [&] { return monobit(seq); });
  guarded("runs", [&] { return runs(seq); });
  guarded("serial", [&] { return serial(seq, config.serial_m); });
  if (sample != nullptr) guarded("sign", [&] { return sign_test(*sample); });
  guarded("spectral", [&] { return spectral(seq); });

  std::sort(results.begin(), results.end(),
            [](const TestResult& a, const TestResult& b) { return a.test_name < b.test_name; });
  return results;
}

}  // namespace entropybench::nist
