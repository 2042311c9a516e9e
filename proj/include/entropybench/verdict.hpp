#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropybench/source.hpp"

namespace entropybench {

enum class Label { ok, suspect, ko, skipped };

std::string_view to_string(Label label);

struct Verdict {
  Label label = Label::skipped;
  std::optional<double> p;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// p-value bands:
///   KO       p < 0.01 or p > 0.99
///   OK       0.1 < p < 0.99
///   SUSPECT  everything else in [0, 1], i.e. [0.01, 0.1] and p = 0.99
/// Throws std::invalid_argument for p outside [0, 1] or NaN.
Verdict classify(double p);

Verdict skipped_verdict();

/// Outcome of one statistical test.
struct TestResult {
  std::string test_name;
  std::vector<double> p_values;   // one or two entries; empty when skipped
  double statistic = 0.0;         // s_obs, chi^2, V_n, d, ... depending on the test
  std::vector<Verdict> verdicts;  // one per p-value, or a single SKIPPED entry
  std::size_t n_used = 0;
  std::vector<std::string> diagnostics;

  bool skipped() const { return p_values.empty(); }

  nlohmann::json to_json() const;
  friend bool operator==(const TestResult&, const TestResult&) = default;
};

/// Builds a result with verdicts derived from the p-values.
TestResult make_result(std::string name, std::vector<double> p_values, double statistic, std::size_t n_used,
                       std::vector<std::string> diagnostics = {});

TestResult make_skipped(std::string name, std::string reason);

struct BatteryReport {
  SampleSource source;
  std::vector<TestResult> results;
  std::size_t ok = 0;
  std::size_t suspect = 0;
  std::size_t ko = 0;
  std::size_t skipped = 0;
  double ok_pct = 0.0;
  double suspect_pct = 0.0;
  double ko_pct = 0.0;

  std::size_t classified() const { return ok + suspect + ko; }
  nlohmann::json to_json() const;
};

/// Percentages over every classified p-value (a two-p-value test counts
/// twice). Skipped entries are tallied separately. Throws on empty input.
BatteryReport aggregate(std::vector<TestResult> results, SampleSource source);

/// Aligned plain-text table: Generation Method | OK | SUSPECT | KO.
std::string format_table(const std::vector<BatteryReport>& reports);

}  // namespace entropybench
