#include "entropybench/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace entropybench {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::ok: return "OK";
    case Label::suspect: return "SUSPECT";
    case Label::ko: return "KO";
    case Label::skipped: return "SKIPPED";
  }
  return "?";
}

Verdict classify(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("classify: p-value outside [0, 1]");
  if (p < 0.01 || p > 0.99) return {Label::ko, p};
  if (p > 0.1 && p < 0.99) return {Label::ok, p};
  return {Label::suspect, p};
}

Verdict skipped_verdict() { return {Label::skipped, std::nullopt}; }

nlohmann::json TestResult::to_json() const {
  nlohmann::json j;
  j["test"] = test_name;
  j["p_values"] = p_values;
  j["statistic"] = statistic;
  j["n_used"] = n_used;
  auto labels = nlohmann::json::array();
  for (const auto& v : verdicts) labels.push_back(std::string(to_string(v.label)));
  j["verdicts"] = labels;
  j["diagnostics"] = diagnostics;
  return j;
}

TestResult make_result(std::string name, std::vector<double> p_values, double statistic, std::size_t n_used,
                       std::vector<std::string> diagnostics) {
  TestResult r;
  r.test_name = std::move(name);
  for (auto& p : p_values) p = std::clamp(p, 0.0, 1.0);
  r.p_values = std::move(p_values);
  r.statistic = std::isfinite(statistic) ? statistic : 0.0;
  r.n_used = n_used;
  r.diagnostics = std::move(diagnostics);
  for (const double p : r.p_values) r.verdicts.push_back(classify(p));
  return r;
}

TestResult make_skipped(std::string name, std::string reason) {
  TestResult r;
  r.test_name = std::move(name);
  r.verdicts.push_back(skipped_verdict());
  r.diagnostics.push_back("skipped: " + std::move(reason));
  return r;
}

nlohmann::json BatteryReport::to_json() const {
  nlohmann::json j;
  j["source"] = source.to_json();
  j["counts"] = {{"OK", ok}, {"SUSPECT", suspect}, {"KO", ko}, {"SKIPPED", skipped}};
  j["percent"] = {{"OK", ok_pct}, {"SUSPECT", suspect_pct}, {"KO", ko_pct}};
  auto arr = nlohmann::json::array();
  for (const auto& r : results) arr.push_back(r.to_json());
  j["results"] = arr;
  return j;
}

BatteryReport aggregate(std::vector<TestResult> results, SampleSource source) {
  if (results.empty()) throw std::invalid_argument("aggregate: no test results");
  BatteryReport report;
  report.source = std::move(source);
  for (const auto& r : results) {
    for (const auto& v : r.verdicts) {
      switch (v.label) {
        case Label::ok: ++report.ok; break;
        case Label::suspect: ++report.suspect; break;
        case Label::ko: ++report.ko; break;
        case Label::skipped: ++report.skipped; break;
      }
    }
  }
  report.results = std::move(results);
  if (const auto total = report.classified(); total > 0) {
    const double scale = 100.0 / static_cast<double>(total);
    report.ok_pct = static_cast<double>(report.ok) * scale;
    report.suspect_pct = static_cast<double>(report.suspect) * scale;
    report.ko_pct = static_cast<double>(report.ko) * scale;
  }
  return report;
}

std::string format_table(const std::vector<BatteryReport>& reports) {
  std::size_t width = std::string_view("Generation Method").size();
  for (const auto& r : reports) {
    auto name = r.source.label + (r.source.synthetic() ? " (synthetic)" : "");
    width = std::max(width, name.size());
  }
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s | %8s | %8s | %8s\n", static_cast<int>(width), "Generation Method", "OK",
                "SUSPECT", "KO");
  out += line;
  out += std::string(width, '-') + "-+-" + std::string(8, '-') + "-+-" + std::string(8, '-') + "-+-" +
         std::string(8, '-') + "\n";
  for (const auto& r : reports) {
    auto name = r.source.label + (r.source.synthetic() ? " (synthetic)" : "");
    std::snprintf(line, sizeof line, "%-*s | %7.2f%% | %7.2f%% | %7.2f%%\n", static_cast<int>(width), name.c_str(),
                  r.ok_pct, r.suspect_pct, r.ko_pct);
    out += line;
  }
  return out;
}

}  // namespace entropybench
