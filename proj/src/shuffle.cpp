#include "entropybench/shuffle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "entropybench/bitstream.hpp"
#include "entropybench/random.hpp"
#include "entropybench/transcript.hpp"

namespace entropybench::shuffle {

bool is_permutation_of(const Ordering& ordering, std::size_t cards) {
  if (ordering.size() != cards) return false;
  std::vector<bool> seen(cards, false);
  for (const auto label : ordering) {
    if (label >= cards || seen[label]) return false;
    seen[label] = true;
  }
  return true;
}

PermutationTrialSet::PermutationTrialSet(std::size_t cards, std::vector<Ordering> trials, SampleSource source)
    : cards_(cards), trials_(std::move(trials)), source_(std::move(source)) {
  if (cards_ < 3) throw std::invalid_argument("trial set: N must be at least 3 (got " + std::to_string(cards_) + ")");
  for (std::size_t t = 0; t < trials_.size(); ++t)
    if (!is_permutation_of(trials_[t], cards_))
      throw std::invalid_argument("trial set: trial " + std::to_string(t) + " is not a permutation of 0.." +
                                  std::to_string(cards_ - 1));
}

PermutationTrialSet PermutationTrialSet::prefix(std::size_t count) const {
  if (count > trials_.size()) throw std::invalid_argument("trial set: prefix longer than the set");
  return PermutationTrialSet(cards_, {trials_.begin(), trials_.begin() + static_cast<std::ptrdiff_t>(count)},
                             source_);
}

DistanceHistogram::DistanceHistogram(std::size_t cards)
    : cards_(cards), counts_(cards * (cards - 1) / 2 * (cards - 1), 0) {
  if (cards < 3) throw std::invalid_argument("histogram: N must be at least 3");
}

std::size_t DistanceHistogram::pair_index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  if (i == j || j >= cards_) throw std::out_of_range("histogram: invalid card pair");
  // Row-major index into the strict upper triangle.
  return i * (2 * cards_ - i - 1) / 2 + (j - i - 1);
}

void DistanceHistogram::add(const Ordering& ordering) {
  if (!is_permutation_of(ordering, cards_)) throw std::invalid_argument("histogram: ordering is not a permutation");
  std::vector<std::size_t> position(cards_);
  for (std::size_t p = 0; p < cards_; ++p) position[ordering[p]] = p;
  const std::size_t stride = cards_ - 1;
  std::size_t pair = 0;
  for (std::size_t i = 0; i < cards_; ++i) {
    for (std::size_t j = i + 1; j < cards_; ++j, ++pair) {
      const std::size_t d = position[i] > position[j] ? position[i] - position[j] : position[j] - position[i];
      ++counts_[pair * stride + (d - 1)];
    }
  }
  ++trials_;
}

void DistanceHistogram::merge(const DistanceHistogram& other) {
  if (other.cards_ != cards_) throw std::invalid_argument("histogram: card counts differ");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  trials_ += other.trials_;
}

std::uint64_t DistanceHistogram::count(std::size_t i, std::size_t j, std::size_t d) const {
  if (d < 1 || d >= cards_) throw std::out_of_range("histogram: distance out of range");
  return counts_[pair_index(i, j) * (cards_ - 1) + (d - 1)];
}

std::uint64_t DistanceHistogram::pair_total(std::size_t i, std::size_t j) const {
  const std::size_t base = pair_index(i, j) * (cards_ - 1);
  std::uint64_t total = 0;
  for (std::size_t d = 0; d + 1 < cards_; ++d) total += counts_[base + d];
  return total;
}

DistanceHistogram distance_histogram(const PermutationTrialSet& trials) {
  DistanceHistogram hist(trials.cards());
  for (const auto& t : trials.trials()) hist.add(t);
  return hist;
}

double normalized_entropy(std::span<const double> distribution) {
  if (distribution.size() < 2) throw std::invalid_argument("entropy: need at least two outcomes");
  const double log_base = std::log(static_cast<double>(distribution.size()));
  double h = 0.0;
  for (const double q : distribution)
    if (q > 0.0) h -= q * std::log(q);
  return std::clamp(h / log_base, 0.0, 1.0);
}

EntropyScore entropy_score(const DistanceHistogram& hist) {
  const std::size_t n = hist.cards();
  if (hist.trials() == 0) throw std::invalid_argument("entropy_score: empty histogram");
  EntropyScore best{2.0, {0, 1}};
  std::vector<double> q(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto total = static_cast<double>(hist.pair_total(i, j));
      if (total == 0.0) throw std::invalid_argument("entropy_score: pair without counts");
      for (std::size_t d = 1; d < n; ++d) q[d - 1] = static_cast<double>(hist.count(i, j, d)) / total;
      const double h = normalized_entropy(q);
      if (h < best.h) best = {h, {i, j}};
    }
  }
  return best;
}

PermutationTrialSet uniform_shuffle_oracle(std::size_t cards, std::size_t trials, std::uint64_t seed) {
  if (cards < 3) throw std::invalid_argument("oracle: N must be at least 3");
  if (trials < 1) throw std::invalid_argument("oracle: at least one trial required");
  SeededEngine engine(seed);
  std::vector<Ordering> out;
  out.reserve(trials);
  Ordering deck(cards);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t k = 0; k < cards; ++k) deck[k] = static_cast<std::uint32_t>(k);
    for (std::size_t i = cards - 1; i > 0; --i) std::swap(deck[i], deck[uniform_below(engine, i + 1)]);
    out.push_back(deck);
  }
  SampleSource source{SourceKind::seeded_deterministic, {{"seed", seed}}, "local_shuffle"};
  return PermutationTrialSet(cards, std::move(out), std::move(source));
}

std::vector<ConvergencePoint> convergence_sweep(std::size_t cards, const std::vector<std::size_t>& round_counts,
                                                const TrialProvider& provider) {
  if (cards < 3) throw std::invalid_argument("convergence_sweep: N must be at least 3");
  if (!std::is_sorted(round_counts.begin(), round_counts.end()))
    throw std::invalid_argument("convergence_sweep: round counts must be ascending");
  std::vector<ConvergencePoint> series;
  series.reserve(round_counts.size());
  for (const auto rounds : round_counts) {
    const auto trials = provider(rounds);
    if (trials.cards() != cards) throw std::invalid_argument("convergence_sweep: provider returned wrong N");
    series.push_back({rounds, entropy_score(distance_histogram(trials)).h});
  }
  return series;
}

TrialProvider oracle_provider(std::size_t cards, std::uint64_t seed) {
  return [cards, seed](std::size_t rounds) {
    return uniform_shuffle_oracle(cards, rounds, mix_seed(seed ^ mix_seed(rounds)));
  };
}

TrialProvider prefix_provider(PermutationTrialSet trials) {
  return [stored = std::move(trials)](std::size_t rounds) {
    if (rounds > stored.size())
      throw std::invalid_argument("prefix provider: requested " + std::to_string(rounds) + " trials, have " +
                                  std::to_string(stored.size()));
    return stored.prefix(rounds);
  };
}

std::size_t IngestDiagnostics::shortfall() const {
  return expected && *expected > received ? *expected - received : 0;
}

nlohmann::json IngestDiagnostics::to_json() const {
  nlohmann::json j;
  j["dropped"] = dropped;
  j["received"] = received;
  j["expected"] = expected ? nlohmann::json(*expected) : nlohmann::json(nullptr);
  j["shortfall"] = shortfall();
  return j;
}

IngestedTrials parse_trials(std::string_view text, std::size_t cards, std::optional<std::size_t> expected) {
  if (cards < 3) throw std::invalid_argument("ingest_trials: N must be at least 3");
  std::vector<std::vector<std::uint64_t>> rows;

  const auto first = text.find_first_not_of(" \t\r\n");
  bool parsed_json = false;
  if (first != std::string_view::npos && text[first] == '[') {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (!doc.is_discarded() && doc.is_array()) {
      parsed_json = true;
      for (const auto& row : doc) {
        std::vector<std::uint64_t> values;
        bool ok = row.is_array();
        if (ok)
          for (const auto& v : row) {
            if (!v.is_number_unsigned()) {
              ok = false;
              break;
            }
            values.push_back(v.get<std::uint64_t>());
          }
        if (!ok) values.clear();  // kept as an invalid candidate so it is counted as dropped
        rows.push_back(std::move(values));
      }
    }
  }
  if (!parsed_json) {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto nl = text.find('\n', start);
      const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      auto values = decimal_runs(line);
      if (!values.empty()) rows.push_back(std::move(values));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }

  IngestDiagnostics diag;
  diag.expected = expected;
  std::vector<Ordering> valid;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Ordering ordering;
    bool fits = true;
    for (const auto v : rows[r]) {
      if (v >= cards) {
        fits = false;
        break;
      }
      ordering.push_back(static_cast<std::uint32_t>(v));
    }
    if (fits && is_permutation_of(ordering, cards)) {
      valid.push_back(std::move(ordering));
    } else {
      ++diag.dropped;
      diag.dropped_rows.push_back(r + 1);
    }
  }
  diag.received = valid.size();
  if (valid.empty()) throw std::runtime_error("ingest_trials: no valid orderings found");
  return {PermutationTrialSet(cards, std::move(valid)), diag};
}

IngestedTrials ingest_trials(const std::filesystem::path& path, std::size_t cards,
                             std::optional<std::size_t> expected) {
  const std::string raw = read_file(path);
  SampleSource source{SourceKind::file_transcript, {{"path", path.string()}}, path.filename().string()};
  IngestedTrials result = [&] {
    if (sniff_format(path) == InputFormat::transcript) {
      const auto transcript = llm::Transcript::from_jsonl(raw);
      return parse_trials(transcript.assistant_text(), cards, expected);
    }
    return parse_trials(raw, cards, expected);
  }();
  return {PermutationTrialSet(cards, result.trials.trials(), std::move(source)), result.diagnostics};
}

}  // namespace entropybench::shuffle
