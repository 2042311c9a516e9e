#include "entropybench/chars.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "entropybench/numeric.hpp"

namespace entropybench::chars {

std::string default_alphabet() {
  std::string a;
  for (char c = 'A'; c <= 'Z'; ++c) a += c;
  for (char c = 'a'; c <= 'z'; ++c) a += c;
  for (char c = '0'; c <= '9'; ++c) a += c;
  a += "!@#$%^&*()-_";
  return a;
}

std::size_t PasswordCorpus::total_characters() const {
  std::size_t total = 0;
  for (const auto& p : passwords) total += p.size();
  return total;
}

nlohmann::json FrequencyReport::to_json() const {
  nlohmann::json counts_json = nlohmann::json::object();
  for (std::size_t i = 0; i < alphabet.size(); ++i) counts_json[std::string(1, alphabet[i])] = counts[i];
  return {{"alphabet", alphabet},
          {"counts", counts_json},
          {"other", other},
          {"other_characters", other_characters},
          {"alphabet_violation", other > 0},
          {"total", total},
          {"chi2", chi2},
          {"dof", dof},
          {"p", p},
          {"verdict", std::string(to_string(verdict.label))},
          {"pooled", pooled},
          {"pool_size", pool_size},
          {"diagnostics", diagnostics}};
}

FrequencyReport char_frequency(const PasswordCorpus& corpus) {
  if (corpus.passwords.empty() || corpus.total_characters() == 0)
    throw std::invalid_argument("char_frequency: empty corpus");
  if (corpus.alphabet.size() < 2) throw std::invalid_argument("char_frequency: alphabet needs at least 2 characters");

  std::array<int, 256> index;
  index.fill(-1);
  for (std::size_t i = 0; i < corpus.alphabet.size(); ++i) {
    auto& slot = index[static_cast<unsigned char>(corpus.alphabet[i])];
    if (slot >= 0) throw std::invalid_argument("char_frequency: alphabet has repeated characters");
    slot = static_cast<int>(i);
  }

  FrequencyReport r;
  r.alphabet = corpus.alphabet;
  r.counts.assign(corpus.alphabet.size(), 0);
  std::set<char> offenders;
  for (const auto& password : corpus.passwords) {
    for (const char c : password) {
      ++r.total;
      const int slot = index[static_cast<unsigned char>(c)];
      if (slot < 0) {
        ++r.other;
        offenders.insert(c);
      } else {
        ++r.counts[static_cast<std::size_t>(slot)];
      }
    }
  }
  r.other_characters.assign(offenders.begin(), offenders.end());
  if (r.other > 0)
    r.diagnostics.push_back("alphabet violation: " + std::to_string(r.other) + " characters counted under 'other'");

  const std::size_t in_alphabet = r.total - r.other;
  if (in_alphabet == 0) throw std::invalid_argument("char_frequency: no characters from the alphabet");

  const std::size_t k = corpus.alphabet.size();
  const double expected = static_cast<double>(in_alphabet) / static_cast<double>(k);
  std::size_t group = 1;
  if (expected < 5.0) {
    const auto needed = static_cast<std::size_t>(std::ceil(5.0 / expected));
    if (k / needed >= 2) {
      group = needed;
      r.pooled = true;
      r.diagnostics.push_back("pooled " + std::to_string(group) + " characters per bin (expected count " +
                              std::to_string(expected) + " < 5)");
    } else {
      r.diagnostics.push_back("warning: expected count " + std::to_string(expected) +
                              " < 5 per character and too few characters to pool");
    }
  }
  r.pool_size = group;

  const std::size_t bins = k / group;
  double chi2 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t first = b * group;
    const std::size_t last = (b + 1 == bins) ? k : first + group;  // remainder joins the last bin
    std::size_t observed = 0;
    for (std::size_t i = first; i < last; ++i) observed += r.counts[i];
    const double bin_expected = expected * static_cast<double>(last - first);
    const double diff = static_cast<double>(observed) - bin_expected;
    chi2 += diff * diff / bin_expected;
  }
  r.chi2 = chi2;
  r.dof = bins - 1;
  r.p = numeric::igamc(static_cast<double>(r.dof) / 2.0, chi2 / 2.0);
  r.verdict = classify(r.p);
  return r;
}

nlohmann::json RepeatsReport::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& rep : repeats)
    arr.push_back({{"substring", rep.substring}, {"passwords", rep.passwords}, {"occurrences", rep.occurrences}});
  return {{"repeats", arr}, {"duplicates", duplicates}, {"duplicated", duplicated}};
}

namespace {

struct SubstringStats {
  std::size_t last_entry = SIZE_MAX;
  std::size_t entries = 0;
  std::size_t occurrences = 0;
};

using Level = std::unordered_map<std::string_view, SubstringStats>;

// Substrings of length `len` occurring in at least two entries. Beyond the
// first level, a candidate is only counted when both of its length-(len-1)
// pieces survived the previous level.
Level shared_substrings(const std::vector<std::string>& passwords, std::size_t len, const Level* previous) {
  Level level;
  for (std::size_t e = 0; e < passwords.size(); ++e) {
    const std::string_view text = passwords[e];
    if (text.size() < len) continue;
    for (std::size_t pos = 0; pos + len <= text.size(); ++pos) {
      const auto sub = text.substr(pos, len);
      if (previous != nullptr &&
          (!previous->contains(sub.substr(0, len - 1)) || !previous->contains(sub.substr(1))))
        continue;
      auto& stats = level[sub];
      ++stats.occurrences;
      if (stats.last_entry != e) {
        stats.last_entry = e;
        ++stats.entries;
      }
    }
  }
  std::erase_if(level, [](const auto& kv) { return kv.second.entries < 2; });
  return level;
}

}  // namespace

RepeatsReport repeated_substring_scan(const PasswordCorpus& corpus, std::size_t min_len) {
  if (min_len < 2) throw std::invalid_argument("repeated_substring_scan: min_len must be at least 2");
  RepeatsReport report;

  std::unordered_set<std::string_view> seen;
  std::set<std::string> duplicated;
  for (const auto& p : corpus.passwords) {
    if (!seen.insert(p).second) {
      ++report.duplicates;
      duplicated.insert(p);
    }
  }
  report.duplicated.assign(duplicated.begin(), duplicated.end());

  Level current = shared_substrings(corpus.passwords, min_len, nullptr);
  for (std::size_t len = min_len; !current.empty(); ++len) {
    Level next = shared_substrings(corpus.passwords, len + 1, &current);
    std::unordered_set<std::string_view> absorbed;
    for (const auto& [sub, stats] : next) {
      for (const auto piece : {sub.substr(0, len), sub.substr(1)}) {
        const auto it = current.find(piece);
        if (it != current.end() && it->second.entries == stats.entries) absorbed.insert(piece);
      }
    }
    for (const auto& [sub, stats] : current)
      if (!absorbed.contains(sub)) report.repeats.push_back({std::string(sub), stats.entries, stats.occurrences});
    current = std::move(next);
  }

  std::sort(report.repeats.begin(), report.repeats.end(), [](const Repeat& a, const Repeat& b) {
    if (a.substring.size() != b.substring.size()) return a.substring.size() > b.substring.size();
    if (a.passwords != b.passwords) return a.passwords > b.passwords;
    return a.substring < b.substring;
  });
  return report;
}

BitSequence corpus_to_bits(const PasswordCorpus& corpus) {
  if (corpus.passwords.empty()) throw std::invalid_argument("corpus_to_bits: empty corpus");
  return from_text(corpus.passwords, 8);
}

}  // namespace entropybench::chars
