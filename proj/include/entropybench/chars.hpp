#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropybench/bitstream.hpp"
#include "entropybench/verdict.hpp"

namespace entropybench::chars {

/// Letters, digits and the specials !@#$%^&*()-_ (74 characters).
std::string default_alphabet();

struct PasswordCorpus {
  std::vector<std::string> passwords;
  std::string alphabet = default_alphabet();

  std::size_t total_characters() const;
};

struct FrequencyReport {
  std::string alphabet;
  std::vector<std::size_t> counts;  // parallel to alphabet
  std::size_t other = 0;            // characters outside the alphabet
  std::string other_characters;     // distinct offenders, sorted
  std::size_t total = 0;            // all characters, including `other`
  double chi2 = 0.0;
  std::size_t dof = 0;
  double p = 1.0;
  Verdict verdict;
  bool pooled = false;
  std::size_t pool_size = 1;  // alphabet characters per chi-square bin
  std::vector<std::string> diagnostics;

  nlohmann::json to_json() const;
};

/// Character counts and a chi-square test against the uniform distribution
/// on the alphabet. When the expected count per character is below 5,
/// consecutive alphabet characters are pooled into bins with expected
/// count >= 5 (the remainder joins the last bin); if that leaves fewer than
/// two bins the unpooled statistic is kept with a warning.
FrequencyReport char_frequency(const PasswordCorpus& corpus);

struct Repeat {
  std::string substring;
  std::size_t passwords = 0;    // distinct corpus entries containing it
  std::size_t occurrences = 0;  // total occurrences, overlapping included

  friend bool operator==(const Repeat&, const Repeat&) = default;
};

struct RepeatsReport {
  std::vector<Repeat> repeats;
  std::size_t duplicates = 0;  // entries identical to an earlier entry
  std::vector<std::string> duplicated;  // distinct duplicated passwords, sorted

  nlohmann::json to_json() const;
};

/// Substrings of length >= min_len shared by at least two corpus entries.
/// Only closed repeats are listed: a substring is dropped when a one-character
/// extension is shared by exactly the same number of entries (so "7!Ab" is
/// reported, not also "7!A" and "!Ab"). Order: longest first, then most
/// entries, then lexicographic. Throws for min_len < 2.
RepeatsReport repeated_substring_scan(const PasswordCorpus& corpus, std::size_t min_len);

/// 8-bit code points, passwords concatenated in order.
BitSequence corpus_to_bits(const PasswordCorpus& corpus);

}  // namespace entropybench::chars
