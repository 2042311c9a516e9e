#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "entropybench/source.hpp"

namespace entropybench {

/// Immutable sequence of bits, one byte (0 or 1) per bit.
class BitSequence {
 public:
  BitSequence() = default;

  /// Throws std::invalid_argument if any element is not 0 or 1.
  explicit BitSequence(std::vector<std::uint8_t> bits);

  /// Parses a string of '0'/'1' characters; whitespace is skipped.
  static BitSequence from_string(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count_ones() const;

  std::string to_string() const;

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Integer transcript with its declared range [0, declared_max].
struct IntegerSample {
  std::vector<std::uint64_t> values;
  std::uint64_t declared_max = 255;
  SampleSource source;

  /// Throws std::invalid_argument if declared_max < 1 or a value exceeds it.
  void validate() const;
};

/// Fixed-width, most-significant-bit-first expansion of each value.
BitSequence from_integers(const IntegerSample& sample, int bit_width);

/// Inverse of from_integers for a known width; used by round-trip checks.
std::vector<std::uint64_t> to_integers(const BitSequence& seq, int bit_width);

/// Concatenated character codes, MSB first, no separators.
/// encoding_width is 7 (ASCII) or 8 (single byte).
BitSequence from_text(std::span<const std::string> passwords, int encoding_width);

enum class InputFormat { lines, json, csv, passwords, transcript };

/// Picks a format from the file extension: .json, .csv, .jsonl, .pw/.passwords,
/// anything else is newline-delimited integers.
InputFormat sniff_format(const std::filesystem::path& path);

InputFormat input_format_from_string(std::string_view name);

/// Strict readers for the integer formats. Malformed entries throw
/// std::runtime_error naming the line.
std::vector<std::uint64_t> read_integer_lines(std::string_view text);
std::vector<std::uint64_t> read_integer_json(std::string_view text);
std::vector<std::uint64_t> read_integer_csv(std::string_view text);

/// Newline-delimited strings; a trailing '\r' is dropped, empty lines skipped.
std::vector<std::string> read_password_lines(std::string_view text);

/// Every maximal run of decimal digits in `text`, in order. Runs too large
/// for 64 bits saturate to UINT64_MAX.
std::vector<std::uint64_t> decimal_runs(std::string_view text);

std::string read_file(const std::filesystem::path& path);

}  // namespace entropybench
