#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "entropybench/bitstream.hpp"
#include "entropybench/source.hpp"

namespace entropybench::sources {

/// `count` integers in [0, max] from a generating source.
///
///   os_entropy            std::random_device (the OS entropy pool)
///   crypto_below          libsodium randombytes_uniform, rejection-sampled
///   seeded_deterministic  mt19937_64 seeded by params.seed; reproducible
///   biased                synthetic negative control, params.profile one of
///                           constant   {value}            every draw = value
///                           top_heavy  {fraction, low, seed}
///                                      with probability `fraction` uniform on
///                                      [low, max], otherwise uniform on [0, max]
///                           truncated  {limit, seed}      uniform on [0, limit]
///
/// file_transcript and llm_live do not generate; asking them throws
/// std::invalid_argument.
IntegerSample draw_integers(const SampleSource& source, std::size_t count, std::uint64_t max);

/// Convenience constructors.
SampleSource os_entropy_source(std::string label = "os_entropy");
SampleSource crypto_below_source(std::string label = "crypto_below");
SampleSource seeded_source(std::uint64_t seed, std::string label = "seeded");
SampleSource constant_source(std::uint64_t value, std::string label = "biased_constant");
SampleSource top_heavy_source(std::uint64_t seed, double fraction = 0.8, std::string label = "biased_top_heavy");

struct ExtractedValues {
  std::vector<std::uint64_t> values;
  std::size_t dropped = 0;  // candidates above the declared maximum
};

/// Lenient extraction: every maximal decimal-digit run is a candidate;
/// candidates above `max` are dropped and counted.
ExtractedValues extract_integers(std::string_view text, std::uint64_t max);

struct IngestOptions {
  std::uint64_t declared_max = 255;
  /// Strict mode parses the structured format (lines/json/csv) and rejects
  /// anything else, including out-of-range values.
  bool strict = false;
  /// For .jsonl transcripts: score the values served by the local tool
  /// instead of the model's own replies.
  bool tool_values = false;
};

struct IngestedSample {
  IntegerSample sample;
  std::size_t dropped = 0;
};

/// Reads a transcript file of integers. Throws std::runtime_error when no
/// values can be extracted.
IngestedSample ingest_transcript(const std::filesystem::path& path, const IngestOptions& options = {});

/// Newline-delimited decimal rendering; ingest_transcript reads it back unchanged.
std::string to_integer_lines(const std::vector<std::uint64_t>& values);

}  // namespace entropybench::sources
