#include "entropybench/sources.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>

#include <sodium.h>

#include "entropybench/random.hpp"
#include "entropybench/transcript.hpp"

namespace entropybench::sources {

namespace {

// Adapts std::random_device (32-bit) to the full-range 64-bit interface.
class OsEntropyEngine {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    const auto hi = static_cast<std::uint64_t>(device_());
    const auto lo = static_cast<std::uint64_t>(device_());
    return (hi << 32) | lo;
  }

 private:
  std::random_device device_;
};

class SodiumEngine {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    result_type r = 0;
    randombytes_buf(&r, sizeof r);
    return r;
  }
};

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  });
}

template <typename Engine>
std::vector<std::uint64_t> uniform_values(Engine& engine, std::size_t count, std::uint64_t low, std::uint64_t high) {
  std::vector<std::uint64_t> out(count);
  const std::uint64_t span = high - low;
  for (auto& v : out) v = span == UINT64_MAX ? engine() : low + uniform_below(engine, span + 1);
  return out;
}

std::vector<std::uint64_t> biased_values(const nlohmann::json& params, std::size_t count, std::uint64_t max) {
  const auto profile = params.value("profile", std::string("constant"));
  if (profile == "constant") {
    const auto value = params.value("value", std::uint64_t{7});
    if (value > max) throw std::invalid_argument("biased constant value exceeds max");
    return std::vector<std::uint64_t>(count, value);
  }
  SeededEngine engine(params.value("seed", std::uint64_t{0}));
  if (profile == "top_heavy") {
    const double fraction = params.value("fraction", 0.8);
    const auto low = params.value("low", static_cast<std::uint64_t>(std::floor(0.75 * (static_cast<double>(max) + 1))));
    if (!(fraction >= 0.0 && fraction <= 1.0) || low > max)
      throw std::invalid_argument("biased top_heavy: fraction must be in [0,1] and low <= max");
    std::vector<std::uint64_t> out(count);
    // Selection uses a 53-bit uniform from the same engine.
    for (auto& v : out) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      v = u < fraction ? low + uniform_below(engine, max - low + 1) : uniform_below(engine, max + 1);
    }
    return out;
  }
  if (profile == "truncated") {
    const auto limit = params.value("limit", max / 2);
    if (limit > max) throw std::invalid_argument("biased truncated: limit exceeds max");
    return uniform_values(engine, count, 0, limit);
  }
  throw std::invalid_argument("unknown bias profile: " + profile);
}

}  // namespace

IntegerSample draw_integers(const SampleSource& source, std::size_t count, std::uint64_t max) {
  if (count < 1) throw std::invalid_argument("draw_integers: count must be at least 1");
  if (max < 1) throw std::invalid_argument("draw_integers: max must be at least 1");

  IntegerSample sample;
  sample.declared_max = max;
  sample.source = source;
  switch (source.kind) {
    case SourceKind::os_entropy: {
      OsEntropyEngine engine;
      sample.values = uniform_values(engine, count, 0, max);
      break;
    }
    case SourceKind::crypto_below: {
      ensure_sodium();
      if (max < std::numeric_limits<std::uint32_t>::max()) {
        sample.values.resize(count);
        const auto bound = static_cast<std::uint32_t>(max + 1);
        for (auto& v : sample.values) v = randombytes_uniform(bound);
      } else {
        SodiumEngine engine;
        sample.values = uniform_values(engine, count, 0, max);
      }
      break;
    }
    case SourceKind::seeded_deterministic: {
      SeededEngine engine(source.params.value("seed", std::uint64_t{0}));
      sample.values = uniform_values(engine, count, 0, max);
      break;
    }
    case SourceKind::biased:
      sample.values = biased_values(source.params, count, max);
      break;
    case SourceKind::file_transcript:
    case SourceKind::llm_live:
      throw std::invalid_argument("draw_integers: source kind '" + std::string(to_string(source.kind)) +
                                  "' does not generate values");
  }
  return sample;
}

SampleSource os_entropy_source(std::string label) { return {SourceKind::os_entropy, nlohmann::json::object(), std::move(label)}; }

SampleSource crypto_below_source(std::string label) {
  return {SourceKind::crypto_below, nlohmann::json::object(), std::move(label)};
}

SampleSource seeded_source(std::uint64_t seed, std::string label) {
  return {SourceKind::seeded_deterministic, {{"seed", seed}}, std::move(label)};
}

SampleSource constant_source(std::uint64_t value, std::string label) {
  return {SourceKind::biased, {{"profile", "constant"}, {"value", value}}, std::move(label)};
}

SampleSource top_heavy_source(std::uint64_t seed, double fraction, std::string label) {
  return {SourceKind::biased, {{"profile", "top_heavy"}, {"fraction", fraction}, {"seed", seed}}, std::move(label)};
}

ExtractedValues extract_integers(std::string_view text, std::uint64_t max) {
  ExtractedValues out;
  for (const auto v : decimal_runs(text)) {
    if (v > max) ++out.dropped;
    else out.values.push_back(v);
  }
  return out;
}

IngestedSample ingest_transcript(const std::filesystem::path& path, const IngestOptions& options) {
  if (options.declared_max < 1) throw std::invalid_argument("ingest_transcript: declared_max must be at least 1");
  const std::string raw = read_file(path);
  const auto format = sniff_format(path);

  IngestedSample result;
  result.sample.declared_max = options.declared_max;
  result.sample.source = {SourceKind::file_transcript, {{"path", path.string()}}, path.filename().string()};

  if (format == InputFormat::transcript) {
    const auto transcript = llm::Transcript::from_jsonl(raw);
    result.sample.source.label = transcript.label().empty() ? path.filename().string() : transcript.label();
    if (options.tool_values) {
      for (const auto v : transcript.served_values()) {
        if (v > options.declared_max) ++result.dropped;
        else result.sample.values.push_back(v);
      }
    } else {
      auto extracted = extract_integers(transcript.assistant_text(), options.declared_max);
      result.sample.values = std::move(extracted.values);
      result.dropped = extracted.dropped;
    }
  } else if (options.strict) {
    switch (format) {
      case InputFormat::json: result.sample.values = read_integer_json(raw); break;
      case InputFormat::csv: result.sample.values = read_integer_csv(raw); break;
      default: result.sample.values = read_integer_lines(raw); break;
    }
    result.sample.validate();
  } else {
    auto extracted = extract_integers(raw, options.declared_max);
    result.sample.values = std::move(extracted.values);
    result.dropped = extracted.dropped;
  }

  if (result.sample.values.empty())
    throw std::runtime_error("ingest_transcript: no integers could be extracted from " + path.string());
  return result;
}

std::string to_integer_lines(const std::vector<std::uint64_t>& values) {
  std::string out;
  for (const auto v : values) {
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

}  // namespace entropybench::sources
