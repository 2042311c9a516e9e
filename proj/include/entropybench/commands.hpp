#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropybench/verdict.hpp"

namespace entropybench::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kPartial = 1, kUsage = 2, kAllFailed = 3 };

enum class OutputFormat { json, text, csv };
OutputFormat output_format_from_string(std::string_view name);

struct GlobalOptions {
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::text;
  bool strict_parse = false;
};

/// Usage errors map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads --config (if given) into a JSON object; empty object otherwise.
nlohmann::json load_config(const GlobalOptions& global);

/// Reproducibility record written next to every report as manifest.json.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, sha256 hex
  std::vector<std::string> outputs;
  std::string started_at;

  nlohmann::json to_json() const;
  void add_input(const std::filesystem::path& path);
  void write(const std::filesystem::path& out_dir) const;
};

std::string sha256_hex(std::string_view data);

struct BatteryArgs {
  std::vector<std::filesystem::path> inputs;  // integer transcripts
  std::vector<std::string> source_kinds;      // extra generating sources by kind name
  std::optional<std::size_t> count;    // default 10000, or "count" in the config
  std::optional<std::uint64_t> max;    // default 255, or "max" in the config
  std::optional<std::string> input_format;
  bool tool_values = false;
  std::size_t workers = 0;  // 0: hardware concurrency
};

struct ShuffleArgs {
  std::size_t cards = 10;
  std::vector<std::size_t> rounds{128, 256, 512, 786, 1024, 1280, 1536, 1792, 2048};
  std::uint64_t seed = 1;
  std::size_t repeats = 1;
  bool cumulative = false;
  bool oracle = true;
  std::vector<std::filesystem::path> inputs;
  std::optional<std::size_t> expected;
};

struct PasswordArgs {
  std::vector<std::filesystem::path> inputs;
  std::size_t min_len = 4;
  std::optional<std::string> alphabet;
};

struct LlmArgs {
  std::string task = "integers";  // integers | shuffles
  std::string tool_mode = "none";  // none | rng
  std::string endpoint;
  std::string model = "default";
  std::string session = "continued";
  std::optional<std::string> system_prompt;
  std::optional<std::string> prompt;
  std::size_t count = 10000;
  std::uint64_t max = 255;
  std::size_t cards = 10;
  std::size_t trials = 128;
  std::size_t batch_size = 500;
  std::size_t max_requests = 64;
  long delay_ms = 1000;
  std::string tool_source = "crypto_below";
  std::string label = "llm";
  std::optional<std::filesystem::path> transcript_out;
  std::optional<std::filesystem::path> resume;
};

struct GenArgs {
  std::string kind = "os_entropy";
  std::size_t count = 10000;
  std::uint64_t max = 255;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> value;
  std::filesystem::path output;
};

/// Each command writes its files under global.out_dir, prints the selected
/// format to `out`, diagnostics to `err`, and returns an ExitCode.
int cmd_battery(const GlobalOptions& global, const BatteryArgs& args, std::ostream& out, std::ostream& err);
int cmd_shuffle(const GlobalOptions& global, const ShuffleArgs& args, std::ostream& out, std::ostream& err);
int cmd_passwords(const GlobalOptions& global, const PasswordArgs& args, std::ostream& out, std::ostream& err);
int cmd_llm(const GlobalOptions& global, const LlmArgs& args, std::ostream& out, std::ostream& err);
int cmd_gen(const GlobalOptions& global, const GenArgs& args, std::ostream& out, std::ostream& err);

/// Value histogram rows (value, count) for nonzero counts, ascending by value.
std::vector<std::pair<std::uint64_t, std::size_t>> value_histogram(const std::vector<std::uint64_t>& values);

/// Most frequent values, ties broken by smaller value.
std::vector<std::pair<std::uint64_t, std::size_t>> top_values(const std::vector<std::uint64_t>& values,
                                                              std::size_t k = 3);

}  // namespace entropybench::cli
