// entropybench: randomness batteries, shuffle entropy and password analysis
// for local generators and recorded LLM output.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "entropybench/commands.hpp"

namespace cli = entropybench::cli;

namespace {

std::vector<std::size_t> parse_rounds(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const auto value = std::stoull(item, &pos);
    if (pos != item.size()) throw cli::UsageError("bad round count '" + item + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropybench: statistical randomness evaluation for generators and LLM transcripts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kToolVersion);

  cli::GlobalOptions global;
  std::string config_path;
  std::string format = "text";
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", format, "Stdout format: json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}));
  app.add_flag("--strict-parse", global.strict_parse, "Parse inputs strictly instead of extracting digit runs");

  // battery
  cli::BatteryArgs battery;
  std::size_t battery_count = 0;
  std::uint64_t battery_max = 0;
  auto* battery_cmd = app.add_subcommand("battery", "Run the test battery on integer samples");
  battery_cmd->add_option("--input,-i", battery.inputs, "Integer transcript files");
  battery_cmd->add_option("--source", battery.source_kinds,
                          "Generating source kinds: os_entropy, crypto_below, seeded_deterministic, biased");
  auto* count_opt = battery_cmd->add_option("--count", battery_count, "Values drawn per generating source");
  auto* max_opt = battery_cmd->add_option("--max", battery_max, "Declared maximum value");
  battery_cmd->add_flag("--tool-values", battery.tool_values, "Score tool-served values from .jsonl transcripts");
  battery_cmd->add_option("--workers", battery.workers, "Worker threads (0 = hardware concurrency)");

  // shuffle
  cli::ShuffleArgs shuffle;
  std::string rounds_text;
  std::size_t expected = 0;
  bool no_oracle = false;
  auto* shuffle_cmd = app.add_subcommand("shuffle", "Shuffle-entropy convergence series");
  shuffle_cmd->add_option("--cards,-n", shuffle.cards, "Number of cards N (>= 3)");
  shuffle_cmd->add_option("--rounds", rounds_text, "Comma-separated ascending trial counts");
  shuffle_cmd->add_option("--seed", shuffle.seed, "Oracle base seed");
  shuffle_cmd->add_option("--repeats", shuffle.repeats, "Oracle repetitions averaged per row");
  shuffle_cmd->add_flag("--cumulative", shuffle.cumulative, "Rows are nested prefixes of one trial stream");
  shuffle_cmd->add_flag("--no-oracle", no_oracle, "Skip the local uniform-shuffle oracle");
  shuffle_cmd->add_option("--input,-i", shuffle.inputs, "Trial files (JSON, CSV, text or .jsonl transcript)");
  auto* expected_opt = shuffle_cmd->add_option("--expected", expected, "Expected trials per input (shortfall check)");

  // passwords
  cli::PasswordArgs passwords;
  std::string alphabet;
  auto* pw_cmd = app.add_subcommand("passwords", "Character analysis and battery on password corpora");
  pw_cmd->add_option("--input,-i", passwords.inputs, "Newline-delimited password files")->required();
  pw_cmd->add_option("--min-len", passwords.min_len, "Minimum repeated-substring length");
  auto* alphabet_opt = pw_cmd->add_option("--alphabet", alphabet, "Permitted characters");

  // llm
  cli::LlmArgs llm;
  std::string system_prompt, prompt, transcript_out, resume;
  auto* llm_cmd = app.add_subcommand("llm", "Prompt a chat-completion endpoint and record a transcript");
  llm_cmd->add_option("--endpoint", llm.endpoint, "Base URL; requests go to <url>/chat/completions")->required();
  llm_cmd->add_option("--model", llm.model, "Model identifier");
  llm_cmd->add_option("--task", llm.task, "integers or shuffles");
  llm_cmd->add_option("--tool-mode", llm.tool_mode, "none or rng (function-calling workflow)");
  llm_cmd->add_option("--session", llm.session, "fresh or continued");
  auto* system_opt = llm_cmd->add_option("--system-prompt", system_prompt, "System prompt");
  auto* prompt_opt = llm_cmd->add_option("--prompt", prompt, "User prompt template ({count} {max} {cards} {last} {trials})");
  llm_cmd->add_option("--count", llm.count, "Integers requested");
  llm_cmd->add_option("--max", llm.max, "Highest integer");
  llm_cmd->add_option("--cards", llm.cards, "Cards per deck");
  llm_cmd->add_option("--trials", llm.trials, "Orderings requested");
  llm_cmd->add_option("--batch-size", llm.batch_size, "Values per request");
  llm_cmd->add_option("--max-requests", llm.max_requests, "Request budget");
  llm_cmd->add_option("--delay-ms", llm.delay_ms, "Minimum delay between requests");
  llm_cmd->add_option("--tool-source", llm.tool_source, "Source kind serving random_int calls");
  llm_cmd->add_option("--label", llm.label, "Source label recorded in the transcript");
  auto* transcript_opt = llm_cmd->add_option("--transcript", transcript_out, "Transcript output path (.jsonl)");
  auto* resume_opt = llm_cmd->add_option("--resume", resume, "Continue a prior shuffles transcript");

  // gen
  cli::GenArgs gen;
  std::uint64_t seed = 0, value = 0;
  std::string profile;
  auto* gen_cmd = app.add_subcommand("gen", "Write local-generator samples to a file");
  gen_cmd->add_option("--source", gen.kind, "os_entropy, crypto_below, seeded_deterministic or biased");
  gen_cmd->add_option("--count", gen.count, "Number of values");
  gen_cmd->add_option("--max", gen.max, "Highest value");
  auto* seed_opt = gen_cmd->add_option("--seed", seed, "Seed (seeded_deterministic, biased)");
  auto* profile_opt = gen_cmd->add_option("--profile", profile, "Bias profile: constant, top_heavy, truncated");
  auto* value_opt = gen_cmd->add_option("--value", value, "Constant value for the constant profile");
  gen_cmd->add_option("--output,-o", gen.output, "Output file (.txt, .json or .csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  try {
    if (!config_path.empty()) global.config_path = config_path;
    global.out_dir = out_dir;
    global.format = cli::output_format_from_string(format);

    if (*battery_cmd) {
      if (*count_opt) battery.count = battery_count;
      if (*max_opt) battery.max = battery_max;
      return cli::cmd_battery(global, battery, std::cout, std::cerr);
    }
    if (*shuffle_cmd) {
      if (!rounds_text.empty()) shuffle.rounds = parse_rounds(rounds_text);
      if (*expected_opt) shuffle.expected = expected;
      shuffle.oracle = !no_oracle;
      return cli::cmd_shuffle(global, shuffle, std::cout, std::cerr);
    }
    if (*pw_cmd) {
      if (*alphabet_opt) passwords.alphabet = alphabet;
      return cli::cmd_passwords(global, passwords, std::cout, std::cerr);
    }
    if (*llm_cmd) {
      if (*system_opt) llm.system_prompt = system_prompt;
      if (*prompt_opt) llm.prompt = prompt;
      if (*transcript_opt) llm.transcript_out = transcript_out;
      if (*resume_opt) llm.resume = resume;
      return cli::cmd_llm(global, llm, std::cout, std::cerr);
    }
    if (*gen_cmd) {
      if (*seed_opt) gen.seed = seed;
      if (*profile_opt) gen.profile = profile;
      if (*value_opt) gen.value = value;
      return cli::cmd_gen(global, gen, std::cout, std::cerr);
    }
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kAllFailed;
  }
  return cli::kUsage;
}
