#include "entropybench/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <sodium.h>

#include "entropybench/bitstream.hpp"
#include "entropybench/chars.hpp"
#include "entropybench/llm.hpp"
#include "entropybench/nist.hpp"
#include "entropybench/random.hpp"
#include "entropybench/shuffle.hpp"
#include "entropybench/sources.hpp"

namespace entropybench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kDefaultCount = 10000;
constexpr std::uint64_t kDefaultMax = 255;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// File-name-safe rendering of a source label.
std::string safe_name(std::string_view label) {
  std::string out;
  for (const char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? "source" : out;
}

// Pretty JSON; bytes that are not valid UTF-8 (raw password bytes, odd file
// names) become U+FFFD instead of aborting the report.
std::string pretty(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void ensure_out_dir(const GlobalOptions& global) {
  std::error_code ec;
  fs::create_directories(global.out_dir, ec);
  if (ec) throw UsageError("cannot create output directory " + global.out_dir.string() + ": " + ec.message());
}

template <typename Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const llm::ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  }
}

// Runs job(i) for i in [0, n) on a small worker pool; job must not throw.
template <typename Job>
void parallel_for(std::size_t n, std::size_t workers, Job&& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
}

json pairs_json(const std::vector<std::pair<std::uint64_t, std::size_t>>& rows) {
  auto arr = json::array();
  for (const auto& [value, count] : rows) arr.push_back({{"value", value}, {"count", count}});
  return arr;
}

}  // namespace

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "text") return OutputFormat::text;
  if (name == "csv") return OutputFormat::csv;
  throw UsageError("unknown format '" + std::string(name) + "' (expected json, text or csv)");
}

json load_config(const GlobalOptions& global) {
  if (!global.config_path) return json::object();
  std::string text;
  try {
    text = read_file(*global.config_path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw UsageError("config is not a JSON object: " + global.config_path->string());
  return doc;
}

std::string sha256_hex(std::string_view data) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(data.data()), data.size());
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (const unsigned char b : digest) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

json RunManifest::to_json() const {
  auto inputs = json::array();
  for (const auto& [path, digest] : input_digests) inputs.push_back({{"path", path}, {"sha256", digest}});
  return {{"subcommand", subcommand}, {"config", config},         {"inputs", inputs},
          {"outputs", outputs},       {"tool_version", kToolVersion}, {"started_at", started_at}};
}

void RunManifest::add_input(const fs::path& path) { input_digests.emplace_back(path.string(), sha256_hex(read_file(path))); }

void RunManifest::write(const fs::path& out_dir) const { write_text(out_dir / "manifest.json", pretty(to_json())); }

std::vector<std::pair<std::uint64_t, std::size_t>> value_histogram(const std::vector<std::uint64_t>& values) {
  std::map<std::uint64_t, std::size_t> counts;
  for (const auto v : values) ++counts[v];
  return {counts.begin(), counts.end()};
}

std::vector<std::pair<std::uint64_t, std::size_t>> top_values(const std::vector<std::uint64_t>& values,
                                                              std::size_t k) {
  auto rows = value_histogram(values);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

// ---------------------------------------------------------------------------
// battery
// ---------------------------------------------------------------------------

int cmd_battery(const GlobalOptions& global, const BatteryArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const json config = load_config(global);
    const auto battery_config = nist::BatteryConfig::from_json(config);
    const std::size_t count = args.count.value_or(config.value("count", kDefaultCount));
    const std::uint64_t max = args.max.value_or(config.value("max", kDefaultMax));
    if (count == 0 || max == 0) throw UsageError("count and max must be positive");
    if (battery_config.bit_width < 1 || battery_config.bit_width > 64 ||
        (battery_config.bit_width < 64 && (max >> battery_config.bit_width) != 0))
      throw UsageError("max " + std::to_string(max) + " does not fit in bit_width " +
                       std::to_string(battery_config.bit_width));

    std::vector<SampleSource> sources;
    try {
      if (config.contains("sources"))
        for (const auto& s : config.at("sources")) sources.push_back(SampleSource::from_json(s));
      for (const auto& kind : args.source_kinds) sources.push_back({source_kind_from_string(kind), json::object(), kind});
    } catch (const std::exception& e) {
      throw UsageError(std::string("bad source definition: ") + e.what());
    }
    for (const auto& path : args.inputs)
      sources.push_back({SourceKind::file_transcript, {{"path", path.string()}}, path.filename().string()});
    if (sources.empty()) throw UsageError("no sources: pass --input files, --source kinds, or \"sources\" in --config");
    {
      std::set<std::string> labels;
      for (const auto& s : sources)
        if (!labels.insert(s.label).second) throw UsageError("duplicate source label '" + s.label + "'");
    }
    ensure_out_dir(global);

    RunManifest manifest;
    manifest.subcommand = "battery";
    manifest.started_at = utc_now();
    manifest.config = config;
    manifest.config["resolved"] = {{"battery", battery_config.to_json()}, {"count", count}, {"max", max},
                                   {"strict_parse", global.strict_parse}, {"tool_values", args.tool_values}};

    struct Outcome {
      std::optional<BatteryReport> report;
      std::vector<std::uint64_t> values;
      std::size_t dropped = 0;
      std::string error;
    };
    std::vector<Outcome> outcomes(sources.size());

    parallel_for(sources.size(), args.workers, [&](std::size_t i) {
      auto& o = outcomes[i];
      try {
        IntegerSample sample;
        if (sources[i].kind == SourceKind::file_transcript) {
          sources::IngestOptions opts;
          opts.declared_max = max;
          opts.strict = global.strict_parse;
          opts.tool_values = args.tool_values;
          const fs::path path = sources[i].params.at("path").get<std::string>();
          auto ingested = sources::ingest_transcript(path, opts);
          sample = std::move(ingested.sample);
          sample.source = sources[i];
          o.dropped = ingested.dropped;
        } else {
          sample = sources::draw_integers(sources[i], count, max);
        }
        const auto bits = from_integers(sample, battery_config.bit_width);
        o.report = aggregate(nist::run_battery(bits, &sample, battery_config), sources[i]);
        o.values = std::move(sample.values);
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    });

    for (const auto& s : sources)
      if (s.kind == SourceKind::file_transcript) {
        try {
          manifest.add_input(s.params.at("path").get<std::string>());
        } catch (const std::exception&) {
          // unreadable inputs are already reported as failures
        }
      }

    json doc;
    doc["manifest"] = "manifest.json";
    doc["config"] = battery_config.to_json();
    doc["sources"] = json::array();
    doc["failures"] = json::array();
    std::vector<BatteryReport> reports;
    std::string summary;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto& o = outcomes[i];
      if (!o.report) {
        ++failed;
        doc["failures"].push_back({{"label", sources[i].label}, {"error", o.error}});
        err << "source '" << sources[i].label << "' failed: " << o.error << '\n';
        continue;
      }
      const auto histogram = value_histogram(o.values);
      const auto top = top_values(o.values);
      const auto csv_name = safe_name(sources[i].label) + ".histogram.csv";
      std::string csv = "value,count\n";
      for (const auto& [value, n] : histogram) csv += std::to_string(value) + "," + std::to_string(n) + "\n";
      write_text(global.out_dir / csv_name, csv);
      manifest.outputs.push_back(csv_name);

      json entry = o.report->to_json();
      entry["n_values"] = o.values.size();
      entry["dropped"] = o.dropped;
      entry["top3"] = pairs_json(top);
      entry["histogram_csv"] = csv_name;
      doc["sources"].push_back(entry);
      reports.push_back(*o.report);

      summary += sources[i].label + " top 3:";
      for (const auto& [value, n] : top) summary += " " + std::to_string(value) + " (" + std::to_string(n) + ")";
      summary += "\n";
    }

    const std::string table = reports.empty() ? std::string() : format_table(reports);
    doc["table"] = table;
    const std::string json_text = pretty(doc);
    std::string text = table + (summary.empty() ? "" : "\n" + summary);
    for (const auto& f : doc["failures"]) text += "FAILED " + f["label"].get<std::string>() + ": " + f["error"].get<std::string>() + "\n";

    write_text(global.out_dir / "battery.json", json_text);
    write_text(global.out_dir / "battery.txt", text);
    manifest.outputs.insert(manifest.outputs.end(), {"battery.json", "battery.txt"});
    manifest.write(global.out_dir);

    switch (global.format) {
      case OutputFormat::json: out << json_text; break;
      case OutputFormat::text: out << text; break;
      case OutputFormat::csv:
        out << "label,ok_pct,suspect_pct,ko_pct\n";
        for (const auto& r : reports) out << r.source.label << ',' << r.ok_pct << ',' << r.suspect_pct << ',' << r.ko_pct << '\n';
        break;
    }

    if (failed == sources.size()) return static_cast<int>(kAllFailed);
    return failed > 0 ? static_cast<int>(kPartial) : static_cast<int>(kSuccess);
  });
}

// ---------------------------------------------------------------------------
// shuffle
// ---------------------------------------------------------------------------

int cmd_shuffle(const GlobalOptions& global, const ShuffleArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    if (args.cards < 3) throw UsageError("N must be at least 3 (log base N-1 is undefined for N=2); got N=" +
                                         std::to_string(args.cards));
    if (args.rounds.empty() || !std::is_sorted(args.rounds.begin(), args.rounds.end()) || args.rounds.front() == 0)
      throw UsageError("rounds must be a non-empty ascending list of positive counts");
    if (args.repeats == 0) throw UsageError("repeats must be positive");
    if (!args.oracle && args.inputs.empty()) throw UsageError("nothing to do: oracle disabled and no --input files");
    const json config = load_config(global);
    ensure_out_dir(global);

    RunManifest manifest;
    manifest.subcommand = "shuffle";
    manifest.started_at = utc_now();
    manifest.config = config;
    manifest.config["resolved"] = {{"cards", args.cards},     {"rounds", args.rounds},
                                   {"seed", args.seed},       {"repeats", args.repeats},
                                   {"mode", args.cumulative ? "cumulative" : "fresh"}, {"oracle", args.oracle}};

    json doc;
    doc["manifest"] = "manifest.json";
    doc["cards"] = args.cards;
    doc["rounds"] = args.rounds;
    doc["mode"] = args.cumulative ? "cumulative" : "fresh";
    doc["repeats"] = args.repeats;
    doc["seed"] = args.seed;

    std::map<std::size_t, std::map<std::string, double>> table;  // rounds -> column -> H
    std::vector<std::string> columns;

    if (args.oracle) {
      std::vector<double> mean(args.rounds.size(), 0.0);
      for (std::size_t r = 0; r < args.repeats; ++r) {
        const std::uint64_t seed = args.seed + r;
        const auto provider = args.cumulative
                                  ? shuffle::prefix_provider(shuffle::uniform_shuffle_oracle(
                                        args.cards, args.rounds.back(), mix_seed(seed)))
                                  : shuffle::oracle_provider(args.cards, seed);
        const auto series = shuffle::convergence_sweep(args.cards, args.rounds, provider);
        for (std::size_t k = 0; k < series.size(); ++k) mean[k] += series[k].h / static_cast<double>(args.repeats);
      }
      auto arr = json::array();
      for (std::size_t k = 0; k < args.rounds.size(); ++k) {
        arr.push_back({{"rounds", args.rounds[k]}, {"h", mean[k]}});
        table[args.rounds[k]]["oracle"] = mean[k];
      }
      doc["oracle"] = arr;
      columns.push_back("oracle");
    }

    doc["inputs"] = json::array();
    std::size_t failed = 0;
    for (const auto& path : args.inputs) {
      const auto label = path.filename().string();
      try {
        const auto ingested = shuffle::ingest_trials(path, args.cards, args.expected);
        manifest.add_input(path);
        std::vector<std::size_t> rounds;
        for (const auto r : args.rounds)
          if (r <= ingested.trials.size()) rounds.push_back(r);
        if (rounds.empty()) rounds.push_back(ingested.trials.size());
        const auto series = shuffle::convergence_sweep(args.cards, rounds, shuffle::prefix_provider(ingested.trials));
        auto arr = json::array();
        for (const auto& point : series) {
          arr.push_back({{"rounds", point.rounds}, {"h", point.h}});
          table[point.rounds][label] = point.h;
        }
        const auto sidecar = safe_name(label) + ".diagnostics.json";
        write_text(global.out_dir / sidecar, pretty(ingested.diagnostics.to_json()));
        manifest.outputs.push_back(sidecar);
        doc["inputs"].push_back({{"label", label}, {"series", arr}, {"diagnostics", ingested.diagnostics.to_json()}});
        columns.push_back(label);
      } catch (const std::exception& e) {
        ++failed;
        err << "input '" << path.string() << "' failed: " << e.what() << '\n';
        doc["inputs"].push_back({{"label", label}, {"error", e.what()}});
      }
    }

    std::ostringstream csv;
    csv.precision(15);
    csv << "rounds";
    for (const auto& c : columns) csv << ',' << c;
    csv << '\n';
    for (const auto& [rounds, row] : table) {
      csv << rounds;
      for (const auto& c : columns) {
        csv << ',';
        if (const auto it = row.find(c); it != row.end()) csv << it->second;
      }
      csv << '\n';
    }

    const std::string json_text = pretty(doc);
    write_text(global.out_dir / "shuffle.json", json_text);
    write_text(global.out_dir / "shuffle.csv", csv.str());
    manifest.outputs.insert(manifest.outputs.end(), {"shuffle.json", "shuffle.csv"});
    manifest.write(global.out_dir);

    if (global.format == OutputFormat::json) out << json_text;
    else out << csv.str();

    if (!args.inputs.empty() && failed == args.inputs.size() && !args.oracle) return static_cast<int>(kAllFailed);
    return failed > 0 ? static_cast<int>(kPartial) : static_cast<int>(kSuccess);
  });
}

// ---------------------------------------------------------------------------
// passwords
// ---------------------------------------------------------------------------

int cmd_passwords(const GlobalOptions& global, const PasswordArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    if (args.inputs.empty()) throw UsageError("passwords: at least one --input corpus file is required");
    if (args.min_len < 2) throw UsageError("min-len must be at least 2");
    const json config = load_config(global);
    const auto battery_config = nist::BatteryConfig::from_json(config);
    const std::string alphabet = args.alphabet.value_or(config.value("alphabet", chars::default_alphabet()));
    ensure_out_dir(global);

    RunManifest manifest;
    manifest.subcommand = "passwords";
    manifest.started_at = utc_now();
    manifest.config = config;
    manifest.config["resolved"] = {{"alphabet", alphabet}, {"min_len", args.min_len}, {"battery", battery_config.to_json()}};

    json doc;
    doc["manifest"] = "manifest.json";
    doc["alphabet"] = alphabet;
    doc["reports"] = json::array();
    std::string text;
    std::size_t failed = 0;
    for (const auto& path : args.inputs) {
      const auto label = path.filename().string();
      try {
        chars::PasswordCorpus corpus{read_password_lines(read_file(path)), alphabet};
        if (corpus.passwords.empty()) throw std::invalid_argument("empty corpus");
        manifest.add_input(path);
        const auto freq = chars::char_frequency(corpus);
        const auto repeats = chars::repeated_substring_scan(corpus, args.min_len);
        const auto bits = chars::corpus_to_bits(corpus);
        SampleSource source{SourceKind::file_transcript, {{"path", path.string()}}, label};
        const auto battery = aggregate(nist::run_battery(bits, nullptr, battery_config), source);

        json entry{{"label", label},
                   {"passwords", corpus.passwords.size()},
                   {"frequency", freq.to_json()},
                   {"battery", battery.to_json()}};
        const auto rep = repeats.to_json();
        entry["repeats"] = rep["repeats"];
        entry["duplicates"] = rep["duplicates"];
        entry["duplicated"] = rep["duplicated"];
        doc["reports"].push_back(entry);

        char line[256];
        std::snprintf(line, sizeof line, "%s: %zu passwords, chi2=%.4f p=%.6f %s, duplicates=%zu, repeats=%zu%s\n",
                      label.c_str(), corpus.passwords.size(), freq.chi2, freq.p,
                      std::string(to_string(freq.verdict.label)).c_str(), repeats.duplicates, repeats.repeats.size(),
                      freq.other > 0 ? ", OTHER characters present" : "");
        text += line;
        text += format_table({battery});
      } catch (const std::exception& e) {
        ++failed;
        err << "input '" << path.string() << "' failed: " << e.what() << '\n';
        doc["reports"].push_back({{"label", label}, {"error", e.what()}});
      }
    }

    const std::string json_text = pretty(doc);
    write_text(global.out_dir / "passwords.json", json_text);
    write_text(global.out_dir / "passwords.txt", text);
    manifest.outputs.insert(manifest.outputs.end(), {"passwords.json", "passwords.txt"});
    manifest.write(global.out_dir);
    out << (global.format == OutputFormat::json ? json_text : text);

    if (failed == args.inputs.size()) return static_cast<int>(kAllFailed);
    return failed > 0 ? static_cast<int>(kPartial) : static_cast<int>(kSuccess);
  });
}

// ---------------------------------------------------------------------------
// llm
// ---------------------------------------------------------------------------

int cmd_llm(const GlobalOptions& global, const LlmArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const std::string api_key = llm::api_key_from_env();  // before anything touches the network
    if (args.endpoint.empty()) throw UsageError("--endpoint is required");
    if (args.task != "integers" && args.task != "shuffles") throw UsageError("--task must be integers or shuffles");
    if (args.tool_mode != "none" && args.tool_mode != "rng") throw UsageError("--tool-mode must be none or rng");
    if (args.session != "fresh" && args.session != "continued") throw UsageError("--session must be fresh or continued");
    if (args.tool_mode == "rng" && args.task != "integers") throw UsageError("--tool-mode rng applies to --task integers");
    if (args.task == "shuffles" && args.cards < 3) throw UsageError("N must be at least 3");
    SampleSource tool_source{SourceKind::crypto_below, json::object(), "tool"};
    try {
      tool_source.kind = source_kind_from_string(args.tool_source);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--tool-source: ") + e.what());
    }
    const json config = load_config(global);
    ensure_out_dir(global);

    llm::PromptConfig prompt;
    prompt.endpoint = {args.endpoint, args.model};
    prompt.session_mode = args.session == "fresh" ? llm::SessionMode::fresh : llm::SessionMode::continued;
    prompt.tool_mode = args.tool_mode == "rng" ? llm::ToolMode::rng_tool : llm::ToolMode::none;
    prompt.system_prompt = args.system_prompt;
    prompt.user_prompt = args.prompt.value_or(args.task == "shuffles" ? llm::kShufflePrompt : llm::kIntegerPrompt);

    llm::HarnessOptions options;
    options.label = args.label;
    options.batch_size = args.batch_size;
    options.max_requests = args.max_requests;
    options.min_delay = std::chrono::milliseconds(std::max(0L, args.delay_ms));
    options.backoff_base = std::chrono::milliseconds(std::max(1L, args.delay_ms / 2));

    std::optional<llm::Transcript> prior;
    if (args.resume) {
      try {
        prior = llm::Transcript::from_jsonl(read_file(*args.resume));
      } catch (const std::exception& e) {
        throw UsageError(std::string("cannot resume: ") + e.what());
      }
    }

    auto transport = std::make_shared<llm::HttpChatTransport>(args.endpoint, api_key);
    llm::Harness harness(prompt, options, transport);

    const fs::path transcript_path = args.transcript_out.value_or(global.out_dir / "transcript.jsonl");
    RunManifest manifest;
    manifest.subcommand = "llm";
    manifest.started_at = utc_now();
    manifest.config = config;
    manifest.config["resolved"] = prompt.to_json();
    manifest.config["resolved"]["task"] = args.task;
    if (args.resume) manifest.add_input(*args.resume);

    llm::Transcript transcript;
    int code = kSuccess;
    try {
      if (args.tool_mode == "rng")
        transcript = harness.run_tool_loop(args.count, args.max, tool_source);
      else if (args.task == "shuffles")
        transcript = harness.request_shuffles(args.cards, args.trials, prior ? &*prior : nullptr);
      else
        transcript = harness.request_integers(args.count, args.max);
    } catch (const llm::HarnessError& e) {
      transcript = e.transcript;
      err << (e.authentication ? "authentication error: " : "network error: ") << e.what() << '\n';
      code = kAllFailed;
    }

    write_text(transcript_path, transcript.to_jsonl());
    manifest.outputs.push_back(transcript_path.string());
    manifest.write(global.out_dir);

    const auto& status = transcript.status();
    const json summary{{"transcript", transcript_path.string()},
                       {"exchanges", transcript.exchanges().size()},
                       {"tool_events", transcript.tool_events().size()},
                       {"tool_values", transcript.served_values().size()},
                       {"status", status.to_json()}};
    if (global.format == OutputFormat::json) {
      out << pretty(summary);
    } else {
      out << "transcript: " << transcript_path.string() << "\nexchanges: " << transcript.exchanges().size()
          << "\ntool values served: " << transcript.served_values().size() << "\nreceived: " << status.received
          << "\nshortfall: " << status.shortfall << (status.partial ? " (partial)" : "")
          << (status.aborted ? " (aborted: " + status.reason + ")" : "") << '\n';
    }
    if (code == kSuccess && (status.partial || status.aborted)) code = kPartial;
    return code;
  });
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

int cmd_gen(const GlobalOptions& global, const GenArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    if (args.output.empty()) throw UsageError("--output is required");
    SampleSource source;
    try {
      source.kind = source_kind_from_string(args.kind);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    source.label = args.kind;
    if (args.seed) source.params["seed"] = *args.seed;
    if (args.profile) source.params["profile"] = *args.profile;
    if (args.value) source.params["value"] = *args.value;

    IntegerSample sample;
    try {
      sample = sources::draw_integers(source, args.count, args.max);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    std::string text;
    switch (sniff_format(args.output)) {
      case InputFormat::json: text = json(sample.values).dump() + "\n"; break;
      case InputFormat::csv: text = "value\n" + sources::to_integer_lines(sample.values); break;
      default: text = sources::to_integer_lines(sample.values); break;
    }
    if (args.output.has_parent_path()) fs::create_directories(args.output.parent_path());
    write_text(args.output, text);
    if (global.format == OutputFormat::json)
      out << pretty({{"output", args.output.string()}, {"count", sample.values.size()}, {"source", source.to_json()}});
    else
      out << "wrote " << sample.values.size() << " values to " << args.output.string() << '\n';
    return static_cast<int>(kSuccess);
  });
}

}  // namespace entropybench::cli
