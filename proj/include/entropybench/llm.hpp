#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "entropybench/source.hpp"
#include "entropybench/transcript.hpp"

namespace entropybench::llm {

inline constexpr const char* kApiKeyVariable = "ENTROPYBENCH_API_KEY";

inline constexpr const char* kIntegerPrompt =
    "Can you please create {count} random positive integers in decimal format, the highest of which is {max}.";
inline constexpr const char* kGeneratorSystemPrompt =
    "You are a true random number generator. You will be asked to generate random numbers in JSON format. "
    "Do not give any code or ideas. Only the answer.";
inline constexpr const char* kShufflePrompt =
    "Shuffle a deck of {cards} cards labeled 0 to {last}, {trials} times. Write each resulting order of the deck "
    "on its own line as {cards} comma-separated card labels. Do not output code, only the card orders.";

enum class SessionMode { fresh, continued };
enum class ToolMode { none, rng_tool };

struct Endpoint {
  std::string base_url;  // e.g. https://api.example.com/v1 ; requests go to <base>/chat/completions
  std::string model;
};

struct PromptConfig {
  std::string user_prompt = kIntegerPrompt;  // placeholders: {count} {max} {cards} {last} {trials}
  std::optional<std::string> system_prompt;
  SessionMode session_mode = SessionMode::continued;
  ToolMode tool_mode = ToolMode::none;
  Endpoint endpoint;
  double temperature = 0.0;
  int max_tokens = 8192;

  nlohmann::json to_json() const;
};

struct HarnessOptions {
  std::string label = "llm";
  std::size_t batch_size = 500;      // values per request; orderings per request = batch_size / cards
  std::size_t max_requests = 64;     // overall request budget
  std::size_t max_stalls = 3;        // consecutive replies without usable output before giving up
  std::size_t tool_iteration_cap = 20;
  int max_retries = 4;               // per request, on throttling / server / connection errors
  std::chrono::milliseconds min_delay{1000};
  std::chrono::milliseconds backoff_base{500};
};

struct HttpReply {
  int status = 0;  // 0: no HTTP response (connection failure)
  std::string body;
  std::string error;
};

/// POSTs a chat-completion request body; one call per request.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpReply post(const nlohmann::json& body) = 0;
};

/// cpp-httplib client for <base_url>/chat/completions with bearer auth.
class HttpChatTransport final : public ChatTransport {
 public:
  HttpChatTransport(std::string base_url, std::string api_key,
                    std::chrono::seconds timeout = std::chrono::seconds(120));
  HttpReply post(const nlohmann::json& body) override;

 private:
  std::string origin_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

/// Reads ENTROPYBENCH_API_KEY; throws ConfigError when unset or empty.
std::string api_key_from_env();

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A session failed; the partial (sealed) transcript is kept for inspection.
struct HarnessError : std::runtime_error {
  HarnessError(const std::string& what, Transcript partial, bool auth)
      : std::runtime_error(what), transcript(std::move(partial)), authentication(auth) {}
  Transcript transcript;
  bool authentication;
};

/// Substitutes {count} {max} {cards} {last} {trials}.
std::string render_prompt(std::string_view tmpl, const nlohmann::json& values);

/// The random_int function-call schema offered in tool mode.
nlohmann::json random_int_tool_schema();

class Harness {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  Harness(PromptConfig config, HarnessOptions options, std::shared_ptr<ChatTransport> transport,
          Sleeper sleeper = {});

  /// Requests `count` integers in [0, max] in batches of at most batch_size.
  Transcript request_integers(std::size_t count, std::uint64_t max);

  /// Requests `trials` orderings of cards 0..cards-1. With `resume`, the prior
  /// session's history is threaded (continued mode) and counts accumulate.
  Transcript request_shuffles(std::size_t cards, std::size_t trials, const Transcript* resume = nullptr);

  /// Function-calling workflow: random_int calls are served from `tool_source`
  /// and logged as tool events, until the model returns a final answer.
  Transcript run_tool_loop(std::size_t count, std::uint64_t max, const SampleSource& tool_source);

 private:
  struct Reply {
    std::string content;
    nlohmann::json tool_calls = nlohmann::json::array();
  };

  nlohmann::json base_request(const nlohmann::json& messages) const;
  Exchange send(const nlohmann::json& body, std::size_t batch_requested, Transcript& transcript);
  void pace();

  PromptConfig config_;
  HarnessOptions options_;
  std::shared_ptr<ChatTransport> transport_;
  Sleeper sleep_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
};

}  // namespace entropybench::llm
