#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace entropybench::llm {

/// One request/response round trip with the model endpoint.
struct Exchange {
  std::string timestamp;
  nlohmann::json request;       // the body that was POSTed
  std::string response_body;    // raw HTTP body as received
  std::string content;          // assistant text extracted from the response
  nlohmann::json tool_calls = nlohmann::json::array();
  std::size_t batch_requested = 0;  // values (or orderings) this request asked for
  std::optional<std::string> error;

  nlohmann::json to_json() const;
  static Exchange from_json(const nlohmann::json& j);
};

/// One tool invocation served locally on the model's behalf.
struct ToolEvent {
  std::string timestamp;
  std::string call_id;
  std::string name;
  nlohmann::json arguments;
  std::vector<std::uint64_t> served;
  std::optional<std::string> error;

  nlohmann::json to_json() const;
  static ToolEvent from_json(const nlohmann::json& j);
};

using TranscriptEntry = std::variant<Exchange, ToolEvent>;

struct TranscriptStatus {
  bool partial = false;
  bool aborted = false;
  std::size_t received = 0;
  std::size_t shortfall = 0;
  std::string reason;

  nlohmann::json to_json() const;
  static TranscriptStatus from_json(const nlohmann::json& j);
};

/// Append-only record of a prompting session, persisted as JSON lines:
/// a header line, one line per exchange or tool event, and a closing
/// status line once sealed.
class Transcript {
 public:
  Transcript() = default;
  Transcript(std::string label, std::string task, nlohmann::json parameters);

  const std::string& label() const { return label_; }
  const std::string& task() const { return task_; }
  const nlohmann::json& parameters() const { return parameters_; }
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  const TranscriptStatus& status() const { return status_; }
  bool sealed() const { return sealed_; }

  /// Throws std::logic_error once sealed.
  void append(TranscriptEntry entry);
  void seal(TranscriptStatus status);

  /// Unsealed copy holding the same entries, for resuming a session.
  Transcript reopen() const;

  std::vector<const Exchange*> exchanges() const;
  std::vector<const ToolEvent*> tool_events() const;

  /// Assistant replies joined by newlines; request prompts are excluded.
  std::string assistant_text() const;
  /// Every value handed out by the local tool, in order.
  std::vector<std::uint64_t> served_values() const;

  std::string to_jsonl() const;
  static Transcript from_jsonl(std::string_view text);

 private:
  std::string label_;
  std::string task_;
  nlohmann::json parameters_ = nlohmann::json::object();
  std::vector<TranscriptEntry> entries_;
  TranscriptStatus status_;
  bool sealed_ = false;
};

}  // namespace entropybench::llm
