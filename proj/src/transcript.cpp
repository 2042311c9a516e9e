#include "entropybench/transcript.hpp"

#include <stdexcept>

namespace entropybench::llm {

namespace {

template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

std::optional<std::string> get_optional_string(const nlohmann::json& j, const char* key) {
  if (j.contains(key) && !j.at(key).is_null()) return j.at(key).get<std::string>();
  return std::nullopt;
}

}  // namespace

nlohmann::json Exchange::to_json() const {
  nlohmann::json j{{"type", "exchange"},
                   {"timestamp", timestamp},
                   {"request", request},
                   {"response_body", response_body},
                   {"content", content},
                   {"tool_calls", tool_calls},
                   {"batch_requested", batch_requested}};
  put_optional(j, "error", error);
  return j;
}

Exchange Exchange::from_json(const nlohmann::json& j) {
  Exchange e;
  e.timestamp = j.value("timestamp", "");
  e.request = j.value("request", nlohmann::json::object());
  e.response_body = j.value("response_body", "");
  e.content = j.value("content", "");
  e.tool_calls = j.value("tool_calls", nlohmann::json::array());
  e.batch_requested = j.value("batch_requested", std::size_t{0});
  e.error = get_optional_string(j, "error");
  return e;
}

nlohmann::json ToolEvent::to_json() const {
  nlohmann::json j{{"type", "tool"},   {"timestamp", timestamp}, {"call_id", call_id},
                   {"name", name},     {"arguments", arguments}, {"served", served}};
  put_optional(j, "error", error);
  return j;
}

ToolEvent ToolEvent::from_json(const nlohmann::json& j) {
  ToolEvent t;
  t.timestamp = j.value("timestamp", "");
  t.call_id = j.value("call_id", "");
  t.name = j.value("name", "");
  t.arguments = j.value("arguments", nlohmann::json(nullptr));
  t.served = j.value("served", std::vector<std::uint64_t>{});
  t.error = get_optional_string(j, "error");
  return t;
}

nlohmann::json TranscriptStatus::to_json() const {
  return {{"type", "status"},       {"partial", partial},     {"aborted", aborted},
          {"received", received},   {"shortfall", shortfall}, {"reason", reason}};
}

TranscriptStatus TranscriptStatus::from_json(const nlohmann::json& j) {
  TranscriptStatus s;
  s.partial = j.value("partial", false);
  s.aborted = j.value("aborted", false);
  s.received = j.value("received", std::size_t{0});
  s.shortfall = j.value("shortfall", std::size_t{0});
  s.reason = j.value("reason", "");
  return s;
}

Transcript::Transcript(std::string label, std::string task, nlohmann::json parameters)
    : label_(std::move(label)), task_(std::move(task)), parameters_(std::move(parameters)) {}

void Transcript::append(TranscriptEntry entry) {
  if (sealed_) throw std::logic_error("transcript is sealed");
  entries_.push_back(std::move(entry));
}

void Transcript::seal(TranscriptStatus status) {
  if (sealed_) throw std::logic_error("transcript is already sealed");
  status_ = std::move(status);
  sealed_ = true;
}

Transcript Transcript::reopen() const {
  Transcript copy(label_, task_, parameters_);
  copy.entries_ = entries_;
  return copy;
}

std::vector<const Exchange*> Transcript::exchanges() const {
  std::vector<const Exchange*> out;
  for (const auto& e : entries_)
    if (const auto* x = std::get_if<Exchange>(&e)) out.push_back(x);
  return out;
}

std::vector<const ToolEvent*> Transcript::tool_events() const {
  std::vector<const ToolEvent*> out;
  for (const auto& e : entries_)
    if (const auto* t = std::get_if<ToolEvent>(&e)) out.push_back(t);
  return out;
}

std::string Transcript::assistant_text() const {
  std::string text;
  for (const auto* x : exchanges()) {
    if (x->content.empty()) continue;
    if (!text.empty()) text += '\n';
    text += x->content;
  }
  return text;
}

std::vector<std::uint64_t> Transcript::served_values() const {
  std::vector<std::uint64_t> out;
  for (const auto* t : tool_events()) out.insert(out.end(), t->served.begin(), t->served.end());
  return out;
}

std::string Transcript::to_jsonl() const {
  std::string out;
  out += nlohmann::json{{"type", "header"}, {"label", label_}, {"task", task_}, {"parameters", parameters_}}.dump();
  out += '\n';
  for (const auto& e : entries_) {
    out += std::visit([](const auto& v) { return v.to_json().dump(); }, e);
    out += '\n';
  }
  if (sealed_) {
    out += status_.to_json().dump();
    out += '\n';
  }
  return out;
}

Transcript Transcript::from_jsonl(std::string_view text) {
  Transcript t;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw std::runtime_error("transcript line " + std::to_string(line_no) + ": not a JSON object");
    if (t.sealed_) throw std::runtime_error("transcript line " + std::to_string(line_no) + ": entry after status");
    const auto type = j.value("type", "");
    if (type == "header") {
      t.label_ = j.value("label", "");
      t.task_ = j.value("task", "");
      t.parameters_ = j.value("parameters", nlohmann::json::object());
      have_header = true;
    } else if (type == "exchange") {
      t.entries_.emplace_back(Exchange::from_json(j));
    } else if (type == "tool") {
      t.entries_.emplace_back(ToolEvent::from_json(j));
    } else if (type == "status") {
      t.status_ = TranscriptStatus::from_json(j);
      t.sealed_ = true;
    } else {
      throw std::runtime_error("transcript line " + std::to_string(line_no) + ": unknown entry type '" + type + "'");
    }
  }
  if (!have_header) throw std::runtime_error("transcript: missing header line");
  return t;
}

}  // namespace entropybench::llm
