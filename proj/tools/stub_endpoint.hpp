#pragma once

// Scripted chat-completion endpoint speaking the same wire format as the
// harness. Used by the integration tests and for offline demos; it never
// talks to a real model.

#include <atomic>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "entropybench/bitstream.hpp"
#include "entropybench/random.hpp"

namespace entropybench::stub {

enum class Mode {
  echo,      // returns exactly the requested count of values as a JSON array
  prose,     // same values wrapped in chatty prose and a list
  partial,   // 50 values on the first request, refusals afterwards
  tool,      // delegates to random_int once, then echoes the served values
  runaway,   // requests the tool forever
  malformed, // emits a tool call with unparsable arguments
  shuffles,  // valid card orderings, as many as asked
  code,      // answers with a code block instead of data
  auth_fail, // HTTP 401
  flaky,     // HTTP 503 twice, then behaves like echo
};

inline Mode mode_from_string(std::string_view name) {
  static const std::pair<std::string_view, Mode> names[] = {
      {"echo", Mode::echo},       {"prose", Mode::prose},       {"partial", Mode::partial},
      {"tool", Mode::tool},       {"runaway", Mode::runaway},   {"malformed", Mode::malformed},
      {"shuffles", Mode::shuffles}, {"code", Mode::code},       {"auth_fail", Mode::auth_fail},
      {"flaky", Mode::flaky}};
  for (const auto& [n, m] : names)
    if (n == name) return m;
  throw std::invalid_argument("unknown stub mode: " + std::string(name));
}

class StubEndpoint {
 public:
  explicit StubEndpoint(Mode mode, std::uint64_t seed = 2024) : mode_(mode), engine_(seed) {}

  /// Returns {status, body} for one request body.
  std::pair<int, nlohmann::json> respond(const nlohmann::json& request) {
    std::lock_guard lock(mutex_);
    const std::size_t call = calls_++;
    requests_.push_back(request);
    const auto& messages = request.at("messages");
    const auto& last = messages.back();

    switch (mode_) {
      case Mode::auth_fail:
        return {401, {{"error", {{"message", "invalid api key"}}}}};
      case Mode::flaky:
        if (call < 2) return {503, {{"error", {{"message", "overloaded"}}}}};
        return {200, content_reply(render_values(requested(last), false))};
      case Mode::echo:
        return {200, content_reply(render_values(requested(last), false))};
      case Mode::prose:
        return {200, content_reply(render_values(requested(last), true))};
      case Mode::partial:
        if (call == 0) return {200, content_reply(render_values({50, max_of(last)}, false))};
        return {200, content_reply("I'm sorry, I can't generate more numbers right now.")};
      case Mode::tool: {
        if (last.value("role", "") == "tool") return {200, content_reply(last.at("content").get<std::string>())};
        const auto asked = requested(last);
        return {200, tool_reply(nlohmann::json{{"min", 0}, {"max", asked.second}, {"count", asked.first}}.dump())};
      }
      case Mode::runaway:
        return {200, tool_reply(nlohmann::json{{"min", 0}, {"max", 255}, {"count", 1}}.dump())};
      case Mode::malformed:
        return {200, tool_reply("{not json")};
      case Mode::shuffles:
        return {200, content_reply(render_orderings(last))};
      case Mode::code:
        return {200, content_reply("```python\nimport random\ndeck = list(range(10))\nrandom.shuffle(deck)\n"
                                   "print(deck)\n```")};
    }
    return {500, {}};
  }

  std::size_t calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }
  std::vector<nlohmann::json> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  static std::string user_text(const nlohmann::json& message) {
    return message.contains("content") && message.at("content").is_string() ? message.at("content").get<std::string>()
                                                                            : std::string();
  }

  // (count, max) from "... create {count} random ... highest of which is {max}."
  static std::pair<std::uint64_t, std::uint64_t> requested(const nlohmann::json& message) {
    const auto runs = decimal_runs(user_text(message));
    return {runs.size() > 0 ? runs[0] : 10, runs.size() > 1 ? runs[1] : 255};
  }
  static std::uint64_t max_of(const nlohmann::json& message) { return requested(message).second; }

  std::string render_values(std::pair<std::uint64_t, std::uint64_t> asked, bool chatty) {
    std::vector<std::uint64_t> values(asked.first);
    for (auto& v : values) v = uniform_below(engine_, asked.second + 1);
    if (!chatty) return nlohmann::json(values).dump();
    std::string text = "Sure! Here are your random numbers:\n\n";
    for (std::size_t i = 0; i < values.size(); ++i) text += "- " + std::to_string(values[i]) + "\n";
    return text + "\nLet me know if you need more!";
  }

  // Prompt: "Shuffle a deck of {cards} cards labeled 0 to {last}, {trials} times."
  std::string render_orderings(const nlohmann::json& message) {
    const auto runs = decimal_runs(user_text(message));
    const std::size_t cards = runs.size() > 0 ? runs[0] : 10;
    const std::size_t trials = runs.size() > 3 ? runs[3] : 1;
    std::string text;
    std::vector<std::size_t> deck(cards);
    for (std::size_t t = 0; t < trials; ++t) {
      for (std::size_t k = 0; k < cards; ++k) deck[k] = k;
      for (std::size_t i = cards - 1; i > 0; --i) std::swap(deck[i], deck[uniform_below(engine_, i + 1)]);
      for (std::size_t k = 0; k < cards; ++k) text += (k ? ", " : "") + std::to_string(deck[k]);
      text += "\n";
    }
    return text;
  }

  static nlohmann::json content_reply(const std::string& content) {
    return {{"id", "stub"},
            {"object", "chat.completion"},
            {"choices", {{{"index", 0}, {"finish_reason", "stop"},
                          {"message", {{"role", "assistant"}, {"content", content}}}}}}};
  }

  nlohmann::json tool_reply(const std::string& arguments) {
    const auto id = "call_" + std::to_string(calls_);
    return {{"id", "stub"},
            {"object", "chat.completion"},
            {"choices",
             {{{"index", 0},
               {"finish_reason", "tool_calls"},
               {"message",
                {{"role", "assistant"},
                 {"content", nullptr},
                 {"tool_calls",
                  {{{"id", id}, {"type", "function"},
                    {"function", {{"name", "random_int"}, {"arguments", arguments}}}}}}}}}}}};
  }

  Mode mode_;
  std::mt19937_64 engine_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
  std::vector<nlohmann::json> requests_;
};

/// StubEndpoint behind a real HTTP listener on 127.0.0.1.
class StubServer {
 public:
  explicit StubServer(Mode mode, int port = 0, std::uint64_t seed = 2024) : endpoint_(mode, seed) {
    server_.Post(R"(.*/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded()) {
        res.status = 400;
        return;
      }
      last_authorization_ = req.get_header_value("Authorization");
      const auto [status, reply] = endpoint_.respond(body);
      res.status = status;
      res.set_content(reply.dump(), "application/json");
    });
    port_ = port == 0 ? server_.bind_to_any_port("127.0.0.1") : (server_.bind_to_port("127.0.0.1", port) ? port : -1);
    if (port_ <= 0) throw std::runtime_error("stub: cannot bind");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  StubEndpoint& endpoint() { return endpoint_; }
  std::string last_authorization() const { return last_authorization_; }

  /// Blocks until stop() is called from elsewhere (used by the stub tool).
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

 private:
  StubEndpoint endpoint_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::string last_authorization_;
};

}  // namespace entropybench::stub
