#include "entropybench/llm.hpp"

#include <cstdlib>
#include <ctime>
#include <thread>

#include <httplib.h>

#include "entropybench/shuffle.hpp"
#include "entropybench/sources.hpp"

namespace entropybench::llm {

namespace {

struct TransportFailure {
  std::string message;
  bool auth = false;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(SessionMode m) { return m == SessionMode::fresh ? "fresh" : "continued"; }
std::string_view to_string(ToolMode m) { return m == ToolMode::none ? "none" : "rng_tool"; }

nlohmann::json message(std::string_view role, std::string_view content) {
  return {{"role", role}, {"content", content}};
}

bool retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

std::size_t count_orderings(std::string_view text, std::size_t cards) {
  try {
    return shuffle::parse_trials(text, cards).trials.size();
  } catch (const std::runtime_error&) {
    return 0;
  }
}

// Runs a session body; transport failures seal the transcript and surface
// as HarnessError carrying it.
template <typename Body>
Transcript guarded_session(Transcript transcript, Body&& body) {
  try {
    body(transcript);
  } catch (const TransportFailure& failure) {
    if (!transcript.sealed()) transcript.seal({true, true, 0, 0, failure.message});
    throw HarnessError(failure.message, std::move(transcript), failure.auth);
  }
  return transcript;
}

}  // namespace

nlohmann::json PromptConfig::to_json() const {
  return {{"user_prompt", user_prompt},
          {"system_prompt", system_prompt ? nlohmann::json(*system_prompt) : nlohmann::json(nullptr)},
          {"session_mode", to_string(session_mode)},
          {"tool_mode", to_string(tool_mode)},
          {"endpoint", endpoint.base_url},
          {"model", endpoint.model},
          {"temperature", temperature},
          {"max_tokens", max_tokens}};
}

HttpChatTransport::HttpChatTransport(std::string base_url, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + base_url);
  const auto path_start = base_url.find('/', scheme_end + 3);
  origin_ = base_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? std::string() : base_url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (base_url.rfind("https://", 0) == 0) throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
}

HttpReply HttpChatTransport::post(const nlohmann::json& body) {
  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) return {0, {}, httplib::to_string(result.error())};
  return {result->status, result->body, {}};
}

std::string api_key_from_env() {
  const char* key = std::getenv(kApiKeyVariable);
  if (key == nullptr || *key == '\0')
    throw ConfigError(std::string("missing API key: set the ") + kApiKeyVariable + " environment variable");
  return key;
}

std::string render_prompt(std::string_view tmpl, const nlohmann::json& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string key(tmpl.substr(i + 1, close - i - 1));
        if (values.contains(key)) {
          const auto& v = values.at(key);
          out += v.is_string() ? v.get<std::string>() : v.dump();
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

nlohmann::json random_int_tool_schema() {
  return {{"type", "function"},
          {"function",
           {{"name", "random_int"},
            {"description", "Returns `count` uniformly distributed random integers between min and max inclusive."},
            {"parameters",
             {{"type", "object"},
              {"properties",
               {{"min", {{"type", "integer"}}}, {"max", {{"type", "integer"}}}, {"count", {{"type", "integer"}}}}},
              {"required", {"min", "max", "count"}}}}}}};
}

Harness::Harness(PromptConfig config, HarnessOptions options, std::shared_ptr<ChatTransport> transport,
                 Sleeper sleeper)
    : config_(std::move(config)), options_(std::move(options)), transport_(std::move(transport)),
      sleep_(std::move(sleeper)) {
  if (!transport_) throw std::invalid_argument("harness: transport required");
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (options_.batch_size == 0) throw std::invalid_argument("harness: batch_size must be positive");
}

nlohmann::json Harness::base_request(const nlohmann::json& messages) const {
  nlohmann::json body{{"model", config_.endpoint.model},
                      {"messages", messages},
                      {"temperature", config_.temperature},
                      {"max_tokens", config_.max_tokens}};
  return body;
}

void Harness::pace() {
  const auto now = std::chrono::steady_clock::now();
  if (last_request_) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(now - *last_request_);
    if (elapsed < options_.min_delay) sleep_(options_.min_delay - elapsed);
  }
  last_request_ = std::chrono::steady_clock::now();
}

Exchange Harness::send(const nlohmann::json& body, std::size_t batch_requested, Transcript& transcript) {
  HttpReply reply;
  for (int attempt = 0;; ++attempt) {
    pace();
    reply = transport_->post(body);
    if (reply.status == 200 || !retryable(reply.status) || attempt >= options_.max_retries) break;
    sleep_(options_.backoff_base * (1LL << attempt));
  }

  Exchange x;
  x.timestamp = utc_timestamp();
  x.request = body;
  x.response_body = reply.body;
  x.batch_requested = batch_requested;

  if (reply.status != 200) {
    const bool auth = reply.status == 401 || reply.status == 403;
    std::string message = reply.status == 0 ? "network failure: " + reply.error
                          : auth ? "authentication failed (HTTP " + std::to_string(reply.status) +
                                       "); check " + kApiKeyVariable
                                 : "endpoint returned HTTP " + std::to_string(reply.status);
    if (!auth && retryable(reply.status))
      message += " after " + std::to_string(options_.max_retries) + " retries";
    x.error = message;
    transcript.append(x);
    throw TransportFailure{message, auth};
  }

  const auto doc = nlohmann::json::parse(reply.body, nullptr, false);
  try {
    if (doc.is_discarded()) throw std::runtime_error("response body is not JSON");
    const auto& msg = doc.at("choices").at(0).at("message");
    if (msg.contains("content") && msg.at("content").is_string()) x.content = msg.at("content").get<std::string>();
    if (msg.contains("tool_calls") && msg.at("tool_calls").is_array()) x.tool_calls = msg.at("tool_calls");
  } catch (const std::exception& e) {
    x.error = std::string("unexpected response shape: ") + e.what();
  }
  transcript.append(x);
  return x;
}

Transcript Harness::request_integers(std::size_t count, std::uint64_t max) {
  if (count == 0 || max < 1) throw std::invalid_argument("request_integers: count and max must be positive");
  nlohmann::json params = config_.to_json();
  params["count"] = count;
  params["max"] = max;
  params["batch_size"] = options_.batch_size;

  return guarded_session(Transcript(options_.label, "integers", params), [&](Transcript& t) {
    nlohmann::json history = nlohmann::json::array();
    if (config_.system_prompt) history.push_back(message("system", *config_.system_prompt));
    const nlohmann::json preamble = history;

    std::size_t collected = 0, requests = 0, stalls = 0;
    while (collected < count && requests < options_.max_requests && stalls < options_.max_stalls) {
      const std::size_t want = std::min(options_.batch_size, count - collected);
      const auto prompt = render_prompt(config_.user_prompt, {{"count", want}, {"max", max}});
      nlohmann::json messages = config_.session_mode == SessionMode::continued ? history : preamble;
      messages.push_back(message("user", prompt));

      const auto x = send(base_request(messages), want, t);
      ++requests;
      const auto gained = sources::extract_integers(x.content, max).values.size();
      collected += gained;
      stalls = gained == 0 ? stalls + 1 : 0;
      if (config_.session_mode == SessionMode::continued) {
        history = std::move(messages);
        history.push_back(message("assistant", x.content));
      }
    }
    const std::size_t received = std::min(collected, count);
    t.seal({received < count, false, collected, count - received,
            received < count ? (stalls >= options_.max_stalls ? "stalled" : "request budget exhausted") : ""});
  });
}

Transcript Harness::request_shuffles(std::size_t cards, std::size_t trials, const Transcript* resume) {
  if (cards < 3) throw std::invalid_argument("request_shuffles: N must be at least 3");
  if (trials == 0) throw std::invalid_argument("request_shuffles: trials must be positive");
  nlohmann::json params = config_.to_json();
  params["cards"] = cards;
  params["trials"] = trials;
  params["batch_size"] = options_.batch_size;

  Transcript start = resume != nullptr ? resume->reopen() : Transcript(options_.label, "shuffles", params);
  return guarded_session(std::move(start), [&](Transcript& t) {
    nlohmann::json history = nlohmann::json::array();
    if (config_.system_prompt) history.push_back(message("system", *config_.system_prompt));
    const nlohmann::json preamble = history;

    std::size_t collected = 0;
    for (const auto* x : t.exchanges()) {
      if (x->request.contains("messages") && !x->request.at("messages").empty())
        history.push_back(x->request.at("messages").back());
      history.push_back(message("assistant", x->content));
      collected += count_orderings(x->content, cards);
    }

    const std::size_t per_request = std::max<std::size_t>(1, options_.batch_size / cards);
    std::size_t requests = 0, stalls = 0;
    while (collected < trials && requests < options_.max_requests && stalls < options_.max_stalls) {
      const std::size_t want = std::min(per_request, trials - collected);
      const auto prompt = render_prompt(config_.user_prompt, {{"cards", cards}, {"last", cards - 1}, {"trials", want}});
      nlohmann::json messages = config_.session_mode == SessionMode::continued ? history : preamble;
      messages.push_back(message("user", prompt));

      const auto x = send(base_request(messages), want, t);
      ++requests;
      const auto gained = count_orderings(x.content, cards);
      collected += gained;
      stalls = gained == 0 ? stalls + 1 : 0;
      if (config_.session_mode == SessionMode::continued) {
        history = std::move(messages);
        history.push_back(message("assistant", x.content));
      }
    }
    const std::size_t received = std::min(collected, trials);
    t.seal({received < trials, false, collected, trials - received,
            received < trials ? (stalls >= options_.max_stalls ? "stalled" : "request budget exhausted") : ""});
  });
}

Transcript Harness::run_tool_loop(std::size_t count, std::uint64_t max, const SampleSource& tool_source) {
  if (count == 0 || max < 1) throw std::invalid_argument("run_tool_loop: count and max must be positive");
  nlohmann::json params = config_.to_json();
  params["count"] = count;
  params["max"] = max;
  params["tool_source"] = tool_source.to_json();

  return guarded_session(Transcript(options_.label, "tool_loop", params), [&](Transcript& t) {
    nlohmann::json messages = nlohmann::json::array();
    if (config_.system_prompt) messages.push_back(message("system", *config_.system_prompt));
    messages.push_back(message("user", render_prompt(config_.user_prompt, {{"count", count}, {"max", max}})));
    const auto tools = nlohmann::json::array({random_int_tool_schema()});

    for (std::size_t iteration = 0; iteration < options_.tool_iteration_cap; ++iteration) {
      auto body = base_request(messages);
      body["tools"] = tools;
      const auto x = send(body, count, t);
      if (x.tool_calls.empty()) {
        const auto received = sources::extract_integers(x.content, max).values.size();
        t.seal({received < count, false, received, count - std::min(received, count), ""});
        return;
      }

      messages.push_back({{"role", "assistant"}, {"content", nullptr}, {"tool_calls", x.tool_calls}});
      for (const auto& call : x.tool_calls) {
        ToolEvent event;
        event.timestamp = utc_timestamp();
        event.call_id = call.value("id", "");
        try {
          const auto& fn = call.at("function");
          event.name = fn.at("name").get<std::string>();
          const auto& raw_args = fn.at("arguments");
          event.arguments = raw_args.is_string() ? nlohmann::json::parse(raw_args.get<std::string>()) : raw_args;
          if (event.name != "random_int") throw std::invalid_argument("unknown tool '" + event.name + "'");
          const auto lo = event.arguments.at("min").get<std::int64_t>();
          const auto hi = event.arguments.at("max").get<std::int64_t>();
          const auto n = event.arguments.at("count").get<std::int64_t>();
          if (lo < 0 || hi <= lo || n < 1 || n > 1'000'000)
            throw std::invalid_argument("random_int arguments out of range");
          auto sample = sources::draw_integers(tool_source, static_cast<std::size_t>(n),
                                               static_cast<std::uint64_t>(hi - lo));
          for (auto& v : sample.values) v += static_cast<std::uint64_t>(lo);
          event.served = std::move(sample.values);
        } catch (const std::exception& e) {
          event.error = std::string("malformed tool call: ") + e.what();
          t.append(event);
          t.seal({true, true, 0, count, *event.error});
          return;
        }
        messages.push_back({{"role", "tool"}, {"tool_call_id", event.call_id}, {"content", nlohmann::json(event.served).dump()}});
        t.append(std::move(event));
      }
    }
    t.seal({true, true, 0, count,
            "tool loop exceeded " + std::to_string(options_.tool_iteration_cap) + " iterations"});
  });
}

}  // namespace entropybench::llm
