#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "entropybench/llm.hpp"
#include "entropybench/nist.hpp"
#include "entropybench/shuffle.hpp"
#include "entropybench/sources.hpp"
#include "stub_endpoint.hpp"

using namespace entropybench;
using namespace entropybench::llm;
using stub::Mode;

namespace {

// In-process transport straight into the scripted endpoint.
class StubTransport final : public ChatTransport {
 public:
  explicit StubTransport(Mode mode, std::uint64_t seed = 2024) : endpoint(mode, seed) {}
  HttpReply post(const nlohmann::json& body) override {
    const auto [status, reply] = endpoint.respond(body);
    return {status, reply.dump(), {}};
  }
  stub::StubEndpoint endpoint;
};

HarnessOptions quick(std::size_t batch = 500) {
  HarnessOptions o;
  o.batch_size = batch;
  o.min_delay = std::chrono::milliseconds(0);
  o.backoff_base = std::chrono::milliseconds(0);
  return o;
}

Harness harness(std::shared_ptr<ChatTransport> t, PromptConfig config = {}, HarnessOptions options = quick()) {
  return Harness(std::move(config), options, std::move(t), [](std::chrono::milliseconds) {});
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "entropybench_llm_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("prompt rendering and tool schema") {
  CHECK(render_prompt(kIntegerPrompt, {{"count", 10000}, {"max", 255}}) ==
        "Can you please create 10000 random positive integers in decimal format, the highest of which is 255.");
  CHECK(render_prompt("{cards} cards 0 to {last} {unknown}", {{"cards", 10}, {"last", 9}}) ==
        "10 cards 0 to 9 {unknown}");
  const auto schema = random_int_tool_schema();
  CHECK(schema.at("function").at("name") == "random_int");
  CHECK(schema.at("function").at("parameters").at("required").size() == 3);
}

TEST_CASE("transcript append-only and lossless") {
  Transcript t("label", "integers", {{"count", 3}});
  Exchange x;
  x.timestamp = "2024-01-01T00:00:00Z";
  x.request = {{"messages", {{{"role", "user"}, {"content", "hi"}}}}};
  x.response_body = "{\"raw\": \"\\u00e9\"}";
  x.content = "1, 2, 3";
  x.batch_requested = 3;
  t.append(x);
  ToolEvent e;
  e.call_id = "c1";
  e.name = "random_int";
  e.arguments = {{"min", 0}, {"max", 9}, {"count", 2}};
  e.served = {4, 9};
  t.append(e);
  t.seal({true, false, 3, 7, "stalled"});
  CHECK_THROWS_AS(t.append(x), std::logic_error);

  const auto text = t.to_jsonl();
  const auto back = Transcript::from_jsonl(text);
  CHECK(back.to_jsonl() == text);
  CHECK(back.sealed());
  CHECK(back.status().shortfall == 7);
  CHECK(back.assistant_text() == "1, 2, 3");
  CHECK(back.served_values() == std::vector<std::uint64_t>{4, 9});
  CHECK(back.exchanges().size() == 1);
  CHECK(back.tool_events().size() == 1);
  CHECK_FALSE(back.reopen().sealed());
  CHECK(back.reopen().entries().size() == 2);
  CHECK_THROWS(Transcript::from_jsonl("not json\n"));
}

TEST_CASE("request_integers") {
  SUBCASE("fixed list in one exchange") {
    auto transport = std::make_shared<StubTransport>(Mode::echo);
    const auto t = harness(transport).request_integers(100, 255);
    CHECK(t.exchanges().size() == 1);
    CHECK(sources::extract_integers(t.assistant_text(), 255).values.size() == 100);
    CHECK_FALSE(t.status().partial);
    CHECK(t.parameters().at("temperature") == 0.0);
  }
  SUBCASE("prose-wrapped numbers are recovered") {
    auto transport = std::make_shared<StubTransport>(Mode::prose);
    const auto t = harness(transport).request_integers(40, 255);
    const auto path = write_temp("prose.jsonl", t.to_jsonl());
    const auto ingested = sources::ingest_transcript(path);
    CHECK(ingested.sample.values.size() == 40);
    CHECK(ingested.sample.values == sources::extract_integers(t.exchanges()[0]->content, 255).values);
    CHECK(ingested.dropped == 0);
  }
  SUBCASE("partial reply and shortfall") {
    auto transport = std::make_shared<StubTransport>(Mode::partial);
    const auto t = harness(transport).request_integers(1000, 255);
    CHECK(t.status().partial);
    CHECK(t.status().received == 50);
    CHECK(t.status().shortfall == 950);
    CHECK(t.status().reason == "stalled");
  }
  SUBCASE("batching and continued history") {
    auto transport = std::make_shared<StubTransport>(Mode::echo);
    const auto t = harness(transport, {}, quick(300)).request_integers(1000, 255);
    REQUIRE(t.exchanges().size() == 4);
    CHECK(t.exchanges()[0]->batch_requested == 300);
    CHECK(t.exchanges()[3]->batch_requested == 100);
    const auto requests = transport->endpoint.requests();
    for (std::size_t i = 0; i < requests.size(); ++i) CHECK(requests[i].at("messages").size() == 2 * i + 1);
    CHECK(requests[1].at("messages")[1].at("role") == "assistant");
  }
  SUBCASE("fresh sessions send no prior conversation") {
    auto transport = std::make_shared<StubTransport>(Mode::echo);
    PromptConfig config;
    config.session_mode = SessionMode::fresh;
    config.system_prompt = kGeneratorSystemPrompt;
    harness(transport, config, quick(300)).request_integers(1000, 255);
    for (const auto& r : transport->endpoint.requests()) {
      REQUIRE(r.at("messages").size() == 2);
      CHECK(r.at("messages")[0].at("role") == "system");
      CHECK(r.at("temperature") == 0.0);
    }
  }
  SUBCASE("retries with backoff, then success") {
    auto transport = std::make_shared<StubTransport>(Mode::flaky);
    std::vector<std::chrono::milliseconds> sleeps;
    auto options = quick();
    options.backoff_base = std::chrono::milliseconds(100);
    Harness h({}, options, transport, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    const auto t = h.request_integers(10, 255);
    CHECK(transport->endpoint.calls() == 3);
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100),
                                                          std::chrono::milliseconds(200)});
    CHECK_FALSE(t.status().partial);
  }
  SUBCASE("authentication failure is not retried") {
    auto transport = std::make_shared<StubTransport>(Mode::auth_fail);
    try {
      harness(transport).request_integers(10, 255);
      FAIL("expected HarnessError");
    } catch (const HarnessError& e) {
      CHECK(e.authentication);
      CHECK(std::string(e.what()).find(kApiKeyVariable) != std::string::npos);
      CHECK(e.transcript.sealed());
      CHECK(e.transcript.status().aborted);
    }
    CHECK(transport->endpoint.calls() == 1);
  }
  SUBCASE("minimum delay between requests") {
    auto transport = std::make_shared<StubTransport>(Mode::echo);
    std::vector<std::chrono::milliseconds> sleeps;
    auto options = quick(10);
    options.min_delay = std::chrono::milliseconds(1000);
    Harness h({}, options, transport, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    h.request_integers(30, 255);
    CHECK(sleeps.size() == 2);
    for (auto d : sleeps) CHECK(d.count() > 900);
  }
}

TEST_CASE("tool loop") {
  SUBCASE("final values are exactly the served values") {
    auto transport = std::make_shared<StubTransport>(Mode::tool);
    PromptConfig config;
    config.tool_mode = ToolMode::rng_tool;
    const auto t = harness(transport, config).run_tool_loop(200, 255, sources::seeded_source(5));
    REQUIRE(t.tool_events().size() == 1);
    const auto served = t.served_values();
    CHECK(served.size() == 200);
    CHECK(sources::extract_integers(t.exchanges().back()->content, 255).values == served);
    CHECK_FALSE(t.status().partial);
    const auto first = transport->endpoint.requests().front();
    CHECK(first.at("tools")[0].at("function").at("name") == "random_int");
  }
  SUBCASE("runaway tool calls hit the cap") {
    auto transport = std::make_shared<StubTransport>(Mode::runaway);
    const auto t = harness(transport).run_tool_loop(10, 255, sources::crypto_below_source());
    CHECK(t.status().aborted);
    CHECK(transport->endpoint.calls() == 20);
    CHECK(t.tool_events().size() == 20);
  }
  SUBCASE("malformed tool call aborts gracefully") {
    auto transport = std::make_shared<StubTransport>(Mode::malformed);
    const auto t = harness(transport).run_tool_loop(10, 255, sources::crypto_below_source());
    CHECK(t.status().aborted);
    REQUIRE(t.tool_events().size() == 1);
    CHECK(t.tool_events()[0]->error.has_value());
    CHECK(transport->endpoint.calls() == 1);
  }
  SUBCASE("crypto-backed tool output scores like the local generator") {
    // Mean OK-rate over 20 runs of 10^4 values each, tool path vs direct draws.
    double tool_ok = 0, local_ok = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
      auto transport = std::make_shared<StubTransport>(Mode::tool, run);
      const auto t = harness(transport).run_tool_loop(10000, 255, sources::crypto_below_source());
      IntegerSample served{t.served_values(), 255, {}};
      tool_ok += aggregate(nist::run_battery(from_integers(served, 8), &served), {}).ok_pct / 20;
      const auto local = sources::draw_integers(sources::crypto_below_source(), 10000, 255);
      local_ok += aggregate(nist::run_battery(from_integers(local, 8), &local), {}).ok_pct / 20;
    }
    CHECK(std::abs(tool_ok - local_ok) <= 10.0);
  }
}

TEST_CASE("request_shuffles") {
  PromptConfig config;
  config.user_prompt = kShufflePrompt;
  SUBCASE("valid orderings") {
    auto transport = std::make_shared<StubTransport>(Mode::shuffles);
    const auto t = harness(transport, config, quick(500)).request_shuffles(10, 128);
    CHECK(t.exchanges().size() == 3);  // 50 + 50 + 28
    const auto ingested = shuffle::parse_trials(t.assistant_text(), 10, 128);
    CHECK(ingested.trials.size() == 128);
    CHECK(ingested.diagnostics.dropped == 0);
    CHECK(t.exchanges()[0]->request.at("messages")[0].at("content").get<std::string>().find("not output code") !=
          std::string::npos);
  }
  SUBCASE("code instead of orderings") {
    auto transport = std::make_shared<StubTransport>(Mode::code);
    const auto t = harness(transport, config).request_shuffles(10, 128);
    CHECK(t.status().partial);
    CHECK(t.status().shortfall == 128);
    const auto path = write_temp("code.jsonl", t.to_jsonl());
    CHECK_THROWS_AS(shuffle::ingest_trials(path, 10, 128), std::runtime_error);
  }
  SUBCASE("resumed session accumulates") {
    auto transport = std::make_shared<StubTransport>(Mode::shuffles);
    auto options = quick(500);
    options.max_requests = 1;
    auto h = harness(transport, config, options);
    const auto first = h.request_shuffles(10, 120);
    CHECK(first.status().received == 50);
    const auto second = h.request_shuffles(10, 120, &first);
    CHECK(second.status().received == 100);
    CHECK(second.exchanges().size() == 2);
    // Continued mode threads the first exchange into the second request.
    const auto messages = transport->endpoint.requests().back().at("messages");
    CHECK(messages.size() == 3);
    CHECK(messages[1].at("role") == "assistant");
    const auto all = shuffle::parse_trials(second.assistant_text(), 10, 120);
    CHECK(all.trials.size() == 100);
    CHECK(all.diagnostics.shortfall() == 20);
  }
}

TEST_CASE("HTTP transport against a live stub") {
  stub::StubServer server(Mode::echo);
  auto transport = std::make_shared<HttpChatTransport>(server.base_url(), "test-key");
  const auto t = harness(transport).request_integers(25, 255);
  CHECK(sources::extract_integers(t.assistant_text(), 255).values.size() == 25);
  CHECK(server.last_authorization() == "Bearer test-key");
  CHECK(t.to_jsonl().find("test-key") == std::string::npos);

  stub::StubServer denied(Mode::auth_fail);
  auto bad = std::make_shared<HttpChatTransport>(denied.base_url(), "wrong");
  CHECK_THROWS_AS(harness(bad).request_integers(5, 255), HarnessError);

  // Nothing listening: connection failures are retried, then surfaced.
  auto nowhere = std::make_shared<HttpChatTransport>("http://127.0.0.1:1/v1", "k");
  try {
    harness(nowhere).request_integers(5, 255);
    FAIL("expected HarnessError");
  } catch (const HarnessError& e) {
    CHECK_FALSE(e.authentication);
    CHECK(std::string(e.what()).find("network failure") != std::string::npos);
  }
}

TEST_CASE("API key from the environment") {
  ::unsetenv(kApiKeyVariable);
  CHECK_THROWS_AS(api_key_from_env(), ConfigError);
  ::setenv(kApiKeyVariable, "", 1);
  CHECK_THROWS_AS(api_key_from_env(), ConfigError);
  ::setenv(kApiKeyVariable, "abc", 1);
  CHECK(api_key_from_env() == "abc");
  ::unsetenv(kApiKeyVariable);
}
