#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "fake_chat.hpp"
#include "fdesim/llm_client.hpp"
#include "support.hpp"

using namespace fdesim;
using namespace std::chrono_literals;

namespace {

ProviderConfig config_for(const FakeChatServer& server, const std::filesystem::path& cache) {
  ProviderConfig cfg;
  cfg.endpoint = server.url();
  cfg.model = "test-model";
  cfg.timeout = 5000ms;
  cfg.max_retries = 3;
  cfg.backoff = 1ms;
  cfg.cache_dir = cache;
  return cfg;
}

LeaderProfile profile() { return {4, "Sharp-tongued columnist", DiscreteAttitude::Support}; }

}  // namespace

TEST_CASE("attitude parsing") {
  CHECK(parse_attitude("ATTITUDE: -1") == DiscreteAttitude::Oppose);
  CHECK(parse_attitude("I think... ATTITUDE: 0 because it is unclear") == DiscreteAttitude::Neutral);
  CHECK(parse_attitude("attitude:1") == DiscreteAttitude::Support);
  CHECK(parse_attitude("Reasoning first.\nATTITUDE: +1\n") == DiscreteAttitude::Support);
  CHECK_THROWS_AS(parse_attitude("maybe 0.5"), OracleSemanticError);
  CHECK_THROWS_AS(parse_attitude("ATTITUDE: 0.5"), OracleSemanticError);
  CHECK_THROWS_AS(parse_attitude("ATTITUDE: 10"), OracleSemanticError);
  CHECK_THROWS_AS(parse_attitude("ATTITUDE: positive"), OracleSemanticError);
  try {
    parse_attitude("no idea");
  } catch (const OracleSemanticError& e) {
    CHECK(e.raw_response() == "no idea");
  }
}

TEST_CASE("action parsing") {
  const auto a = parse_action("ACTION: Repost\nTEXT: Look at this.", 3, 7);
  CHECK(a.kind == ActionKind::Repost);
  CHECK(a.text == "Look at this.");
  CHECK(a.author == 3);
  CHECK(a.round == 7);
  CHECK_THROWS_AS(parse_action("TEXT: hi", 0, 0), OracleSemanticError);
  CHECK_THROWS_AS(parse_action("ACTION: shout\nTEXT: hi", 0, 0), OracleSemanticError);
}

TEST_CASE("action prompt") {
  const auto minimal = render_action_prompt(profile(), {}, std::nullopt);
  CHECK(minimal.find("Sharp-tongued columnist") != std::string::npos);
  CHECK(minimal.find("+1") != std::string::npos);
  CHECK(minimal.find("(none)") != std::string::npos);
  CHECK(minimal.find("[Breaking news]") == std::string::npos);

  const std::string news = "Officials say the clip was edited; the full video tells a different story.";
  CHECK(render_action_prompt(profile(), {}, news).find(news) != std::string::npos);

  std::vector<LeaderAction> visible;
  for (int i = 0; i < 8; ++i) visible.push_back({i, i, ActionKind::Comment, "msg-" + std::to_string(i) + "."});
  const auto windowed = render_action_prompt(profile(), visible, std::nullopt, 5);
  for (int i = 0; i < 3; ++i) CHECK(windowed.find("msg-" + std::to_string(i) + ".") == std::string::npos);
  for (int i = 3; i < 8; ++i) CHECK(windowed.find("msg-" + std::to_string(i) + ".") != std::string::npos);
}

TEST_CASE("attitude prompt") {
  const LeaderAction a{1, 2, ActionKind::Post, "This is outrageous."};
  const auto p = render_attitude_prompt(a, "A rider was assaulted.");
  CHECK(p.find("1 = ") != std::string::npos);
  CHECK(p.find("0 = ") != std::string::npos);
  CHECK(p.find("-1 = ") != std::string::npos);
  CHECK(p == render_attitude_prompt(a, "A rider was assaulted."));
  CHECK_THROWS_AS(render_attitude_prompt(a, ""), ConfigError);
  CHECK_THROWS_AS(render_attitude_prompt({1, 2, ActionKind::Post, " "}, "ctx"), ConfigError);
}

TEST_CASE("provider configuration") {
  ProviderConfig cfg;
  cfg.endpoint = "http://localhost:1/v1/chat/completions";
  cfg.model = "m";
  CHECK_NOTHROW(validate(cfg));
  cfg.max_concurrency = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.max_concurrency = 1;
  cfg.endpoint = "ftp://x";
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg.token_env = "FDESIM_TEST_TOKEN_UNSET";
  ::unsetenv("FDESIM_TEST_TOKEN_UNSET");
  CHECK_THROWS_AS(resolve_token(cfg), ConfigError);
  ::setenv("FDESIM_TEST_TOKEN_UNSET", "abc", 1);
  CHECK(resolve_token(cfg) == "abc");
}

TEST_CASE("retries after 429 and succeeds") {
  FakeChatServer server;
  const auto dir = support::temp_dir("retry");
  server.queue_statuses({429, 429});
  LlmClient client(config_for(server, dir), "secret");
  const auto text = client.complete("Rate the attitude of X", 0.0);
  CHECK(text == "ATTITUDE: 1");
  CHECK(server.requests() == 3);
  CHECK(client.network_calls() == 3);
  CHECK(server.last_auth() == "Bearer secret");
  std::filesystem::remove_all(dir);
}

TEST_CASE("exhausted retries raise a transport error") {
  FakeChatServer server;
  const auto dir = support::temp_dir("exhaust");
  server.queue_statuses({503, 503, 503, 503});
  LlmClient client(config_for(server, dir), "t");
  try {
    client.complete("prompt", 0.0);
    FAIL("expected OracleTransportError");
  } catch (const OracleTransportError& e) {
    CHECK(e.status() == 503);
  }
  CHECK(server.requests() == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("non-retryable status fails at once") {
  FakeChatServer server;
  const auto dir = support::temp_dir("fatal");
  server.queue_statuses({401});
  LlmClient client(config_for(server, dir), "t");
  CHECK_THROWS_AS(client.complete("prompt", 0.0), OracleTransportError);
  CHECK(server.requests() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unreachable endpoint") {
  ProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  cfg.model = "m";
  cfg.max_retries = 1;
  cfg.backoff = 1ms;
  cfg.timeout = 500ms;
  const auto dir = support::temp_dir("down");
  cfg.cache_dir = dir;
  LlmClient client(cfg, "t");
  CHECK_THROWS_AS(client.complete("prompt", 0.0), OracleTransportError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache hits make no network call") {
  FakeChatServer server;
  const auto dir = support::temp_dir("cache");
  {
    LlmClient client(config_for(server, dir), "t");
    client.complete("Rate the attitude of Y", 0.0);
    client.complete("Rate the attitude of Y", 0.0);
    CHECK(server.requests() == 1);
    CHECK(client.cache_hits() == 1);
    client.complete("Rate the attitude of Y", 0.3);
    CHECK(server.requests() == 2);
  }
  LlmClient fresh(config_for(server, dir), "t");
  CHECK(fresh.complete("Rate the attitude of Y", 0.0) == "ATTITUDE: 1");
  CHECK(fresh.network_calls() == 0);
  CHECK(server.requests() == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache digest depends only on the keys served") {
  FakeChatServer server;
  const auto dir = support::temp_dir("digest");
  LlmClient a(config_for(server, dir), "t");
  LlmClient b(config_for(server, dir), "t");
  a.complete("one", 0.0);
  a.complete("two", 0.0);
  b.complete("two", 0.0);
  b.complete("one", 0.0);
  CHECK(a.cache_digest() == b.cache_digest());
  b.complete("three", 0.0);
  CHECK(a.cache_digest() != b.cache_digest());
  std::filesystem::remove_all(dir);
}

TEST_CASE("live oracle inside a leader round") {
  FakeChatServer server;
  const auto dir = support::temp_dir("oracle");
  LlmClient client(config_for(server, dir), "t");
  LlmOracle oracle(client);
  RawParams raw = default_raw_params({2, 2});
  const auto p = validate_params(raw);
  auto pop = make_leader_population(OpinionGrid({2, 2}, OpinionValue(1.0)));
  const NewsTimeline timeline({{0, DiscreteAttitude::Support, "A rider was assaulted."}});
  const auto res = step_leaders(pop, oracle, timeline, p, 0);
  REQUIRE(res.actions.size() == 4);
  CHECK(res.actions[0].action.kind == ActionKind::Post);
  CHECK(res.actions[0].scored == DiscreteAttitude::Support);
  CHECK(res.actions[0].action_prompt.find("A rider was assaulted.") != std::string::npos);
  CHECK(oracle.digest().rfind("live:test-model:", 0) == 0);

  server.set_attitude_answer("maybe 0.5");
  try {
    step_leaders(res.next, oracle, timeline, p, 1);
    FAIL("expected OracleSemanticError");
  } catch (const OracleSemanticError& e) {
    CHECK(e.agent().has_value());
    CHECK(e.raw_response() == "maybe 0.5");
  }
  std::filesystem::remove_all(dir);
}
