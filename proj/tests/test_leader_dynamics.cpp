#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdesim/leader_dynamics.hpp"

using namespace fdesim;

namespace {

SimulationParams params(GridShape shape, double alpha) {
  RawParams raw = default_raw_params(shape);
  raw.alpha = alpha;
  return validate_params(raw);
}

ScriptedOracle constant(DiscreteAttitude a) { return ScriptedOracle({{0, std::nullopt, a}}); }

class BrokenOracle : public AttitudeOracle {
 public:
  ActionOutcome act(const ActionRequest& req) override {
    return {{req.profile.id, req.round, ActionKind::Post, "text"}, "", ""};
  }
  ScoreOutcome score(const LeaderAction& action, std::string_view) override {
    if (action.author == 2) throw OracleSemanticError("no attitude", "I refuse");
    return {DiscreteAttitude::Neutral, "", ""};
  }
  std::string digest() const override { return "broken"; }
};

}  // namespace

TEST_CASE("fusion") {
  CHECK(fuse_opinion(0.37, DiscreteAttitude::Oppose, 1.0).value() == 0.37);
  CHECK(fuse_opinion(0.2, DiscreteAttitude::Oppose, 0.0).value() == -1.0);
  CHECK(fuse_opinion(0.8, DiscreteAttitude::Oppose, 0.5).value() == doctest::Approx(-0.1));
  CHECK(fuse_opinion(1.9, DiscreteAttitude::Support, 0.5).value() == 1.0);
}

TEST_CASE("bucketing by thirds") {
  CHECK(bucket_attitude(OpinionValue(0.34)) == DiscreteAttitude::Support);
  CHECK(bucket_attitude(OpinionValue(1.0 / 3.0)) == DiscreteAttitude::Neutral);
  CHECK(bucket_attitude(OpinionValue(-0.34)) == DiscreteAttitude::Oppose);
  CHECK(bucket_attitude(OpinionValue(0.0)) == DiscreteAttitude::Neutral);
}

TEST_CASE("scripted schedule") {
  const ScriptedOracle o({{0, 9, DiscreteAttitude::Support}, {10, std::nullopt, DiscreteAttitude::Oppose}});
  CHECK(o.attitude_at(5) == DiscreteAttitude::Support);
  CHECK(o.attitude_at(10) == DiscreteAttitude::Oppose);
  CHECK(o.covers(0, 1000));
  const ScriptedOracle gap({{0, 4, DiscreteAttitude::Support}, {6, 9, DiscreteAttitude::Oppose}});
  CHECK_THROWS_AS(gap.attitude_at(5), ConfigError);
  CHECK_THROWS_AS(gap.attitude_at(10), ConfigError);
  CHECK_FALSE(gap.covers(0, 9));
  CHECK_THROWS_AS(ScriptedOracle({{5, 9, DiscreteAttitude::Support}, {0, 4, DiscreteAttitude::Oppose}}),
                  ConfigError);
}

TEST_CASE("constant oracle with alpha 0 pins every leader") {
  const auto p = params({3, 3}, 0.0);
  auto pop = make_leader_population(OpinionGrid({3, 3}, OpinionValue(-0.2)));
  auto oracle = constant(DiscreteAttitude::Support);
  const auto res = step_leaders(pop, oracle, NewsTimeline(), p, 0);
  for (int i = 0; i < 9; ++i) CHECK(res.next.opinions[i].value() == 1.0);
  CHECK(res.actions.size() == 9);
  CHECK(res.next.profiles[0].current_attitude == DiscreteAttitude::Support);
}

TEST_CASE("alpha 1 reduces to the clipped CA step") {
  const auto p = params({4, 4}, 1.0);
  OpinionGrid g({4, 4}, OpinionValue(0.1));
  for (int i = 0; i < 16; ++i) g[i] = OpinionValue(-0.9 + 0.11 * i);
  auto pop = make_leader_population(g);
  auto oracle = constant(DiscreteAttitude::Neutral);
  const auto res = step_leaders(pop, oracle, NewsTimeline(), p, 0);
  const auto ca = step_leader_grid(g, p, {});
  for (int i = 0; i < 16; ++i) CHECK(res.next.opinions[i] == clip(ca[i]));
}

TEST_CASE("uniform 2x2 grid fused with a constant oracle") {
  const auto p = params({2, 2}, 0.5);
  auto pop = make_leader_population(OpinionGrid({2, 2}, OpinionValue(0.5)));
  auto oracle = constant(DiscreteAttitude::Oppose);
  const auto res = step_leaders(pop, oracle, NewsTimeline(), p, 0);
  for (int i = 0; i < 4; ++i) CHECK(res.next.opinions[i].value() == doctest::Approx(-0.2525));
}

TEST_CASE("two oracle calls per active leader") {
  RawParams raw = default_raw_params({3, 3});
  raw.leader_agents = 7;
  raw.follower_agents = 63;
  const auto p = validate_params(raw);
  auto pop = make_leader_population(OpinionGrid({3, 3}, OpinionValue(0.0), 7));
  auto inner = constant(DiscreteAttitude::Support);
  CountingOracle counting(inner);
  step_leaders(pop, counting, NewsTimeline(), p, 0);
  CHECK(counting.act_calls() == 7);
  CHECK(counting.score_calls() == 7);
}

TEST_CASE("semantic failures name the agent") {
  const auto p = params({2, 2}, 0.5);
  auto pop = make_leader_population(OpinionGrid({2, 2}, OpinionValue(0.0)));
  BrokenOracle oracle;
  try {
    step_leaders(pop, oracle, NewsTimeline(), p, 0);
    FAIL("expected OracleSemanticError");
  } catch (const OracleSemanticError& e) {
    CHECK(e.agent() == 2);
    CHECK(e.raw_response() == "I refuse");
    CHECK(std::string(e.what()).find("agent 2") != std::string::npos);
  }
}

TEST_CASE("news reaches leaders only at its round") {
  const auto p = params({2, 2}, 0.5);
  const NewsTimeline timeline({{0, DiscreteAttitude::Support, "first"}, {3, DiscreteAttitude::Oppose, "truth"}});
  auto oracle = constant(DiscreteAttitude::Support);
  auto pop = make_leader_population(OpinionGrid({2, 2}, OpinionValue(1.0)));
  for (int round = 0; round < 5; ++round) {
    auto res = step_leaders(pop, oracle, timeline, p, round);
    for (const auto& rec : res.actions) {
      if (round == 0) {
        CHECK(rec.news == std::optional<std::string>("first"));
      } else if (round == 3) {
        CHECK(rec.news == std::optional<std::string>("truth"));
      } else {
        CHECK_FALSE(rec.news.has_value());
      }
    }
    pop = std::move(res.next);
  }
}

TEST_CASE("visible actions respect epsilon and the window") {
  auto pop = make_leader_population(OpinionGrid({3, 3}, OpinionValue(0.0)));
  pop.opinions[8] = OpinionValue(0.9);
  for (int round = 0; round < 4; ++round) {
    for (int id = 0; id < 9; ++id) pop.recent.push_back({id, round, ActionKind::Post, "x"});
  }
  const auto visible = visible_actions(pop, 0, 0.5, 5, {});
  CHECK(visible.size() == 5);
  for (const auto& a : visible) {
    CHECK(a.author != 0);
    CHECK(a.author != 8);
  }
  CHECK(visible.back().round == 3);
  CHECK(visible.front().round <= visible.back().round);
}

TEST_CASE("identical runs give identical action logs") {
  const auto p = params({3, 3}, 0.5);
  auto run = [&] {
    auto oracle = ScriptedOracle({{0, 1, DiscreteAttitude::Support}, {2, std::nullopt, DiscreteAttitude::Oppose}});
    auto pop = make_leader_population(OpinionGrid({3, 3}, OpinionValue(1.0)));
    std::vector<LeaderAction> log;
    for (int round = 0; round < 4; ++round) {
      auto res = step_leaders(pop, oracle, NewsTimeline(), p, round);
      for (const auto& r : res.actions) log.push_back(r.action);
      pop = std::move(res.next);
    }
    return log;
  };
  CHECK(run() == run());
}

TEST_CASE("personas are assigned round-robin") {
  const std::vector<std::string> personas{"a", "b"};
  const auto pop = make_leader_population(OpinionGrid({2, 2}, OpinionValue(0.0)), personas);
  CHECK(pop.profiles[0].persona == "a");
  CHECK(pop.profiles[1].persona == "b");
  CHECK(pop.profiles[2].persona == "a");
  const std::vector<std::string> blank{""};
  CHECK_THROWS_AS(make_leader_population(OpinionGrid({2, 2}, OpinionValue(0.0)), blank), ConfigError);
}
