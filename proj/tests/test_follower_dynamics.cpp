#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdesim/follower_dynamics.hpp"
#include "oracles.hpp"

using namespace fdesim;

namespace {

SimulationParams params(GridShape leaders, double lambda, double gamma) {
  RawParams raw = default_raw_params(leaders);
  raw.lambda = lambda;
  raw.gamma = gamma;
  return validate_params(raw);
}

OpinionValue ov(double v) { return OpinionValue(v); }

}  // namespace

TEST_CASE("follower CA term") {
  RawParams raw;
  raw.r = 0.5;
  const auto p = validate_params(raw);
  CHECK(follower_ca_term(ov(0.0), std::vector<OpinionValue>{ov(0.4), ov(-0.4)}, p) == doctest::Approx(0.0));
  CHECK(follower_ca_term(ov(0.0), std::vector<OpinionValue>{ov(0.4)}, p) ==
        doctest::Approx(0.0536656315).epsilon(1e-10));
  CHECK(follower_ca_term(ov(0.3), {}, p) == 0.15);

  const SimulationParams defaults;
  CHECK(follower_ca_term(ov(0.6), std::vector<OpinionValue>(8, ov(0.6)), defaults) == doctest::Approx(0.594));
}

TEST_CASE("decay draw") {
  CHECK(sir_decay(1.0, 0.5, 0.9, 0.2) == doctest::Approx(0.6065306597).epsilon(1e-10));
  CHECK(sir_decay(0.7, 0.5, 0.9, 0.95) == 0.7);
  CHECK(sir_decay(0.0, 3.0, 1.0, 0.0) == 0.0);
  CHECK(sir_decay(-0.5, 0.5, 0.9, 0.9) == -0.5);
}

TEST_CASE("block coupling maps each 3x3 block to one leader") {
  const OpinionGrid leaders({2, 2}, ov(0.0));
  const OpinionGrid followers({6, 6}, ov(0.0));
  const auto c = block_coupling(followers, leaders);
  CHECK(c[followers.index(0, 0)] == std::vector<int>{0});
  CHECK(c[followers.index(2, 2)] == std::vector<int>{0});
  CHECK(c[followers.index(0, 3)] == std::vector<int>{1});
  CHECK(c[followers.index(5, 0)] == std::vector<int>{2});
  CHECK(c[followers.index(5, 5)] == std::vector<int>{3});

  const OpinionGrid partial({2, 2}, ov(0.0), 3);
  CHECK(block_coupling(followers, partial)[followers.index(5, 5)].size() == 1);
  CHECK(block_coupling(followers, partial)[followers.index(5, 5)][0] != 3);
}

TEST_CASE("fixed points and blocked influence") {
  const auto p = params({2, 2}, 0.5, 0.9);
  const KeyedRng rng(1);
  const OpinionGrid leaders0({2, 2}, ov(0.0));
  const auto zeros = make_follower_grid(OpinionGrid({6, 6}, ov(0.0)), leaders0);
  CHECK(step_followers(zeros, leaders0, p, {}, rng, 0) == zeros);

  const OpinionGrid leaders1({2, 2}, ov(1.0));
  const auto next = step_followers(zeros, leaders1, p, {}, rng, 0);
  for (int i = 0; i < 36; ++i) CHECK(next.opinions[i].value() == 0.0);
}

TEST_CASE("isolated follower with forced decay") {
  RawParams raw = default_raw_params({1, 1});
  raw.follower_grid = {1, 1};
  raw.enforce_ratio = false;
  raw.gamma = 1.0;
  const auto p = validate_params(raw);
  FollowerGrid f{OpinionGrid({1, 1}, ov(0.8)), {{}}};
  const auto next = step_followers(f, OpinionGrid({1, 1}, ov(0.0)), p, {}, KeyedRng(0), 0);
  // 0.792 * exp(-0.5 * 0.792)
  CHECK(next.opinions[0].value() == doctest::Approx(0.533021303).epsilon(1e-9));
  CHECK(next.opinions[0].value() == oracle::clip(oracle::decay(0.99 * 0.8, 0.5, 1.0, 0.0)));
}

TEST_CASE("grid step matches a per-cell recomputation") {
  const auto p = params({2, 2}, 0.5, 0.9);
  const KeyedRng rng(11);
  OpinionGrid leaders({2, 2}, ov(0.0));
  leaders[0] = ov(0.3);
  leaders[3] = ov(-0.45);
  OpinionGrid start({6, 6}, ov(0.0));
  for (int i = 0; i < 36; ++i) start[i] = ov(std::sin(i * 1.7) * 0.6);
  const auto f = make_follower_grid(start, leaders);
  const auto next = step_followers(f, leaders, p, {}, rng, 4);
  for (int i = 0; i < 36; ++i) {
    std::vector<double> nbrs;
    for (int j : neighbor_cells({6, 6}, i, {})) nbrs.push_back(start[j].value());
    for (int l : f.leader_coupling[i]) nbrs.push_back(leaders[l].value());
    const double v = oracle::follower_cell(start[i].value(), nbrs, 0.99, 0.3, 0.5);
    const double u = rng.uniform(Stream::FollowerDecay, i, 4);
    CHECK(next.opinions[i].value() == oracle::clip(oracle::decay(v, 0.5, 0.9, u)));
  }
}

TEST_CASE("mean attitude") {
  CHECK(mean_attitude(OpinionGrid({3, 3}, ov(0.3))).value() == doctest::Approx(0.3));
  OpinionGrid half({2, 2}, ov(1.0));
  half[2] = ov(-1.0);
  half[3] = ov(-1.0);
  CHECK(mean_attitude(half).value() == 0.0);
  OpinionGrid four({2, 2}, ov(0.0));
  four[0] = ov(0.2);
  four[1] = ov(0.4);
  four[2] = ov(0.6);
  four[3] = ov(0.8);
  CHECK(mean_attitude(four).value() == doctest::Approx(0.5));
  OpinionGrid partial({2, 2}, ov(0.4), 2);
  CHECK(mean_attitude(partial).value() == doctest::Approx(0.4));
  CHECK_THROWS_AS(mean_attitude(OpinionGrid({2, 2}, ov(0.0), 0)), DataError);
}
