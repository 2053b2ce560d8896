#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdesim/calibration.hpp"
#include "fdesim/metrics.hpp"
#include "fdesim/simulation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fdesim;

namespace {

AttitudeSeries s(std::vector<double> v) { return {std::move(v), "s"}; }

}  // namespace

TEST_CASE("correlation worked values") {
  CHECK(pearson(s({1, 2, 3}), s({1, 2, 4})) == doctest::Approx(9.0 / std::sqrt(84.0)).epsilon(1e-12));
  CHECK(pearson(s({0.1, 0.7, -0.3, 0.2}), s({0.1, 0.7, -0.3, 0.2})) == 1.0);
  CHECK(pearson(s({1, 2, 3}), s({-1, -2, -3})) == -1.0);
  CHECK_THROWS_AS(pearson(s({1, 1, 1}), s({1, 2, 3})), MetricError);
  CHECK_THROWS_AS(pearson(s({1, 2}), s({1, 2, 3})), MetricError);
  CHECK_THROWS_AS(pearson(s({1}), s({1})), MetricError);
}

TEST_CASE("correlation symmetry and affine invariance") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(8), b(8), a2(8);
    for (int i = 0; i < 8; ++i) {
      a[i] = d(gen);
      b[i] = d(gen);
      a2[i] = 3.0 * a[i] + 0.7;
    }
    CHECK(pearson(s(a), s(b)) == doctest::Approx(pearson(s(b), s(a))).epsilon(1e-12));
    CHECK(pearson(s(a2), s(b)) == doctest::Approx(pearson(s(a), s(b))).epsilon(1e-9));
    CHECK(pearson(s(a), s(b)) == doctest::Approx(oracle::pearson(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("dtw worked values") {
  CHECK(dtw(s({1, 2, 3}), s({1, 2, 3})) == 0.0);
  CHECK(dtw(s({1, 2, 3}), s({1, 2, 2, 3})) == 0.0);
  CHECK(dtw(s({0, 0}), s({1, 1})) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(dtw(s({}), s({1})), MetricError);
}

TEST_CASE("dtw properties") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 300; ++k) {
    std::vector<double> a(1 + k % 5), b(1 + (k / 5) % 5);
    for (auto& v : a) v = d(gen);
    for (auto& v : b) v = d(gen);
    const double ab = dtw(s(a), s(b));
    CHECK(ab >= 0.0);
    CHECK(ab == dtw(s(b), s(a)));
    CHECK(dtw(s(a), s(a)) == 0.0);
    CHECK(ab == oracle::dtw_brute(a, b));
    if (a.size() == b.size()) {
      double euclid = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) euclid += (a[i] - b[i]) * (a[i] - b[i]);
      CHECK(ab <= std::sqrt(euclid) + 1e-15);
    }
  }
}

TEST_CASE("daily downsampling") {
  Trajectory t;
  for (int i = 0; i < 50; ++i) t.push_back(OpinionValue(i < 24 ? 0.5 : (i < 48 ? -0.25 : 1.0)));
  const auto daily = downsample(t, 24);
  REQUIRE(daily.values.size() == 3);
  CHECK(daily.values[0] == doctest::Approx(0.5));
  CHECK(daily.values[1] == doctest::Approx(-0.25));
  CHECK(daily.values[2] == doctest::Approx(1.0));
  CHECK(downsample(Trajectory{}, 24).values.empty());
}

TEST_CASE("evaluate reports an undefined correlation instead of throwing") {
  const auto m = evaluate(s({0.2, 0.2, 0.2}), s({0.1, 0.3, 0.5}));
  CHECK_FALSE(m.pearson.has_value());
  CHECK_FALSE(m.pearson_error.empty());
  CHECK(m.dtw > 0.0);
}

TEST_CASE("objective names") {
  CHECK(parse_objective("max-corr") == Objective::MaxCorr);
  CHECK(parse_objective("min_dtw") == Objective::MinDtw);
  CHECK_THROWS_AS(parse_objective("best"), ConfigError);
}

TEST_CASE("grid search") {
  auto cfg = support::reversal(2, 96, 48, 3);
  const auto truth_run = run_model(cfg, ModelKind::FdeLlm);
  const auto reference = downsample(truth_run.trajectory, 12);
  cfg.rounds_per_day = 12;

  SUBCASE("singleton space") {
    const auto res = grid_search({{"w", {0.3}}}, cfg, reference, Objective::MinDtw, 2);
    CHECK(res.table.size() == 1);
    CHECK(res.best_score == 0.0);
    CHECK(res.best_params.w() == 0.3);
  }
  SUBCASE("order, dedup and ties") {
    const auto res = grid_search({{"w", {0.5, 0.3, 0.3}}, {"beta", {0.2, 0.1}}}, cfg, reference,
                                 Objective::MinDtw, 3);
    REQUIRE(res.names == std::vector<std::string>{"beta", "w"});
    REQUIRE(res.table.size() == 4);
    CHECK(res.table[0].point == std::vector<double>{0.1, 0.3});
    CHECK(res.table[1].point == std::vector<double>{0.1, 0.5});
    CHECK(res.table[2].point == std::vector<double>{0.2, 0.3});
    // beta does not enter any update, so both beta values tie; the first wins.
    CHECK(res.best_index == 0);
    CHECK(res.best_params.beta() == 0.1);
  }
  SUBCASE("failed points are recorded, not thrown") {
    const auto res = grid_search({{"r", {0.99, 1.5}}}, cfg, reference, Objective::MinDtw, 1);
    CHECK(res.table[1].score == std::nullopt);
    CHECK_FALSE(res.table[1].error.empty());
    CHECK(res.best_index == 0);
  }
  SUBCASE("bad spaces") {
    CHECK_THROWS_AS(grid_search({}, cfg, reference, Objective::MinDtw), ConfigError);
    CHECK_THROWS_AS(grid_search({{"seed", {1}}}, cfg, reference, Objective::MinDtw), ConfigError);
    CHECK_THROWS_AS(grid_search({{"w", {}}}, cfg, reference, Objective::MinDtw), ConfigError);
    CHECK_THROWS_AS(grid_search({{"r", {1.5}}}, cfg, reference, Objective::MinDtw), MetricError);
  }
  SUBCASE("score table") {
    const auto res = grid_search({{"w", {0.3, 0.4}}}, cfg, reference, Objective::MinDtw, 2);
    const auto dir = support::temp_dir("table");
    write_score_table(res, dir / "t.csv");
    const auto text = support::slurp(dir / "t.csv");
    CHECK(text.rfind("w,dtw,pearson,score,error\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    std::filesystem::remove_all(dir);
  }
}
