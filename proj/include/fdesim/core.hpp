#pragma once

// Shared domain types: opinions, attitudes, grids, parameters, news
// timelines and trajectories.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdesim/errors.hpp"

namespace fdesim {

/// A real attitude score confined to [-1, 1].
class OpinionValue {
 public:
  constexpr OpinionValue() noexcept = default;

  /// Throws DataError when `v` is outside [-1, 1] or not finite.
  explicit OpinionValue(double v);

  double value() const noexcept { return value_; }

  friend bool operator==(OpinionValue, OpinionValue) = default;

 private:
  double value_ = 0.0;
};

/// min(max(v, -1), 1). Throws DataError on NaN or infinity.
OpinionValue clip(double v);

/// Oracle-level attitude: support, neutrality or opposition.
enum class DiscreteAttitude : int { Oppose = -1, Neutral = 0, Support = 1 };

/// Throws ConfigError unless `level` is -1, 0 or 1.
DiscreteAttitude attitude_from_int(long long level);

constexpr int to_int(DiscreteAttitude a) noexcept { return static_cast<int>(a); }
constexpr double to_real(DiscreteAttitude a) noexcept { return static_cast<double>(a); }

/// "+1", "0" or "-1".
std::string to_string(DiscreteAttitude a);

struct GridShape {
  int rows = 0;
  int cols = 0;

  int cells() const noexcept { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Row-major 2-D array. Cells past the active count are inert padding: they
/// hold a fixed value and are skipped by neighbor sums and statistics.
template <class T>
class Grid {
 public:
  Grid() = default;

  explicit Grid(GridShape shape, T fill = T{})
      : Grid(shape, fill, shape.cells()) {}

  Grid(GridShape shape, T fill, int active_count)
      : shape_(shape),
        cells_(static_cast<std::size_t>(shape.cells()), fill),
        active_(static_cast<std::size_t>(shape.cells()), 0) {
    if (shape.rows <= 0 || shape.cols <= 0) throw ConfigError("grid shape must be positive");
    if (active_count < 0 || active_count > shape.cells())
      throw ConfigError("active cell count exceeds grid size");
    for (int i = 0; i < active_count; ++i) active_[static_cast<std::size_t>(i)] = 1;
  }

  /// Same shape and inert mask, different payload.
  template <class U>
  Grid<U> with_same_mask(U fill) const {
    Grid<U> out(shape_, fill, active_count());
    return out;
  }

  GridShape shape() const noexcept { return shape_; }
  int size() const noexcept { return static_cast<int>(cells_.size()); }
  int index(int row, int col) const noexcept { return row * shape_.cols + col; }

  T& operator[](int cell) { return cells_[static_cast<std::size_t>(cell)]; }
  const T& operator[](int cell) const { return cells_[static_cast<std::size_t>(cell)]; }
  T& at(int row, int col) { return (*this)[index(row, col)]; }
  const T& at(int row, int col) const { return (*this)[index(row, col)]; }

  bool active(int cell) const { return active_[static_cast<std::size_t>(cell)] != 0; }
  int active_count() const noexcept {
    int n = 0;
    for (auto a : active_) n += a;
    return n;
  }

  std::span<const T> cells() const& noexcept { return cells_; }
  std::span<const T> cells() const&& = delete;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  GridShape shape_;
  std::vector<T> cells_;
  std::vector<std::uint8_t> active_;
};

using OpinionGrid = Grid<OpinionValue>;

/// Unvalidated parameter set. Defaults are the published calibration
/// (r, w, epsilon, lambda, gamma, beta) with a 10x10 : 30x30 leader/follower
/// layout, which gives the 1:9 ratio.
struct RawParams {
  double r = 0.99;
  double w = 0.3;
  double epsilon = 0.5;
  double alpha = 0.5;
  double lambda = 0.5;
  double gamma = 0.9;
  double beta = 0.3;  // infection rate; recorded, not used by any update rule
  GridShape leader_grid{10, 10};
  GridShape follower_grid{30, 30};
  std::optional<int> leader_agents;    // defaults to every cell
  std::optional<int> follower_agents;  // defaults to every cell
  std::uint64_t seed = 0;
  int rounds = 1;
  double init_noise = 0.1;     // followers start at follower_init +- U(init_noise)
  double follower_init = 0.0;
  bool enforce_ratio = true;   // require followers == 9 * leaders
};

/// Validated, immutable parameter set. Only obtainable from validate_params
/// (or the default constructor, which holds the validated defaults).
class SimulationParams {
 public:
  SimulationParams();

  double r() const noexcept { return raw_.r; }
  double w() const noexcept { return raw_.w; }
  double epsilon() const noexcept { return raw_.epsilon; }
  double alpha() const noexcept { return raw_.alpha; }
  double lambda() const noexcept { return raw_.lambda; }
  double gamma() const noexcept { return raw_.gamma; }
  double beta() const noexcept { return raw_.beta; }
  GridShape leader_grid() const noexcept { return raw_.leader_grid; }
  GridShape follower_grid() const noexcept { return raw_.follower_grid; }
  int leader_agents() const noexcept { return *raw_.leader_agents; }
  int follower_agents() const noexcept { return *raw_.follower_agents; }
  std::uint64_t seed() const noexcept { return raw_.seed; }
  int rounds() const noexcept { return raw_.rounds; }
  double init_noise() const noexcept { return raw_.init_noise; }
  double follower_init() const noexcept { return raw_.follower_init; }
  bool enforce_ratio() const noexcept { return raw_.enforce_ratio; }

  /// Copy of the underlying values, for building a modified parameter set.
  const RawParams& raw() const noexcept { return raw_; }

 private:
  friend SimulationParams validate_params(const RawParams& raw);
  explicit SimulationParams(const RawParams& raw) : raw_(raw) {}

  RawParams raw_;
};

/// Checks every range constraint and reports all violations by field name.
/// Throws ParamError.
SimulationParams validate_params(const RawParams& raw);

/// Default scenario layout: follower grid three times the leader grid along
/// each side, so every 3x3 follower block sits under exactly one leader.
RawParams default_raw_params(GridShape leaders = {10, 10});

struct NewsEvent {
  int round = 0;
  DiscreteAttitude stance = DiscreteAttitude::Neutral;
  std::string text;
};

/// Scheduled offline news. Rounds strictly increase and the first event is
/// at round 0.
class NewsTimeline {
 public:
  /// A single neutral event at round 0.
  NewsTimeline();
  explicit NewsTimeline(std::vector<NewsEvent> events);

  const NewsEvent* event_at(int round) const noexcept;
  /// Last event with `event.round <= round`.
  const NewsEvent& latest_at(int round) const;
  DiscreteAttitude initial_stance() const noexcept { return events_.front().stance; }
  std::span<const NewsEvent> events() const noexcept { return events_; }

 private:
  std::vector<NewsEvent> events_;
};

struct TrajectoryPoint {
  int round = 0;
  OpinionValue mean_attitude;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

/// Per-round mean follower attitude, contiguous from round 0.
class Trajectory {
 public:
  void push_back(OpinionValue mean) {
    points_.push_back({static_cast<int>(points_.size()), mean});
  }
  std::span<const TrajectoryPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::vector<double> values() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<TrajectoryPoint> points_;
};

struct Population {
  OpinionGrid leaders;
  OpinionGrid followers;
};

/// Leaders start at the round-0 news stance; followers at
/// follower_init + U(-init_noise, init_noise), clipped. Pure in (params, stance).
Population init_population(const SimulationParams& p, DiscreteAttitude initial_stance);

}  // namespace fdesim
