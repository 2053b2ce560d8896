#include "fdesim/follower_dynamics.hpp"

#include <cmath>
#include <limits>

namespace fdesim {

std::vector<std::vector<int>> block_coupling(const OpinionGrid& followers, const OpinionGrid& leaders) {
  const GridShape fs = followers.shape();
  const GridShape ls = leaders.shape();
  std::vector<std::vector<int>> coupling(static_cast<std::size_t>(followers.size()));
  if (leaders.active_count() == 0) return coupling;

  for (int i = 0; i < followers.size(); ++i) {
    if (!followers.active(i)) continue;
    const int lr = (i / fs.cols) * ls.rows / fs.rows;
    const int lc = (i % fs.cols) * ls.cols / fs.cols;
    int target = leaders.index(lr, lc);
    if (!leaders.active(target)) {
      int best = std::numeric_limits<int>::max();
      for (int j = 0; j < leaders.size(); ++j) {
        if (!leaders.active(j)) continue;
        const int d = std::max(std::abs(j / ls.cols - lr), std::abs(j % ls.cols - lc));
        if (d < best) {
          best = d;
          target = j;
        }
      }
    }
    coupling[static_cast<std::size_t>(i)] = {target};
  }
  return coupling;
}

FollowerGrid make_follower_grid(OpinionGrid opinions, const OpinionGrid& leaders) {
  auto coupling = block_coupling(opinions, leaders);
  return {std::move(opinions), std::move(coupling)};
}

double follower_ca_term(OpinionValue o_i, std::span<const OpinionValue> neighbors, const SimulationParams& p) {
  const double oi = o_i.value();
  const double retained = p.r() * oi;
  if (neighbors.empty()) return retained;
  // No r == 0 / r == 1 special cases here, unlike the leader rule.
  double sum = 0.0;
  for (OpinionValue o_j : neighbors) {
    const double oj = o_j.value();
    const double delta = oj - oi;
    if (std::abs(delta) <= p.epsilon()) sum += delta * std::sqrt(p.r() * std::abs(oj));
  }
  return retained + p.w() * sum / static_cast<double>(neighbors.size());
}

double sir_decay(double v, double lambda, double gamma, double u) {
  if (u < gamma) return v * std::exp(-lambda * std::abs(v));
  return v;
}

FollowerGrid step_followers(const FollowerGrid& fgrid, const OpinionGrid& leaders, const SimulationParams& p,
                            Neighborhood nb, const KeyedRng& rng, int round) {
  const OpinionGrid& current = fgrid.opinions;
  FollowerGrid next = fgrid;
  const auto table = neighbor_table(current, nb);
  std::vector<OpinionValue> neighbors;
  for (int i = 0; i < current.size(); ++i) {
    if (!current.active(i)) continue;
    neighbors.clear();
    for (int j : table[static_cast<std::size_t>(i)]) neighbors.push_back(current[j]);
    if (static_cast<std::size_t>(i) < fgrid.leader_coupling.size()) {
      for (int l : fgrid.leader_coupling[static_cast<std::size_t>(i)]) neighbors.push_back(leaders[l]);
    }
    const double v = follower_ca_term(current[i], neighbors, p);
    const double u = rng.uniform(Stream::FollowerDecay, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(round));
    next.opinions[i] = clip(sir_decay(v, p.lambda(), p.gamma(), u));
  }
  return next;
}

OpinionValue mean_attitude(const OpinionGrid& grid) {
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.active(i)) continue;
    sum += grid[i].value();
    ++n;
  }
  if (n == 0) throw DataError("mean attitude of a grid with no active followers");
  return clip(sum / n);
}

}  // namespace fdesim
