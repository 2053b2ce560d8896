#pragma once

// Opinion followers: neighbor-averaged CA term with leader coupling, followed
// by a probabilistic decay toward neutrality.

#include <span>
#include <vector>

#include "fdesim/ca_engine.hpp"
#include "fdesim/core.hpp"
#include "fdesim/rng.hpp"

namespace fdesim {

struct FollowerGrid {
  OpinionGrid opinions;
  /// Leader cells each follower observes, indexed by follower cell.
  std::vector<std::vector<int>> leader_coupling;

  friend bool operator==(const FollowerGrid&, const FollowerGrid&) = default;
};

/// Each follower observes the leader whose cell covers the same relative
/// position; with a follower grid 3x the leader grid per side that is one
/// leader per 3x3 follower block. If that leader cell is inert the nearest
/// active leader (Chebyshev distance, then lowest index) is used instead.
std::vector<std::vector<int>> block_coupling(const OpinionGrid& followers, const OpinionGrid& leaders);

FollowerGrid make_follower_grid(OpinionGrid opinions, const OpinionGrid& leaders);

/// r * O_i + w * (sum_j (O_j - O_i) sqrt(r |O_j|) [|O_j - O_i| <= eps]) / |N_i|.
/// An empty neighbor list gives r * O_i.
double follower_ca_term(OpinionValue o_i, std::span<const OpinionValue> neighbors, const SimulationParams& p);

/// v * exp(-lambda |v|) when u < gamma, v otherwise.
double sir_decay(double v, double lambda, double gamma, double u);

/// Synchronous follower round. N_i is the follower's grid neighbors plus its
/// coupled leaders; leaders are read-only. The decay draw for follower i at
/// this round comes from the (i, round) stream of `rng`.
FollowerGrid step_followers(const FollowerGrid& fgrid, const OpinionGrid& leaders, const SimulationParams& p,
                            Neighborhood nb, const KeyedRng& rng, int round);

/// Mean over active followers. Throws DataError if none are active.
OpinionValue mean_attitude(const OpinionGrid& grid);
inline OpinionValue mean_attitude(const FollowerGrid& fgrid) { return mean_attitude(fgrid.opinions); }

}  // namespace fdesim
