#pragma once

// Leader-side cellular automaton: thresholded pairwise influence and the
// synchronous retention-plus-influence grid update.

#include <span>
#include <vector>

#include "fdesim/core.hpp"

namespace fdesim {

enum class NeighborhoodKind { Moore8, VonNeumann4 };
enum class Boundary { Toroidal, Clamped };

struct Neighborhood {
  NeighborhoodKind kind = NeighborhoodKind::Moore8;
  Boundary boundary = Boundary::Toroidal;

  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

/// Distinct neighbor cells of `cell`, ascending, never including `cell`
/// itself. On small toroidal grids wrapped offsets that land on the same
/// cell are reported once, so a 1x1 grid has no neighbors.
std::vector<int> neighbor_cells(GridShape shape, int cell, Neighborhood nb);

/// Neighbor lists for every active cell of `grid`, with inert cells removed.
std::vector<std::vector<int>> neighbor_table(const OpinionGrid& grid, Neighborhood nb);

/// Influence of neighbor j on agent i:
///   O_j                          if r == 0
///   0                            if r == 1 or |O_j - O_i| > epsilon
///   (O_j - O_i) * sqrt(r |O_j|)  otherwise
double neighbor_influence(OpinionValue o_i, OpinionValue o_j, double r, double epsilon);

/// r * O_i + w * sum_j influence(O_i, O_j). Not clipped, and not divided by
/// the neighbor count.
double ca_update_cell(OpinionValue o_i, std::span<const OpinionValue> neighbors,
                      const SimulationParams& p);

/// One synchronous CA step over the whole grid. Every output cell is computed
/// from the input snapshot only. Inert cells stay at 0.
Grid<double> step_leader_grid(const OpinionGrid& grid, const SimulationParams& p, Neighborhood nb);

}  // namespace fdesim
