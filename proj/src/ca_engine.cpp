#include "fdesim/ca_engine.hpp"

#include <algorithm>
#include <cmath>

namespace fdesim {

namespace {

constexpr int kMoore[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
constexpr int kVonNeumann[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};

int wrap(int v, int n) { return ((v % n) + n) % n; }

}  // namespace

std::vector<int> neighbor_cells(GridShape shape, int cell, Neighborhood nb) {
  const int row = cell / shape.cols;
  const int col = cell % shape.cols;
  std::span<const int[2]> offsets =
      nb.kind == NeighborhoodKind::Moore8 ? std::span<const int[2]>(kMoore) : std::span<const int[2]>(kVonNeumann);

  std::vector<int> out;
  out.reserve(offsets.size());
  for (const auto& d : offsets) {
    int r = row + d[0];
    int c = col + d[1];
    if (nb.boundary == Boundary::Toroidal) {
      r = wrap(r, shape.rows);
      c = wrap(c, shape.cols);
    } else if (r < 0 || r >= shape.rows || c < 0 || c >= shape.cols) {
      continue;
    }
    const int idx = r * shape.cols + c;
    if (idx != cell) out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<int>> neighbor_table(const OpinionGrid& grid, Neighborhood nb) {
  std::vector<std::vector<int>> table(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.active(i)) continue;
    auto cells = neighbor_cells(grid.shape(), i, nb);
    std::erase_if(cells, [&](int j) { return !grid.active(j); });
    table[static_cast<std::size_t>(i)] = std::move(cells);
  }
  return table;
}

double neighbor_influence(OpinionValue o_i, OpinionValue o_j, double r, double epsilon) {
  const double oi = o_i.value();
  const double oj = o_j.value();
  if (r == 0.0) return oj;
  const double delta = oj - oi;
  if (r == 1.0 || std::abs(delta) > epsilon) return 0.0;
  return delta * std::sqrt(r * std::abs(oj));
}

double ca_update_cell(OpinionValue o_i, std::span<const OpinionValue> neighbors,
                      const SimulationParams& p) {
  double sum = 0.0;
  for (OpinionValue o_j : neighbors) sum += neighbor_influence(o_i, o_j, p.r(), p.epsilon());
  return p.r() * o_i.value() + p.w() * sum;
}

Grid<double> step_leader_grid(const OpinionGrid& grid, const SimulationParams& p, Neighborhood nb) {
  Grid<double> out = grid.with_same_mask(0.0);
  const auto table = neighbor_table(grid, nb);
  std::vector<OpinionValue> neighbors;
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.active(i)) continue;
    neighbors.clear();
    for (int j : table[static_cast<std::size_t>(i)]) neighbors.push_back(grid[j]);
    out[i] = ca_update_cell(grid[i], neighbors, p);
  }
  return out;
}

}  // namespace fdesim
