#include "mici/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mici/errors.hpp"

namespace mici {

namespace {

// (drow, dcol) per direction for even and odd rows of the odd-shifted layout.
constexpr std::array<std::array<int, 2>, kDirections> kEvenRowOffsets{{
    {0, -1},   // W
    {1, -1},   // SW
    {1, 0},    // SE
    {0, 1},    // E
    {-1, 0},   // NE
    {-1, -1},  // NW
}};
constexpr std::array<std::array<int, 2>, kDirections> kOddRowOffsets{{
    {0, -1},
    {1, 0},
    {1, 1},
    {0, 1},
    {-1, 1},
    {-1, 0},
}};

int reuse_pattern_label(int row, int col) {
  // odd-r offset -> axial
  const int q = col - (row - (row & 1)) / 2;
  const int label = (q + 3 * row) % 7;
  return label < 0 ? label + 7 : label;
}

}  // namespace

Topology build_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("grid needs at least one row and one column, got " + std::to_string(rows) +
                      "x" + std::to_string(cols));
  }
  Topology topo;
  topo.rows_ = rows;
  topo.cols_ = cols;
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  topo.by_direction_.assign(n, {});
  topo.ordered_.assign(n, {});
  topo.degree_.assign(n, 0);

  for (int r = 0; r < rows; ++r) {
    const auto& offsets = (r % 2 == 0) ? kEvenRowOffsets : kOddRowOffsets;
    for (int c = 0; c < cols; ++c) {
      const CellId self = topo.at(r, c);
      std::uint8_t degree = 0;
      for (int d = 0; d < kDirections; ++d) {
        const int nr = r + offsets[d][0];
        const int nc = c + offsets[d][1];
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
        const CellId other = topo.at(nr, nc);
        topo.by_direction_[self.index()][d] = other;
        topo.ordered_[self.index()][degree++] = other;
      }
      topo.degree_[self.index()] = degree;
    }
  }
  topo.groups_ = assign_channel_groups(topo, 7);
  return topo;
}

void Topology::check(CellId cell) const {
  if (!contains(cell)) {
    throw LookupError("cell " + std::to_string(cell.value) + " is outside the " +
                      std::to_string(rows_) + "x" + std::to_string(cols_) + " grid");
  }
}

std::span<const CellId> Topology::neighbors(CellId cell) const {
  check(cell);
  return {ordered_[cell.index()].data(), degree_[cell.index()]};
}

std::optional<CellId> Topology::neighbor(CellId cell, Direction dir) const {
  check(cell);
  const CellId other = by_direction_[cell.index()][static_cast<std::size_t>(dir)];
  if (!other.valid()) return std::nullopt;
  return other;
}

int Topology::cell_type(CellId cell) const {
  check(cell);
  const int type = kDirections - degree_[cell.index()];
  return type > 4 ? 4 : type;
}

int Topology::channel_group(CellId cell) const {
  check(cell);
  return groups_[cell.index()];
}

std::pair<int, int> Topology::position(CellId cell) const {
  check(cell);
  return {static_cast<int>(cell.index()) / cols_, static_cast<int>(cell.index()) % cols_};
}

bool is_reuse_series_member(int n) {
  if (n < 1) return false;
  for (int i = 0; i * i <= n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const int v = i * i + i * j + j * j;
      if (v == n) return true;
      if (v > n) break;
    }
  }
  return false;
}

ReuseParams reuse_factor(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("reuse_factor: sigma must be a positive finite ratio");
  }
  const double raw = sigma * sigma / 3.0;
  if (raw > static_cast<double>(std::numeric_limits<int>::max() / 2)) {
    throw DomainError("reuse_factor: sigma too large");
  }
  // Nearest member below (or 0 when none) and first member at or above raw.
  int below = 0;
  for (int n = static_cast<int>(std::floor(raw)); n >= 1; --n) {
    if (is_reuse_series_member(n)) {
      below = n;
      break;
    }
  }
  int above = std::max(1, static_cast<int>(std::ceil(raw)));
  while (!is_reuse_series_member(above)) ++above;

  int chosen = above;
  if (below > 0 && static_cast<double>(below) == raw) {
    chosen = below;
  } else if (below > 0 && raw - below < above - raw) {
    chosen = below;
  }
  return ReuseParams{sigma, chosen};
}

std::vector<int> assign_channel_groups(const Topology& topo, int n_groups) {
  if (n_groups < 1) throw LabelingError("need at least one channel group");
  std::vector<int> labels(static_cast<std::size_t>(topo.cell_count()));
  for (int r = 0; r < topo.rows(); ++r) {
    for (int c = 0; c < topo.cols(); ++c) {
      labels[topo.at(r, c).index()] = reuse_pattern_label(r, c) % n_groups;
    }
  }
  for (int i = 0; i < topo.cell_count(); ++i) {
    const CellId cell = CellId::from_index(static_cast<std::size_t>(i));
    for (CellId other : topo.neighbors(cell)) {
      if (labels[cell.index()] == labels[other.index()]) {
        throw LabelingError("cells " + std::to_string(cell.value) + " and " +
                            std::to_string(other.value) + " are adjacent but share group " +
                            std::to_string(labels[cell.index()]) + " with " +
                            std::to_string(n_groups) + " groups");
      }
    }
  }
  return labels;
}

}  // namespace mici
