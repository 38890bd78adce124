#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mici {

/// 1-based cell number, counted left-to-right, top-to-bottom.
/// A default-constructed id (value 0) marks "no cell".
struct CellId {
  int value = 0;

  constexpr bool valid() const noexcept { return value > 0; }
  constexpr std::size_t index() const noexcept { return static_cast<std::size_t>(value - 1); }
  static constexpr CellId from_index(std::size_t i) noexcept { return CellId{static_cast<int>(i) + 1}; }

  friend constexpr auto operator<=>(CellId, CellId) = default;
};

/// Hex directions in lookup-table order: anticlockwise starting from the left.
enum class Direction : std::uint8_t { kW = 0, kSW, kSE, kE, kNE, kNW };
inline constexpr int kDirections = 6;

/// Rectangular grid of hexagonal cells in offset layout (odd rows shifted right
/// by half a cell), with the per-cell neighbor lookup table, cell types and
/// channel groups. Immutable after construction.
class Topology {
 public:
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int cell_count() const noexcept { return rows_ * cols_; }

  bool contains(CellId cell) const noexcept { return cell.valid() && cell.value <= cell_count(); }

  /// Neighbors ordered W, SW, SE, E, NE, NW with absent directions skipped.
  std::span<const CellId> neighbors(CellId cell) const;

  /// Neighbor in a fixed direction, or nullopt at the grid border.
  std::optional<CellId> neighbor(CellId cell, Direction dir) const;

  int degree(CellId cell) const { return static_cast<int>(neighbors(cell).size()); }

  /// 6 − degree, clamped to 4 for degenerate (single-row / single-column) grids.
  int cell_type(CellId cell) const;

  /// Reuse-7 group label of the cell (0..6).
  int channel_group(CellId cell) const;

  std::span<const int> channel_groups() const noexcept { return groups_; }

  /// (row, col) of a cell, both 0-based.
  std::pair<int, int> position(CellId cell) const;
  CellId at(int row, int col) const noexcept { return CellId{row * cols_ + col + 1}; }

 private:
  friend Topology build_grid(int rows, int cols);

  void check(CellId cell) const;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::array<CellId, kDirections>> by_direction_;
  std::vector<std::array<CellId, kDirections>> ordered_;
  std::vector<std::uint8_t> degree_;
  std::vector<int> groups_;
};

/// Builds the grid and its lookup table. Throws ConfigError on zero rows/cols.
Topology build_grid(int rows, int cols);

/// Free-function form of Topology::cell_type.
inline int cell_type(const Topology& topo, CellId cell) { return topo.cell_type(cell); }

/// Frequency-reuse parameters: sigma = D / Rc and the cluster size N.
struct ReuseParams {
  double sigma = 0.0;
  int reuse_n = 0;
};

/// True when n = i² + ij + j² for some integers i, j ≥ 0 (n ≥ 1).
bool is_reuse_series_member(int n);

/// Nearest series member to sigma² / 3, ties resolved upward.
/// Throws DomainError for sigma ≤ 0 or a non-finite sigma.
ReuseParams reuse_factor(double sigma);

/// Deterministic reuse-7 labeling: group = (q + 3r) mod 7 in axial
/// coordinates, folded modulo n_groups when fewer groups are requested.
/// Throws LabelingError naming a conflicting edge when adjacent cells collide.
std::vector<int> assign_channel_groups(const Topology& topo, int n_groups);

}  // namespace mici
