#pragma once

#include <algorithm>

namespace mici {

/// Channel accounting for one cell during one iteration.
struct CellState {
  int owned_capacity = 0;
  int lent_out = 0;
  int borrowed_in = 0;
  int hosts = 0;
  int blocked = 0;

  int available() const noexcept { return owned_capacity - lent_out + borrowed_in; }
  int free_channels() const noexcept { return std::max(0, available() - hosts); }
  int unmet_demand() const noexcept { return std::max(0, hosts - available()); }
  /// Unmet demand and nothing left to hand out.
  bool hot() const noexcept { return blocked > 0; }

  friend bool operator==(const CellState&, const CellState&) = default;
};

}  // namespace mici
