#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mici/cell_state.hpp"
#include "mici/topology.hpp"

namespace mici {

inline constexpr int kMaxLenders = 6;

enum class Allocator { kFca, kSb, kVga };

std::string_view to_string(Allocator a) noexcept;
/// Parses "fca" | "sb" | "vga". Throws ConfigError otherwise.
Allocator parse_allocator(std::string_view token);

/// Snapshot of one neighbor as seen by a requesting cell.
struct LenderInfo {
  CellId cell;  // invalid for padding
  int free = 0;
  int blocked = 0;
  int hosts = 0;
  int type = 0;

  bool padding() const noexcept { return !cell.valid(); }
  friend bool operator==(const LenderInfo&, const LenderInfo&) = default;
};

/// A hot cell's request to its neighbors, lenders in lookup-table order and
/// padded to six entries.
struct BorrowRequest {
  CellId requester;
  int need = 0;
  int requester_free = 0;
  int requester_hosts = 0;
  int requester_type = 0;
  std::array<LenderInfo, kMaxLenders> lenders{};
  int lender_count = 0;

  int total_free() const noexcept;
};

/// Channels each lender hands to the requester.
struct BorrowPlan {
  CellId requester;
  std::array<CellId, kMaxLenders> lenders{};
  std::array<int, kMaxLenders> lent{};
  int total_lent = 0;
  int residual_blocked = 0;
  /// Unique per constructed plan; lets the ledger refuse a second apply.
  std::uint64_t serial = 0;
};

/// Builds a plan from per-lender amounts and assigns a fresh serial.
/// Throws ContractViolation when the amounts break the plan invariants.
BorrowPlan make_plan(const BorrowRequest& request, std::span<const int> lent);

/// Plan that lends nothing.
BorrowPlan empty_plan(const BorrowRequest& request);

/// Request for `cell` against live state. Throws ContractViolation if the
/// cell is not hot.
BorrowRequest make_request(std::span<const CellState> states, const Topology& topo, CellId cell);

/// Unmet demand under fixed allocation.
constexpr int fca_blocked(int hosts, int capacity) noexcept {
  return hosts > capacity ? hosts - capacity : 0;
}

/// Greedy "Simple Borrowing": one channel at a time from the neighbor with
/// the most free channels, ties to the lowest cell id, until the need is met
/// or every neighbor is dry.
BorrowPlan greedy_borrow(const BorrowRequest& request);

/// Record of applied plans so they can be reverted at the next iteration.
class BorrowLedger {
 public:
  struct Transfer {
    CellId lender;
    CellId borrower;
    int channels = 0;
  };

  /// Applies `plan` to `states`. Re-validates every lender against live
  /// state (FeasibilityError when stale) and refuses a plan already applied
  /// (ContractViolation).
  void apply(std::span<CellState> states, const BorrowPlan& plan);

  /// Reverts every recorded transfer. Throws InvariantViolation when the
  /// ledger and the cell states disagree.
  void release(std::span<CellState> states);

  std::span<const Transfer> transfers() const noexcept { return transfers_; }
  bool empty() const noexcept { return transfers_.empty(); }
  int total_lent() const noexcept;

 private:
  std::vector<Transfer> transfers_;
  std::unordered_set<std::uint64_t> applied_;
};

/// Free-function form of BorrowLedger::apply.
inline void apply_plan(std::span<CellState> states, BorrowLedger& ledger, const BorrowPlan& plan) {
  ledger.apply(states, plan);
}

}  // namespace mici
