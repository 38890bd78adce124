#include "mici/allocators.hpp"

#include <atomic>
#include <numeric>
#include <string>

#include "mici/errors.hpp"

namespace mici {

namespace {

std::uint64_t next_serial() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

std::string cell_str(CellId c) { return "cell " + std::to_string(c.value); }

}  // namespace

std::string_view to_string(Allocator a) noexcept {
  switch (a) {
    case Allocator::kFca:
      return "fca";
    case Allocator::kSb:
      return "sb";
    case Allocator::kVga:
      return "vga";
  }
  return "?";
}

Allocator parse_allocator(std::string_view token) {
  if (token == "fca") return Allocator::kFca;
  if (token == "sb") return Allocator::kSb;
  if (token == "vga") return Allocator::kVga;
  throw ConfigError("unknown allocator '" + std::string(token) + "' (expected fca|sb|vga)");
}

int BorrowRequest::total_free() const noexcept {
  int total = 0;
  for (int j = 0; j < lender_count; ++j) total += lenders[j].free;
  return total;
}

BorrowPlan make_plan(const BorrowRequest& request, std::span<const int> lent) {
  if (static_cast<int>(lent.size()) > kMaxLenders) {
    throw ContractViolation("plan has more than six lenders");
  }
  BorrowPlan plan;
  plan.requester = request.requester;
  for (int j = 0; j < kMaxLenders; ++j) {
    const int amount = j < static_cast<int>(lent.size()) ? lent[j] : 0;
    const LenderInfo& lender = request.lenders[j];
    if (amount < 0 || amount > lender.free || (lender.padding() && amount != 0)) {
      throw ContractViolation("lender slot " + std::to_string(j) + " cannot lend " +
                              std::to_string(amount));
    }
    plan.lenders[j] = lender.cell;
    plan.lent[j] = amount;
    plan.total_lent += amount;
  }
  if (plan.total_lent > request.need) {
    throw ContractViolation("plan lends " + std::to_string(plan.total_lent) + " but only " +
                            std::to_string(request.need) + " were requested");
  }
  plan.residual_blocked = request.need - plan.total_lent;
  plan.serial = next_serial();
  return plan;
}

BorrowPlan empty_plan(const BorrowRequest& request) { return make_plan(request, {}); }

BorrowRequest make_request(std::span<const CellState> states, const Topology& topo, CellId cell) {
  if (!topo.contains(cell)) throw LookupError(cell_str(cell) + " is not in the grid");
  const CellState& self = states[cell.index()];
  if (!self.hot()) throw ContractViolation(cell_str(cell) + " is not hot; request refused");

  BorrowRequest req;
  req.requester = cell;
  req.need = self.blocked;
  req.requester_free = self.free_channels();
  req.requester_hosts = self.hosts;
  req.requester_type = topo.cell_type(cell);
  for (CellId other : topo.neighbors(cell)) {
    const CellState& s = states[other.index()];
    req.lenders[req.lender_count++] =
        LenderInfo{other, s.free_channels(), s.blocked, s.hosts, topo.cell_type(other)};
  }
  return req;
}

BorrowPlan greedy_borrow(const BorrowRequest& request) {
  std::array<int, kMaxLenders> remaining{};
  std::array<int, kMaxLenders> lent{};
  for (int j = 0; j < request.lender_count; ++j) remaining[j] = request.lenders[j].free;

  for (int need = request.need; need > 0; --need) {
    int best = -1;
    for (int j = 0; j < request.lender_count; ++j) {
      if (remaining[j] == 0) continue;
      if (best < 0 || remaining[j] > remaining[best] ||
          (remaining[j] == remaining[best] &&
           request.lenders[j].cell < request.lenders[best].cell)) {
        best = j;
      }
    }
    if (best < 0) break;
    --remaining[best];
    ++lent[best];
  }
  return make_plan(request, lent);
}

void BorrowLedger::apply(std::span<CellState> states, const BorrowPlan& plan) {
  if (plan.total_lent == 0) return;
  if (applied_.contains(plan.serial)) {
    throw ContractViolation("plan " + std::to_string(plan.serial) + " was already applied");
  }
  for (int j = 0; j < kMaxLenders; ++j) {
    if (plan.lent[j] == 0) continue;
    const CellState& lender = states[plan.lenders[j].index()];
    if (lender.free_channels() < plan.lent[j]) {
      throw FeasibilityError(cell_str(plan.lenders[j]) + " has " +
                             std::to_string(lender.free_channels()) + " free channels, plan needs " +
                             std::to_string(plan.lent[j]));
    }
  }
  CellState& borrower = states[plan.requester.index()];
  if (borrower.blocked < plan.total_lent) {
    throw FeasibilityError(cell_str(plan.requester) + " needs only " +
                           std::to_string(borrower.blocked) + " channels");
  }

  for (int j = 0; j < kMaxLenders; ++j) {
    if (plan.lent[j] == 0) continue;
    states[plan.lenders[j].index()].lent_out += plan.lent[j];
    transfers_.push_back(Transfer{plan.lenders[j], plan.requester, plan.lent[j]});
  }
  borrower.borrowed_in += plan.total_lent;
  borrower.blocked -= plan.total_lent;
  applied_.insert(plan.serial);
}

void BorrowLedger::release(std::span<CellState> states) {
  std::vector<int> lent(states.size(), 0);
  std::vector<int> borrowed(states.size(), 0);
  for (const Transfer& t : transfers_) {
    lent[t.lender.index()] += t.channels;
    borrowed[t.borrower.index()] += t.channels;
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].lent_out != lent[i] || states[i].borrowed_in != borrowed[i]) {
      throw InvariantViolation(cell_str(CellId::from_index(i)) + " ledger mismatch: state lent " +
                               std::to_string(states[i].lent_out) + "/borrowed " +
                               std::to_string(states[i].borrowed_in) + ", ledger lent " +
                               std::to_string(lent[i]) + "/borrowed " + std::to_string(borrowed[i]));
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    states[i].blocked += states[i].borrowed_in;
    states[i].lent_out = 0;
    states[i].borrowed_in = 0;
  }
  transfers_.clear();
}

int BorrowLedger::total_lent() const noexcept {
  return std::accumulate(transfers_.begin(), transfers_.end(), 0,
                         [](int acc, const Transfer& t) { return acc + t.channels; });
}

}  // namespace mici
