#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mici/allocators.hpp"
#include "mici/cell_state.hpp"
#include "mici/rng.hpp"
#include "mici/topology.hpp"
#include "mici/vga.hpp"

namespace mici {

/// Per-cell host counts, indexed by CellId::index().
using Placement = std::vector<int>;

enum class MobilityKind {
  /// Each host draws one of seven equally likely outcomes: stay, or step in
  /// one of the six hex directions. A step off the grid keeps the host in
  /// place, so no host leaves the region.
  kClosedRegion,
  /// Each host draws uniformly from its own cell and the cell's neighbors.
  kNeighborUniform,
};

struct MobilityModel {
  MobilityKind kind = MobilityKind::kClosedRegion;
  /// When set, a host stays with this probability and otherwise moves as the
  /// model prescribes for a non-staying host.
  std::optional<double> stay_probability;
};

struct SimConfig {
  int rows = 5;
  int cols = 5;
  int channels_per_cell = 10;
  int iterations = 20;
  int runs = 10;
  int hosts = 200;
  Allocator allocator = Allocator::kVga;
  std::uint64_t rng_seed = 1;
  Weights weights;
  VgaConfig vga;
  MobilityModel mobility;

  int cell_count() const noexcept { return rows * cols; }
  int max_supported_hosts() const noexcept { return cell_count() * channels_per_cell; }
};

/// Throws ConfigError naming the first invalid field.
void validate(const SimConfig& config);

/// Uniform start: floor(hosts / cells) per cell, one extra host for each of
/// the first (hosts mod cells) cells. Throws ConfigError when hosts exceeds
/// cells · capacity.
Placement init_hosts(int cell_count, int hosts, int channels_per_cell);
inline Placement init_hosts(const SimConfig& config) {
  return init_hosts(config.cell_count(), config.hosts, config.channels_per_cell);
}

/// One mobility step. Hosts are processed cell-ascending; every host draws
/// independently from `rng`. The total host count is preserved.
Placement step_mobility(const Placement& placement, const Topology& topo, Rng& rng,
                        const MobilityModel& model = {});

/// Live per-iteration state of one run.
struct Network {
  std::vector<CellState> cells;
  BorrowLedger ledger;

  Network(int cell_count, int channels_per_cell);
  void set_hosts(const Placement& placement);
  std::span<CellState> states() noexcept { return cells; }
  std::span<const CellState> states() const noexcept { return cells; }
};

struct IterationRecord {
  int blocked = 0;
  int hot_cells = 0;
  int borrow_requests = 0;
  int channels_borrowed = 0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Settles one iteration. FCA: blocked = max(0, hosts − capacity). SB/VGA:
/// hot cells in ascending id each build a request against live state and
/// apply the resulting plan before the next hot cell is considered.
/// Precondition: no borrows outstanding (ContractViolation otherwise).
IterationRecord settle_allocation(Network& net, Allocator allocator, const Topology& topo,
                                  const Weights& weights, const VgaConfig& vga, Rng& rng);

/// Returns every borrowed channel to its lender.
void release_borrows(Network& net);

/// Per-run and run-averaged results of one (allocator, host count) cell.
struct RunMetrics {
  Allocator allocator = Allocator::kFca;
  int hosts = 0;
  /// per_run[run][iteration]
  std::vector<std::vector<IterationRecord>> per_run;
  /// Per-iteration values averaged across runs.
  std::vector<double> mean_blocked;
  std::vector<double> mean_hot_cells;
  double avg_blocked = 0.0;
  double avg_hot_cells = 0.0;
  /// avg_blocked / hosts × 100 (0 when hosts = 0).
  double blocking_pct = 0.0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Snapshot passed to an observer after each settle.
struct IterationView {
  int run = 0;
  int iteration = 0;
  const Network& network;
  const IterationRecord& record;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// For each run: place hosts, then `iterations` rounds of release → move →
/// settle → record. Run r draws mobility and solver randomness from
/// independent streams derived from (rng_seed, r), so every allocator sees
/// the same host movement for the same seed.
RunMetrics run_simulation(const SimConfig& config, const IterationObserver& observer = {});

/// Recomputes the averaged fields of `metrics` from `per_run`.
void summarize(RunMetrics& metrics);

}  // namespace mici
