#include "mici/simcore.hpp"

#include <numeric>
#include <string>

#include "mici/errors.hpp"

namespace mici {

void validate(const SimConfig& c) {
  const auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (c.rows < 1) fail("rows must be >= 1");
  if (c.cols < 1) fail("cols must be >= 1");
  if (c.channels_per_cell < 0) fail("channels_per_cell must be >= 0");
  if (c.iterations < 1) fail("iterations must be >= 1");
  if (c.runs < 1) fail("runs must be >= 1");
  if (c.hosts < 0) fail("hosts must be >= 0");
  if (c.hosts > c.max_supported_hosts()) {
    fail("hosts " + std::to_string(c.hosts) + " exceeds max supported " +
         std::to_string(c.max_supported_hosts()));
  }
  if (!c.weights.ordered()) fail("fitness weights must satisfy alpha > beta > mu > gamma_max >= 0");
  if (c.vga.max_generations < 1) fail("max_generations must be >= 1");
  if (c.mobility.stay_probability &&
      !(*c.mobility.stay_probability >= 0.0 && *c.mobility.stay_probability <= 1.0)) {
    fail("stay probability must lie in [0, 1]");
  }
}

Placement init_hosts(int cell_count, int hosts, int channels_per_cell) {
  if (cell_count < 1) throw ConfigError("need at least one cell");
  if (hosts < 0) throw ConfigError("hosts must be >= 0");
  if (hosts > cell_count * channels_per_cell) {
    throw ConfigError("hosts " + std::to_string(hosts) + " exceeds max supported " +
                      std::to_string(cell_count * channels_per_cell));
  }
  const int base = hosts / cell_count;
  const int extra = hosts % cell_count;
  Placement placement(static_cast<std::size_t>(cell_count), base);
  for (int i = 0; i < extra; ++i) ++placement[static_cast<std::size_t>(i)];
  return placement;
}

namespace {

CellId closed_region_step(const Topology& topo, CellId cell, Rng& rng, const MobilityModel& model) {
  if (model.stay_probability) {
    if (rng.uniform_unit() < *model.stay_probability) return cell;
    const auto dir = static_cast<Direction>(rng.uniform_index(kDirections));
    return topo.neighbor(cell, dir).value_or(cell);
  }
  const auto outcome = rng.uniform_index(kDirections + 1);
  if (outcome == 0) return cell;
  return topo.neighbor(cell, static_cast<Direction>(outcome - 1)).value_or(cell);
}

CellId neighbor_uniform_step(const Topology& topo, CellId cell, Rng& rng,
                             const MobilityModel& model) {
  const auto nbrs = topo.neighbors(cell);
  if (model.stay_probability) {
    if (nbrs.empty() || rng.uniform_unit() < *model.stay_probability) return cell;
    return nbrs[rng.uniform_index(nbrs.size())];
  }
  const auto pick = rng.uniform_index(nbrs.size() + 1);
  return pick == 0 ? cell : nbrs[pick - 1];
}

}  // namespace

Placement step_mobility(const Placement& placement, const Topology& topo, Rng& rng,
                        const MobilityModel& model) {
  if (static_cast<int>(placement.size()) != topo.cell_count()) {
    throw ContractViolation("placement size does not match the grid");
  }
  Placement next(placement.size(), 0);
  for (std::size_t i = 0; i < placement.size(); ++i) {
    const CellId cell = CellId::from_index(i);
    for (int h = 0; h < placement[i]; ++h) {
      const CellId dest = model.kind == MobilityKind::kClosedRegion
                              ? closed_region_step(topo, cell, rng, model)
                              : neighbor_uniform_step(topo, cell, rng, model);
      ++next[dest.index()];
    }
  }
  return next;
}

Network::Network(int cell_count, int channels_per_cell)
    : cells(static_cast<std::size_t>(cell_count), CellState{channels_per_cell, 0, 0, 0, 0}) {}

void Network::set_hosts(const Placement& placement) {
  if (placement.size() != cells.size()) throw ContractViolation("placement size mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].hosts = placement[i];
}

IterationRecord settle_allocation(Network& net, Allocator allocator, const Topology& topo,
                                  const Weights& weights, const VgaConfig& vga, Rng& rng) {
  if (!net.ledger.empty()) {
    throw ContractViolation("settle_allocation called with borrows still outstanding");
  }
  IterationRecord record;
  for (CellState& c : net.cells) c.blocked = fca_blocked(c.hosts, c.owned_capacity);

  if (allocator != Allocator::kFca) {
    for (std::size_t i = 0; i < net.cells.size(); ++i) {
      if (!net.cells[i].hot()) continue;
      const CellId cell = CellId::from_index(i);
      const BorrowRequest request = make_request(net.states(), topo, cell);
      ++record.borrow_requests;
      if (request.total_free() == 0) continue;
      const BorrowPlan plan = allocator == Allocator::kSb
                                  ? greedy_borrow(request)
                                  : vga_solve(request, weights, vga, rng);
      net.ledger.apply(net.states(), plan);
      record.channels_borrowed += plan.total_lent;
    }
  }

  for (const CellState& c : net.cells) {
    record.blocked += c.blocked;
    if (c.hot()) ++record.hot_cells;
  }
  return record;
}

void release_borrows(Network& net) { net.ledger.release(net.states()); }

void summarize(RunMetrics& m) {
  const std::size_t runs = m.per_run.size();
  const std::size_t iters = runs == 0 ? 0 : m.per_run.front().size();
  m.mean_blocked.assign(iters, 0.0);
  m.mean_hot_cells.assign(iters, 0.0);
  double total_blocked = 0.0;
  double total_hot = 0.0;
  for (std::size_t t = 0; t < iters; ++t) {
    long long blocked = 0;
    long long hot = 0;
    for (const auto& run : m.per_run) {
      blocked += run[t].blocked;
      hot += run[t].hot_cells;
    }
    m.mean_blocked[t] = static_cast<double>(blocked) / static_cast<double>(runs);
    m.mean_hot_cells[t] = static_cast<double>(hot) / static_cast<double>(runs);
    total_blocked += static_cast<double>(blocked);
    total_hot += static_cast<double>(hot);
  }
  const double samples = static_cast<double>(runs * iters);
  m.avg_blocked = samples > 0 ? total_blocked / samples : 0.0;
  m.avg_hot_cells = samples > 0 ? total_hot / samples : 0.0;
  m.blocking_pct = m.hosts > 0 ? m.avg_blocked / m.hosts * 100.0 : 0.0;
}

RunMetrics run_simulation(const SimConfig& config, const IterationObserver& observer) {
  validate(config);
  const Topology topo = build_grid(config.rows, config.cols);

  RunMetrics metrics;
  metrics.allocator = config.allocator;
  metrics.hosts = config.hosts;
  metrics.per_run.reserve(static_cast<std::size_t>(config.runs));

  for (int run = 0; run < config.runs; ++run) {
    const auto r = static_cast<std::uint64_t>(run);
    Rng mobility_rng(derive_seed(config.rng_seed, r, Stream::kMobility));
    Rng solver_rng(derive_seed(config.rng_seed, r, Stream::kSolver));

    Network net(config.cell_count(), config.channels_per_cell);
    Placement placement = init_hosts(config);
    auto& series = metrics.per_run.emplace_back();
    series.reserve(static_cast<std::size_t>(config.iterations));

    for (int it = 0; it < config.iterations; ++it) {
      release_borrows(net);
      placement = step_mobility(placement, topo, mobility_rng, config.mobility);
      net.set_hosts(placement);
      const IterationRecord rec =
          settle_allocation(net, config.allocator, topo, config.weights, config.vga, solver_rng);
      series.push_back(rec);
      if (observer) observer(IterationView{run, it, net, series.back()});
    }
  }
  summarize(metrics);
  return metrics;
}

}  // namespace mici
