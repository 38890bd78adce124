#include "doctest.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include "mici/errors.hpp"
#include "mici/simcore.hpp"

using namespace mici;

namespace {

int total(const Placement& p) { return std::accumulate(p.begin(), p.end(), 0); }

Placement read_golden(const std::string& name) {
  std::ifstream in(std::string(MICI_GOLDEN_DIR) + "/" + name);
  REQUIRE(in.good());
  Placement p;
  for (int v; in >> v;) p.push_back(v);
  return p;
}

SimConfig small_config(Allocator a, int hosts) {
  SimConfig c;
  c.allocator = a;
  c.hosts = hosts;
  c.runs = 3;
  c.iterations = 6;
  c.rng_seed = 77;
  return c;
}

}  // namespace

TEST_CASE("init_hosts spreads hosts evenly, remainder to the lowest ids") {
  CHECK(init_hosts(25, 200, 10) == Placement(25, 8));
  CHECK(init_hosts(25, 0, 10) == Placement(25, 0));
  const Placement p = init_hosts(25, 210, 10);
  for (int i = 0; i < 25; ++i) CHECK(p[i] == (i < 10 ? 9 : 8));
  CHECK(total(p) == 210);
  CHECK(init_hosts(25, 250, 10) == Placement(25, 10));
  CHECK_THROWS_AS(init_hosts(25, 251, 10), ConfigError);
  CHECK_THROWS_AS(init_hosts(25, -1, 10), ConfigError);
}

TEST_CASE("mobility conserves hosts under every model") {
  const Topology topo = build_grid(5, 5);
  const MobilityModel models[] = {
      {},
      {MobilityKind::kNeighborUniform, std::nullopt},
      {MobilityKind::kClosedRegion, 0.5},
      {MobilityKind::kNeighborUniform, 0.9},
  };
  for (const auto& model : models) {
    Rng rng(3);
    Placement p = init_hosts(25, 230, 10);
    for (int step = 0; step < 50; ++step) {
      p = step_mobility(p, topo, rng, model);
      CHECK(total(p) == 230);
      for (int v : p) CHECK(v >= 0);
    }
  }
}

TEST_CASE("mobility on a single cell keeps everyone home") {
  const Topology one = build_grid(1, 1);
  Rng rng(1);
  CHECK(step_mobility(Placement{12}, one, rng) == Placement{12});
  CHECK(step_mobility(Placement{12}, one, rng, {MobilityKind::kNeighborUniform, std::nullopt}) ==
        Placement{12});
  CHECK_THROWS_AS(step_mobility(Placement{1, 2}, one, rng), ContractViolation);
}

TEST_CASE("stay probability 1 freezes the placement") {
  const Topology topo = build_grid(5, 5);
  Rng rng(9);
  const Placement p = init_hosts(25, 217, 10);
  CHECK(step_mobility(p, topo, rng, {MobilityKind::kClosedRegion, 1.0}) == p);
}

TEST_CASE("closed-region walk keeps about 1/7 in place in the interior") {
  const Topology topo = build_grid(5, 5);
  Rng rng(5);
  Placement p(25, 0);
  p[12] = 70000;
  const Placement next = step_mobility(p, topo, rng);
  CHECK(next[12] == doctest::Approx(10000).epsilon(0.05));
  for (CellId n : topo.neighbors(CellId{13})) CHECK(next[n.index()] == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("one mobility step from seed 42 matches the frozen placement") {
  const Topology topo = build_grid(5, 5);
  Rng rng(42);
  CHECK(step_mobility(init_hosts(25, 200, 10), topo, rng) == read_golden("mobility_seed42.txt"));
}

TEST_CASE("settle_allocation basics") {
  const Topology topo = build_grid(5, 5);
  Rng rng(1);
  Network net(25, 10);
  Placement p(25, 5);
  p[12] = 17;
  net.set_hosts(p);
  const IterationRecord fca = settle_allocation(net, Allocator::kFca, topo, {}, {}, rng);
  CHECK(fca.blocked == 7);
  CHECK(fca.hot_cells == 1);
  CHECK(fca.borrow_requests == 0);
  CHECK(net.ledger.empty());

  Network quiet(25, 10);
  quiet.set_hosts(Placement(25, 10));
  const IterationRecord none = settle_allocation(quiet, Allocator::kVga, topo, {}, {}, rng);
  CHECK(none == IterationRecord{});
}

TEST_CASE("settle_allocation serves the sample neighborhood fully") {
  const Topology topo = build_grid(5, 5);
  Network net(25, 10);
  Placement p(25, 10);
  // cell 13 is the only hot cell; its neighbors 12, 17, 18, 14, 8, 7 have
  // 1, 6, 0, 0, 5, 0 free channels
  const std::pair<int, int> hosts[] = {{13, 15}, {12, 9}, {17, 4}, {8, 5}};
  for (auto [cell, h] : hosts) p[cell - 1] = h;
  net.set_hosts(p);
  for (Allocator a : {Allocator::kSb, Allocator::kVga}) {
    Rng rng(1);
    Network copy = net;
    const IterationRecord r = settle_allocation(copy, a, topo, {}, {}, rng);
    CHECK(copy.cells[12].blocked == 0);
    CHECK(copy.cells[12].borrowed_in == 5);
    CHECK(copy.cells[16].lent_out == 3);
    CHECK(copy.cells[7].lent_out == 2);
    CHECK(r.channels_borrowed == 5);
    CHECK(r.borrow_requests == 1);
    CHECK(r.blocked == 0);
  }
}

TEST_CASE("settle refuses to run with borrows outstanding; release restores FCA state") {
  const Topology topo = build_grid(5, 5);
  Rng rng(2);
  Network net(25, 10);
  Placement p(25, 4);
  p[12] = 16;
  net.set_hosts(p);
  settle_allocation(net, Allocator::kSb, topo, {}, {}, rng);
  CHECK_FALSE(net.ledger.empty());
  CHECK(net.cells[12].blocked == 0);
  CHECK_THROWS_AS(settle_allocation(net, Allocator::kSb, topo, {}, {}, rng), ContractViolation);
  release_borrows(net);
  CHECK(net.ledger.empty());
  CHECK(net.cells[12].blocked == 6);
  for (const CellState& c : net.cells) {
    CHECK(c.lent_out == 0);
    CHECK(c.borrowed_in == 0);
  }
}

TEST_CASE("run_simulation with no hosts reports zeros") {
  for (Allocator a : {Allocator::kFca, Allocator::kSb, Allocator::kVga}) {
    const RunMetrics m = run_simulation(small_config(a, 0));
    CHECK(m.avg_blocked == 0.0);
    CHECK(m.avg_hot_cells == 0.0);
    CHECK(m.blocking_pct == 0.0);
    CHECK(m.per_run.size() == 3);
    CHECK(m.mean_blocked == std::vector<double>(6, 0.0));
  }
}

TEST_CASE("run_simulation is deterministic and seed sensitive") {
  const SimConfig c = small_config(Allocator::kVga, 240);
  CHECK(run_simulation(c) == run_simulation(c));
  SimConfig other = c;
  other.rng_seed = 78;
  CHECK_FALSE(run_simulation(other) == run_simulation(c));
}

TEST_CASE("every allocator sees the same hosts; borrowing never blocks more than FCA") {
  std::vector<std::vector<Placement>> seen(3);
  const Allocator allocs[] = {Allocator::kFca, Allocator::kSb, Allocator::kVga};
  std::vector<RunMetrics> metrics;
  for (int a = 0; a < 3; ++a) {
    metrics.push_back(run_simulation(small_config(allocs[a], 245), [&](const IterationView& v) {
      Placement p;
      for (const CellState& c : v.network.cells) p.push_back(c.hosts);
      seen[a].push_back(p);
    }));
  }
  CHECK(seen[0] == seen[1]);
  CHECK(seen[0] == seen[2]);
  for (int run = 0; run < 3; ++run) {
    for (int t = 0; t < 6; ++t) {
      const int fca = metrics[0].per_run[run][t].blocked;
      CHECK(metrics[1].per_run[run][t].blocked <= fca);
      CHECK(metrics[2].per_run[run][t].blocked <= fca);
    }
  }
}

TEST_CASE("hosts and channels are conserved at every observed iteration") {
  for (Allocator a : {Allocator::kFca, Allocator::kSb, Allocator::kVga}) {
    const SimConfig c = small_config(a, 235);
    int calls = 0;
    run_simulation(c, [&](const IterationView& v) {
      ++calls;
      int hosts = 0;
      int owned = 0;
      int lent = 0;
      int borrowed = 0;
      int blocked = 0;
      int hot = 0;
      for (const CellState& s : v.network.cells) {
        hosts += s.hosts;
        owned += s.owned_capacity;
        lent += s.lent_out;
        borrowed += s.borrowed_in;
        blocked += s.blocked;
        hot += s.hot();
        CHECK(s.available() >= 0);
        CHECK(s.blocked == s.unmet_demand());
      }
      CHECK(hosts == c.hosts);
      CHECK(owned == c.cell_count() * c.channels_per_cell);
      CHECK(lent == borrowed);
      CHECK(lent == v.network.ledger.total_lent());
      CHECK(lent == v.record.channels_borrowed);
      CHECK(blocked == v.record.blocked);
      CHECK(hot == v.record.hot_cells);
    });
    CHECK(calls == c.runs * c.iterations);
  }
}

TEST_CASE("averages are recomputable from the per-run records") {
  const RunMetrics m = run_simulation(small_config(Allocator::kSb, 250));
  double sum = 0.0;
  for (const auto& run : m.per_run)
    for (const auto& rec : run) sum += rec.blocked;
  CHECK(m.avg_blocked == doctest::Approx(sum / 18.0));
  CHECK(m.blocking_pct == doctest::Approx(m.avg_blocked / 250.0 * 100.0));
  double mean_of_means = 0.0;
  for (double v : m.mean_blocked) mean_of_means += v;
  CHECK(mean_of_means / 6.0 == doctest::Approx(m.avg_blocked));
  RunMetrics copy = m;
  copy.avg_blocked = -1;
  summarize(copy);
  CHECK(copy == m);
}

TEST_CASE("validate rejects bad configurations") {
  SimConfig c;
  CHECK_NOTHROW(validate(c));
  c.hosts = 251;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = SimConfig{};
  c.iterations = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = SimConfig{};
  c.weights.mu = 0.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = SimConfig{};
  c.mobility.stay_probability = 1.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
}
