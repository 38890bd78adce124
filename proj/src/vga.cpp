#include "mici/vga.hpp"

#include <string>

namespace mici {

Member encode(const BorrowRequest& request) {
  Member m;
  m.neighbor_count = request.lender_count;
  m.genes.row(0) << request.requester_free, request.need, request.requester_hosts,
      request.requester_type;
  for (int j = 0; j < request.lender_count; ++j) {
    const LenderInfo& l = request.lenders[j];
    m.genes.row(j + 1) << l.free, l.blocked, l.hosts, l.type;
  }
  return m;
}

Member encode_request(std::span<const CellState> states, const Topology& topo, CellId cell) {
  return encode(make_request(states, topo, cell));
}

Eigen::Matrix<int, kMaxLenders, 1> lent_per_row(const Member& member, const Member& original) {
  Eigen::Matrix<int, kMaxLenders, 1> lent = Eigen::Matrix<int, kMaxLenders, 1>::Zero();
  const int k = original.neighbor_count;
  lent.head(k) = original.genes.col(kFree).segment(1, k) - member.genes.col(kFree).segment(1, k);
  return lent;
}

std::optional<std::string> member_violation(const Member& member, const Member& original) {
  if (member.neighbor_count != original.neighbor_count) return "neighbor count differs from request";
  if ((member.genes.array() < 0).any()) return "negative gene";
  const int k = member.neighbor_count;
  if (!member.genes.bottomRows(kMemberRows - 1 - k).isZero()) return "padding row not zero";
  if (member.genes.col(kHosts) != original.genes.col(kHosts) ||
      member.genes.col(kType) != original.genes.col(kType)) {
    return "host or type column differs from request";
  }
  if (member.genes.col(kBlocked).tail(kMemberRows - 1) !=
      original.genes.col(kBlocked).tail(kMemberRows - 1)) {
    return "neighbor blocked count differs from request";
  }
  if (member.genes(0, kFree) != original.genes(0, kFree)) return "requester free count changed";
  if ((member.genes.col(kType).segment(1, k).array() > 4).any()) return "cell type out of range";
  const auto lent = lent_per_row(member, original);
  if ((lent.array() < 0).any()) return "neighbor holds more free channels than it had";
  const int need = original.residual();
  if (lent.sum() > need) return "lends more than the request needs";
  if (member.residual() != need - lent.sum()) return "residual does not match lending";
  return std::nullopt;
}

BorrowPlan decode(const BorrowRequest& request, const Member& member) {
  const Member original = encode(request);
  if (auto why = member_violation(member, original)) {
    throw ContractViolation("cannot decode member: " + *why);
  }
  const auto lent = lent_per_row(member, original);
  return make_plan(request, std::span<const int>(lent.data(), kMaxLenders));
}

std::vector<Member> seed_population(const Member& request) {
  const int need = request.residual();
  std::vector<Member> population{request};
  for (int row = 1; row <= request.neighbor_count; ++row) {
    const int limit = std::min(need, request.genes(row, kFree));
    for (int k = 1; k <= limit; ++k) {
      Member m = request;
      m.genes(row, kFree) -= k;
      m.genes(0, kBlocked) = need - k;
      population.push_back(m);
    }
  }
  return population;
}

Member crossover(const Member& a, const Member& b, const Member& original) {
  const auto same_request = [&](const Member& m) {
    return m.neighbor_count == original.neighbor_count &&
           m.genes.rightCols<2>() == original.genes.rightCols<2>() &&
           m.genes.col(kBlocked).tail(kMemberRows - 1) ==
               original.genes.col(kBlocked).tail(kMemberRows - 1);
  };
  if (!same_request(a) || !same_request(b)) {
    throw ContractViolation("crossover parents were not derived from the given request");
  }

  const int k = original.neighbor_count;
  Member child = original;
  auto child_free = child.genes.col(kFree).segment(1, k);
  child_free = a.genes.col(kFree).segment(1, k).cwiseMin(b.genes.col(kFree).segment(1, k));

  const int need = original.residual();
  auto lent = lent_per_row(child, original);
  for (int excess = lent.sum() - need; excess > 0; --excess) {
    int pick = -1;
    for (int j = k - 1; j >= 0; --j) {
      if (lent(j) <= 0) continue;
      if (pick < 0 || child_free(j) < child_free(pick)) pick = j;
    }
    ++child_free(pick);
    --lent(pick);
  }
  child.genes(0, kBlocked) = need - lent.sum();
  return child;
}

BorrowPlan vga_solve(const BorrowRequest& request, const Weights& weights,
                     const VgaConfig& config, Rng& rng) {
  if (request.need < 1) return empty_plan(request);
  const Member original = encode(request);
  const VgaOutcome outcome = evolve(original, weights, config, rng);
  return decode(request, outcome.best);
}

std::optional<OracleResult> brute_force_oracle(const Member& request, const Weights& weights,
                                               std::uint64_t guard) {
  const int k = request.neighbor_count;
  std::uint64_t combos = 1;
  for (int row = 1; row <= k; ++row) {
    combos *= static_cast<std::uint64_t>(request.genes(row, kFree)) + 1;
    if (combos > guard) return std::nullopt;
  }

  Weights exact = weights;
  exact.gamma_max = 0.0;
  const int need = request.residual();

  std::optional<OracleResult> best;
  std::array<int, kMaxLenders> lent{};
  Member candidate = request;

  // Odometer over lent[0..k) in lexicographic order; only strict improvements
  // replace the incumbent, so ties keep the lexicographically smallest vector.
  while (true) {
    int total = 0;
    for (int j = 0; j < k; ++j) total += lent[j];
    if (total <= need) {
      for (int j = 0; j < k; ++j) candidate.genes(j + 1, kFree) = request.genes(j + 1, kFree) - lent[j];
      candidate.genes(0, kBlocked) = need - total;
      const double f = deterministic_fitness(candidate, request, exact);
      if (!best || f > best->fitness + 1e-12) {
        best = OracleResult{lent, total, need - total, f};
      }
    }
    int pos = k - 1;
    while (pos >= 0 && lent[pos] == request.genes(pos + 1, kFree)) {
      lent[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++lent[pos];
  }
  return best;
}

BigInt solution_space_bound(int n) {
  if (n < 0) throw DomainError("solution_space_bound: n must be non-negative");
  const BigInt per_gene = BigInt(5) * n * n;
  return boost::multiprecision::pow(per_gene, 7);
}

BigReal efficiency_budget(int m, int r) {
  if (m < 1 || r < 1) throw DomainError("efficiency_budget: need m >= 1 and r >= 1");
  const BigInt space = boost::multiprecision::pow(BigInt(r), static_cast<unsigned>(m));
  return BigReal(space) / BigReal(m) - 1;
}

}  // namespace mici
