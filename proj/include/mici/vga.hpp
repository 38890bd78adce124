#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mici/allocators.hpp"
#include "mici/errors.hpp"
#include "mici/rng.hpp"

namespace mici {

// --------------------------------------------------------------------------
// Encoding

inline constexpr int kMemberRows = 7;
inline constexpr int kGeneFields = 4;

/// Gene columns of a member row.
enum Gene : int { kFree = 0, kBlocked = 1, kHosts = 2, kType = 3 };

/// Row 0 is the requesting cell, rows 1..6 its neighbors in lookup-table order.
using GeneMatrix = Eigen::Matrix<int, kMemberRows, kGeneFields, Eigen::RowMajor>;

/// A candidate borrowing decision. Rows past `neighbor_count` are padding
/// and stay all-zero.
struct Member {
  GeneMatrix genes = GeneMatrix::Zero();
  int neighbor_count = 0;

  int residual() const noexcept { return genes(0, kBlocked); }
  bool padded(int row) const noexcept { return row > neighbor_count; }

  auto neighbor_rows() { return genes.middleRows(1, neighbor_count); }
  auto neighbor_rows() const { return genes.middleRows(1, neighbor_count); }

  /// Same borrowing decision (X and Y columns on every row).
  bool same_solution(const Member& other) const {
    return neighbor_count == other.neighbor_count &&
           genes.leftCols<2>() == other.genes.leftCols<2>();
  }

  friend bool operator==(const Member& a, const Member& b) {
    return a.neighbor_count == b.neighbor_count && a.genes == b.genes;
  }
};

/// Member view of a borrow request (no lending yet).
Member encode(const BorrowRequest& request);

/// encode(make_request(...)). Throws ContractViolation for a non-hot cell.
Member encode_request(std::span<const CellState> states, const Topology& topo, CellId cell);

/// Channels each neighbor row lends relative to the original request.
Eigen::Matrix<int, kMaxLenders, 1> lent_per_row(const Member& member, const Member& original);

/// First violated member invariant, or nullopt when `member` is a feasible
/// descendant of `original`.
std::optional<std::string> member_violation(const Member& member, const Member& original);

inline bool feasible(const Member& member, const Member& original) {
  return !member_violation(member, original).has_value();
}

/// Plan that realizes `member` for `request`.
BorrowPlan decode(const BorrowRequest& request, const Member& member);

// --------------------------------------------------------------------------
// Genetic operators

/// Identity member first, then for each neighbor j (in row order) and each
/// k = 1..min(need, free_j) the member where only j lends k channels.
std::vector<Member> seed_population(const Member& request);

/// Single cut point after row 0. Neighbor rows take the lower free count of
/// the two parents; the requester's residual is the original need minus what
/// the child lends. When the merged lending exceeds the need, channels are
/// handed back one at a time to the lender left with the fewest free
/// channels (ties: highest row first).
/// Throws ContractViolation when a, b and original describe different requests.
Member crossover(const Member& a, const Member& b, const Member& original);

// --------------------------------------------------------------------------
// Fitness

template <typename Scalar = double>
struct FitnessWeights {
  Scalar alpha = Scalar(0.1);      // per channel borrowed
  Scalar beta = Scalar(0.01);      // per host in a neighbor cell
  Scalar mu = Scalar(0.001);       // per unit of neighbor cell type
  Scalar gamma_max = Scalar(1e-4); // mutation noise bound, [0, gamma_max)
  Scalar service = Scalar(1);      // per unserved channel of the requester

  bool ordered() const {
    return alpha > beta && beta > mu && mu > gamma_max && gamma_max >= Scalar(0);
  }
};

using Weights = FitnessWeights<double>;

/// Score assigned to pruned (infeasible) members.
template <typename Scalar = double>
constexpr Scalar pruned_score() {
  return std::numeric_limits<Scalar>::lowest();
}

/// Fitness without the mutation term:
///   Σ_rows [free_after + α·lent − β·hosts − μ·type] − service·residual,
/// summed over real neighbor rows. Infeasible members score pruned_score().
template <typename Scalar>
Scalar deterministic_fitness(const Member& member, const Member& original,
                             const FitnessWeights<Scalar>& w) {
  if (!feasible(member, original)) return pruned_score<Scalar>();
  const auto rows = member.neighbor_rows();
  const auto lent = lent_per_row(member, original);
  const Scalar free_after = static_cast<Scalar>(rows.col(kFree).sum());
  const Scalar borrowed = static_cast<Scalar>(lent.sum());
  const Scalar hosts = static_cast<Scalar>(rows.col(kHosts).sum());
  const Scalar type = static_cast<Scalar>(rows.col(kType).sum());
  return free_after + w.alpha * borrowed - w.beta * hosts - w.mu * type -
         w.service * static_cast<Scalar>(member.residual());
}

/// deterministic_fitness plus γ ~ U[0, gamma_max). γ never touches the genes.
template <typename Scalar>
Scalar fitness(const Member& member, const Member& original, const FitnessWeights<Scalar>& w,
               Rng& rng) {
  const Scalar base = deterministic_fitness(member, original, w);
  if (base == pruned_score<Scalar>()) return base;
  return base + w.gamma_max * static_cast<Scalar>(rng.uniform_unit());
}

// --------------------------------------------------------------------------
// Solver

enum class GammaMode { kEveryEvaluation, kChildOnly };

/// Where a member being scored came from.
enum class Origin { kSeed, kChild };

struct VgaConfig {
  int max_generations = 100;
  GammaMode gamma_mode = GammaMode::kEveryEvaluation;
};

enum class Termination {
  kSinglePopulation,  // only one member left
  kServed,            // fittest member needs no more channels
  kConverged,         // two members left, same solution
  kGenerationLimit,
};

struct VgaOutcome {
  Member best;
  double best_fitness = 0.0;
  int generations = 0;
  int initial_population = 0;
  Termination reason = Termination::kSinglePopulation;
};

/// Runs the VGA loop with a caller-supplied scorer `score(member, origin)`.
///
/// Each generation the two fittest members (ties: earlier insertion) are
/// crossed, both parents are removed and the child is inserted. A pruned
/// child is replaced by the fitter parent. The population therefore shrinks
/// by exactly one per generation. Termination is checked after each
/// generation, so at least one crossover runs whenever two members exist.
template <typename Score>
VgaOutcome evolve(const Member& original, Score&& score, const VgaConfig& config) {
  using Value = decltype(score(original, Origin::kSeed));
  struct Entry {
    Member member;
    Value fit;
    std::uint64_t order;
  };
  std::uint64_t next_order = 0;
  std::vector<Entry> pop;
  for (Member& m : seed_population(original)) {
    const Value f = score(m, Origin::kSeed);
    pop.push_back(Entry{std::move(m), f, next_order++});
  }

  const auto fitter = [](const Entry& x, const Entry& y) {
    return x.fit > y.fit || (x.fit == y.fit && x.order < y.order);
  };

  VgaOutcome out;
  out.initial_population = static_cast<int>(pop.size());
  bool done = pop.size() < 2;
  out.reason = Termination::kSinglePopulation;

  while (!done) {
    if (out.generations >= config.max_generations) {
      out.reason = Termination::kGenerationLimit;
      break;
    }
    std::partial_sort(pop.begin(), pop.begin() + 2, pop.end(), fitter);
    Entry first = std::move(pop[0]);
    Entry second = std::move(pop[1]);
    pop.erase(pop.begin(), pop.begin() + 2);

    Member child = crossover(first.member, second.member, original);
    const Value f = score(child, Origin::kChild);
    if (f == std::numeric_limits<Value>::lowest()) {
      pop.push_back(std::move(first));
    } else {
      pop.push_back(Entry{std::move(child), f, next_order++});
    }
    ++out.generations;

    const auto best = std::min_element(pop.begin(), pop.end(), fitter);
    if (pop.size() < 2) {
      out.reason = Termination::kSinglePopulation;
      done = true;
    } else if (best->member.residual() == 0) {
      out.reason = Termination::kServed;
      done = true;
    } else if (pop.size() == 2 && pop[0].member.same_solution(pop[1].member)) {
      out.reason = Termination::kConverged;
      done = true;
    }
  }

  const auto best = std::min_element(pop.begin(), pop.end(), fitter);
  out.best = best->member;
  out.best_fitness = static_cast<double>(best->fit);
  return out;
}

/// evolve() scored with fitness(); γ follows config.gamma_mode.
template <typename Scalar>
VgaOutcome evolve(const Member& original, const FitnessWeights<Scalar>& weights,
                  const VgaConfig& config, Rng& rng) {
  const bool child_only = config.gamma_mode == GammaMode::kChildOnly;
  return evolve(
      original,
      [&](const Member& m, Origin origin) -> Scalar {
        if (child_only && origin == Origin::kSeed) {
          return deterministic_fitness(m, original, weights);
        }
        return fitness(m, original, weights, rng);
      },
      config);
}

/// Solves one borrow request with the VGA and decodes the fittest member.
BorrowPlan vga_solve(const BorrowRequest& request, const Weights& weights,
                     const VgaConfig& config, Rng& rng);

// --------------------------------------------------------------------------
// Verification oracle and analytic bounds

struct OracleResult {
  std::array<int, kMaxLenders> lent{};
  int total_lent = 0;
  int residual = 0;
  double fitness = 0.0;
};

inline constexpr std::uint64_t kOracleGuard = 10'000'000;

/// Enumerates every lending vector 0 ≤ lent_j ≤ free_j with Σ lent_j ≤ need
/// and returns the one with the highest deterministic fitness (ties: the
/// lexicographically smallest vector). nullopt when Π (free_j + 1) > guard.
std::optional<OracleResult> brute_force_oracle(const Member& request, const Weights& weights,
                                               std::uint64_t guard = kOracleGuard);

using BigInt = boost::multiprecision::cpp_int;
using BigReal = boost::multiprecision::cpp_bin_float_50;

/// (5n²)⁷: upper bound on the member search space when each neighbor holds
/// at most n borrowable channels.
BigInt solution_space_bound(int n);

/// r^m / m − 1: generation budget under which a GA with population m over a
/// search space of size r^m counts as efficient. Throws DomainError unless
/// m ≥ 1 and r ≥ 1.
BigReal efficiency_budget(int m, int r);

}  // namespace mici
