#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uepnc/channel.hpp"
#include "uepnc/types.hpp"

namespace uepnc {

/// Everything the base station knows when allocating: the stream, the users'
/// CQI-reported MCS, per-window TB budgets and the target probability.
struct AllocationProblem {
  LayerConfig layers;
  std::vector<int> user_mcs;
  std::vector<int> n_hat;
  RadioConfig radio;
  double q_hat = 0.99;

  /// Budgets from the n_hat formula with n_min = tb_capacity(4, N_RBP),
  /// capped by the eMBMS subframe limit.
  static AllocationProblem make(LayerConfig layers, std::vector<int> user_mcs,
                                RadioConfig radio, double q_hat);

  int users() const { return static_cast<int>(user_mcs.size()); }
  int per_tb(int mcs) const;
  /// ceil(U * t_hat_l) for layer l (1-based).
  int required_users(int layer) const;
  void validate() const;
};

enum class SolverKind { kHeuristic, kDirectExhaustive, kDirectGenetic, kMrt };

const char* to_string(SolverKind kind);

struct AllocationSolution {
  SolverKind solver = SolverKind::kHeuristic;
  bool feasible = false;
  TransmissionPlan plan;
  double tau = 0.0;
  long long profit = 0;
  std::vector<std::vector<bool>> delta;  // U x L
  int skipped_windows = 0;
  /// Heuristic only: the plan before refinement.
  std::optional<TransmissionPlan> intermediate;
  /// Candidate plans the solver evaluated.
  long long evaluated = 0;
};

struct FeasibilityReport {
  bool feasible = false;
  bool coverage_ok = false;
  bool budget_ok = false;
  bool ordering_ok = true;  // strict MCS ordering, multi-rate plans only
  std::vector<int> covered_users;
  std::vector<int> required_users;
  std::vector<double> achieved_fraction;
  std::vector<std::string> violations;
};

/// Largest m in 1..15 reported (m_u >= m) by at least ceil(U t') users.
/// Throws std::invalid_argument for an empty user list.
std::optional<int> solve_s1(std::span<const int> user_mcs, double t_prime);

/// Smallest N_window in [0, n_hat] with P(N_{1:window}) >= q_hat when every
/// TB is erased with probability p_hat. `prefix` fixes N_1..N_{window-1} and
/// n_1..n_window; its entry for `window` is ignored.
std::optional<int> solve_s2(const LayerConfig& layers, const TransmissionPlan& prefix,
                            int window, double q_hat, double p_hat, int n_hat);

/// delta under the coded model and the allocator erasure view.
std::vector<std::vector<bool>> coded_delta(const AllocationProblem& problem,
                                           const TransmissionPlan& plan);
/// delta under uncoded multi-rate delivery and the allocator erasure view.
std::vector<std::vector<bool>> uncoded_delta(const AllocationProblem& problem,
                                             const TransmissionPlan& plan);

/// Recomputes delta for the solution's solver and checks coverage targets and
/// TB budgets (plus strict MCS ordering for multi-rate plans).
FeasibilityReport check_feasibility(const AllocationSolution& solution,
                                    const AllocationProblem& problem);

/// Heuristic solver: skip-window loop, per-window MCS then TB sizing, and
/// the adjacent-window merge refinement.
AllocationSolution heuristic_uep_ram(const AllocationProblem& problem);

enum class DirectMode { kAuto, kExhaustive, kGenetic };
enum class ConstraintHandling { kPenalty, kHard };

struct GeneticOptions {
  int population = 60;
  int generations = 200;
  int tournament = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  double penalty = 10.0;
  int elites = 2;
  ConstraintHandling constraints = ConstraintHandling::kPenalty;
  std::uint64_t seed = 1;
};

struct DirectOptions {
  DirectMode mode = DirectMode::kAuto;
  /// kAuto searches exhaustively when prod(1 + 12 * n_hat_l) <= budget.
  double budget = 5e7;
  GeneticOptions genetic;
};

/// Size of the (m, N) plan space: prod over windows of (1 + 12 * n_hat_l).
double plan_space_size(const AllocationProblem& problem);

/// Reference optimizer of the profit-cost objective under coverage and budget
/// constraints. Ties on tau prefer fewer TBs, then the lexicographically
/// smaller MCS vector.
AllocationSolution direct_uep_ram(const AllocationProblem& problem,
                                  const DirectOptions& options = {});

/// Multi-rate baseline: strictly increasing MCS per layer, uncoded TB counts
/// ceil(k_l / n_l), maximising the summed expected PSNR. Throws
/// std::invalid_argument when L > 12.
AllocationSolution solve_mrt(const AllocationProblem& problem);

}  // namespace uepnc
