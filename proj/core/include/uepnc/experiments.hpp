#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "uepnc/channel.hpp"
#include "uepnc/scenario.hpp"

namespace uepnc {

/// One CSV table: a header row and pre-formatted cells.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  std::string id;
  std::string digest;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<Table> tables;
  /// Set when the allocator found no feasible plan for some point.
  bool infeasible = false;
  std::vector<std::string> notes;
  double runtime_s = 0.0;

  const Table& table(const std::string& name) const;

  /// Comment header (id, digest, seeds, notes) followed by the table.
  /// Runtime is left out so reruns produce identical files.
  void write_csv(std::ostream& out, const Table& table) const;
  /// Writes <dir>/<id>.csv for the first table and <dir>/<id>_<name>.csv for
  /// the rest; returns the paths written.
  std::vector<std::filesystem::path> write_all(const std::filesystem::path& dir) const;
};

/// Overrides from the command line.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<DirectChoice> direct;
  ErasureView view = ErasureView::kEvaluation;
  unsigned workers = 0;
};

/// One (n, p, t) point of the validation sweep, all windows.
struct ValidationPoint {
  int per_tb = 0;
  double erasure = 0.0;
  int tbs = 0;
  std::vector<double> analytic;
  std::vector<double> simulated;
  std::vector<double> std_error;
};

/// Runs the validation grid; Monte Carlo seeds derive from `seed` and the
/// point's position in the grid only.
std::vector<ValidationPoint> validation_points(const ValidationGrid& grid, std::uint64_t seed,
                                               unsigned workers = 0);

/// Analytic vs Monte Carlo P(N_{1:l}) with N_l = t for every window, swept
/// until each window saturates.
ExperimentResult run_validate_approx(const Scenario& scenario, const RunOptions& options = {});

/// Heuristic and direct profit-cost ratio for each N_RBP of the sweep list.
ExperimentResult run_rbp_sweep(const Scenario& scenario, const RunOptions& options = {});

/// Per-user recovery curves and coverage radii along a radial user line.
ExperimentResult run_coverage_sc(const Scenario& scenario, const RunOptions& options = {});

/// Maximum-PSNR map over a user grid plus per-layer recovery fractions.
ExperimentResult run_psnr_map_sfn(const Scenario& scenario, const RunOptions& options = {});

/// Single-scenario debug run: every solver's plan and feasibility report.
ExperimentResult run_solve(const Scenario& scenario, const RunOptions& options = {});

/// Users of the scenario's layout with their CQI-reported MCS.
std::vector<UserContext> scenario_users(const Scenario& scenario);

/// Probability that user recovers layers 1..l, per l. UEP-NC plans credit
/// any decodable window i >= l; multi-rate plans use uncoded delivery.
std::vector<double> layer_recovery(const Scenario& scenario, const AllocationSolution& solution,
                                   const UserContext& user, ErasureView view);

}  // namespace uepnc
