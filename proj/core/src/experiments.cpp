#include "uepnc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "uepnc/allocators.hpp"
#include "uepnc/decode_prob.hpp"
#include "uepnc/rlnc.hpp"

namespace uepnc {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

std::uint64_t run_seed(const Scenario& s, const RunOptions& o) {
  return o.seed.value_or(s.seed);
}

ExperimentResult start(const char* id, const Scenario& s, const RunOptions& o) {
  ExperimentResult r;
  r.id = id;
  r.digest = s.digest;
  r.seeds.emplace_back("seed", run_seed(s, o));
  if (s.network.shadowing_std_db > 0.0) {
    r.seeds.emplace_back("shadowing_seed", s.network.shadowing_seed);
  }
  return r;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

AllocationProblem make_problem(const Scenario& s, const std::vector<UserContext>& users,
                               RadioConfig radio) {
  std::vector<int> mcs;
  mcs.reserve(users.size());
  for (const auto& u : users) mcs.push_back(u.mcs);
  return AllocationProblem::make(s.layers(), std::move(mcs), radio, s.q_hat);
}

std::optional<DirectOptions> direct_options(const Scenario& s, const RunOptions& o) {
  DirectOptions d = s.direct_options;
  d.genetic.seed = run_seed(s, o);
  switch (o.direct.value_or(s.direct)) {
    case DirectChoice::kOff: return std::nullopt;
    case DirectChoice::kAuto: d.mode = DirectMode::kAuto; break;
    case DirectChoice::kExhaustive: d.mode = DirectMode::kExhaustive; break;
    case DirectChoice::kGenetic: d.mode = DirectMode::kGenetic; break;
  }
  return d;
}

Table plan_table(const std::vector<const AllocationSolution*>& solutions) {
  Table t{"plans", {"solver", "window", "mcs", "tbs", "per_tb", "feasible", "tau"}, {}};
  for (const auto* sol : solutions) {
    for (int w = 0; w < sol->plan.windows(); ++w) {
      const auto i = static_cast<std::size_t>(w);
      t.rows.push_back({to_string(sol->solver), fmt(w + 1), fmt(sol->plan.mcs[i]),
                        fmt(sol->plan.tbs[i]), fmt(sol->plan.per_tb[i]), fmt(sol->feasible),
                        fmt(sol->tau)});
    }
  }
  return t;
}

bool recovered(double p, double q_hat) { return p >= q_hat; }

}  // namespace

const Table& ExperimentResult::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("no table named " + name);
}

void ExperimentResult::write_csv(std::ostream& out, const Table& t) const {
  out << "# experiment: " << id << '\n';
  out << "# table: " << t.name << '\n';
  out << "# scenario_digest: " << digest << '\n';
  for (const auto& [name, value] : seeds) out << "# " << name << ": " << value << '\n';
  for (const auto& n : notes) out << "# note: " << n << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    out << (c ? "," : "") << t.columns[c];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

std::vector<std::filesystem::path> ExperimentResult::write_all(
    const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto path = dir / (i == 0 ? id + ".csv" : id + "_" + tables[i].name + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, tables[i]);
    written.push_back(path);
  }
  return written;
}

std::vector<UserContext> scenario_users(const Scenario& scenario) {
  const NetworkLayout layout(scenario.mode, scenario.network);
  return place_users(layout, scenario.users, scenario.bler);
}

std::vector<double> layer_recovery(const Scenario& scenario, const AllocationSolution& solution,
                                   const UserContext& user, ErasureView view) {
  const LayerConfig layers = scenario.layers();
  const auto& plan = solution.plan;
  std::vector<double> erasure(plan.mcs.size());
  for (std::size_t i = 0; i < erasure.size(); ++i) {
    erasure[i] = view == ErasureView::kAllocator
                     ? allocator_erasure(user.mcs, plan.mcs[i], scenario.radio.p_hat)
                     : evaluation_erasure(user, plan.mcs[i], scenario.bler);
  }
  if (solution.solver == SolverKind::kMrt) return uncoded_layer_probs(layers, plan, erasure);
  auto p = decode_probs(layers, plan, erasure).p_win;
  for (std::size_t i = p.size(); i-- > 1;) p[i - 1] = std::max(p[i - 1], p[i]);
  return p;
}

std::vector<ValidationPoint> validation_points(const ValidationGrid& grid, std::uint64_t seed,
                                               unsigned workers) {
  const LayerConfig layers = LayerConfig::from_sizes(grid.k);
  const auto L = static_cast<std::size_t>(layers.layers());
  std::vector<ValidationPoint> points;
  std::uint64_t combo = 0;
  for (int n : grid.per_tb) {
    for (double p : grid.erasure) {
      const std::uint64_t combo_seed = derive_seed(seed, combo++);
      const std::vector<double> erasure(L, p);
      for (int t = 1; t <= grid.max_tbs; ++t) {
        const TransmissionPlan plan{std::vector<int>(L, 1), std::vector<int>(L, t),
                                    std::vector<int>(L, n)};
        ValidationPoint pt;
        pt.per_tb = n;
        pt.erasure = p;
        pt.tbs = t;
        pt.analytic = decode_probs(layers, plan, erasure).p_win;
        SimulationOptions sim;
        sim.trials = grid.trials;
        sim.seed = derive_seed(combo_seed, static_cast<std::uint64_t>(t));
        sim.workers = workers;
        const auto mc = simulate_decode_prob(layers, plan, erasure, sim);
        pt.simulated = mc.p_win;
        pt.std_error = mc.std_error;
        const bool saturated = std::all_of(pt.analytic.begin(), pt.analytic.end(),
                                           [&](double a) { return a >= grid.saturation; });
        points.push_back(std::move(pt));
        if (saturated) break;
      }
    }
  }
  return points;
}

ExperimentResult run_validate_approx(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  auto r = start("validate_approx", scenario, options);
  ValidationGrid grid = scenario.validation;
  if (options.trials) grid.trials = *options.trials;
  if (grid.trials < 10000) {
    r.notes.push_back("fewer than 10^4 trials per point; confidence bands are wide");
  }
  const auto points = validation_points(grid, run_seed(scenario, options), options.workers);

  Table curves{"curves",
               {"n", "p", "t", "window", "analytic", "simulated", "std_error", "abs_gap"},
               {}};
  Table summary{"summary", {"n", "p", "points", "max_abs_gap", "max_gap_over_4se"}, {}};
  for (std::size_t begin = 0; begin < points.size();) {
    std::size_t end = begin;
    double max_gap = 0.0;
    double max_excess = -1.0;
    while (end < points.size() && points[end].per_tb == points[begin].per_tb &&
           points[end].erasure == points[begin].erasure) {
      const auto& pt = points[end];
      for (std::size_t w = 0; w < pt.analytic.size(); ++w) {
        const double gap = std::abs(pt.analytic[w] - pt.simulated[w]);
        max_gap = std::max(max_gap, gap);
        max_excess = std::max(max_excess, gap - 4.0 * pt.std_error[w]);
        curves.rows.push_back({fmt(pt.per_tb), fmt(pt.erasure), fmt(pt.tbs),
                               fmt(static_cast<int>(w + 1)), fmt(pt.analytic[w]),
                               fmt(pt.simulated[w]), fmt(pt.std_error[w]), fmt(gap)});
      }
      ++end;
    }
    summary.rows.push_back({fmt(points[begin].per_tb), fmt(points[begin].erasure),
                            fmt(static_cast<int>(end - begin)), fmt(max_gap),
                            fmt(max_excess)});
    begin = end;
  }
  r.seeds.emplace_back("trials", static_cast<std::uint64_t>(grid.trials));
  r.tables = {std::move(curves), std::move(summary)};
  r.runtime_s = seconds_since(t0);
  return r;
}

ExperimentResult run_rbp_sweep(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  auto r = start("sweep_rbp", scenario, options);
  const auto direct = direct_options(scenario, options);
  const auto users = scenario_users(scenario);

  Table t{"sweep", {"n_rbp", "heuristic_feasible", "heuristic_tau", "heuristic_tbs"}, {}};
  if (direct) {
    for (const char* c : {"direct_solver", "direct_feasible", "direct_tau", "direct_tbs",
                          "rel_gap"}) {
      t.columns.emplace_back(c);
    }
  }
  std::vector<int> sweep = scenario.sweep_n_rbp;
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  for (int n_rbp : sweep) {
    RadioConfig radio = scenario.radio;
    radio.n_rbp = n_rbp;
    const auto problem = make_problem(scenario, users, radio);
    const auto heu = heuristic_uep_ram(problem);
    if (!heu.feasible) {
      r.infeasible = true;
      r.notes.push_back("n_rbp " + std::to_string(n_rbp) + ": heuristic found no feasible plan");
    }
    std::vector<std::string> row{fmt(n_rbp), fmt(heu.feasible), fmt(heu.tau),
                                 fmt(heu.plan.total_tbs())};
    if (direct) {
      const auto dir = direct_uep_ram(problem, *direct);
      const double gap = heu.feasible && dir.feasible && dir.tau > 0.0
                             ? (dir.tau - heu.tau) / dir.tau
                             : std::nan("");
      for (auto&& cell : {std::string(to_string(dir.solver)), fmt(dir.feasible), fmt(dir.tau),
                          fmt(dir.plan.total_tbs()), fmt(gap)}) {
        row.push_back(cell);
      }
    }
    t.rows.push_back(std::move(row));
  }
  r.tables = {std::move(t)};
  r.runtime_s = seconds_since(t0);
  return r;
}

ExperimentResult run_coverage_sc(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  auto r = start("coverage_sc", scenario, options);
  const LayerConfig layers = scenario.layers();
  const int L = layers.layers();
  auto users = scenario_users(scenario);
  std::stable_sort(users.begin(), users.end(),
                   [](const auto& a, const auto& b) { return a.distance_m < b.distance_m; });

  Table curves{"curves", {"distance_m", "sinr_db", "mcs"}, {}};
  for (const char* s : {"uep", "mrt"}) {
    for (int l = 1; l <= L; ++l) curves.columns.push_back(std::string(s) + "_p" + fmt(l));
  }
  Table summary{"summary",
                {"layer", "target_fraction", "target_radius_m", "uep_fraction", "uep_radius_m",
                 "mrt_fraction", "mrt_radius_m"},
                {}};
  if (users.empty()) {
    r.tables = {std::move(curves), std::move(summary), plan_table({})};
    r.runtime_s = seconds_since(t0);
    return r;
  }

  const auto problem = make_problem(scenario, users, scenario.radio);
  const auto uep = heuristic_uep_ram(problem);
  const auto mrt = solve_mrt(problem);
  if (!uep.feasible) r.infeasible = true;

  const auto U = users.size();
  std::vector<int> covered_uep(static_cast<std::size_t>(L), 0);
  std::vector<int> covered_mrt(static_cast<std::size_t>(L), 0);
  std::vector<double> radius_uep(static_cast<std::size_t>(L), 0.0);
  std::vector<double> radius_mrt(static_cast<std::size_t>(L), 0.0);
  std::vector<bool> prefix_uep(static_cast<std::size_t>(L), true);
  std::vector<bool> prefix_mrt(static_cast<std::size_t>(L), true);
  for (const auto& u : users) {
    const auto pu = layer_recovery(scenario, uep, u, options.view);
    const auto pm = layer_recovery(scenario, mrt, u, options.view);
    std::vector<std::string> row{fmt(u.distance_m), fmt(u.sinr_db), fmt(u.mcs)};
    for (double p : pu) row.push_back(fmt(p));
    for (double p : pm) row.push_back(fmt(p));
    curves.rows.push_back(std::move(row));
    for (std::size_t l = 0; l < static_cast<std::size_t>(L); ++l) {
      const bool ok_u = recovered(pu[l], scenario.q_hat);
      const bool ok_m = recovered(pm[l], scenario.q_hat);
      covered_uep[l] += ok_u;
      covered_mrt[l] += ok_m;
      prefix_uep[l] = prefix_uep[l] && ok_u;
      prefix_mrt[l] = prefix_mrt[l] && ok_m;
      if (prefix_uep[l]) radius_uep[l] = u.distance_m;
      if (prefix_mrt[l]) radius_mrt[l] = u.distance_m;
    }
  }
  for (int l = 1; l <= L; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    const int need = problem.required_users(l);
    const double target_radius = need > 0 ? users[static_cast<std::size_t>(need - 1)].distance_m : 0.0;
    summary.rows.push_back({fmt(l), fmt(layers.t_hat()[i]), fmt(target_radius),
                            fmt(static_cast<double>(covered_uep[i]) / U), fmt(radius_uep[i]),
                            fmt(static_cast<double>(covered_mrt[i]) / U), fmt(radius_mrt[i])});
  }
  r.tables = {std::move(curves), std::move(summary), plan_table({&uep, &mrt})};
  r.runtime_s = seconds_since(t0);
  return r;
}

ExperimentResult run_psnr_map_sfn(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  auto r = start("psnr_map_sfn", scenario, options);
  const LayerConfig layers = scenario.layers();
  const int L = layers.layers();
  const auto users = scenario_users(scenario);

  Table points{"points", {"x_m", "y_m", "sinr_db", "mcs", "uep_rho_db", "mrt_rho_db"}, {}};
  Table summary{"summary", {"layer", "target_fraction", "uep_fraction", "mrt_fraction"}, {}};
  if (users.empty()) {
    r.tables = {std::move(points), std::move(summary), plan_table({})};
    r.runtime_s = seconds_since(t0);
    return r;
  }
  const auto problem = make_problem(scenario, users, scenario.radio);
  const auto uep = heuristic_uep_ram(problem);
  const auto mrt = solve_mrt(problem);
  if (!uep.feasible) r.infeasible = true;

  std::vector<int> covered_uep(static_cast<std::size_t>(L), 0);
  std::vector<int> covered_mrt(static_cast<std::size_t>(L), 0);
  const auto& psnr = layers.psnr_db();
  auto rho = [&](const std::vector<double>& p) {
    double best = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) best = std::max(best, psnr[l] * p[l]);
    return best;
  };
  for (const auto& u : users) {
    const auto pu = layer_recovery(scenario, uep, u, options.view);
    const auto pm = layer_recovery(scenario, mrt, u, options.view);
    for (std::size_t l = 0; l < static_cast<std::size_t>(L); ++l) {
      covered_uep[l] += recovered(pu[l], scenario.q_hat);
      covered_mrt[l] += recovered(pm[l], scenario.q_hat);
    }
    points.rows.push_back({fmt(u.position.x), fmt(u.position.y), fmt(u.sinr_db), fmt(u.mcs),
                           fmt(rho(pu)), fmt(rho(pm))});
  }
  const auto U = static_cast<double>(users.size());
  for (int l = 1; l <= L; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    summary.rows.push_back({fmt(l), fmt(layers.t_hat()[i]), fmt(covered_uep[i] / U),
                            fmt(covered_mrt[i] / U)});
  }
  r.tables = {std::move(points), std::move(summary), plan_table({&uep, &mrt})};
  r.runtime_s = seconds_since(t0);
  return r;
}

ExperimentResult run_solve(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  auto r = start("solve", scenario, options);
  const auto users = scenario_users(scenario);
  const auto problem = make_problem(scenario, users, scenario.radio);

  std::vector<AllocationSolution> solutions;
  solutions.push_back(heuristic_uep_ram(problem));
  if (const auto direct = direct_options(scenario, options)) {
    solutions.push_back(direct_uep_ram(problem, *direct));
  }
  if (problem.layers.layers() <= kMaxMcs - kMinTableMcs + 1) {
    solutions.push_back(solve_mrt(problem));
  }
  if (!solutions.front().feasible) r.infeasible = true;

  Table report{"feasibility", {"solver", "layer", "required_users", "covered_users", "ok"}, {}};
  std::vector<const AllocationSolution*> ptrs;
  for (const auto& sol : solutions) {
    ptrs.push_back(&sol);
    const auto rep = check_feasibility(sol, problem);
    for (std::size_t l = 0; l < rep.covered_users.size(); ++l) {
      report.rows.push_back({to_string(sol.solver), fmt(static_cast<int>(l + 1)),
                             fmt(rep.required_users[l]), fmt(rep.covered_users[l]),
                             fmt(rep.covered_users[l] >= rep.required_users[l])});
    }
    for (const auto& v : rep.violations) {
      r.notes.push_back(std::string(to_string(sol.solver)) + ": " + v);
    }
  }
  r.tables = {plan_table(ptrs), std::move(report)};
  r.runtime_s = seconds_since(t0);
  return r;
}

}  // namespace uepnc
