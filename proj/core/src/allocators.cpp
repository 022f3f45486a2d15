#include "uepnc/allocators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "uepnc/decode_prob.hpp"

namespace uepnc {
namespace {

constexpr double kTargetSlack = 1e-9;
constexpr int kMaxWindows = 16;

using Mask = std::uint32_t;

struct UserGroups {
  std::vector<int> mcs;    // ascending, distinct
  std::vector<int> count;  // users per entry
};

UserGroups group_users(std::span<const int> user_mcs) {
  std::map<int, int> hist;
  for (int m : user_mcs) ++hist[m];
  UserGroups g;
  for (const auto& [m, c] : hist) {
    g.mcs.push_back(m);
    g.count.push_back(c);
  }
  return g;
}

// Windows a user with feedback `user_mcs` hears with erasure p_hat.
Mask heard_mask(const TransmissionPlan& plan, int user_mcs) {
  Mask mask = 0;
  for (std::size_t i = 0; i < plan.mcs.size(); ++i) {
    if (plan.mcs[i] > 0 && plan.tbs[i] > 0 && plan.mcs[i] <= user_mcs) mask |= Mask{1} << i;
  }
  return mask;
}

Mask delta_mask(const std::vector<bool>& delta) {
  Mask m = 0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i]) m |= Mask{1} << i;
  }
  return m;
}

Mask coded_delta_for(const AllocationProblem& problem, const TransmissionPlan& plan,
                     Mask heard) {
  if (heard == 0) return 0;
  std::vector<double> erasure(plan.mcs.size(), 1.0);
  for (std::size_t i = 0; i < erasure.size(); ++i) {
    if (heard & (Mask{1} << i)) erasure[i] = problem.radio.p_hat;
  }
  const auto probs = decode_probs(problem.layers, plan, erasure).p_win;
  return delta_mask(qos_indicators(probs, problem.q_hat));
}

Mask uncoded_delta_for(const AllocationProblem& problem, const TransmissionPlan& plan,
                       int user_mcs) {
  std::vector<double> erasure(plan.mcs.size(), 1.0);
  for (std::size_t i = 0; i < erasure.size(); ++i) {
    erasure[i] = allocator_erasure(user_mcs, plan.mcs[i], problem.radio.p_hat);
  }
  const auto probs = uncoded_layer_probs(problem.layers, plan, erasure);
  Mask m = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] >= problem.q_hat) m |= Mask{1} << i;
  }
  return m;
}

struct Score {
  long long profit = 0;
  std::vector<int> covered;
  bool coverage_ok = false;
};

// Coded-model score of a plan, sharing probability evaluations between user
// groups that hear the same windows.
Score score_coded(const AllocationProblem& problem, const UserGroups& groups,
                  const TransmissionPlan& plan) {
  const int L = problem.layers.layers();
  Score s;
  s.covered.assign(static_cast<std::size_t>(L), 0);
  std::vector<std::pair<Mask, Mask>> cache;
  for (std::size_t g = 0; g < groups.mcs.size(); ++g) {
    const Mask heard = heard_mask(plan, groups.mcs[g]);
    Mask d = 0;
    auto it = std::find_if(cache.begin(), cache.end(),
                           [&](const auto& e) { return e.first == heard; });
    if (it != cache.end()) {
      d = it->second;
    } else {
      d = coded_delta_for(problem, plan, heard);
      cache.emplace_back(heard, d);
    }
    s.profit += static_cast<long long>(std::popcount(d)) * groups.count[g];
    for (int l = 0; l < L; ++l) {
      if (d & (Mask{1} << l)) s.covered[static_cast<std::size_t>(l)] += groups.count[g];
    }
  }
  s.coverage_ok = true;
  for (int l = 1; l <= L; ++l) {
    if (s.covered[static_cast<std::size_t>(l - 1)] < problem.required_users(l)) {
      s.coverage_ok = false;
    }
  }
  return s;
}

std::vector<std::vector<bool>> expand_delta(const AllocationProblem& problem,
                                            const std::vector<Mask>& per_user) {
  const auto L = static_cast<std::size_t>(problem.layers.layers());
  std::vector<std::vector<bool>> delta(per_user.size(), std::vector<bool>(L, false));
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    for (std::size_t l = 0; l < L; ++l) delta[u][l] = (per_user[u] >> l) & 1U;
  }
  return delta;
}

TransmissionPlan empty_plan(int L) {
  const auto n = static_cast<std::size_t>(L);
  return {std::vector<int>(n, 0), std::vector<int>(n, 0), std::vector<int>(n, 0)};
}

void set_window(const AllocationProblem& problem, TransmissionPlan& plan,
                std::size_t i, int mcs, int tbs) {
  plan.mcs[i] = tbs > 0 ? mcs : 0;
  plan.tbs[i] = tbs;
  plan.per_tb[i] = plan.mcs[i] > 0 ? problem.per_tb(plan.mcs[i]) : 0;
}

// Fills tau/profit/delta/feasible for a UEP-RAM plan.
AllocationSolution finish_coded(const AllocationProblem& problem, SolverKind kind,
                                const TransmissionPlan& plan) {
  AllocationSolution sol;
  sol.solver = kind;
  sol.plan = plan;
  sol.delta = coded_delta(problem, plan);
  for (const auto& row : sol.delta) sol.profit += std::count(row.begin(), row.end(), true);
  const int total = plan.total_tbs();
  sol.tau = total > 0 ? static_cast<double>(sol.profit) / total : 0.0;
  while (sol.skipped_windows < plan.windows() &&
         plan.tbs[static_cast<std::size_t>(sol.skipped_windows)] == 0) {
    ++sol.skipped_windows;
  }
  sol.feasible = total > 0 && check_feasibility(sol, problem).feasible;
  return sol;
}

AllocationSolution infeasible(SolverKind kind, int L) {
  AllocationSolution sol;
  sol.solver = kind;
  sol.plan = empty_plan(L);
  sol.skipped_windows = L;
  return sol;
}

// Incumbent ordering: higher tau, then fewer TBs, then smaller MCS vector.
struct Incumbent {
  bool set = false;
  long long profit = 0;
  int total = 0;
  TransmissionPlan plan;

  bool improved_by(long long p, int t, const TransmissionPlan& cand) const {
    if (!set) return true;
    const long long lhs = p * total;
    const long long rhs = profit * t;
    if (lhs != rhs) return lhs > rhs;
    if (t != total) return t < total;
    return cand.mcs < plan.mcs;
  }
  void take(long long p, int t, const TransmissionPlan& cand) {
    set = true;
    profit = p;
    total = t;
    plan = cand;
  }
};

AllocationSolution direct_exhaustive(const AllocationProblem& problem) {
  const int L = problem.layers.layers();
  const auto groups = group_users(problem.user_mcs);
  const long long max_profit = static_cast<long long>(problem.users()) * L;

  // Every TB-count vector, ordered by total then lexicographically.
  std::vector<std::vector<int>> counts{{}};
  for (int l = 0; l < L; ++l) {
    std::vector<std::vector<int>> grown;
    for (const auto& c : counts) {
      for (int n = 0; n <= problem.n_hat[static_cast<std::size_t>(l)]; ++n) {
        auto d = c;
        d.push_back(n);
        grown.push_back(std::move(d));
      }
    }
    counts.swap(grown);
  }
  auto sum = [](const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
  };
  std::stable_sort(counts.begin(), counts.end(), [&](const auto& a, const auto& b) {
    const int sa = sum(a), sb = sum(b);
    return sa != sb ? sa < sb : a < b;
  });

  // A user hears at most every window, and a heard window carries at most
  // per_tb(m_u) elements per TB; both only raise P. So sending every window
  // at the user's own MCS bounds that user's delta for a given N-vector.
  struct Bound {
    int mcs;
    int count;
  };
  std::vector<Bound> bounds;
  for (std::size_t g = 0; g < groups.mcs.size(); ++g) {
    if (groups.mcs[g] >= kMinTableMcs) {
      bounds.push_back({std::min(groups.mcs[g], kMaxMcs), groups.count[g]});
    }
  }
  std::vector<int> need(static_cast<std::size_t>(L));
  for (int l = 1; l <= L; ++l) need[static_cast<std::size_t>(l - 1)] = problem.required_users(l);
  auto beats_incumbent = [&](long long profit_bound, int total, const Incumbent& best) {
    if (!best.set) return true;
    const long long lhs = profit_bound * best.total;
    const long long rhs = best.profit * total;
    return lhs > rhs || (lhs == rhs && total <= best.total);
  };

  Incumbent best;
  long long evaluated = 0;
  for (const auto& n : counts) {
    const int total = sum(n);
    if (total == 0) continue;
    if (!beats_incumbent(max_profit, total, best)) break;

    long long profit_bound = 0;
    std::vector<int> cover_bound(static_cast<std::size_t>(L), 0);
    for (const auto& b : bounds) {
      TransmissionPlan uniform_plan = empty_plan(L);
      for (std::size_t i = 0; i < n.size(); ++i) set_window(problem, uniform_plan, i, b.mcs, n[i]);
      const Mask d = coded_delta_for(problem, uniform_plan, heard_mask(uniform_plan, b.mcs));
      profit_bound += static_cast<long long>(std::popcount(d)) * b.count;
      for (int l = 0; l < L; ++l) {
        if (d & (Mask{1} << l)) cover_bound[static_cast<std::size_t>(l)] += b.count;
      }
    }
    bool coverable = true;
    for (std::size_t l = 0; l < need.size(); ++l) coverable = coverable && cover_bound[l] >= need[l];
    if (!coverable || !beats_incumbent(profit_bound, total, best)) continue;

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (n[i] > 0) active.push_back(i);
    }
    TransmissionPlan plan = empty_plan(L);
    for (std::size_t i : active) set_window(problem, plan, i, kMinTableMcs, n[i]);
    for (;;) {
      ++evaluated;
      const Score s = score_coded(problem, groups, plan);
      if (s.coverage_ok && best.improved_by(s.profit, total, plan)) {
        best.take(s.profit, total, plan);
      }
      std::size_t pos = active.size();
      while (pos-- > 0) {
        const std::size_t i = active[pos];
        if (plan.mcs[i] < kMaxMcs) {
          set_window(problem, plan, i, plan.mcs[i] + 1, n[i]);
          break;
        }
        set_window(problem, plan, i, kMinTableMcs, n[i]);
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
  }
  if (!best.set) {
    auto sol = infeasible(SolverKind::kDirectExhaustive, L);
    sol.evaluated = evaluated;
    return sol;
  }
  auto sol = finish_coded(problem, SolverKind::kDirectExhaustive, best.plan);
  sol.evaluated = evaluated;
  return sol;
}

AllocationSolution direct_genetic(const AllocationProblem& problem,
                                  const GeneticOptions& opt) {
  const int L = problem.layers.layers();
  const auto Ls = static_cast<std::size_t>(L);
  const auto groups = group_users(problem.user_mcs);
  if (opt.population < 2 || opt.generations < 0 || opt.tournament < 1) {
    throw std::invalid_argument("genetic options out of range");
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> mcs_dist(kMinTableMcs, kMaxMcs);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto tbs_draw = [&](std::size_t i) {
    return std::uniform_int_distribution<int>(0, problem.n_hat[i])(rng);
  };

  struct Genome {
    std::vector<int> mcs;
    std::vector<int> tbs;
  };
  auto to_plan = [&](const Genome& g) {
    TransmissionPlan p = empty_plan(L);
    for (std::size_t i = 0; i < Ls; ++i) set_window(problem, p, i, g.mcs[i], g.tbs[i]);
    return p;
  };

  std::map<std::pair<std::vector<int>, std::vector<int>>, Score> memo;
  Incumbent best;
  long long evaluated = 0;
  auto fitness = [&](const Genome& g) {
    const TransmissionPlan plan = to_plan(g);
    const auto key = std::make_pair(plan.mcs, plan.tbs);
    auto it = memo.find(key);
    if (it == memo.end()) {
      ++evaluated;
      it = memo.emplace(key, score_coded(problem, groups, plan)).first;
    }
    const Score& s = it->second;
    const int total = plan.total_tbs();
    int violations = 0;
    for (int l = 1; l <= L; ++l) {
      if (s.covered[static_cast<std::size_t>(l - 1)] < problem.required_users(l)) ++violations;
    }
    if (total > 0 && violations == 0 && best.improved_by(s.profit, total, plan)) {
      best.take(s.profit, total, plan);
    }
    const double tau = total > 0 ? static_cast<double>(s.profit) / total : 0.0;
    if (opt.constraints == ConstraintHandling::kHard) {
      return violations == 0 && total > 0 ? tau : -1e6 - violations;
    }
    return total > 0 ? tau - opt.penalty * violations : -opt.penalty * (L + 1);
  };

  std::vector<Genome> pop(static_cast<std::size_t>(opt.population));
  for (auto& g : pop) {
    g.mcs.resize(Ls);
    g.tbs.resize(Ls);
    for (std::size_t i = 0; i < Ls; ++i) {
      g.mcs[i] = mcs_dist(rng);
      g.tbs[i] = tbs_draw(i);
    }
  }
  std::vector<double> fit(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);

  auto tournament = [&]() -> const Genome& {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t winner = pick(rng);
    for (int t = 1; t < opt.tournament; ++t) {
      const std::size_t c = pick(rng);
      if (fit[c] > fit[winner]) winner = c;
    }
    return pop[winner];
  };

  for (int gen = 0; gen < opt.generations; ++gen) {
    std::vector<std::size_t> order(pop.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
    std::vector<Genome> next;
    next.reserve(pop.size());
    for (int e = 0; e < opt.elites && e < static_cast<int>(order.size()); ++e) {
      next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    }
    while (next.size() < pop.size()) {
      Genome child = tournament();
      if (unit(rng) < opt.crossover_rate) {
        const Genome& other = tournament();
        for (std::size_t i = 0; i < Ls; ++i) {
          if (unit(rng) < 0.5) {
            child.mcs[i] = other.mcs[i];
            child.tbs[i] = other.tbs[i];
          }
        }
      }
      for (std::size_t i = 0; i < Ls; ++i) {
        if (unit(rng) < opt.mutation_rate) child.mcs[i] = mcs_dist(rng);
        if (unit(rng) < opt.mutation_rate) child.tbs[i] = tbs_draw(i);
      }
      next.push_back(std::move(child));
    }
    pop.swap(next);
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);
  }

  if (!best.set) {
    auto sol = infeasible(SolverKind::kDirectGenetic, L);
    sol.evaluated = evaluated;
    return sol;
  }
  auto sol = finish_coded(problem, SolverKind::kDirectGenetic, best.plan);
  sol.evaluated = evaluated;
  return sol;
}

}  // namespace

AllocationProblem AllocationProblem::make(LayerConfig layers, std::vector<int> user_mcs,
                                          RadioConfig radio, double q_hat) {
  AllocationProblem p;
  const int n_min = tb_capacity(kMinTableMcs, radio.n_rbp, radio.element_bits, radio);
  const int cap = subframe_cap(radio);
  for (int k : layers.k()) p.n_hat.push_back(uepnc::n_hat(k, radio.p_hat, n_min, cap));
  p.layers = std::move(layers);
  p.user_mcs = std::move(user_mcs);
  p.radio = radio;
  p.q_hat = q_hat;
  return p;
}

int AllocationProblem::per_tb(int mcs) const {
  return tb_capacity(mcs, radio.n_rbp, radio.element_bits, radio);
}

int AllocationProblem::required_users(int layer) const {
  const double t = layers.t_hat()[static_cast<std::size_t>(layer - 1)];
  return static_cast<int>(std::ceil(users() * t - kTargetSlack));
}

void AllocationProblem::validate() const {
  if (layers.layers() < 1 || layers.layers() > kMaxWindows) {
    throw std::invalid_argument("AllocationProblem: layer count out of range");
  }
  if (n_hat.size() != layers.k().size()) {
    throw std::invalid_argument("AllocationProblem: n_hat size mismatch");
  }
  for (int n : n_hat) {
    if (n < 0) throw std::invalid_argument("AllocationProblem: negative budget");
  }
  if (!(q_hat >= 0.0 && q_hat <= 1.0)) {
    throw std::invalid_argument("AllocationProblem: q_hat outside [0, 1]");
  }
}

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kHeuristic: return "heuristic";
    case SolverKind::kDirectExhaustive: return "direct-exhaustive";
    case SolverKind::kDirectGenetic: return "direct-genetic";
    case SolverKind::kMrt: return "mrt";
  }
  return "unknown";
}

std::optional<int> solve_s1(std::span<const int> user_mcs, double t_prime) {
  if (user_mcs.empty()) throw std::invalid_argument("solve_s1: no users");
  const auto U = static_cast<double>(user_mcs.size());
  const int need = static_cast<int>(std::ceil(U * t_prime - kTargetSlack));
  for (int m = kMaxMcs; m >= 1; --m) {
    const auto n = std::count_if(user_mcs.begin(), user_mcs.end(),
                                 [m](int u) { return u >= m; });
    if (n >= need) return m;
  }
  return std::nullopt;
}

std::optional<int> solve_s2(const LayerConfig& layers, const TransmissionPlan& prefix,
                            int window, double q_hat, double p_hat, int n_hat) {
  if (window < 1 || window > layers.layers()) {
    throw std::out_of_range("solve_s2: window index out of range");
  }
  const std::vector<double> erasure(static_cast<std::size_t>(layers.layers()), p_hat);
  const auto dist = deficit_distribution(layers, prefix, erasure, window);
  const auto w = static_cast<std::size_t>(window - 1);
  for (int n = 0; n <= n_hat; ++n) {
    if (success_given_deficit(dist, n, prefix.per_tb[w], p_hat) >= q_hat) return n;
  }
  return std::nullopt;
}

std::vector<std::vector<bool>> coded_delta(const AllocationProblem& problem,
                                           const TransmissionPlan& plan) {
  plan.validate(problem.layers.layers());
  std::vector<Mask> per_user;
  std::vector<std::pair<Mask, Mask>> cache;
  for (int m : problem.user_mcs) {
    const Mask heard = heard_mask(plan, m);
    auto it = std::find_if(cache.begin(), cache.end(),
                           [&](const auto& e) { return e.first == heard; });
    if (it == cache.end()) {
      cache.emplace_back(heard, coded_delta_for(problem, plan, heard));
      it = cache.end() - 1;
    }
    per_user.push_back(it->second);
  }
  return expand_delta(problem, per_user);
}

std::vector<std::vector<bool>> uncoded_delta(const AllocationProblem& problem,
                                             const TransmissionPlan& plan) {
  plan.validate(problem.layers.layers());
  std::vector<Mask> per_user;
  for (int m : problem.user_mcs) per_user.push_back(uncoded_delta_for(problem, plan, m));
  return expand_delta(problem, per_user);
}

FeasibilityReport check_feasibility(const AllocationSolution& solution,
                                    const AllocationProblem& problem) {
  const int L = problem.layers.layers();
  const auto& plan = solution.plan;
  FeasibilityReport r;
  const auto delta = solution.solver == SolverKind::kMrt ? uncoded_delta(problem, plan)
                                                          : coded_delta(problem, plan);
  r.covered_users.assign(static_cast<std::size_t>(L), 0);
  for (const auto& row : delta) {
    for (int l = 0; l < L; ++l) r.covered_users[static_cast<std::size_t>(l)] += row[static_cast<std::size_t>(l)];
  }
  r.coverage_ok = true;
  for (int l = 1; l <= L; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    r.required_users.push_back(problem.required_users(l));
    r.achieved_fraction.push_back(
        problem.users() > 0 ? static_cast<double>(r.covered_users[i]) / problem.users() : 0.0);
    if (r.covered_users[i] < r.required_users[i]) {
      r.coverage_ok = false;
      r.violations.push_back("layer " + std::to_string(l) + ": " +
                             std::to_string(r.covered_users[i]) + " users covered, " +
                             std::to_string(r.required_users[i]) + " required");
    }
  }
  r.budget_ok = true;
  for (int l = 1; l <= L; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    if (plan.tbs[i] < 0 || plan.tbs[i] > problem.n_hat[i]) {
      r.budget_ok = false;
      r.violations.push_back("window " + std::to_string(l) + ": N = " +
                             std::to_string(plan.tbs[i]) + " outside [0, " +
                             std::to_string(problem.n_hat[i]) + "]");
    }
  }
  if (solution.solver == SolverKind::kMrt) {
    for (std::size_t i = 1; i < plan.mcs.size(); ++i) {
      if (plan.mcs[i - 1] >= plan.mcs[i]) r.ordering_ok = false;
    }
    if (!r.ordering_ok) r.violations.emplace_back("MCS vector not strictly increasing");
  }
  r.feasible = r.coverage_ok && r.budget_ok && r.ordering_ok;
  return r;
}

AllocationSolution heuristic_uep_ram(const AllocationProblem& problem) {
  problem.validate();
  const int L = problem.layers.layers();
  const auto& t_hat = problem.layers.t_hat();
  const auto groups = group_users(problem.user_mcs);
  long long evaluated = 0;

  for (int s = L - 1; s >= 0; --s) {
    TransmissionPlan plan = empty_plan(L);
    std::vector<double> t_prime(static_cast<std::size_t>(L), 0.0);
    t_prime[static_cast<std::size_t>(s)] = t_hat[0];
    for (int i = s + 1; i < L; ++i) t_prime[static_cast<std::size_t>(i)] = t_hat[static_cast<std::size_t>(i)];

    for (int l = s; l < L; ++l) {
      const auto i = static_cast<std::size_t>(l);
      const auto m = problem.user_mcs.empty() ? std::nullopt
                                              : solve_s1(problem.user_mcs, t_prime[i]);
      // Windows below the capacity table cannot be carried.
      if (m && *m >= kMinTableMcs) {
        plan.mcs[i] = *m;
        plan.per_tb[i] = problem.per_tb(*m);
      }
    }
    for (int l = s; l < L; ++l) {
      const auto i = static_cast<std::size_t>(l);
      if (plan.mcs[i] == 0) continue;
      if (auto n = solve_s2(problem.layers, plan, l + 1, problem.q_hat,
                            problem.radio.p_hat, problem.n_hat[i])) {
        plan.tbs[i] = *n;
      }
    }
    // Windows whose TB count stayed at zero are not transmitted.
    for (int l = 0; l < L; ++l) {
      const auto i = static_cast<std::size_t>(l);
      if (plan.tbs[i] == 0) plan.mcs[i] = plan.per_tb[i] = 0;
    }

    ++evaluated;
    if (plan.total_tbs() == 0 || !score_coded(problem, groups, plan).coverage_ok) continue;

    const TransmissionPlan intermediate = plan;
    for (int l = L - 1; l >= s + 1; --l) {
      const auto i = static_cast<std::size_t>(l);
      if (!(plan.tbs[i - 1] > 0 && plan.tbs[i] > 0)) continue;
      const TransmissionPlan before = plan;
      // Fold window l-1 into window l at the lower MCS.
      plan.mcs[i] = plan.mcs[i - 1];
      plan.per_tb[i] = plan.per_tb[i - 1];
      plan.tbs[i] = 0;
      plan.tbs[i - 1] = 0;
      if (auto n = solve_s2(problem.layers, plan, l + 1, problem.q_hat,
                            problem.radio.p_hat, problem.n_hat[i])) {
        plan.tbs[i] = *n;
        plan.mcs[i - 1] = plan.per_tb[i - 1] = 0;
        if (*n == 0) plan.mcs[i] = plan.per_tb[i] = 0;
      } else {
        plan = before;
      }
    }

    ++evaluated;
    const bool refined_ok =
        plan.total_tbs() > 0 && score_coded(problem, groups, plan).coverage_ok;
    const bool keep_intermediate =
        !refined_ok || intermediate.total_tbs() < plan.total_tbs();
    auto sol = finish_coded(problem, SolverKind::kHeuristic,
                            keep_intermediate ? intermediate : plan);
    sol.intermediate = intermediate;
    sol.skipped_windows = s;
    sol.evaluated = evaluated;
    return sol;
  }
  auto sol = infeasible(SolverKind::kHeuristic, L);
  sol.evaluated = evaluated;
  return sol;
}

double plan_space_size(const AllocationProblem& problem) {
  double size = 1.0;
  for (int n : problem.n_hat) size *= 1.0 + 12.0 * n;
  return size;
}

AllocationSolution direct_uep_ram(const AllocationProblem& problem,
                                  const DirectOptions& options) {
  problem.validate();
  switch (options.mode) {
    case DirectMode::kExhaustive: return direct_exhaustive(problem);
    case DirectMode::kGenetic: return direct_genetic(problem, options.genetic);
    case DirectMode::kAuto: break;
  }
  return plan_space_size(problem) <= options.budget
             ? direct_exhaustive(problem)
             : direct_genetic(problem, options.genetic);
}

AllocationSolution solve_mrt(const AllocationProblem& problem) {
  problem.validate();
  const int L = problem.layers.layers();
  constexpr int kChoices = kMaxMcs - kMinTableMcs + 1;
  if (L > kChoices) throw std::invalid_argument("solve_mrt: more layers than MCS indices");
  const auto groups = group_users(problem.user_mcs);
  const auto& psnr = problem.layers.psnr_db();

  std::vector<int> mcs(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) mcs[static_cast<std::size_t>(i)] = kMinTableMcs + i;
  auto make_plan = [&](const std::vector<int>& m) {
    TransmissionPlan p = empty_plan(L);
    p.mcs = m;
    for (std::size_t i = 0; i < m.size(); ++i) p.per_tb[i] = problem.per_tb(m[i]);
    p.tbs = uncoded_tbs(problem.layers, p);
    return p;
  };

  std::optional<TransmissionPlan> best;
  double best_value = -1.0;
  long long evaluated = 0;
  for (;;) {
    const TransmissionPlan plan = make_plan(mcs);
    ++evaluated;
    double value = 0.0;
    for (std::size_t g = 0; g < groups.mcs.size(); ++g) {
      std::vector<double> erasure(static_cast<std::size_t>(L));
      for (std::size_t i = 0; i < erasure.size(); ++i) {
        erasure[i] = allocator_erasure(groups.mcs[g], plan.mcs[i], problem.radio.p_hat);
      }
      const auto probs = uncoded_layer_probs(problem.layers, plan, erasure);
      double rho = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) rho = std::max(rho, psnr[i] * probs[i]);
      value += rho * groups.count[g];
    }
    if (value > best_value) {
      best_value = value;
      best = plan;
    }
    // Next strictly increasing combination in lexicographic order.
    int pos = L - 1;
    while (pos >= 0 && mcs[static_cast<std::size_t>(pos)] == kMaxMcs - (L - 1 - pos)) --pos;
    if (pos < 0) break;
    ++mcs[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < L; ++j) {
      mcs[static_cast<std::size_t>(j)] = mcs[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  AllocationSolution sol;
  sol.solver = SolverKind::kMrt;
  sol.plan = *best;
  sol.delta = uncoded_delta(problem, sol.plan);
  for (const auto& row : sol.delta) sol.profit += std::count(row.begin(), row.end(), true);
  const int total = sol.plan.total_tbs();
  sol.tau = total > 0 ? static_cast<double>(sol.profit) / total : 0.0;
  sol.feasible = check_feasibility(sol, problem).feasible;
  sol.evaluated = evaluated;
  return sol;
}

}  // namespace uepnc
