#pragma once

// Seeded generator of small allocation problems for solver cross-checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "uepnc/allocators.hpp"
#include "uepnc/channel.hpp"

namespace uepnc::testing {

struct RandomProblemLimits {
  int max_users = 40;
  int max_layers = 3;
  int max_k = 30;
  int max_n_hat = 20;
};

namespace detail {

struct Draw {
  std::mt19937_64& rng;
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

/// 1-3 layers with sizes up to max_k and non-increasing coverage targets.
inline LayerConfig random_layers(Draw& d, const RandomProblemLimits& lim) {
  const int L = std::min(lim.max_layers, d.uniform(0, 9) == 0 ? 1 : d.uniform(2, 3));
  std::vector<int> k;
  std::vector<double> t_hat;
  double t = d.real(0.8, 1.0);
  for (int l = 0; l < L; ++l) {
    k.push_back(d.uniform(1, lim.max_k));
    t_hat.push_back(t);
    t = std::max(0.1, t - d.real(0.0, 0.3));
  }
  return LayerConfig(k, {}, {}, t_hat);
}

inline bool within_limits(const AllocationProblem& problem, const RandomProblemLimits& lim) {
  return std::all_of(problem.n_hat.begin(), problem.n_hat.end(),
                     [&](int n) { return n <= lim.max_n_hat; });
}

}  // namespace detail

/// Draws one problem with user MCS i.i.d. in 2..15, so some users sit below
/// the capacity table. N_RBP is 1 or 2 to keep N-hat small.
inline AllocationProblem random_problem(std::mt19937_64& rng,
                                        const RandomProblemLimits& lim = {}) {
  detail::Draw d{rng};
  for (;;) {
    const LayerConfig layers = detail::random_layers(d, lim);
    RadioConfig radio;
    radio.n_rbp = d.uniform(1, 2);
    std::vector<int> users(static_cast<std::size_t>(d.uniform(5, lim.max_users)));
    for (auto& m : users) m = d.uniform(2, 15);
    auto problem = AllocationProblem::make(layers, users, radio, 0.99);
    if (detail::within_limits(problem, lim)) return problem;
  }
}

/// Draws one problem whose users are spread uniformly over the area of the
/// serving sector of the single-cell layout, with MCS read off the channel
/// model. Layers, targets and N_RBP are drawn as in random_problem.
inline AllocationProblem random_cell_problem(std::mt19937_64& rng,
                                             const RandomProblemLimits& lim = {}) {
  static const NetworkLayout layout(DeliveryMode::kSingleCell);
  const BlerModel bler;
  const Point site = layout.sites()[static_cast<std::size_t>(layout.serving_sites().front())];
  const double r_min = layout.params().min_distance_m;
  const double r_max = layout.params().isd_m / std::sqrt(3.0);
  detail::Draw d{rng};
  for (;;) {
    const LayerConfig layers = detail::random_layers(d, lim);
    RadioConfig radio;
    radio.n_rbp = d.uniform(1, 2);
    std::vector<int> users(static_cast<std::size_t>(d.uniform(5, lim.max_users)));
    for (auto& m : users) {
      const double r = std::sqrt(d.real(r_min * r_min, r_max * r_max));
      const double a = d.real(-std::numbers::pi / 3.0, std::numbers::pi / 3.0);
      m = cqi_mcs(sinr_at(layout, {site.x + r * std::cos(a), site.y + r * std::sin(a)}), bler);
    }
    auto problem = AllocationProblem::make(layers, users, radio, 0.99);
    if (detail::within_limits(problem, lim)) return problem;
  }
}

}  // namespace uepnc::testing
