#include "uepnc/decode_prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uepnc {
namespace {

constexpr int kLogSpaceThreshold = 500;

void check_inputs(const LayerConfig& layers, const TransmissionPlan& plan,
                  std::span<const double> erasure) {
  plan.validate(layers.layers());
  if (erasure.size() != static_cast<std::size_t>(layers.layers())) {
    throw std::invalid_argument("erasure vector size does not match layers");
  }
  for (double p : erasure) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("erasure probability outside [0, 1]");
    }
  }
}

// tail[d] = P(r * n >= d) for d = 0..max_deficit.
std::vector<double> tail_table(const std::vector<double>& pmf, int per_tb,
                               int max_deficit) {
  std::vector<double> suffix(pmf.size() + 1, 0.0);
  for (std::size_t r = pmf.size(); r-- > 0;) suffix[r] = suffix[r + 1] + pmf[r];
  std::vector<double> tail(static_cast<std::size_t>(max_deficit) + 1, 0.0);
  const int rmax = static_cast<int>(pmf.size()) - 1;
  for (int d = 0; d <= max_deficit; ++d) {
    if (d == 0) {
      tail[0] = suffix[0];
      continue;
    }
    if (per_tb == 0) continue;
    const int rneed = (d + per_tb - 1) / per_tb;
    if (rneed <= rmax) tail[static_cast<std::size_t>(d)] = suffix[static_cast<std::size_t>(rneed)];
  }
  return tail;
}

struct ForwardPass {
  std::vector<double> p_win;
  std::vector<double> entering;  // deficit distribution entering `stop`
};

// Runs windows 1..stop. When `entering_only`, the last window's success is
// not evaluated and the distribution entering it is returned instead.
ForwardPass forward(const LayerConfig& layers, const TransmissionPlan& plan,
                    std::span<const double> erasure, int stop, DeficitRule rule,
                    bool entering_only) {
  const auto& K = layers.cumulative();
  const auto& k = layers.k();
  const int kmax = layers.total();
  ForwardPass out;
  std::vector<double> dist(static_cast<std::size_t>(kmax) + 1, 0.0);
  std::vector<double> next(dist.size());
  dist[static_cast<std::size_t>(K[0])] = 1.0;

  for (int i = 0; i < stop; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (entering_only && i == stop - 1) break;
    const auto pmf = binomial_pmf(plan.tbs[ii], 1.0 - erasure[ii]);
    const int n = plan.per_tb[ii];

    if (rule == DeficitRule::kPreviousWindow || i == 0) {
      const auto tail = tail_table(pmf, n, kmax);
      double success = 0.0;
      for (int d = 0; d <= kmax; ++d) {
        success += dist[static_cast<std::size_t>(d)] * tail[static_cast<std::size_t>(d)];
      }
      out.p_win.push_back(success);
      if (i + 1 >= stop) break;
      if (rule == DeficitRule::kAsPrinted) continue;  // d_1 = K_1 carries over
      std::fill(next.begin(), next.end(), 0.0);
      const int knew = k[ii + 1];
      for (int d = 0; d <= kmax; ++d) {
        const double w = dist[static_cast<std::size_t>(d)];
        if (w == 0.0) continue;
        for (std::size_t r = 0; r < pmf.size(); ++r) {
          const int carried = std::max(d - static_cast<int>(r) * n, 0);
          next[static_cast<std::size_t>(knew + carried)] += w * pmf[r];
        }
      }
      dist.swap(next);
      continue;
    }

    // kAsPrinted, i >= 1: r_i scales n_{i-1} and also feeds the indicator.
    const int nprev = plan.per_tb[ii - 1];
    std::fill(next.begin(), next.end(), 0.0);
    double success = 0.0;
    for (int d = 0; d <= kmax; ++d) {
      const double w = dist[static_cast<std::size_t>(d)];
      if (w == 0.0) continue;
      for (std::size_t r = 0; r < pmf.size(); ++r) {
        const int dn = k[ii] + std::max(d - static_cast<int>(r) * nprev, 0);
        const double m = w * pmf[r];
        next[static_cast<std::size_t>(std::min(dn, kmax))] += m;
        if (static_cast<long long>(r) * n >= dn) success += m;
      }
    }
    out.p_win.push_back(success);
    dist.swap(next);
  }
  out.entering = std::move(dist);
  return out;
}

double choose(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * static_cast<double>(n - r + i) / i;
  return c;
}

}  // namespace

int deficit_transition(int deficit_in, int r, int n, int k_new) {
  if (deficit_in < 0 || r < 0 || n < 0 || k_new < 0) {
    throw std::invalid_argument("deficit_transition: negative argument");
  }
  const long long supply = static_cast<long long>(r) * n;
  return k_new + static_cast<int>(std::max<long long>(deficit_in - supply, 0));
}

std::vector<double> binomial_pmf(int trials, double success) {
  if (trials < 0) throw std::invalid_argument("binomial_pmf: negative trials");
  std::vector<double> pmf(static_cast<std::size_t>(trials) + 1, 0.0);
  if (success <= 0.0) {
    pmf.front() = 1.0;
    return pmf;
  }
  if (success >= 1.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  const double fail = 1.0 - success;
  if (trials <= kLogSpaceThreshold) {
    double c = 1.0;
    for (int r = 0; r <= trials; ++r) {
      if (r > 0) c = c * static_cast<double>(trials - r + 1) / r;
      pmf[static_cast<std::size_t>(r)] =
          c * std::pow(success, r) * std::pow(fail, trials - r);
    }
    return pmf;
  }
  const double ls = std::log(success);
  const double lf = std::log1p(-success);
  const double lgn = std::lgamma(trials + 1.0);
  for (int r = 0; r <= trials; ++r) {
    const double lg = lgn - std::lgamma(r + 1.0) - std::lgamma(trials - r + 1.0);
    pmf[static_cast<std::size_t>(r)] = std::exp(lg + r * ls + (trials - r) * lf);
  }
  return pmf;
}

DecodeProbability decode_probs(const LayerConfig& layers,
                               const TransmissionPlan& plan,
                               std::span<const double> erasure, DeficitRule rule) {
  check_inputs(layers, plan, erasure);
  DecodeProbability out;
  out.provenance = Provenance::kAnalytic;
  out.p_win = forward(layers, plan, erasure, layers.layers(), rule, false).p_win;
  for (auto& p : out.p_win) p = std::clamp(p, 0.0, 1.0);
  return out;
}

double window_decode_prob(const LayerConfig& layers, const TransmissionPlan& plan,
                          std::span<const double> erasure, int window,
                          DeficitRule rule) {
  check_inputs(layers, plan, erasure);
  if (window < 1 || window > layers.layers()) {
    throw std::out_of_range("window index out of range");
  }
  const auto pass = forward(layers, plan, erasure, window, rule, false);
  return std::clamp(pass.p_win.back(), 0.0, 1.0);
}

std::vector<double> deficit_distribution(const LayerConfig& layers,
                                         const TransmissionPlan& plan,
                                         std::span<const double> erasure,
                                         int window) {
  check_inputs(layers, plan, erasure);
  if (window < 1 || window > layers.layers()) {
    throw std::out_of_range("window index out of range");
  }
  return forward(layers, plan, erasure, window, DeficitRule::kPreviousWindow, true)
      .entering;
}

double success_given_deficit(std::span<const double> deficit_dist, int tbs,
                             int per_tb, double erasure) {
  if (deficit_dist.empty()) return 0.0;
  const auto pmf = binomial_pmf(tbs, 1.0 - erasure);
  const auto tail =
      tail_table(pmf, per_tb, static_cast<int>(deficit_dist.size()) - 1);
  double s = 0.0;
  for (std::size_t d = 0; d < deficit_dist.size(); ++d) s += deficit_dist[d] * tail[d];
  return std::clamp(s, 0.0, 1.0);
}

double brute_force_decode_prob(const LayerConfig& layers,
                               const TransmissionPlan& plan,
                               std::span<const double> erasure, int window,
                               DeficitRule rule, long long max_combinations) {
  check_inputs(layers, plan, erasure);
  if (window < 1 || window > layers.layers()) {
    throw std::out_of_range("window index out of range");
  }
  const auto l = static_cast<std::size_t>(window);
  long long combos = 1;
  for (std::size_t i = 0; i < l; ++i) {
    combos *= plan.tbs[i] + 1LL;
    if (combos > max_combinations) {
      throw std::length_error("brute_force_decode_prob: enumeration bound exceeded");
    }
  }
  const auto& K = layers.cumulative();
  const auto& k = layers.k();
  std::vector<int> r(l, 0);
  double total = 0.0;
  for (;;) {
    double weight = 1.0;
    for (std::size_t i = 0; i < l; ++i) {
      const int N = plan.tbs[i];
      weight *= choose(N, r[i]) * std::pow(1.0 - erasure[i], r[i]) *
                std::pow(erasure[i], N - r[i]);
    }
    int rmin = K[0];
    for (std::size_t i = 1; i < l; ++i) {
      const int rr = rule == DeficitRule::kPreviousWindow ? r[i - 1] : r[i];
      rmin = k[i] + std::max(rmin - rr * plan.per_tb[i - 1], 0);
    }
    if (static_cast<long long>(r[l - 1]) * plan.per_tb[l - 1] >= rmin) total += weight;

    std::size_t pos = 0;
    while (pos < l && ++r[pos] > plan.tbs[pos]) r[pos++] = 0;
    if (pos == l) break;
  }
  return total;
}

std::vector<bool> qos_indicators(std::span<const double> window_probs,
                                 double q_hat) {
  std::vector<bool> delta(window_probs.size(), false);
  bool any = false;
  for (std::size_t i = window_probs.size(); i-- > 0;) {
    any = any || window_probs[i] >= q_hat;
    delta[i] = any;
  }
  return delta;
}

bool qos_indicator(const LayerConfig& layers, const TransmissionPlan& plan,
                   std::span<const double> erasure, double q_hat, int layer) {
  if (layer < 1 || layer > layers.layers()) {
    throw std::out_of_range("layer index out of range");
  }
  const auto probs = decode_probs(layers, plan, erasure).p_win;
  return qos_indicators(probs, q_hat)[static_cast<std::size_t>(layer - 1)];
}

double profit_cost_ratio(const std::vector<std::vector<bool>>& delta,
                         std::span<const int> tbs) {
  long long cost = 0;
  for (int n : tbs) cost += n;
  if (cost <= 0) throw std::domain_error("profit_cost_ratio: no TBs transmitted");
  long long profit = 0;
  for (const auto& row : delta) {
    profit += std::count(row.begin(), row.end(), true);
  }
  return static_cast<double>(profit) / static_cast<double>(cost);
}

double max_psnr_uep(const LayerConfig& layers, const TransmissionPlan& plan,
                    std::span<const double> erasure) {
  const auto probs = decode_probs(layers, plan, erasure).p_win;
  double best = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    best = std::max(best, layers.psnr_db()[i] * probs[i]);
  }
  return best;
}

std::vector<int> uncoded_tbs(const LayerConfig& layers, const TransmissionPlan& plan) {
  plan.validate(layers.layers());
  std::vector<int> out(layers.k().size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int n = plan.per_tb[i];
    out[i] = n > 0 ? (layers.k()[i] + n - 1) / n : 0;
  }
  return out;
}

std::vector<double> uncoded_layer_probs(const LayerConfig& layers,
                                        const TransmissionPlan& plan,
                                        std::span<const double> erasure) {
  check_inputs(layers, plan, erasure);
  const auto nbar = uncoded_tbs(layers, plan);
  std::vector<double> out(nbar.size(), 0.0);
  double acc = 1.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    acc = plan.per_tb[i] > 0 ? acc * std::pow(1.0 - erasure[i], nbar[i]) : 0.0;
    out[i] = acc;
  }
  return out;
}

double max_psnr_mrt(const LayerConfig& layers, const TransmissionPlan& plan,
                    std::span<const double> erasure) {
  const auto probs = uncoded_layer_probs(layers, plan, erasure);
  double best = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    best = std::max(best, layers.psnr_db()[i] * probs[i]);
  }
  return best;
}

}  // namespace uepnc
