#pragma once

#include <span>
#include <vector>

#include "uepnc/types.hpp"

namespace uepnc {

/// How the carried deficit of the threshold recursion is offset.
enum class DeficitRule {
  /// next = k_new + max(deficit - r_prev * n_prev, 0): the previous window's
  /// received supply offsets the previous window's requirement.
  kPreviousWindow,
  /// Literal indexing: the current window's PDU count r_l scales n_{l-1}.
  kAsPrinted,
};

/// k_new + max(deficit_in - r * n, 0). Throws on negative arguments.
int deficit_transition(int deficit_in, int r, int n, int k_new);

/// Binomial pmf over r = 0..trials for success probability `success`.
std::vector<double> binomial_pmf(int trials, double success);

/// Recovery probability of window `window` under the large-field threshold
/// model, by dynamic programming over (window, residual deficit).
double window_decode_prob(const LayerConfig& layers, const TransmissionPlan& plan,
                          std::span<const double> erasure, int window,
                          DeficitRule rule = DeficitRule::kPreviousWindow);

/// All windows in one forward pass.
DecodeProbability decode_probs(const LayerConfig& layers,
                               const TransmissionPlan& plan,
                               std::span<const double> erasure,
                               DeficitRule rule = DeficitRule::kPreviousWindow);

/// Distribution of the deficit r_min entering window `window` (index = deficit,
/// size K_L + 1), under the kPreviousWindow rule. Lets callers sweep N_window
/// without redoing the prefix.
std::vector<double> deficit_distribution(const LayerConfig& layers,
                                         const TransmissionPlan& plan,
                                         std::span<const double> erasure,
                                         int window);

/// P(r * n >= deficit) for r ~ Bin(tbs, 1 - erasure), folded over a deficit
/// distribution.
double success_given_deficit(std::span<const double> deficit_dist, int tbs,
                             int per_tb, double erasure);

/// Literal nested summation over every r-vector; the oracle for the DP.
/// Throws std::length_error when prod(N_i + 1) exceeds `max_combinations`.
double brute_force_decode_prob(const LayerConfig& layers,
                               const TransmissionPlan& plan,
                               std::span<const double> erasure, int window,
                               DeficitRule rule = DeficitRule::kPreviousWindow,
                               long long max_combinations = 1000000);

/// delta_l = OR_{i >= l} (P_i >= q_hat), from per-window probabilities.
std::vector<bool> qos_indicators(std::span<const double> window_probs, double q_hat);

bool qos_indicator(const LayerConfig& layers, const TransmissionPlan& plan,
                   std::span<const double> erasure, double q_hat, int layer);

/// Recovered layers over total TBs. `delta` is row-major U x L.
/// Throws std::domain_error when sum(N) == 0.
double profit_cost_ratio(const std::vector<std::vector<bool>>& delta,
                         std::span<const int> tbs);

/// max_l psnr_l * P_l, with P from the coded model.
double max_psnr_uep(const LayerConfig& layers, const TransmissionPlan& plan,
                    std::span<const double> erasure);

/// TBs needed to carry layer l uncoded: ceil(k_l / n_l); 0 when n_l == 0.
std::vector<int> uncoded_tbs(const LayerConfig& layers, const TransmissionPlan& plan);

/// Probability that layers 1..l all arrive uncoded:
/// prod_{i<=l} (1 - p_i)^{ceil(k_i / n_i)}; zero past any layer with n_i == 0.
std::vector<double> uncoded_layer_probs(const LayerConfig& layers,
                                        const TransmissionPlan& plan,
                                        std::span<const double> erasure);

/// max_l psnr_l * P_l with the uncoded (multi-rate) delivery model.
double max_psnr_mrt(const LayerConfig& layers, const TransmissionPlan& plan,
                    std::span<const double> erasure);

}  // namespace uepnc
