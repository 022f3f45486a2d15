#pragma once

#include <string>
#include <vector>

namespace uepnc {

// Windows and layers are numbered from 1 wherever an API takes a single
// index (`window`, `layer`); per-layer vectors are indexed from 0.

/// Layered source message description.
class LayerConfig {
 public:
  LayerConfig() = default;

  /// Throws std::invalid_argument when sizes disagree, any k < 1, or a
  /// coverage target lies outside (0, 1]. Empty psnr/t_hat/bitrate vectors
  /// are filled with 0 / 1 / 0.
  LayerConfig(std::vector<int> k, std::vector<double> bitrate_bps,
              std::vector<double> psnr_db, std::vector<double> t_hat);

  /// Element counts only; the remaining fields take their defaults.
  static LayerConfig from_sizes(std::vector<int> k);

  int layers() const { return static_cast<int>(k_.size()); }
  const std::vector<int>& k() const { return k_; }
  /// K_l for l = 1..L, stored at position l-1.
  const std::vector<int>& cumulative() const { return cumulative_; }
  int cumulative(int window) const;
  int total() const { return cumulative_.empty() ? 0 : cumulative_.back(); }

  const std::vector<double>& bitrate_bps() const { return bitrate_bps_; }
  const std::vector<double>& psnr_db() const { return psnr_db_; }
  const std::vector<double>& t_hat() const { return t_hat_; }

  /// Soft checks (non-increasing coverage targets); returns human-readable
  /// warnings rather than throwing.
  std::vector<std::string> warnings() const;

 private:
  std::vector<int> k_;
  std::vector<int> cumulative_;
  std::vector<double> bitrate_bps_;
  std::vector<double> psnr_db_;
  std::vector<double> t_hat_;
};

/// Decision variables for one GoP: MCS, TB count and TB capacity per window.
/// mcs == 0 marks a window that is not transmitted.
struct TransmissionPlan {
  std::vector<int> mcs;
  std::vector<int> tbs;
  std::vector<int> per_tb;

  int windows() const { return static_cast<int>(tbs.size()); }
  int total_tbs() const;
  /// Throws std::invalid_argument unless all three vectors have `layers`
  /// entries and N, n are non-negative.
  void validate(int layers) const;

  friend bool operator==(const TransmissionPlan&,
                         const TransmissionPlan&) = default;
};

enum class Provenance { kAnalytic, kSimulated };

/// Per-window recovery probabilities.
struct DecodeProbability {
  std::vector<double> p_win;
  Provenance provenance = Provenance::kAnalytic;
  /// Standard error per window; empty for analytic values.
  std::vector<double> std_error;
  long long trials = 0;
};

}  // namespace uepnc
