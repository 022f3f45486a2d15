#include "uepnc/types.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace uepnc {

LayerConfig::LayerConfig(std::vector<int> k, std::vector<double> bitrate_bps,
                         std::vector<double> psnr_db, std::vector<double> t_hat)
    : k_(std::move(k)),
      bitrate_bps_(std::move(bitrate_bps)),
      psnr_db_(std::move(psnr_db)),
      t_hat_(std::move(t_hat)) {
  const auto n = k_.size();
  if (n == 0) throw std::invalid_argument("LayerConfig: no layers");
  if (bitrate_bps_.empty()) bitrate_bps_.assign(n, 0.0);
  if (psnr_db_.empty()) psnr_db_.assign(n, 0.0);
  if (t_hat_.empty()) t_hat_.assign(n, 1.0);
  if (bitrate_bps_.size() != n || psnr_db_.size() != n || t_hat_.size() != n) {
    throw std::invalid_argument("LayerConfig: per-layer vectors differ in size");
  }
  cumulative_.resize(n);
  int acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k_[i] < 1) throw std::invalid_argument("LayerConfig: k must be >= 1");
    if (!(t_hat_[i] > 0.0 && t_hat_[i] <= 1.0)) {
      throw std::invalid_argument("LayerConfig: coverage target outside (0, 1]");
    }
    acc += k_[i];
    cumulative_[i] = acc;
  }
}

LayerConfig LayerConfig::from_sizes(std::vector<int> k) {
  return LayerConfig(std::move(k), {}, {}, {});
}

int LayerConfig::cumulative(int window) const {
  if (window < 1 || window > layers()) {
    throw std::out_of_range("LayerConfig: window index out of range");
  }
  return cumulative_[window - 1];
}

std::vector<std::string> LayerConfig::warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < t_hat_.size(); ++i) {
    if (t_hat_[i] > t_hat_[i - 1]) {
      std::ostringstream os;
      os << "coverage target of layer " << i + 1 << " (" << t_hat_[i]
         << ") exceeds that of layer " << i << " (" << t_hat_[i - 1] << ")";
      out.push_back(os.str());
    }
  }
  return out;
}

int TransmissionPlan::total_tbs() const {
  return std::accumulate(tbs.begin(), tbs.end(), 0);
}

void TransmissionPlan::validate(int layers) const {
  const auto n = static_cast<std::size_t>(layers);
  if (mcs.size() != n || tbs.size() != n || per_tb.size() != n) {
    throw std::invalid_argument("TransmissionPlan: size does not match layers");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (tbs[i] < 0 || per_tb[i] < 0) {
      throw std::invalid_argument("TransmissionPlan: negative N or n");
    }
  }
}

}  // namespace uepnc
