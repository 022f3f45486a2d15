#include "uepnc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace uepnc {
namespace {

// Guards ceil/floor against products like 0.1 * 30 = 3.0000000000000004.
constexpr double kRoundingSlack = 1e-9;

constexpr double kReferenceElementBits = 16384.0;

double to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double shadowing_db(const PropagationParams& params, int site, Point p) {
  if (params.shadowing_std_db <= 0.0) return 0.0;
  const auto qx = static_cast<std::int64_t>(std::llround(p.x * 100.0));
  const auto qy = static_cast<std::int64_t>(std::llround(p.y * 100.0));
  std::uint64_t s = mix(params.shadowing_seed + 0x9E3779B97F4A7C15ULL *
                                                    static_cast<std::uint64_t>(site + 1));
  s = mix(s ^ static_cast<std::uint64_t>(qx));
  s = mix(s ^ static_cast<std::uint64_t>(qy));
  std::mt19937_64 rng(s);
  std::normal_distribution<double> normal(0.0, params.shadowing_std_db);
  return normal(rng);
}

}  // namespace

double BlerModel::threshold(int mcs) const {
  if (mcs < kMinTableMcs || mcs > kMaxMcs) {
    throw std::out_of_range("BlerModel: MCS outside 4..15");
  }
  return gamma_db[static_cast<std::size_t>(mcs - kMinTableMcs)];
}

double BlerModel::bler(double sinr_db, int mcs) const {
  const double g = threshold(mcs);
  return std::min(1.0, p_hat * std::pow(10.0, -(sinr_db - g) / delta_db));
}

int source_elements(double bitrate_bps, double d_gop_s, double element_bits) {
  if (!(bitrate_bps > 0.0 && d_gop_s > 0.0 && element_bits > 0.0)) {
    throw std::invalid_argument("source_elements: inputs must be positive");
  }
  return static_cast<int>(
      std::ceil(bitrate_bps * d_gop_s / element_bits - kRoundingSlack));
}

int tb_capacity(int mcs, int n_rbp, double element_bits, const RadioConfig& radio) {
  if (mcs < kMinTableMcs || mcs > kMaxMcs) {
    throw std::out_of_range("tb_capacity: MCS outside 4..15");
  }
  if (n_rbp < 1 || !(element_bits > 0.0)) {
    throw std::invalid_argument("tb_capacity: N_RBP and H must be positive");
  }
  const int ratio = radio.capacity_ratio[static_cast<std::size_t>(mcs - kMinTableMcs)];
  if (element_bits == kReferenceElementBits) return ratio * n_rbp;
  return static_cast<int>(std::floor(ratio * n_rbp * kReferenceElementBits /
                                         element_bits + kRoundingSlack));
}

int subframe_cap(const RadioConfig& radio) {
  return static_cast<int>(
      std::floor(radio.f_embms * radio.d_gop_s / radio.d_tti_s + kRoundingSlack));
}

int n_hat(int k, double p_hat, int n_min, int cap) {
  if (k < 0 || n_min < 1) throw std::invalid_argument("n_hat: bad k or n_min");
  const int base = (k + n_min - 1) / n_min;
  const int extra = static_cast<int>(std::ceil(p_hat * base - kRoundingSlack));
  const int total = base + std::max(extra, 0);
  return cap >= 0 ? std::min(total, cap) : total;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

NetworkLayout::NetworkLayout(DeliveryMode mode, PropagationParams params)
    : mode_(mode), params_(params) {
  const double isd = params_.isd_m;
  const double deg = std::numbers::pi / 180.0;
  sites_.push_back({0.0, 0.0});
  for (int j = 0; j < 6; ++j) {
    const double a = (30.0 + 60.0 * j) * deg;
    sites_.push_back({isd * std::cos(a), isd * std::sin(a)});
  }
  for (int j = 0; j < 6; ++j) {
    const double a = (30.0 + 60.0 * j) * deg;
    sites_.push_back({2.0 * isd * std::cos(a), 2.0 * isd * std::sin(a)});
    const double b = (60.0 * j) * deg;
    const double r = std::sqrt(3.0) * isd;
    sites_.push_back({r * std::cos(b), r * std::sin(b)});
  }
  for (int s = 0; s < static_cast<int>(sites_.size()); ++s) {
    for (int j = 0; j < 3; ++j) sectors_.push_back({s, 120.0 * j});
  }
  serving_sites_ = mode_ == DeliveryMode::kSingleCell ? std::vector<int>{0} : params_.sfn_sites;
  std::sort(serving_sites_.begin(), serving_sites_.end());
  serving_sites_.erase(std::unique(serving_sites_.begin(), serving_sites_.end()),
                       serving_sites_.end());
  if (serving_sites_.empty()) throw std::invalid_argument("NetworkLayout: empty SFN");
  for (int s : serving_sites_) {
    if (s < 0 || s >= static_cast<int>(sites_.size())) {
      throw std::invalid_argument("NetworkLayout: SFN site index out of range");
    }
  }
}

bool NetworkLayout::is_serving(const Sector& s) const {
  if (mode_ == DeliveryMode::kSingleCell) return s.site == 0 && s.azimuth_deg == 0.0;
  return std::find(serving_sites_.begin(), serving_sites_.end(), s.site) !=
         serving_sites_.end();
}

bool NetworkLayout::is_silent(const Sector& s) const {
  return mode_ == DeliveryMode::kSingleCell && s.site == 0 && !is_serving(s);
}

Point NetworkLayout::service_centre() const {
  Point c;
  for (int s : serving_sites_) {
    c.x += sites_[static_cast<std::size_t>(s)].x;
    c.y += sites_[static_cast<std::size_t>(s)].y;
  }
  const auto n = static_cast<double>(serving_sites_.size());
  // Snap round-off so symmetric layouts centre exactly on zero.
  c.x = std::abs(c.x / n) < 1e-9 ? 0.0 : c.x / n;
  c.y = std::abs(c.y / n) < 1e-9 ? 0.0 : c.y / n;
  return c;
}

double pathloss_db(const PropagationParams& params, double distance_m) {
  const double d = std::max(distance_m, params.min_distance_m);
  return params.pathloss_intercept_db + params.pathloss_slope_db * std::log10(d / 1000.0);
}

double antenna_gain_db(const PropagationParams& params, double off_boresight_deg) {
  double a = std::fmod(off_boresight_deg, 360.0);
  if (a > 180.0) a -= 360.0;
  if (a < -180.0) a += 360.0;
  const double ratio = a / params.beamwidth_deg;
  return params.antenna_gain_dbi - std::min(12.0 * ratio * ratio, params.front_to_back_db);
}

double NetworkLayout::received_dbm(const Sector& s, Point p) const {
  const Point site = sites_[static_cast<std::size_t>(s.site)];
  const double bearing =
      std::atan2(p.y - site.y, p.x - site.x) * 180.0 / std::numbers::pi;
  return params_.tx_power_dbm + antenna_gain_db(params_, bearing - s.azimuth_deg) -
         pathloss_db(params_, distance(site, p)) - shadowing_db(params_, s.site, p);
}

double NetworkLayout::noise_dbm() const {
  return -174.0 + 10.0 * std::log10(params_.bandwidth_hz) + params_.noise_figure_db;
}

double sinr_at(const NetworkLayout& layout, Point position) {
  double signal = 0.0;
  double interference = 0.0;
  for (const auto& s : layout.sectors()) {
    if (layout.is_silent(s)) continue;
    const double mw = to_mw(layout.received_dbm(s, position));
    if (layout.is_serving(s)) {
      signal += mw;
    } else {
      interference += mw;
    }
  }
  return 10.0 * std::log10(signal / (interference + to_mw(layout.noise_dbm())));
}

int cqi_mcs(double sinr_db, const BlerModel& bler) {
  for (int m = kMaxMcs; m >= kMinTableMcs; --m) {
    if (bler.bler(sinr_db, m) <= bler.p_hat) return m;
  }
  return 1;
}

double allocator_erasure(int user_mcs, int mcs, double p_hat) {
  if (mcs <= 0) return 1.0;
  return mcs <= user_mcs ? p_hat : 1.0;
}

double evaluation_erasure(const UserContext& user, int mcs, const BlerModel& bler) {
  if (mcs <= 0) return 1.0;
  return bler.bler(user.sinr_db, mcs);
}

std::vector<UserContext> place_users(const NetworkLayout& layout,
                                     const UserPattern& pattern,
                                     const BlerModel& bler) {
  std::vector<UserContext> users;
  const Point centre = layout.service_centre();
  auto make = [&](Point p) {
    UserContext u;
    u.position = p;
    u.distance_m = distance(p, centre);
    u.sinr_db = sinr_at(layout, p);
    u.mcs = cqi_mcs(u.sinr_db, bler);
    return u;
  };
  if (const auto* radial = std::get_if<RadialPattern>(&pattern)) {
    if (radial->count < 0 || !(radial->step_m > 0.0) || radial->start_m < 0.0) {
      throw std::invalid_argument("place_users: invalid radial pattern");
    }
    const Point site = layout.sites()[static_cast<std::size_t>(layout.serving_sites().front())];
    for (int i = 0; i < radial->count; ++i) {
      const double r = radial->start_m + i * radial->step_m;
      users.push_back(make({site.x + r, site.y}));
    }
    return users;
  }
  const auto& grid = std::get<GridPattern>(pattern);
  if (grid.count < 0 || !(grid.step_m > 0.0)) {
    throw std::invalid_argument("place_users: invalid grid pattern");
  }
  if (grid.count == 0) return users;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(grid.count))));
  const int rows = (grid.count + cols - 1) / cols;
  const double x0 = centre.x - 0.5 * (cols - 1) * grid.step_m;
  const double y0 = centre.y - 0.5 * (rows - 1) * grid.step_m;
  for (int i = 0; i < grid.count; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    users.push_back(make({x0 + c * grid.step_m, y0 + r * grid.step_m}));
  }
  return users;
}

}  // namespace uepnc
