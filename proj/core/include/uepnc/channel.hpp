#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

namespace uepnc {

inline constexpr int kMinTableMcs = 4;
inline constexpr int kMaxMcs = 15;

/// TB and frame parameters. Defaults follow the stream tables used for the
/// reference experiments: H = 2 KB, d_GoP = 0.533 s, 1 ms TTI, 60 % eMBMS
/// subframes.
struct RadioConfig {
  int n_rbp = 5;
  double element_bits = 16384.0;
  double d_gop_s = 0.533;
  double d_tti_s = 0.001;
  double f_embms = 0.6;
  double p_hat = 0.1;
  /// n_l / N_RBP for m = 4..15 at H = 2 KB.
  std::array<int, 12> capacity_ratio{2, 3, 5, 6, 8, 10, 12, 14, 17, 20, 66, 72};
};

/// Parametric TB error curve bler(sinr, m) = min(1, p_hat * 10^(-(sinr - gamma_m)/delta)).
struct BlerModel {
  /// SINR thresholds gamma_m (dB) for m = 4..15.
  std::array<double, 12> gamma_db{-4.0, -2.2, -0.4, 1.4, 3.2, 5.0,
                                  6.8,  8.6,  10.4, 12.2, 14.0, 15.8};
  double delta_db = 1.0;
  double p_hat = 0.1;

  double threshold(int mcs) const;
  double bler(double sinr_db, int mcs) const;
};

/// k = ceil(bitrate * d_gop / H). Throws std::invalid_argument on
/// non-positive inputs.
int source_elements(double bitrate_bps, double d_gop_s, double element_bits);

/// Coded elements per TB: ratio[m] * N_RBP, rescaled when H differs from the
/// 2 KB the table was built for. Throws std::out_of_range outside m = 4..15.
int tb_capacity(int mcs, int n_rbp, double element_bits = 16384.0,
                const RadioConfig& radio = {});

/// floor(f_eMBMS * d_GoP / d_TTI): eMBMS subframes available per GoP.
int subframe_cap(const RadioConfig& radio);

/// ceil(k / n_min) + ceil(p_hat * ceil(k / n_min)), limited to `cap` when
/// cap >= 0.
int n_hat(int k, double p_hat, int n_min, int cap = -1);

// ---------------------------------------------------------------- geometry

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

enum class DeliveryMode { kSingleCell, kSfn };

/// Propagation parameters with urban-macro style defaults.
struct PropagationParams {
  double isd_m = 500.0;
  double tx_power_dbm = 46.0;  // per sector
  double bandwidth_hz = 20e6;
  double carrier_hz = 2e9;
  double noise_figure_db = 9.0;
  double antenna_gain_dbi = 14.0;
  double beamwidth_deg = 70.0;
  double front_to_back_db = 20.0;
  double pathloss_intercept_db = 128.1;  // PL = A + B log10(d_km)
  double pathloss_slope_db = 37.6;
  double min_distance_m = 35.0;
  double shadowing_std_db = 0.0;  // 0 disables shadow fading
  std::uint64_t shadowing_seed = 1;
  /// Sites transmitting in sync in SFN mode (indices into the 19-site layout).
  std::vector<int> sfn_sites{0, 1, 2, 6};
};

struct Sector {
  int site = 0;
  double azimuth_deg = 0.0;
};

/// 19 three-sector sites on a hexagonal grid around the origin.
class NetworkLayout {
 public:
  /// SC: site 0 sector 0 serves, the other 18 sites interfere.
  /// SFN: the sites in params.sfn_sites (by default the rhombus 0, 1, 2, 6
  /// of mutually adjacent sites) transmit in sync; the rest interfere.
  NetworkLayout(DeliveryMode mode, PropagationParams params = {});

  DeliveryMode mode() const { return mode_; }
  const PropagationParams& params() const { return params_; }
  const std::vector<Point>& sites() const { return sites_; }
  const std::vector<Sector>& sectors() const { return sectors_; }
  const std::vector<int>& serving_sites() const { return serving_sites_; }
  bool is_serving(const Sector& s) const;
  /// Whether the sector neither serves nor interferes (co-sited SC sectors).
  bool is_silent(const Sector& s) const;
  /// Centroid of the serving sites.
  Point service_centre() const;

  /// Received power (dBm) from one sector at `p`.
  double received_dbm(const Sector& s, Point p) const;
  double noise_dbm() const;

 private:
  DeliveryMode mode_;
  PropagationParams params_;
  std::vector<Point> sites_;
  std::vector<Sector> sectors_;
  std::vector<int> serving_sites_;
};

/// Pathloss in dB at `distance_m` (floored at the minimum distance).
double pathloss_db(const PropagationParams& params, double distance_m);

/// Sector antenna gain (dBi) at an angle off boresight.
double antenna_gain_db(const PropagationParams& params, double off_boresight_deg);

/// Signal over interference plus noise in dB. SC: the serving sector is the
/// signal; SFN: powers of every serving-site sector add up.
double sinr_at(const NetworkLayout& layout, Point position);

/// Largest m in 4..15 whose BLER at `sinr_db` is <= p_hat; 1 if none.
int cqi_mcs(double sinr_db, const BlerModel& bler);

struct UserContext {
  Point position;
  double distance_m = 0.0;  // from the service centre
  double sinr_db = 0.0;
  int mcs = 1;
};

/// p_hat if m <= m_u, else 1 (what the base station assumes).
double allocator_erasure(int user_mcs, int mcs, double p_hat);
/// Modelled PDU error at the user's SINR; 1 for m == 0.
double evaluation_erasure(const UserContext& user, int mcs, const BlerModel& bler);

enum class ErasureView { kAllocator, kEvaluation };

struct RadialPattern {
  int count = 80;
  double step_m = 2.0;
  double start_m = 90.0;
};

struct GridPattern {
  int count = 1700;
  double step_m = 20.0;
};

using UserPattern = std::variant<RadialPattern, GridPattern>;

/// Radial: along the boresight of the serving sector, starting `start_m`
/// from its site. Grid: `count` points on a square lattice centred on the
/// service centre, filled row by row.
std::vector<UserContext> place_users(const NetworkLayout& layout,
                                     const UserPattern& pattern,
                                     const BlerModel& bler);

}  // namespace uepnc
