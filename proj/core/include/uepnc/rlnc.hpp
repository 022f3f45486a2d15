#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "uepnc/types.hpp"

namespace uepnc {

/// One coded element of expanding window `window`. Coefficients cover the
/// first K_window source elements; later positions are implicitly zero.
struct CodedElement {
  int window = 0;
  std::vector<std::uint8_t> coefficients;
  std::vector<std::uint8_t> payload;  // empty in simulation-only mode
};

/// Elements collected by one user, grouped by window and then by PDU.
class ReceivedSet {
 public:
  explicit ReceivedSet(int windows) : pdus_(static_cast<std::size_t>(windows)) {}

  void add_pdu(std::vector<CodedElement> pdu);
  void add(CodedElement element) { add_pdu({std::move(element)}); }

  int windows() const { return static_cast<int>(pdus_.size()); }
  /// PDUs of window `window` (1-based).
  const std::vector<std::vector<CodedElement>>& pdus(int window) const;
  int element_count(int window) const;

 private:
  std::vector<std::vector<std::vector<CodedElement>>> pdus_;
};

/// `count` coded elements of window `window`; coefficients are i.i.d. uniform
/// over GF(2^8). Element j of the batch is drawn from a generator seeded with
/// seed + j, mirroring per-element incremented RNG seeds.
std::vector<CodedElement> encode_window(const LayerConfig& layers, int window,
                                        int count, std::uint64_t seed);

/// As above, also computing payloads from `source` (K_L equally sized
/// source elements).
std::vector<CodedElement> encode_window(
    const LayerConfig& layers, int window, int count, std::uint64_t seed,
    std::span<const std::vector<std::uint8_t>> source);

/// Incremental row-echelon basis over GF(2^8) with rows of fixed width.
class RankBasis {
 public:
  explicit RankBasis(int width);

  void reset();
  /// Reduces `row` (length <= width, zero-extended) against the basis and
  /// keeps it if it is innovative. Returns true when the rank grew.
  bool insert(std::span<const std::uint8_t> row);
  int rank() const { return rank_; }
  int width() const { return width_; }

 private:
  int width_;
  std::size_t stride_;
  int rank_ = 0;
  std::vector<std::uint8_t> rows_;
  std::vector<int> pivot_row_;  // per column, -1 if no pivot
  std::vector<std::uint8_t> scratch_;
};

/// Windows (1-based, ascending) whose layers are recovered: window l is
/// decodable when the elements of windows 1..l have rank K_l, and any
/// decodable window i marks every window <= i as recovered.
std::vector<int> decodable_windows(const ReceivedSet& received,
                                   const LayerConfig& layers);

/// Recovers source elements x_1..x_{K_window} from the payload-carrying
/// elements of windows 1..window; nullopt if they are not decodable.
std::optional<std::vector<std::vector<std::uint8_t>>> recover_window(
    const ReceivedSet& received, const LayerConfig& layers, int window);

/// Outcome of one Monte Carlo erasure trial.
struct TrialOutcome {
  std::vector<int> received_elements;  // per window
  std::vector<bool> decodable;         // per window, rank criterion only
};

/// Draws PDU erasures (atomic over n_l elements) and fresh coefficients, then
/// tests each window's rank. `basis` must have width >= K_L.
TrialOutcome simulate_trial(const LayerConfig& layers,
                            const TransmissionPlan& plan,
                            std::span<const double> erasure,
                            std::mt19937_64& rng, RankBasis& basis);

struct SimulationOptions {
  long long trials = 100000;
  std::uint64_t seed = 1;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// Trials per independently seeded chunk.
  long long chunk = 4096;
};

/// Fraction of trials in which each window is decodable, with standard
/// errors. The result depends only on (plan, erasure, trials, seed, chunk),
/// never on the worker count.
DecodeProbability simulate_decode_prob(const LayerConfig& layers,
                                       const TransmissionPlan& plan,
                                       std::span<const double> erasure,
                                       const SimulationOptions& options);

/// Seed of chunk `index` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace uepnc
