#include "uepnc/rlnc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "uepnc/gf256.hpp"

namespace uepnc {
namespace {

constexpr std::size_t kRowAlign = 32;

std::size_t aligned_stride(int width) {
  const auto w = static_cast<std::size_t>(std::max(width, 1));
  return (w + kRowAlign - 1) / kRowAlign * kRowAlign;
}

void fill_random(std::span<std::uint8_t> out, std::mt19937_64& rng) {
  // Bytes of each 64-bit draw in little-endian order.
  std::size_t i = 0;
  if constexpr (std::endian::native == std::endian::little) {
    for (; i + 8 <= out.size(); i += 8) {
      const std::uint64_t word = rng();
      std::memcpy(out.data() + i, &word, 8);
    }
  }
  while (i < out.size()) {
    std::uint64_t word = rng();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i, word >>= 8) {
      out[i] = static_cast<std::uint8_t>(word & 0xFF);
    }
  }
}

void check_window(const LayerConfig& layers, int window) {
  if (window < 1 || window > layers.layers()) {
    throw std::out_of_range("window index out of range");
  }
}

void check_erasure(const LayerConfig& layers, std::span<const double> erasure) {
  if (erasure.size() != static_cast<std::size_t>(layers.layers())) {
    throw std::invalid_argument("erasure vector size does not match layers");
  }
  for (double p : erasure) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("erasure probability outside [0, 1]");
    }
  }
}

}  // namespace

void ReceivedSet::add_pdu(std::vector<CodedElement> pdu) {
  if (pdu.empty()) return;
  const int w = pdu.front().window;
  if (w < 1 || w > windows()) {
    throw std::out_of_range("ReceivedSet: window index out of range");
  }
  for (const auto& e : pdu) {
    if (e.window != w) {
      throw std::invalid_argument("ReceivedSet: PDU mixes expanding windows");
    }
  }
  pdus_[static_cast<std::size_t>(w - 1)].push_back(std::move(pdu));
}

const std::vector<std::vector<CodedElement>>& ReceivedSet::pdus(int window) const {
  if (window < 1 || window > windows()) {
    throw std::out_of_range("ReceivedSet: window index out of range");
  }
  return pdus_[static_cast<std::size_t>(window - 1)];
}

int ReceivedSet::element_count(int window) const {
  int n = 0;
  for (const auto& pdu : pdus(window)) n += static_cast<int>(pdu.size());
  return n;
}

std::vector<CodedElement> encode_window(const LayerConfig& layers, int window,
                                        int count, std::uint64_t seed) {
  check_window(layers, window);
  if (count < 0) throw std::invalid_argument("encode_window: negative count");
  const auto width = static_cast<std::size_t>(layers.cumulative(window));
  std::vector<CodedElement> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j));
    CodedElement e;
    e.window = window;
    e.coefficients.resize(width);
    fill_random(e.coefficients, rng);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CodedElement> encode_window(
    const LayerConfig& layers, int window, int count, std::uint64_t seed,
    std::span<const std::vector<std::uint8_t>> source) {
  if (source.size() != static_cast<std::size_t>(layers.total())) {
    throw std::invalid_argument("encode_window: expected K_L source elements");
  }
  const std::size_t h = source.front().size();
  for (const auto& s : source) {
    if (s.size() != h) {
      throw std::invalid_argument("encode_window: source elements differ in size");
    }
  }
  auto out = encode_window(layers, window, count, seed);
  for (auto& e : out) {
    e.payload.assign(h, 0);
    for (std::size_t i = 0; i < e.coefficients.size(); ++i) {
      gf256::axpy(e.payload, source[i], e.coefficients[i]);
    }
  }
  return out;
}

RankBasis::RankBasis(int width)
    : width_(width),
      stride_(aligned_stride(width)),
      rows_(stride_ * static_cast<std::size_t>(std::max(width, 0))),
      pivot_row_(static_cast<std::size_t>(std::max(width, 0)), -1),
      scratch_(stride_) {
  if (width < 0) throw std::invalid_argument("RankBasis: negative width");
}

void RankBasis::reset() {
  rank_ = 0;
  std::fill(pivot_row_.begin(), pivot_row_.end(), -1);
}

bool RankBasis::insert(std::span<const std::uint8_t> row) {
  if (row.size() > static_cast<std::size_t>(width_)) {
    throw std::invalid_argument("RankBasis: row wider than basis");
  }
  // Pivot rows are zero past their own support, so work stops at the
  // row's aligned length instead of the full stride.
  const std::size_t cols = row.size();
  const std::size_t len = (cols + kRowAlign - 1) / kRowAlign * kRowAlign;
  std::uint8_t* work = scratch_.data();
  std::copy(row.begin(), row.end(), work);
  std::fill(work + cols, work + len, std::uint8_t{0});
  const std::size_t c =
      gf256::reduce_row(work, cols, len, rows_.data(), stride_, pivot_row_.data());
  if (c == cols) return false;
  const std::size_t start = c / kRowAlign * kRowAlign;
  std::uint8_t* dst = rows_.data() + static_cast<std::size_t>(rank_) * stride_;
  std::fill(dst, dst + stride_, std::uint8_t{0});
  gf256::axpy_kernel()(dst + start, work + start, len - start, gf256::inv(work[c]));
  pivot_row_[c] = rank_;
  ++rank_;
  return true;
}

std::vector<int> decodable_windows(const ReceivedSet& received,
                                   const LayerConfig& layers) {
  if (received.windows() != layers.layers()) {
    throw std::invalid_argument("decodable_windows: window count mismatch");
  }
  RankBasis basis(layers.total());
  int highest = 0;
  for (int w = 1; w <= layers.layers(); ++w) {
    const auto limit = static_cast<std::size_t>(layers.cumulative(w));
    for (const auto& pdu : received.pdus(w)) {
      for (const auto& e : pdu) {
        if (e.coefficients.size() > limit) {
          throw std::invalid_argument("coded element wider than its window");
        }
        basis.insert(e.coefficients);
      }
    }
    if (basis.rank() == layers.cumulative(w)) highest = w;
  }
  std::vector<int> out;
  for (int w = 1; w <= highest; ++w) out.push_back(w);
  return out;
}

std::optional<std::vector<std::vector<std::uint8_t>>> recover_window(
    const ReceivedSet& received, const LayerConfig& layers, int window) {
  check_window(layers, window);
  const auto k = static_cast<std::size_t>(layers.cumulative(window));
  std::size_t h = 0;
  std::vector<std::vector<std::uint8_t>> rows;
  for (int w = 1; w <= window; ++w) {
    for (const auto& pdu : received.pdus(w)) {
      for (const auto& e : pdu) {
        if (rows.empty()) h = e.payload.size();
        if (e.payload.size() != h) {
          throw std::invalid_argument("recover_window: payload sizes differ");
        }
        std::vector<std::uint8_t> row(k + h, 0);
        std::copy(e.coefficients.begin(), e.coefficients.end(), row.begin());
        std::copy(e.payload.begin(), e.payload.end(),
                  row.begin() + static_cast<std::ptrdiff_t>(k));
        rows.push_back(std::move(row));
      }
    }
  }
  // Gauss-Jordan over the augmented rows.
  std::size_t rank = 0;
  for (std::size_t col = 0; col < k && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) return std::nullopt;
    std::swap(rows[rank], rows[pivot]);
    gf256::scale(rows[rank], gf256::inv(rows[rank][col]));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][col] != 0) {
        gf256::axpy(rows[r], rows[rank], rows[r][col]);
      }
    }
    ++rank;
  }
  if (rank < k) return std::nullopt;
  std::vector<std::vector<std::uint8_t>> source(k);
  for (std::size_t i = 0; i < k; ++i) {
    source[i].assign(rows[i].begin() + static_cast<std::ptrdiff_t>(k),
                     rows[i].end());
  }
  return source;
}

TrialOutcome simulate_trial(const LayerConfig& layers,
                            const TransmissionPlan& plan,
                            std::span<const double> erasure,
                            std::mt19937_64& rng, RankBasis& basis) {
  const int L = layers.layers();
  if (basis.width() < layers.total()) {
    throw std::invalid_argument("simulate_trial: basis narrower than K_L");
  }
  TrialOutcome out{std::vector<int>(static_cast<std::size_t>(L), 0),
                   std::vector<bool>(static_cast<std::size_t>(L), false)};
  // Erasures first: an upper bound on the rank then tells which windows can
  // still be decoded, and elimination stops after the last of them.
  int last_possible = 0;
  int bound = 0;
  for (int i = 0; i < L; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    int pdus = 0;
    for (int j = 0; j < plan.tbs[idx]; ++j) {
      if (unit_uniform(rng) >= erasure[idx]) ++pdus;
    }
    out.received_elements[idx] = pdus * plan.per_tb[idx];
    const int k = layers.cumulative()[idx];
    bound = std::min(k, bound + out.received_elements[idx]);
    if (bound == k) last_possible = i + 1;
  }
  basis.reset();
  std::uint8_t row[512];
  std::vector<std::uint8_t> wide;
  // Once window i decodes, the received span is all of GF(q)^{K_i}, so later
  // rows only matter on columns >= K_i and the basis restarts there.
  int offset = 0;
  for (int i = 0; i < last_possible; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const int k = layers.cumulative()[idx];
    std::span<std::uint8_t> coeffs;
    if (static_cast<std::size_t>(k) <= sizeof(row)) {
      coeffs = std::span<std::uint8_t>(row, static_cast<std::size_t>(k));
    } else {
      wide.resize(static_cast<std::size_t>(k));
      coeffs = wide;
    }
    // Coefficients below the decoded prefix never matter; only the tail is drawn.
    const auto tail = coeffs.subspan(static_cast<std::size_t>(offset));
    // Once rank reaches K_i the remaining elements of window i are redundant.
    const int elements = out.received_elements[idx];
    for (int e = 0; e < elements && offset + basis.rank() < k; ++e) {
      fill_random(tail, rng);
      basis.insert(tail);
    }
    if (offset + basis.rank() == k) {
      out.decodable[idx] = true;
      offset = k;
      basis.reset();
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DecodeProbability simulate_decode_prob(const LayerConfig& layers,
                                       const TransmissionPlan& plan,
                                       std::span<const double> erasure,
                                       const SimulationOptions& options) {
  plan.validate(layers.layers());
  check_erasure(layers, erasure);
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (options.chunk < 1) throw std::invalid_argument("chunk must be >= 1");

  const auto L = static_cast<std::size_t>(layers.layers());
  const long long chunks = (options.trials + options.chunk - 1) / options.chunk;
  std::vector<std::vector<long long>> counts(
      static_cast<std::size_t>(chunks), std::vector<long long>(L, 0));

  std::atomic<long long> next{0};
  auto work = [&] {
    RankBasis basis(layers.total());
    for (long long c = next++; c < chunks; c = next++) {
      std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(c)));
      const long long n =
          std::min(options.chunk, options.trials - c * options.chunk);
      auto& slot = counts[static_cast<std::size_t>(c)];
      for (long long t = 0; t < n; ++t) {
        const auto o = simulate_trial(layers, plan, erasure, rng, basis);
        for (std::size_t i = 0; i < L; ++i) slot[i] += o.decodable[i] ? 1 : 0;
      }
    }
  };

  unsigned workers = options.workers != 0 ? options.workers
                                          : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(
      std::clamp<long long>(workers, 1, std::max<long long>(chunks, 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  DecodeProbability out;
  out.provenance = Provenance::kSimulated;
  out.trials = options.trials;
  out.p_win.assign(L, 0.0);
  out.std_error.assign(L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    long long total = 0;
    for (const auto& slot : counts) total += slot[i];
    const double p = static_cast<double>(total) / static_cast<double>(options.trials);
    out.p_win[i] = p;
    out.std_error[i] = std::sqrt(p * (1.0 - p) / static_cast<double>(options.trials));
  }
  return out;
}

}  // namespace uepnc
