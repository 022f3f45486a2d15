#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "uepnc/gf256.hpp"
#include "uepnc/rlnc.hpp"

using namespace uepnc;

namespace {

std::vector<std::vector<std::uint8_t>> random_source(int count, std::size_t bytes,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::uint8_t>> src(static_cast<std::size_t>(count));
  for (auto& s : src) {
    s.resize(bytes);
    for (auto& b : s) b = static_cast<std::uint8_t>(rng());
  }
  return src;
}

ReceivedSet collect(const LayerConfig& layers, const std::vector<int>& per_window,
                    std::uint64_t seed, std::span<const std::vector<std::uint8_t>> source = {}) {
  ReceivedSet rx(layers.layers());
  for (int w = 1; w <= layers.layers(); ++w) {
    const int count = per_window[static_cast<std::size_t>(w - 1)];
    auto elems = source.empty() ? encode_window(layers, w, count, seed + 1000u * w)
                                : encode_window(layers, w, count, seed + 1000u * w, source);
    for (auto& e : elems) rx.add(std::move(e));
  }
  return rx;
}

}  // namespace

TEST_CASE("encoding is deterministic in the seed and sized to the window") {
  const auto layers = LayerConfig::from_sizes({3, 4, 5});
  const auto a = encode_window(layers, 2, 6, 42);
  const auto b = encode_window(layers, 2, 6, 42);
  const auto c = encode_window(layers, 2, 6, 43);
  REQUIRE(a.size() == 6);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].window == 2);
    CHECK(a[j].coefficients.size() == 7);
    CHECK(a[j].coefficients == b[j].coefficients);
  }
  CHECK(a[0].coefficients != c[0].coefficients);
  // Element j uses seed + j, so shifting the seed shifts the batch.
  CHECK(a[1].coefficients == c[0].coefficients);
}

TEST_CASE("coefficients are uniform over the field") {
  const auto layers = LayerConfig::from_sizes({64});
  std::vector<long long> counts(256, 0);
  const auto elems = encode_window(layers, 1, 4000, 5);
  for (const auto& e : elems) {
    for (auto g : e.coefficients) ++counts[g];
  }
  const double expected = 4000.0 * 64 / 256;
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 255 degrees of freedom: mean 255, sd ~22.6; 350 is beyond 4 sd.
  CHECK(chi2 < 350.0);
}

TEST_CASE("received set keeps PDUs of a single window") {
  const auto layers = LayerConfig::from_sizes({2, 2});
  ReceivedSet rx(2);
  auto w1 = encode_window(layers, 1, 2, 1);
  auto w2 = encode_window(layers, 2, 1, 1);
  std::vector<CodedElement> mixed{w1[0], w2[0]};
  CHECK_THROWS_AS(rx.add_pdu(mixed), std::invalid_argument);
  rx.add_pdu(w1);
  CHECK(rx.element_count(1) == 2);
  CHECK(rx.pdus(1).size() == 1);
  CHECK(rx.element_count(2) == 0);
}

TEST_CASE("decodable windows from rank") {
  const auto layers = LayerConfig::from_sizes({2, 3});
  SUBCASE("nothing received") {
    CHECK(decodable_windows(collect(layers, {0, 0}, 1), layers).empty());
  }
  SUBCASE("window 1 alone") {
    CHECK(decodable_windows(collect(layers, {4, 0}, 1), layers) == std::vector<int>{1});
  }
  SUBCASE("window 2 elements cover both windows") {
    CHECK(decodable_windows(collect(layers, {0, 8}, 1), layers) == std::vector<int>{1, 2});
  }
  SUBCASE("too few elements for window 2") {
    CHECK(decodable_windows(collect(layers, {1, 3}, 1), layers).empty());
  }
}

TEST_CASE("window-1 elements cannot stand in for window-2 rank") {
  const auto layers = LayerConfig::from_sizes({2, 3});
  // Plenty of window-1 elements span only K_1 = 2 dimensions.
  const auto rx = collect(layers, {20, 2}, 9);
  CHECK(decodable_windows(rx, layers) == std::vector<int>{1});
}

TEST_CASE("rank basis never exceeds the width and only grows") {
  std::mt19937_64 rng(3);
  RankBasis basis(10);
  int last = 0;
  std::vector<std::uint8_t> row(10);
  for (int i = 0; i < 40; ++i) {
    for (auto& b : row) b = static_cast<std::uint8_t>(rng());
    if (i % 4 == 0) std::fill(row.begin(), row.end(), 0);
    const bool grew = basis.insert(row);
    CHECK(basis.rank() == last + (grew ? 1 : 0));
    last = basis.rank();
  }
  CHECK(basis.rank() == 10);
  std::vector<std::uint8_t> wide(11);
  CHECK_THROWS_AS(basis.insert(wide), std::invalid_argument);
}

TEST_CASE("dependent rows are rejected") {
  RankBasis basis(4);
  const std::vector<std::uint8_t> a{1, 2, 3, 4}, b{0, 5, 6, 7};
  std::vector<std::uint8_t> combo(4);
  for (std::size_t i = 0; i < 4; ++i) {
    combo[i] = gf256::add(gf256::mul(9, a[i]), gf256::mul(200, b[i]));
  }
  CHECK(basis.insert(a));
  CHECK(basis.insert(b));
  CHECK_FALSE(basis.insert(combo));
  CHECK(basis.rank() == 2);
}

TEST_CASE("payload recovery returns the source") {
  const auto layers = LayerConfig::from_sizes({3, 5});
  const auto source = random_source(8, 48, 17);
  const auto rx = collect(layers, {4, 7}, 21, source);
  const auto w1 = recover_window(rx, layers, 1);
  REQUIRE(w1.has_value());
  CHECK(w1->size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK((*w1)[i] == source[i]);
  const auto w2 = recover_window(rx, layers, 2);
  REQUIRE(w2.has_value());
  CHECK(*w2 == source);

  const auto short_rx = collect(layers, {1, 3}, 21, source);
  CHECK_FALSE(recover_window(short_rx, layers, 2).has_value());
}

TEST_CASE("received elements come in whole PDUs") {
  const auto layers = LayerConfig::from_sizes({4, 6, 8});
  const TransmissionPlan plan{{4, 4, 4}, {3, 5, 2}, {2, 5, 3}};
  const std::vector<double> erasure{0.3, 0.5, 0.2};
  std::mt19937_64 rng(77);
  RankBasis basis(layers.total());
  for (int t = 0; t < 500; ++t) {
    const auto out = simulate_trial(layers, plan, erasure, rng, basis);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(out.received_elements[i] % plan.per_tb[i] == 0);
      CHECK(out.received_elements[i] <= plan.tbs[i] * plan.per_tb[i]);
    }
  }
}

TEST_CASE("lossless and fully erased channels") {
  const auto layers = LayerConfig::from_sizes({4, 4});
  const TransmissionPlan plan{{4, 4}, {0, 10}, {0, 2}};
  SimulationOptions opt;
  opt.trials = 2000;
  opt.workers = 1;
  const std::vector<double> none{1.0, 1.0};
  const auto dead = simulate_decode_prob(layers, plan, none, opt);
  CHECK(dead.p_win == std::vector<double>{0.0, 0.0});
  const std::vector<double> clean{0.0, 0.0};
  const auto ok = simulate_decode_prob(layers, plan, clean, opt);
  // 20 elements for 8 unknowns: failure needs rank loss of 12 extra draws.
  CHECK(ok.p_win[1] == 1.0);
  // Per-window rank only counts windows 1..i, as the analytic model does, and
  // window 1 sent nothing.
  CHECK(ok.p_win[0] == 0.0);
  CHECK(ok.provenance == Provenance::kSimulated);
}

TEST_CASE("Monte Carlo estimate does not depend on the worker count") {
  const auto layers = LayerConfig::from_sizes({5, 10});
  const TransmissionPlan plan{{4, 4}, {4, 4}, {2, 2}};
  const std::vector<double> erasure{0.2, 0.2};
  SimulationOptions opt;
  opt.trials = 20000;
  opt.chunk = 1000;
  opt.seed = 99;
  opt.workers = 1;
  const auto one = simulate_decode_prob(layers, plan, erasure, opt);
  opt.workers = 3;
  const auto three = simulate_decode_prob(layers, plan, erasure, opt);
  CHECK(one.p_win == three.p_win);
  opt.seed = 100;
  const auto other = simulate_decode_prob(layers, plan, erasure, opt);
  CHECK(other.p_win != one.p_win);
}

TEST_CASE("derived seeds differ per chunk and are stable") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 7) == derive_seed(5, 7));
}

TEST_CASE("simulation argument checks") {
  const auto layers = LayerConfig::from_sizes({2});
  const TransmissionPlan plan{{4}, {1}, {2}};
  SimulationOptions opt;
  opt.trials = 0;
  const std::vector<double> e{0.1};
  CHECK_THROWS_AS(simulate_decode_prob(layers, plan, e, opt), std::invalid_argument);
  opt.trials = 10;
  const std::vector<double> bad{1.5};
  CHECK_THROWS(simulate_decode_prob(layers, plan, bad, opt));
}
