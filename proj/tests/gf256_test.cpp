#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "uepnc/gf256.hpp"

using namespace uepnc;

namespace {

// Carry-less multiply reduced by x^8 + x^4 + x^3 + x^2 + 1, bit by bit.
std::uint8_t slow_mul(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & (1u << i)) acc ^= static_cast<unsigned>(a) << i;
  }
  for (int bit = 14; bit >= 8; --bit) {
    if (acc & (1u << bit)) acc ^= 0x11Du << (bit - 8);
  }
  return static_cast<std::uint8_t>(acc);
}

}  // namespace

TEST_CASE("multiplication matches shift-and-reduce for every pair") {
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; ++b) {
      REQUIRE(gf256::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) ==
              slow_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)));
    }
  }
}

TEST_CASE("field axioms") {
  for (unsigned a = 0; a < 256; ++a) {
    const FieldElement x(static_cast<std::uint8_t>(a));
    CHECK((x + x).is_zero());
    CHECK(x * FieldElement(1) == x);
    if (a != 0) CHECK(x * x.inverse() == FieldElement(1));
  }
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20000; ++trial) {
    const FieldElement a(static_cast<std::uint8_t>(rng()));
    const FieldElement b(static_cast<std::uint8_t>(rng()));
    const FieldElement c(static_cast<std::uint8_t>(rng()));
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * b == b * a);
    if (!b.is_zero()) REQUIRE((a / b) * b == a);
  }
}

TEST_CASE("generator 2 has order 255") {
  std::uint8_t x = 1;
  int order = 0;
  do {
    x = gf256::mul(x, 2);
    ++order;
  } while (x != 1);
  CHECK(order == 255);
}

TEST_CASE("zero has no inverse") {
  CHECK_THROWS_AS(gf256::inv(0), std::domain_error);
  CHECK_THROWS_AS(gf256::div(5, 0), std::domain_error);
}

TEST_CASE("selected axpy kernel agrees with the table reference") {
  MESSAGE("kernel: " << gf256::kernel_name());
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 31u, 32u, 33u, 64u, 100u, 257u}) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<std::uint8_t> src(n), a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        src[i] = static_cast<std::uint8_t>(rng());
        a[i] = b[i] = static_cast<std::uint8_t>(rng());
      }
      const auto c = static_cast<std::uint8_t>(rng());
      gf256::axpy(a, src, c);
      gf256::axpy_reference(b, src, c);
      REQUIRE(a == b);
    }
  }
}

TEST_CASE("axpy rejects mismatched lengths") {
  std::vector<std::uint8_t> a(4), b(5);
  CHECK_THROWS_AS(gf256::axpy(a, b, 3), std::invalid_argument);
}

TEST_CASE("scale multiplies every entry") {
  std::vector<std::uint8_t> row{0, 1, 2, 200, 255};
  gf256::scale(row, 0x53);
  CHECK(row == std::vector<std::uint8_t>{0, 0x53, gf256::mul(2, 0x53), gf256::mul(200, 0x53),
                                         gf256::mul(255, 0x53)});
}

TEST_CASE("reduce_row stops at the first column without a pivot") {
  // Basis: e_0 and e_2 + 5 e_3, width 4 (stride 32).
  std::vector<std::uint8_t> rows(64, 0);
  rows[0] = 1;
  rows[32 + 2] = 1;
  rows[32 + 3] = 5;
  const int pivot[4] = {0, -1, 1, -1};
  std::vector<std::uint8_t> work(32, 0);
  work[0] = 9;
  work[2] = 3;
  work[3] = gf256::mul(3, 5);
  CHECK(gf256::reduce_row(work.data(), 4, 32, rows.data(), 32, pivot) == 4);
  CHECK(work[3] == 0);

  std::fill(work.begin(), work.end(), 0);
  work[0] = 1;
  work[1] = 7;
  CHECK(gf256::reduce_row(work.data(), 4, 32, rows.data(), 32, pivot) == 1);
}
