#pragma once

#include <cstdint>
#include <span>

namespace uepnc {

/// GF(2^8) arithmetic over the irreducible polynomial x^8+x^4+x^3+x^2+1.
namespace gf256 {

inline constexpr unsigned kPolynomial = 0x11D;
inline constexpr unsigned kOrder = 256;

std::uint8_t add(std::uint8_t a, std::uint8_t b);
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
/// Multiplicative inverse. Throws std::domain_error for zero.
std::uint8_t inv(std::uint8_t a);
std::uint8_t div(std::uint8_t a, std::uint8_t b);

/// dst[i] ^= c * src[i]. Spans must have equal length.
void axpy(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
          std::uint8_t c);
/// row[i] *= c
void scale(std::span<std::uint8_t> row, std::uint8_t c);

/// Table-driven reference kernel, kept for cross-checking the SIMD path.
void axpy_reference(std::span<std::uint8_t> dst,
                    std::span<const std::uint8_t> src, std::uint8_t c);

/// Unchecked form of axpy used by elimination loops: dst[0..n) ^= c * src[0..n).
using AxpyKernel = void (*)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n,
                            std::uint8_t c);
AxpyKernel axpy_kernel();

/// Forward-eliminates work[0..cols) against normalized pivot rows
/// (pivot_row[c] = row index or -1; rows zero before their pivot), touching
/// bytes up to `len`. Returns the first column left nonzero that has no pivot,
/// or `cols` when the row reduced to zero.
std::size_t reduce_row(std::uint8_t* work, std::size_t cols, std::size_t len,
                       const std::uint8_t* rows, std::size_t stride, const int* pivot_row);

/// Name of the kernel selected at runtime ("avx2", "ssse3" or "scalar").
const char* kernel_name();

}  // namespace gf256

/// Field element value type.
class FieldElement {
 public:
  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint8_t v) : value_(v) {}

  constexpr std::uint8_t value() const { return value_; }
  bool is_zero() const { return value_ == 0; }

  FieldElement inverse() const { return FieldElement(gf256::inv(value_)); }

  friend FieldElement operator+(FieldElement a, FieldElement b) {
    return FieldElement(gf256::add(a.value_, b.value_));
  }
  friend FieldElement operator-(FieldElement a, FieldElement b) { return a + b; }
  friend FieldElement operator*(FieldElement a, FieldElement b) {
    return FieldElement(gf256::mul(a.value_, b.value_));
  }
  friend FieldElement operator/(FieldElement a, FieldElement b) {
    return FieldElement(gf256::div(a.value_, b.value_));
  }
  friend bool operator==(FieldElement, FieldElement) = default;

 private:
  std::uint8_t value_ = 0;
};

}  // namespace uepnc
