#include "uepnc/gf256.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string_view>

#if defined(__x86_64__) || defined(__i386__)
#define UEPNC_X86 1
#include <immintrin.h>
#endif

namespace uepnc::gf256 {
namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
  // nibble[c][0..15] = c*i, nibble[c][16..31] = c*(i<<4)
  std::array<std::array<std::uint8_t, 32>, 256> nibble{};
};

constexpr Tables build_tables() {
  Tables t{};
  unsigned x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  for (unsigned i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

constexpr std::uint8_t table_mul(const Tables& t, unsigned a, unsigned b) {
  if (a == 0 || b == 0) return 0;
  return t.exp[t.log[a] + t.log[b]];
}

const Tables& tables() {
  static const Tables t = [] {
    Tables out = build_tables();
    for (unsigned c = 0; c < 256; ++c) {
      for (unsigned i = 0; i < 16; ++i) {
        out.nibble[c][i] = table_mul(out, c, i);
        out.nibble[c][16 + i] = table_mul(out, c, i << 4);
      }
    }
    return out;
  }();
  return t;
}

void axpy_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n,
                 std::uint8_t c) {
  const auto& nib = tables().nibble[c];
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t s = src[i];
    dst[i] ^= static_cast<std::uint8_t>(nib[s & 0x0F] ^ nib[16 + (s >> 4)]);
  }
}

#ifdef UEPNC_X86
__attribute__((target("ssse3"))) void axpy_ssse3(std::uint8_t* dst,
                                                 const std::uint8_t* src,
                                                 std::size_t n, std::uint8_t c) {
  const auto& nib = tables().nibble[c];
  const __m128i lo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(nib.data()));
  const __m128i hi =
      _mm_loadu_si128(reinterpret_cast<const __m128i*>(nib.data() + 16));
  const __m128i mask = _mm_set1_epi8(0x0F);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m128i s = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i));
    __m128i d = _mm_loadu_si128(reinterpret_cast<const __m128i*>(dst + i));
    const __m128i pl = _mm_shuffle_epi8(lo, _mm_and_si128(s, mask));
    const __m128i ph =
        _mm_shuffle_epi8(hi, _mm_and_si128(_mm_srli_epi64(s, 4), mask));
    d = _mm_xor_si128(d, _mm_xor_si128(pl, ph));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + i), d);
  }
  axpy_scalar(dst + i, src + i, n - i, c);
}

__attribute__((target("avx2"))) void axpy_avx2(std::uint8_t* dst,
                                               const std::uint8_t* src,
                                               std::size_t n, std::uint8_t c) {
  const auto& nib = tables().nibble[c];
  const __m256i lo = _mm256_broadcastsi128_si256(
      _mm_loadu_si128(reinterpret_cast<const __m128i*>(nib.data())));
  const __m256i hi = _mm256_broadcastsi128_si256(
      _mm_loadu_si128(reinterpret_cast<const __m128i*>(nib.data() + 16)));
  const __m256i mask = _mm256_set1_epi8(0x0F);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i s =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i pl = _mm256_shuffle_epi8(lo, _mm256_and_si256(s, mask));
    const __m256i ph =
        _mm256_shuffle_epi8(hi, _mm256_and_si256(_mm256_srli_epi64(s, 4), mask));
    d = _mm256_xor_si256(d, _mm256_xor_si256(pl, ph));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), d);
  }
  axpy_scalar(dst + i, src + i, n - i, c);
}
__attribute__((target("avx2"))) std::size_t reduce_avx2(
    std::uint8_t* work, std::size_t cols, std::size_t len, const std::uint8_t* rows,
    std::size_t stride, const int* pivot_row) {
  const auto& nib = tables().nibble;
  const __m256i mask = _mm256_set1_epi8(0x0F);
  for (std::size_t c = 0; c < cols; ++c) {
    const std::uint8_t v = work[c];
    if (v == 0) continue;
    const int pr = pivot_row[c];
    if (pr < 0) return c;
    const __m256i lo = _mm256_broadcastsi128_si256(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(nib[v].data())));
    const __m256i hi = _mm256_broadcastsi128_si256(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(nib[v].data() + 16)));
    const std::uint8_t* src = rows + static_cast<std::size_t>(pr) * stride;
    for (std::size_t i = c / 32 * 32; i < len; i += 32) {
      const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
      __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(work + i));
      const __m256i pl = _mm256_shuffle_epi8(lo, _mm256_and_si256(s, mask));
      const __m256i ph =
          _mm256_shuffle_epi8(hi, _mm256_and_si256(_mm256_srli_epi64(s, 4), mask));
      d = _mm256_xor_si256(d, _mm256_xor_si256(pl, ph));
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(work + i), d);
    }
  }
  return cols;
}
#endif

using AxpyFn = void (*)(std::uint8_t*, const std::uint8_t*, std::size_t,
                        std::uint8_t);

struct Kernel {
  AxpyFn fn;
  const char* name;
};

Kernel select_kernel() {
#ifdef UEPNC_X86
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return {axpy_avx2, "avx2"};
  if (__builtin_cpu_supports("ssse3")) return {axpy_ssse3, "ssse3"};
#endif
  return {axpy_scalar, "scalar"};
}

const Kernel& kernel() {
  static const Kernel k = select_kernel();
  return k;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("gf256: span length mismatch");
}

}  // namespace

std::uint8_t add(std::uint8_t a, std::uint8_t b) {
  return static_cast<std::uint8_t>(a ^ b);
}

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  return table_mul(tables(), a, b);
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw std::domain_error("gf256: zero has no inverse");
  const auto& t = tables();
  return t.exp[255 - t.log[a]];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) { return mul(a, inv(b)); }

void axpy(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
          std::uint8_t c) {
  check_lengths(dst.size(), src.size());
  if (c == 0) return;
  kernel().fn(dst.data(), src.data(), dst.size(), c);
}

void axpy_reference(std::span<std::uint8_t> dst,
                    std::span<const std::uint8_t> src, std::uint8_t c) {
  check_lengths(dst.size(), src.size());
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= mul(c, src[i]);
}

void scale(std::span<std::uint8_t> row, std::uint8_t c) {
  const auto& t = tables();
  if (c == 0) {
    for (auto& v : row) v = 0;
    return;
  }
  const unsigned lc = t.log[c];
  for (auto& v : row) {
    if (v != 0) v = t.exp[t.log[v] + lc];
  }
}

AxpyKernel axpy_kernel() { return kernel().fn; }

std::size_t reduce_row(std::uint8_t* work, std::size_t cols, std::size_t len,
                       const std::uint8_t* rows, std::size_t stride, const int* pivot_row) {
#ifdef UEPNC_X86
  static const bool avx2 = std::string_view(kernel().name) == "avx2";
  if (avx2 && len % 32 == 0) return reduce_avx2(work, cols, len, rows, stride, pivot_row);
#endif
  const auto fn = kernel().fn;
  for (std::size_t c = 0; c < cols; ++c) {
    const std::uint8_t v = work[c];
    if (v == 0) continue;
    const int pr = pivot_row[c];
    if (pr < 0) return c;
    const std::size_t start = c / 32 * 32;
    fn(work + start, rows + static_cast<std::size_t>(pr) * stride + start, len - start, v);
  }
  return cols;
}

const char* kernel_name() { return kernel().name; }

}  // namespace uepnc::gf256
