// Compiled with -mavx2 -mpopcnt only; callers reach it through avx2_table() after a CPU check.

#include <bit>
#include <immintrin.h>

#include <cstdint>

#include "exp_constants.hpp"
#include "tst/kernels.hpp"

namespace tst::kernels {
namespace {

void change_stats_tail(const GraphView& g, const std::int32_t* i, const std::int32_t* j,
                       std::size_t count, const std::array<std::int32_t*, 6>& out) {
  for (std::size_t k = 0; k < count; ++k) {
    const int a = i[k], b = j[k];
    const std::uint64_t ra = g.rows[a];
    const std::int32_t present = static_cast<std::int32_t>((ra >> b) & 1u);
    const std::int32_t sign = 1 - 2 * present;
    const std::uint64_t common = ra & g.rows[b];
    const std::uint64_t m1 = g.same_b1[a], m2 = g.same_b2[a];
    const std::int32_t s1 = static_cast<std::int32_t>((m1 >> b) & 1u);
    const std::int32_t s2 = static_cast<std::int32_t>((m2 >> b) & 1u);
    out[0][k] = sign;
    out[1][k] = sign * (g.degree[a] + g.degree[b] - 2 * present);
    out[2][k] = sign * s1;
    out[3][k] = sign * s2;
    out[4][k] = sign * s1 * std::popcount(common & m1);
    out[5][k] = sign * s2 * std::popcount(common & m2);
  }
}

// Per-64-bit-lane popcount via nibble lookup.
inline __m256i popcount64(__m256i x) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_shuffle_epi8(lut, _mm256_and_si256(x, low));
  const __m256i hi = _mm256_shuffle_epi8(lut, _mm256_and_si256(_mm256_srli_epi64(x, 4), low));
  return _mm256_sad_epu8(_mm256_add_epi8(lo, hi), _mm256_setzero_si256());
}

// Low 32 bits of each 64-bit lane, packed into four int32.
inline __m128i narrow(__m256i x) {
  return _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(x, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0)));
}

// (x ^ m) - m negates x where m is all ones.
inline __m128i negate_if(__m128i x, __m128i m) { return _mm_sub_epi32(_mm_xor_si128(x, m), m); }

void change_stats_avx2(const GraphView& g, const std::int32_t* i, const std::int32_t* j,
                       std::size_t count, const std::array<std::int32_t*, 6>& out) {
  const long long* rows = reinterpret_cast<const long long*>(g.rows);
  const long long* same1 = reinterpret_cast<const long long*>(g.same_b1);
  const long long* same2 = reinterpret_cast<const long long*>(g.same_b2);
  const __m256i one = _mm256_set1_epi64x(1);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m128i ia = _mm_loadu_si128(reinterpret_cast<const __m128i*>(i + k));
    const __m128i jb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(j + k));
    const __m256i shift = _mm256_cvtepi32_epi64(jb);
    const __m256i ra = _mm256_i32gather_epi64(rows, ia, 8);
    const __m256i rb = _mm256_i32gather_epi64(rows, jb, 8);
    const __m256i m1 = _mm256_i32gather_epi64(same1, ia, 8);
    const __m256i m2 = _mm256_i32gather_epi64(same2, ia, 8);
    const __m128i present = narrow(_mm256_and_si256(_mm256_srlv_epi64(ra, shift), one));
    const __m128i s1 = narrow(_mm256_and_si256(_mm256_srlv_epi64(m1, shift), one));
    const __m128i s2 = narrow(_mm256_and_si256(_mm256_srlv_epi64(m2, shift), one));
    const __m256i common = _mm256_and_si256(ra, rb);
    const __m128i t1 = narrow(popcount64(_mm256_and_si256(common, m1)));
    const __m128i t2 = narrow(popcount64(_mm256_and_si256(common, m2)));
    const __m128i deg = _mm_add_epi32(_mm_i32gather_epi32(g.degree, ia, 4), _mm_i32gather_epi32(g.degree, jb, 4));
    const __m128i neg = _mm_sub_epi32(_mm_setzero_si128(), present);
    const __m128i zero = _mm_setzero_si128();
    const __m128i m1mask = _mm_sub_epi32(zero, s1), m2mask = _mm_sub_epi32(zero, s2);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out[0] + k), negate_if(_mm_set1_epi32(1), neg));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out[1] + k),
                     negate_if(_mm_sub_epi32(deg, _mm_add_epi32(present, present)), neg));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out[2] + k), negate_if(s1, neg));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out[3] + k), negate_if(s2, neg));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out[4] + k), negate_if(_mm_and_si128(t1, m1mask), neg));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out[5] + k), negate_if(_mm_and_si128(t2, m2mask), neg));
  }
  if (k < count)
    change_stats_tail(g, i + k, j + k, count - k,
                      {out[0] + k, out[1] + k, out[2] + k, out[3] + k, out[4] + k, out[5] + k});
}

using namespace detail;

inline __m256d exp4(__m256d x) {
  x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(exp_lo)), _mm256_set1_pd(exp_hi));
  const __m256d k =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(log2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(k, _mm256_set1_pd(ln2_hi))),
                                  _mm256_mul_pd(k, _mm256_set1_pd(ln2_lo)));
  __m256d p = _mm256_set1_pd(taylor[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(taylor[i]));
  // (k + 1023) + 2^52 leaves the biased exponent in the low mantissa bits.
  const __m256d biased = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), _mm256_set1_pd(0x1.0p52));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

inline __m256d load_i32(const std::int32_t* p) {
  return _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p)));
}

void potential_deltas_avx2(const std::array<double, 6>& theta, const DeltaColumns& cols,
                           std::size_t count, double* out) {
  __m256d th[6];
  for (int f = 0; f < 6; ++f) th[f] = _mm256_set1_pd(theta[f]);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d acc = _mm256_mul_pd(th[0], load_i32(cols[0] + k));
    for (int f = 1; f < 6; ++f) acc = _mm256_add_pd(acc, _mm256_mul_pd(th[f], load_i32(cols[f] + k)));
    _mm256_storeu_pd(out + k, acc);
  }
  if (k < count) scalar_table().potential_deltas(theta, {cols[0] + k, cols[1] + k, cols[2] + k, cols[3] + k, cols[4] + k, cols[5] + k}, count - k, out + k);
}

void move_rates_avx2(EgpVariant variant, double nu, const double* dq,
                     const std::int32_t* edge_delta, std::size_t count, double* out) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vnu = _mm256_set1_pd(nu);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d d = _mm256_loadu_pd(dq + k);
    const __m256d adding =
        _mm256_cmp_pd(load_i32(edge_delta + k), zero, _CMP_GT_OQ);
    __m256d r;
    switch (variant) {
      case EgpVariant::lergm:
        r = _mm256_div_pd(one, _mm256_add_pd(one, exp4(_mm256_sub_pd(zero, d))));
        break;
      case EgpVariant::ci:
        r = _mm256_blendv_pd(exp4(d), one, _mm256_cmp_pd(d, zero, _CMP_GE_OQ));
        break;
      case EgpVariant::cdcstergm:
        r = _mm256_blendv_pd(vnu, _mm256_mul_pd(vnu, exp4(d)), adding);
        break;
      case EgpVariant::cfcstergm:
      default:
        r = _mm256_blendv_pd(_mm256_mul_pd(vnu, exp4(d)), vnu, adding);
        break;
    }
    _mm256_storeu_pd(out + k, r);
  }
  if (k < count) scalar_table().move_rates(variant, nu, dq + k, edge_delta + k, count - k, out + k);
}

void exp_avx2(const double* x, std::size_t count, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) _mm256_storeu_pd(out + k, exp4(_mm256_loadu_pd(x + k)));
  if (k < count) scalar_table().exp(x + k, count - k, out + k);
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", change_stats_avx2, potential_deltas_avx2, move_rates_avx2, exp_avx2};
  return table;
}

}  // namespace tst::kernels
