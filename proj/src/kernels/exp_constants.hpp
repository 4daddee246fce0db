#pragma once

// Shared constants for the batch exponential. Both kernel variants evaluate
//   k = nearbyint(x * log2e), r = (x - k*ln2_hi) - k*ln2_lo,
//   exp(x) = p(r) * 2^k, p = degree-13 Taylor polynomial in Horner form,
// with the same operation order and no fused multiply-add, so results agree bitwise.

namespace tst::kernels::detail {

inline constexpr double exp_lo = -708.0;
inline constexpr double exp_hi = 709.0;
inline constexpr double log2e = 1.4426950408889634074;
// ln2_hi has its low 32 bits clear so k * ln2_hi is exact for |k| < 2^20.
inline constexpr double ln2_hi = 6.93147180369123816490e-01;
inline constexpr double ln2_lo = 1.90821492927058770002e-10;

// 1/i! for i = 13 down to 0.
inline constexpr double taylor[14] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
    1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
    1.0 / 6.0,          0.5,               1.0,              1.0,
};

}  // namespace tst::kernels::detail
