#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "exp_constants.hpp"
#include "tst/kernels.hpp"

namespace tst::kernels {

double exp(double x) {
  using namespace detail;
  x = std::min(std::max(x, exp_lo), exp_hi);
  const double k = std::nearbyint(x * log2e);
  const double r = (x - k * ln2_hi) - k * ln2_lo;
  double p = taylor[0];
  for (int i = 1; i < 14; ++i) p = p * r + taylor[i];
  const auto bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 1023) << 52;
  return p * std::bit_cast<double>(bits);
}

namespace {

void change_stats_scalar(const GraphView& g, const std::int32_t* i, const std::int32_t* j,
                       std::size_t count, const std::array<std::int32_t*, 6>& out) {
  const std::uint64_t* __restrict rows = g.rows;
  const int* __restrict degree = g.degree;
  const std::uint64_t* __restrict same1 = g.same_b1;
  const std::uint64_t* __restrict same2 = g.same_b2;
  std::int32_t* __restrict o0 = out[0];
  std::int32_t* __restrict o1 = out[1];
  std::int32_t* __restrict o2 = out[2];
  std::int32_t* __restrict o3 = out[3];
  std::int32_t* __restrict o4 = out[4];
  std::int32_t* __restrict o5 = out[5];
  for (std::size_t k = 0; k < count; ++k) {
    const int a = i[k], b = j[k];
    const std::uint64_t ra = rows[a];
    const std::int32_t present = static_cast<std::int32_t>((ra >> b) & 1u);
    const std::int32_t sign = 1 - 2 * present;
    const std::uint64_t common = ra & rows[b];
    const std::uint64_t m1 = same1[a], m2 = same2[a];
    const std::int32_t s1 = static_cast<std::int32_t>((m1 >> b) & 1u);
    const std::int32_t s2 = static_cast<std::int32_t>((m2 >> b) & 1u);
    o0[k] = sign;
    o1[k] = sign * (degree[a] + degree[b] - 2 * present);
    o2[k] = sign * s1;
    o3[k] = sign * s2;
    o4[k] = sign * s1 * std::popcount(common & m1);
    o5[k] = sign * s2 * std::popcount(common & m2);
  }
}

void potential_deltas_scalar(const std::array<double, 6>& theta, const DeltaColumns& cols,
                             std::size_t count, double* out) {
  for (std::size_t k = 0; k < count; ++k) {
    double acc = theta[0] * static_cast<double>(cols[0][k]);
    for (int f = 1; f < 6; ++f) acc = acc + theta[f] * static_cast<double>(cols[f][k]);
    out[k] = acc;
  }
}

void move_rates_scalar(EgpVariant variant, double nu, const double* dq,
                       const std::int32_t* edge_delta, std::size_t count, double* out) {
  switch (variant) {
    case EgpVariant::lergm:
      for (std::size_t k = 0; k < count; ++k) out[k] = 1.0 / (1.0 + exp(-dq[k]));
      break;
    case EgpVariant::ci:
      for (std::size_t k = 0; k < count; ++k) out[k] = dq[k] >= 0.0 ? 1.0 : exp(dq[k]);
      break;
    case EgpVariant::cdcstergm:
      for (std::size_t k = 0; k < count; ++k)
        out[k] = edge_delta[k] > 0 ? nu * exp(dq[k]) : nu;
      break;
    case EgpVariant::cfcstergm:
      for (std::size_t k = 0; k < count; ++k)
        out[k] = edge_delta[k] > 0 ? nu : nu * exp(dq[k]);
      break;
  }
}

void exp_scalar(const double* x, std::size_t count, double* out) {
  for (std::size_t k = 0; k < count; ++k) out[k] = exp(x[k]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", change_stats_scalar, potential_deltas_scalar, move_rates_scalar, exp_scalar};
  return table;
}

}  // namespace tst::kernels
