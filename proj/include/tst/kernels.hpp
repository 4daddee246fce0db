#pragma once

// Batch arithmetic used on every simulated event: potential deltas for all dyads
// and the per-dyad rate laws. A portable scalar reference and an AVX2 variant
// compute bit-identical results; the variant is selected once at runtime.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tst {

enum class EgpVariant { lergm, ci, cdcstergm, cfcstergm };

namespace kernels {

/// Column pointers of a structure-of-arrays block of signed change statistics.
using DeltaColumns = std::array<const std::int32_t*, 6>;

/// Bit-row view of a graph and its attribute masks, enough to compute change statistics.
struct GraphView {
  const std::uint64_t* rows;
  const int* degree;
  const std::uint64_t* same_b1;
  const std::uint64_t* same_b2;
};

struct KernelTable {
  const char* name;
  /// Signed change statistics of toggling each dyad (i[k], j[k]), written as six columns.
  void (*change_stats)(const GraphView& g, const std::int32_t* i, const std::int32_t* j,
                       std::size_t count, const std::array<std::int32_t*, 6>& out);
  /// out[k] = sum_f theta[f] * cols[f][k], accumulated in statistic order.
  void (*potential_deltas)(const std::array<double, 6>& theta, const DeltaColumns& cols,
                           std::size_t count, double* out);
  /// out[k] = rate of the move with potential change dq[k]; edge_delta[k] > 0 marks an addition.
  void (*move_rates)(EgpVariant variant, double nu, const double* dq,
                     const std::int32_t* edge_delta, std::size_t count, double* out);
  /// out[k] = exp(x[k]) with inputs clamped to [-708, 709].
  void (*exp)(const double* x, std::size_t count, double* out);
};

const KernelTable& scalar_table();
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Selected once: TST_SIMD=scalar|avx2 overrides, otherwise the widest supported.
const KernelTable& active();
const KernelTable& by_name(std::string_view name);

/// Scalar exp with the same algorithm as the batch kernels.
double exp(double x);

}  // namespace kernels
}  // namespace tst
