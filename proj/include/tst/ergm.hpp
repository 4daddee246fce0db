#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

#include "tst/graph.hpp"

namespace tst {

/// Indices of the six sufficient statistics.
enum Stat : int { st_edges = 0, st_twostar, st_match_b1, st_match_b2, st_tri_b1, st_tri_b2 };
inline constexpr int stat_count = 6;
inline constexpr std::array<const char*, stat_count> stat_names = {"t_e",  "t_2s", "t_m1",
                                                                   "t_m2", "t_d1", "t_d2"};

/// Exact integer statistic vector; also used for signed change deltas.
struct StatVector {
  std::array<std::int32_t, stat_count> v{};

  std::int32_t& operator[](int k) { return v[k]; }
  std::int32_t operator[](int k) const { return v[k]; }

  StatVector& operator+=(const StatVector& o) {
    for (int k = 0; k < stat_count; ++k) v[k] += o.v[k];
    return *this;
  }
  StatVector& operator-=(const StatVector& o) {
    for (int k = 0; k < stat_count; ++k) v[k] -= o.v[k];
    return *this;
  }
  friend StatVector operator+(StatVector a, const StatVector& b) { return a += b; }
  friend StatVector operator-(StatVector a, const StatVector& b) { return a -= b; }
  friend auto operator<=>(const StatVector&, const StatVector&) = default;
};

struct StatVectorHash {
  std::size_t operator()(const StatVector& s) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto x : s.v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct Theta {
  double edge = 0.0;
  double twostar = 0.0;
  double match_b1 = 0.0;
  double match_b2 = 0.0;
  double tri_b1 = 0.0;
  double tri_b2 = 0.0;

  std::array<double, stat_count> as_array() const {
    return {edge, twostar, match_b1, match_b2, tri_b1, tri_b2};
  }
  /// Heated copy, theta / heat.
  Theta heated(double heat) const;
  bool finite() const;

  friend bool operator==(const Theta&, const Theta&) = default;
};

/// The faction model parameters: edges -6, 2-stars -0.1, nodematch 4, local triangles 1.
inline constexpr Theta faction_theta{-6.0, -0.1, 4.0, 4.0, 1.0, 1.0};

StatVector stats(const Graph& g, const NodeAttributeTable& a);

/// q = theta . t, summed in statistic order.
double potential(const Theta& th, const StatVector& t);

/// stats(toggle(g, d)) - stats(g), evaluated in O(1) word operations.
StatVector change_stats(const Graph& g, const NodeAttributeTable& a, Dyad d);

/// Change statistics for adding dyad d (as if absent), regardless of its current state.
StatVector add_stats(const Graph& g, const NodeAttributeTable& a, Dyad d);

void check_dims(const Graph& g, const NodeAttributeTable& a);

}  // namespace tst
