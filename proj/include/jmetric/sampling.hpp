#pragma once

// Reproducible quasi-random points: the Halton sequence, shifted by a seed.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "jmetric/error.hpp"
#include "jmetric/expr.hpp"

namespace jmetric {

using Box = std::vector<std::pair<double, double>>;

inline Box unit_box(std::size_t dim) { return Box(dim, {-1.0, 1.0}); }

/// Radical inverse of index in the given base.
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base, scale = inv, out = 0.0;
  while (index > 0) {
    out += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return out;
}

inline constexpr std::array<unsigned, 16> kHaltonPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

/// Points seed+1 .. seed+count of the Halton sequence mapped into box.
inline std::vector<Point> halton_points(const Box& box, std::size_t count, std::uint64_t seed = 0) {
  if (box.size() > kHaltonPrimes.size()) throw Error("halton sampling supports at most 16 dimensions");
  for (const auto& [lo, hi] : box)
    if (!(lo <= hi)) throw Error("sample box has lo > hi");
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Point p(static_cast<Eigen::Index>(box.size()));
    for (std::size_t a = 0; a < box.size(); ++a) {
      const double u = radical_inverse(seed + k + 1, kHaltonPrimes[a]);
      p(static_cast<Eigen::Index>(a)) = box[a].first + u * (box[a].second - box[a].first);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace jmetric
