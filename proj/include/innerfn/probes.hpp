#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "innerfn/disk_functions.hpp"

namespace innerfn {

inline constexpr int kProbeSetVersion = 1;
// Index of the first Halton point used by probe-set v1. Index 0 is the
// origin, which is kept on purpose: several checks need the center.
inline constexpr std::size_t kProbeSeed = 0;

namespace detail {

inline double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace detail

/// Deterministic interior probe points: a (2, 3) Halton sequence mapped to
/// the disk of the given radius with uniform area density.
inline std::vector<cplx> probe_set(std::size_t count, double radius = 0.95,
                                   int version = kProbeSetVersion) {
  if (version != 1)
    throw DomainError("unknown probe-set version " + std::to_string(version));
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("probe radius must lie in (0, 1)");
  std::vector<cplx> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = detail::radical_inverse(kProbeSeed + i, 2);
    const double v = detail::radical_inverse(kProbeSeed + i, 3);
    pts.push_back(std::polar(radius * std::sqrt(u), 2.0 * kPi * v));
  }
  return pts;
}

/// n unimodular points exp(2 pi i (j + offset) / n).
inline std::vector<cplx> circle_points(std::size_t n, double offset = 0.0) {
  std::vector<cplx> pts;
  pts.reserve(n);
  for (std::size_t j = 0; j < n; ++j)
    pts.push_back(std::polar(1.0, 2.0 * kPi * (static_cast<double>(j) + offset) /
                                      static_cast<double>(n)));
  return pts;
}

}  // namespace innerfn
