#pragma once

// Boundary spectra: exact from representations, and a radial threshold
// detector for inner parts that are only known through a factorization.
// Numeric estimates here are exploratory data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "innerfn/derivative.hpp"
#include "innerfn/disk_functions.hpp"
#include "innerfn/error.hpp"
#include "innerfn/factorization.hpp"

namespace innerfn {

enum class SpectrumMethod { ExactFromRepresentation, NumericThreshold };

inline const char* to_string(SpectrumMethod m) {
  return m == SpectrumMethod::ExactFromRepresentation ? "exact-from-representation"
                                                      : "numeric-threshold";
}

struct SpectrumArc {
  double start;  // radians in [0, 2 pi)
  double end;    // start + span; may exceed 2 pi when the arc wraps
};

struct SpectrumEstimate {
  std::vector<cplx> points;
  std::vector<SpectrumArc> arcs;
  SpectrumMethod method = SpectrumMethod::ExactFromRepresentation;
};

/// Singular atom locations together with declared accumulation points of
/// truncated Blaschke sequences. Finite Blaschke and Mobius factors are
/// analytic across the circle and contribute nothing.
inline SpectrumEstimate spectrum_from_representation(const FunctionExpr& inner) {
  if (!inner.is_inner()) throw DomainError("spectrum_from_representation needs an inner function");
  SpectrumEstimate est;
  est.method = SpectrumMethod::ExactFromRepresentation;
  est.points = representation_spectrum(inner);
  return est;
}

struct SpectrumOptions {
  double delta = 0.1;
  std::size_t resolution = 256;
  int first_ring = 3;  // rings at r = 1 - 2^-k, k = first_ring..last_ring
  int last_ring = 10;
  // When every direction is flagged, drop the innermost ring and rescan,
  // down to the two outermost rings.
  bool adaptive_rings = true;
  // Marked nodes at most this many steps apart belong to one cluster.
  std::size_t cluster_radius = 2;
  std::size_t arc_min_nodes = 4;
};

/// min over the probe rings of log|I(r zeta_j)| per angle.
struct SpectrumScan {
  std::vector<double> angles;
  std::vector<double> min_log_modulus;
  int first_ring = 0;  // innermost ring of the accepted scan
};

namespace detail {

template <class InnerLogModulus>
std::vector<double> ring_minima(const InnerLogModulus& inner_log_modulus,
                                const std::vector<cplx>& removed_zeros, std::size_t m,
                                int first_ring, int last_ring) {
  std::vector<double> min_log(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double angle = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    double best = 0.0;
    bool any = false;
    for (int k = first_ring; k <= last_ring; ++k) {
      const cplx z = std::polar(1.0 - std::ldexp(1.0, -k), angle);
      double v = inner_log_modulus(z);
      for (const auto& c : removed_zeros)
        v -= std::log(std::abs((z - c) / (1.0 - std::conj(c) * z)));
      if (!std::isfinite(v)) continue;
      best = any ? std::min(best, v) : v;
      any = true;
    }
    min_log[j] = best;
  }
  return min_log;
}

}  // namespace detail

/// Marks zeta_j = exp(2 pi i j / M) when min_r |I(r zeta_j)| < 1 - delta,
/// after dividing out the Blaschke factors of `removed_zeros`.
/// `inner_log_modulus` maps z to log|I(z)|. Each cluster of marked nodes
/// contributes its local minima of min_r log|I| as points, and an arc when
/// it is wide.
template <class InnerLogModulus>
SpectrumEstimate spectrum_numeric(const InnerLogModulus& inner_log_modulus,
                                  const std::vector<cplx>& removed_zeros,
                                  const SpectrumOptions& opts = {},
                                  SpectrumScan* scan = nullptr) {
  if (!(opts.delta > 0.0 && opts.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (opts.resolution < 64) throw DomainError("angular resolution must be at least 64");
  if (opts.first_ring < 1 || opts.last_ring < opts.first_ring) throw DomainError("invalid ring range");
  const std::size_t m = opts.resolution;
  const double threshold = std::log1p(-opts.delta);

  std::vector<double> min_log;
  std::vector<bool> marked(m, false);
  std::size_t marked_count = 0;
  int first = opts.first_ring;
  for (;;) {
    min_log = detail::ring_minima(inner_log_modulus, removed_zeros, m, first, opts.last_ring);
    marked_count = 0;
    for (std::size_t j = 0; j < m; ++j) {
      marked[j] = min_log[j] < threshold;
      marked_count += marked[j] ? 1 : 0;
    }
    if (marked_count < m || !opts.adaptive_rings || first + 1 >= opts.last_ring) break;
    ++first;
  }
  if (scan != nullptr) {
    scan->angles.resize(m);
    for (std::size_t j = 0; j < m; ++j)
      scan->angles[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    scan->min_log_modulus = min_log;
    scan->first_ring = first;
  }
  if (marked_count == m)
    throw ResolutionError("every direction flagged spectral: delta too large or grid too coarse");

  SpectrumEstimate est;
  est.method = SpectrumMethod::NumericThreshold;
  if (marked_count == 0) return est;

  // Walk the circle starting just after an unmarked node so no cluster wraps
  // through the starting point.
  std::size_t start = 0;
  while (marked[start]) ++start;
  std::vector<std::vector<std::size_t>> clusters;
  std::size_t since_last = opts.cluster_radius + 1;
  for (std::size_t step = 1; step <= m; ++step) {
    const std::size_t j = (start + step) % m;
    if (marked[j]) {
      if (clusters.empty() || since_last > opts.cluster_radius) clusters.emplace_back();
      clusters.back().push_back(j);
      since_last = 1;
    } else {
      ++since_last;
    }
  }
  // The last cluster may join the first across the starting gap.
  if (clusters.size() > 1) {
    const std::size_t last = clusters.back().back();
    const std::size_t head = clusters.front().front();
    if ((head + m - last) % m <= opts.cluster_radius) {
      clusters.back().insert(clusters.back().end(), clusters.front().begin(), clusters.front().end());
      clusters.erase(clusters.begin());
    }
  }

  const double step_angle = 2.0 * kPi / static_cast<double>(m);
  for (const auto& c : clusters) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double v = min_log[c[i]];
      const bool left = i == 0 || v < min_log[c[i - 1]];
      const bool right = i + 1 == c.size() || v <= min_log[c[i + 1]];
      if (left && right) est.points.push_back(std::polar(1.0, step_angle * static_cast<double>(c[i])));
    }
    const std::size_t span = (c.back() + m - c.front()) % m + 1;
    if (span >= opts.arc_min_nodes) {
      const double a = step_angle * static_cast<double>(c.front());
      est.arcs.push_back({a, a + step_angle * static_cast<double>(span - 1)});
    }
  }
  return est;
}

inline double angular_distance(cplx a, cplx b) { return std::abs(std::arg(a / b)); }

struct InclusionResult {
  bool subset_holds = true;
  std::vector<cplx> extra_points;   // numeric points of sigma(inn theta') off sigma(theta)
  std::vector<cplx> missed_points;  // points of sigma(theta) not seen numerically
  SpectrumEstimate exact;
  SpectrumEstimate numeric;
  int first_ring_used = 0;
};

/// Numeric sigma(inn theta') against exact sigma(theta). `missed_points` is
/// exploratory output only.
inline InclusionResult inclusion_check(const FunctionExpr& theta,
                                       const DiskFunction& derivative,
                                       const FactorizationResult& fact,
                                       const SpectrumOptions& opts = {}) {
  if (theta.is_constant()) throw DegenerateError("inclusion_check on a constant function");
  InclusionResult out;
  out.exact = spectrum_from_representation(theta);
  SpectrumScan scan;
  out.numeric = spectrum_numeric([&](cplx z) { return inner_log_modulus(derivative, fact, z); },
                                 derivative.zeros(), opts, &scan);
  out.first_ring_used = scan.first_ring;
  const double tol = 2.0 * kPi / static_cast<double>(opts.resolution);

  auto covered_by_arc = [&](cplx p) {
    double a = std::arg(p);
    if (a < 0) a += 2.0 * kPi;
    for (const auto& arc : out.numeric.arcs)
      if ((a >= arc.start - tol && a <= arc.end + tol) ||
          (a + 2.0 * kPi >= arc.start - tol && a + 2.0 * kPi <= arc.end + tol))
        return true;
    return false;
  };
  for (const auto& p : out.numeric.points) {
    bool near = false;
    for (const auto& q : out.exact.points)
      if (angular_distance(p, q) <= tol) near = true;
    if (!near) {
      out.extra_points.push_back(p);
      out.subset_holds = false;
    }
  }
  for (const auto& q : out.exact.points) {
    bool seen = covered_by_arc(q);
    for (const auto& p : out.numeric.points)
      if (angular_distance(p, q) <= tol) seen = true;
    if (!seen) out.missed_points.push_back(q);
  }
  return out;
}

inline InclusionResult inclusion_check(const FunctionExpr& theta, std::size_t grid_size,
                                       const SpectrumOptions& opts = {},
                                       const FactorizationOptions& fopts = {}) {
  if (theta.is_constant()) throw DegenerateError("inclusion_check on a constant function");
  const auto derivative = DiskFunction::derivative_of(theta);
  const auto fact = factorize(derivative, grid_size, fopts);
  return inclusion_check(theta, derivative, fact, opts);
}

}  // namespace innerfn
