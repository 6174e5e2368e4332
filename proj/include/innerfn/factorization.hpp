#pragma once

// Numerical inner-outer factorization from boundary data.
//
// The outer part is exp(g) with Re g equal to the Poisson extension of the
// boundary log-modulus. With c_n the Fourier coefficients of the sampled
// log-modulus, g(z) = c_0 + 2 sum_{n>=1} c_n z^n. Derivatives of functions
// with singular atoms have boundary log-modulus with a -2 log|zeta - zeta_k|
// singularity at each atom; those are split off and extended in closed form
// as -2 log(1 - z conj(zeta_k)), so the sampled remainder stays smooth.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "innerfn/derivative.hpp"
#include "innerfn/disk_functions.hpp"
#include "innerfn/error.hpp"
#include "innerfn/probes.hpp"

namespace innerfn {

struct FactorizationOptions {
  double clip_floor = 40.0;
  // Fraction of boundary nodes allowed inside spectrum guard zones.
  double guard_fraction = 0.01;
  // Radius of the excluded disks around interior zeros when probing.
  double zero_guard = 1e-4;
  double max_probe_radius = 0.95;
};

/// log-modulus contribution strength * log|zeta - location| on the circle.
struct LogSingularity {
  cplx location;
  double strength;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void require_grid_size(std::size_t n) {
  if (n < 16 || !is_power_of_two(n) || n > (std::size_t{1} << 20))
    throw DomainError("grid size must be a power of two in [16, 2^20]");
}

struct BoundaryGrid {
  std::size_t n = 0;
  // Regularized, clipped log-modulus at zeta_j = exp(2 pi i j / n).
  std::vector<double> log_modulus;
  double clip_floor = 40.0;
  std::vector<LogSingularity> singularities;
  std::size_t guarded_nodes = 0;
  std::size_t clipped_nodes = 0;

  cplx node(std::size_t j) const {
    return std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
  }
};

namespace detail {

inline double non_inner_log_modulus(const std::vector<Term>& terms) {
  double s = 0.0;
  for (const auto& t : terms)
    if (!t.inner) s += t.log_modulus;
  return s;
}

}  // namespace detail

/// Samples log|f| on the circle. Inner factors contribute exactly zero; nodes
/// within the spectrum guard of an atom take the limit of the regularized
/// log-modulus along the circle.
inline BoundaryGrid sample_log_modulus(const DiskFunction& f, std::size_t n,
                                       const FactorizationOptions& opts = {}) {
  require_grid_size(n);
  if (f.is_identically_zero()) throw DomainError("cannot factor the zero function");
  const auto& expr = f.base();
  const auto atoms = merged_atoms(expr);
  const auto spectrum = representation_spectrum(expr);
  const double guard = f.options().spectrum_guard;

  BoundaryGrid grid;
  grid.n = n;
  grid.clip_floor = opts.clip_floor;
  grid.log_modulus.resize(n);
  if (f.is_derivative())
    for (const auto& a : atoms) grid.singularities.push_back({a.location, -2.0});

  for (std::size_t j = 0; j < n; ++j) {
    const cplx zeta = grid.node(j);
    bool guarded = false;
    for (const auto& p : spectrum)
      if (std::abs(zeta - p) < guard) guarded = true;
    if (guarded) ++grid.guarded_nodes;

    const auto terms = detail::terms_at(expr, zeta, f.options());
    double value = detail::non_inner_log_modulus(terms);
    if (f.is_derivative()) {
      const SingularAtom* at_atom = nullptr;
      for (const auto& a : atoms)
        if (std::abs(zeta - a.location) < guard) at_atom = &a;
      if (at_atom != nullptr) {
        // (zeta - zeta_j)^2 * L -> -2 c_j zeta_j; remaining atoms stay regular.
        cplx reg = -2.0 * at_atom->mass * at_atom->location;
        for (const auto& a : atoms)
          if (&a != at_atom) reg *= (at_atom->location - a.location) *
                                    (at_atom->location - a.location);
        value += std::log(std::abs(reg));
      } else {
        value += std::log(std::abs(detail::sum_log_derivative(terms)));
        for (const auto& a : atoms) value += 2.0 * std::log(std::abs(zeta - a.location));
      }
    }
    if (!(value >= -opts.clip_floor)) {  // also catches NaN and -inf
      value = -opts.clip_floor;
      ++grid.clipped_nodes;
    }
    grid.log_modulus[j] = value;
  }
  if (static_cast<double>(grid.guarded_nodes) > opts.guard_fraction * static_cast<double>(n))
    throw ResolutionError("boundary grid under-resolved: too many nodes in spectrum guard zones");
  return grid;
}

/// Outer factor plus statistics. Evaluation is pure.
class FactorizationResult {
 public:
  FactorizationResult(std::size_t n, double clip_floor, std::vector<cplx> coeffs,
                      std::vector<LogSingularity> singularities, double eps_grid,
                      std::size_t clipped_nodes = 0, std::size_t guarded_nodes = 0)
      : n_(n),
        clip_floor_(clip_floor),
        coeffs_(std::move(coeffs)),
        singularities_(std::move(singularities)),
        eps_grid_(eps_grid),
        clipped_nodes_(clipped_nodes),
        guarded_nodes_(guarded_nodes) {}

  std::size_t grid_size() const { return n_; }
  double clip_floor() const { return clip_floor_; }
  /// c_0 .. c_{N/2-1} of g = log Out f, singular terms excluded.
  const std::vector<cplx>& analytic_log_coeffs() const { return coeffs_; }
  const std::vector<LogSingularity>& singularities() const { return singularities_; }
  double eps_grid() const { return eps_grid_; }
  std::size_t clipped_nodes() const { return clipped_nodes_; }
  std::size_t guarded_nodes() const { return guarded_nodes_; }

  cplx analytic_log(cplx z) const {
    detail::require_interior(z);
    cplx acc = poly_eval(coeffs_, z);
    for (const auto& s : singularities_)
      acc += s.strength * std::log(1.0 - z * std::conj(s.location));
    return acc;
  }

  double log_outer(cplx z) const { return analytic_log(z).real(); }
  cplx outer(cplx z) const { return std::exp(analytic_log(z)); }

 private:
  std::size_t n_;
  double clip_floor_;
  std::vector<cplx> coeffs_;
  std::vector<LogSingularity> singularities_;
  double eps_grid_;
  std::size_t clipped_nodes_;
  std::size_t guarded_nodes_;
};

/// Discretization bound: l1 mass of the last tenth of the coefficient band
/// plus a roundoff floor proportional to the transform's magnitude.
inline double discretization_bound(const std::vector<cplx>& coeffs,
                                   const std::vector<double>& samples) {
  const std::size_t m = coeffs.size();
  const std::size_t tail_start = m - std::max<std::size_t>(1, m / 10);
  double tail = 0.0, total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    total += std::abs(coeffs[k]);
    if (k >= tail_start) tail += std::abs(coeffs[k]);
  }
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  const double levels = std::log2(static_cast<double>(2 * m));
  return tail + 8.0 * DBL_EPSILON * levels * (1.0 + peak + total);
}

inline FactorizationResult outer_from_boundary(const BoundaryGrid& grid) {
  require_grid_size(grid.n);
  if (grid.log_modulus.size() != grid.n) throw DomainError("grid sample count mismatch");
  const std::size_t n = grid.n;
  std::vector<cplx> in(grid.log_modulus.begin(), grid.log_modulus.end());
  std::vector<cplx> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  std::vector<cplx> coeffs(n / 2);
  const double scale = 1.0 / static_cast<double>(n);
  coeffs[0] = spectrum[0].real() * scale;
  for (std::size_t k = 1; k < n / 2; ++k) coeffs[k] = 2.0 * scale * spectrum[k];
  const double eps = discretization_bound(coeffs, grid.log_modulus);
  return FactorizationResult(n, grid.clip_floor, std::move(coeffs), grid.singularities,
                             eps, grid.clipped_nodes, grid.guarded_nodes);
}

inline FactorizationResult factorize(const DiskFunction& f, std::size_t n,
                                     const FactorizationOptions& opts = {}) {
  return outer_from_boundary(sample_log_modulus(f, n, opts));
}

struct DefectSample {
  double defect;
  double eps_grid;
};

namespace detail {

inline void require_probe_admissible(const DiskFunction& f, cplx z,
                                     const FactorizationOptions& opts) {
  if (!(std::abs(z) <= opts.max_probe_radius))
    throw DomainError("defect probes must satisfy |z| <= 0.95");
  for (const auto& a : f.zeros())
    if (std::abs(z - a) < opts.zero_guard)
      throw GuardViolationError("probe lies inside a zero guard disk");
}

}  // namespace detail

inline bool probe_admissible(const DiskFunction& f, cplx z,
                             const FactorizationOptions& opts = {}) {
  if (!(std::abs(z) <= opts.max_probe_radius)) return false;
  for (const auto& a : f.zeros())
    if (std::abs(z - a) < opts.zero_guard) return false;
  return true;
}

/// log|Out f(z)| - log|f(z)| without clamping at zero.
inline double signed_defect(const DiskFunction& f, const FactorizationResult& fact,
                            cplx z, const FactorizationOptions& opts = {}) {
  detail::require_probe_admissible(f, z, opts);
  return fact.log_outer(z) - f.log_abs(z);
}

inline DefectSample outerness_defect(const DiskFunction& f,
                                     const FactorizationResult& fact, cplx z,
                                     const FactorizationOptions& opts = {}) {
  return {std::max(signed_defect(f, fact, z, opts), 0.0), fact.eps_grid()};
}

/// f(z) / Out f(z).
inline cplx inner_part_eval(const DiskFunction& f, const FactorizationResult& fact,
                            cplx z, const FactorizationOptions& opts = {}) {
  detail::require_probe_admissible(f, z, opts);
  return f.value(z) / fact.outer(z);
}

/// log|inn f(z)| anywhere in the disk; overflow-free.
inline double inner_log_modulus(const DiskFunction& f, const FactorizationResult& fact,
                                cplx z) {
  return f.log_abs(z) - fact.log_outer(z);
}

struct AggregateDefect {
  double max_defect = 0.0;
  cplx argmax = 0.0;
  double eps_grid = 0.0;
  std::size_t used_probes = 0;
  std::size_t skipped_probes = 0;
};

/// Maximum defect over the admissible members of a probe set, scanned in
/// order so the reported maximum is reproducible.
inline AggregateDefect aggregate_defect(const DiskFunction& f,
                                        const FactorizationResult& fact,
                                        const std::vector<cplx>& probes,
                                        const FactorizationOptions& opts = {}) {
  AggregateDefect out;
  out.eps_grid = fact.eps_grid();
  bool first = true;
  for (const auto& z : probes) {
    if (!probe_admissible(f, z, opts)) {
      ++out.skipped_probes;
      continue;
    }
    const double d = std::max(fact.log_outer(z) - f.log_abs(z), 0.0);
    ++out.used_probes;
    if (first || d > out.max_defect) {
      out.max_defect = d;
      out.argmax = z;
      first = false;
    }
  }
  return out;
}

}  // namespace innerfn
