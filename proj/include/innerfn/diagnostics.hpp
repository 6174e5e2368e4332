#pragma once

// Checks of the classical inequalities for self-maps of the disk and the
// outerness characterization of Mobius derivatives.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "innerfn/derivative.hpp"
#include "innerfn/disk_functions.hpp"
#include "innerfn/error.hpp"
#include "innerfn/factorization.hpp"
#include "innerfn/probes.hpp"

namespace innerfn {

struct DiagnosticsOptions {
  std::size_t grid_size = 4096;
  std::size_t probe_count = 512;
  double probe_radius = 0.95;
  // Schwarz-Pick ratio at or above 1 - threshold counts as equality.
  double mobius_threshold = 1e-9;
  double verdict_multiplier = 10.0;
  double julia_tolerance = 1e-9;
  // Boundary sample points closer than this to the spectrum are skipped.
  double boundary_guard = 1e-3;
  std::size_t julia_samples = 64;
  FactorizationOptions factorization{};
};

namespace detail {

inline void require_nonconstant(const FunctionExpr& theta) {
  if (theta.is_constant()) throw DegenerateError("input function is constant");
}

inline void require_nonconstant_inner(const FunctionExpr& theta) {
  require_nonconstant(theta);
  if (!theta.is_inner()) throw DomainError("input function is not inner");
}

inline double one_minus_norm(cplx w) { return (1.0 - std::abs(w)) * (1.0 + std::abs(w)); }

}  // namespace detail

/// |theta'(z)| (1 - |z|^2) / (1 - |theta(z)|^2), at most 1 for self-maps.
inline double schwarz_pick_ratio(const FunctionExpr& theta, cplx z,
                                 const EvalOptions& opts = {}) {
  detail::require_nonconstant(theta);
  const cplx value = eval(theta, z, opts);
  if (!(std::abs(value) < 1.0))
    throw DegenerateError("|theta(z)| >= 1: not a self-map of the disk");
  return std::abs(deriv(theta, z, opts)) * detail::one_minus_norm(z) /
         detail::one_minus_norm(value);
}

struct JuliaResult {
  double lhs;
  double rhs;
  bool ok;
};

/// Julia's inequality at an interior point z and a boundary point zeta.
inline JuliaResult julia_check(const FunctionExpr& theta, cplx z, cplx zeta,
                               double tolerance = 1e-9, const EvalOptions& opts = {}) {
  const cplx tz = eval(theta, z, opts);
  const cplx tzeta = boundary_eval(theta, zeta, opts);
  const double rhs = std::abs(boundary_deriv(theta, zeta, opts));
  const cplx quotient = (1.0 - std::conj(tz) * tzeta) / (1.0 - std::conj(z) * zeta);
  const double lhs =
      detail::one_minus_norm(z) / detail::one_minus_norm(tz) * std::norm(quotient);
  return {lhs, rhs, lhs <= rhs * (1.0 + tolerance)};
}

/// Phi_z(w) = (1-|z|^2)/(1-|theta(z)|^2) ((1 - conj(theta(z)) theta(w)) / (1 - conj(z) w))^2.
inline cplx phi_z_eval(const FunctionExpr& theta, cplx z, cplx w,
                       const EvalOptions& opts = {}) {
  detail::require_nonconstant_inner(theta);
  const cplx tz = eval(theta, z, opts);
  const cplx tw = eval(theta, w, opts);
  const cplx q = (1.0 - std::conj(tz) * tw) / (1.0 - std::conj(z) * w);
  return detail::one_minus_norm(z) / detail::one_minus_norm(tz) * q * q;
}

struct PsiBound {
  double max_ratio = 0.0;
  cplx argmax = 0.0;
  std::size_t used_probes = 0;
};

/// max |Phi_z(w) / theta'(w)| over the probes outside the zero guards of
/// theta'. Stays at most 1 when theta' is outer.
inline PsiBound psi_z_bound_check(const FunctionExpr& theta, cplx z,
                                  const std::vector<cplx>& probes,
                                  const FactorizationOptions& fopts = {},
                                  const EvalOptions& opts = {}) {
  detail::require_nonconstant_inner(theta);
  const auto derivative = DiskFunction::derivative_of(theta, opts);
  PsiBound out;
  for (const auto& w : probes) {
    if (!probe_admissible(derivative, w, fopts)) continue;
    const double r = std::abs(phi_z_eval(theta, z, w, opts)) / std::abs(derivative.value(w));
    if (out.used_probes == 0 || r > out.max_ratio) {
      out.max_ratio = r;
      out.argmax = w;
    }
    ++out.used_probes;
  }
  if (out.used_probes == 0) throw GuardViolationError("no admissible probes");
  return out;
}

namespace detail {

inline std::optional<cplx> damped_newton_root(const FunctionExpr& theta,
                                              const EvalOptions& opts) {
  cplx z = 0.0;
  cplx v = eval(theta, z, opts);
  for (int it = 0; it < 200 && std::abs(v) > 1e-15; ++it) {
    const cplx d = deriv(theta, z, opts);
    if (d == cplx(0.0)) return std::nullopt;
    const cplx step = v / d;
    double t = 1.0;
    bool advanced = false;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      const cplx cand = z - t * step;
      if (!(std::abs(cand) < 1.0)) continue;
      const cplx cv = eval(theta, cand, opts);
      if (std::abs(cv) < std::abs(v)) {
        z = cand;
        v = cv;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  if (!(std::abs(v) <= 1e-12)) return std::nullopt;
  return z;
}

inline cplx admissible_boundary_point(const FunctionExpr& theta, double guard) {
  const auto spectrum = representation_spectrum(theta);
  for (const auto& zeta : circle_points(64)) {
    bool clear = true;
    for (const auto& p : spectrum)
      if (std::abs(zeta - p) < guard) clear = false;
    if (clear) return zeta;
  }
  throw SpectrumProximityError("no admissible boundary point");
}

}  // namespace detail

/// Recovers (lambda, a) when theta attains equality in Schwarz-Pick on the
/// fixed 16-point probe set and matches the fitted automorphism on 128 probes.
inline std::optional<MobiusTransform> mobius_detect(const FunctionExpr& theta,
                                                    double threshold = 1e-9,
                                                    const EvalOptions& opts = {}) {
  if (theta.is_constant()) throw DegenerateError("mobius_detect on a constant function");
  try {
    for (const auto& z : probe_set(16, 0.9))
      if (schwarz_pick_ratio(theta, z, opts) < 1.0 - threshold) return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
  const auto root = detail::damped_newton_root(theta, opts);
  if (!root) return std::nullopt;
  const cplx a = *root;
  const cplx zeta = detail::admissible_boundary_point(theta, 1e-3);
  const cplx lambda =
      boundary_eval(theta, zeta, opts) * std::conj((zeta - a) / (1.0 - std::conj(a) * zeta));
  std::optional<MobiusTransform> fit;
  try {
    fit.emplace(lambda, a);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  const auto fitted = FunctionExpr::single(*fit);
  for (const auto& z : probe_set(128, 0.95))
    if (std::abs(eval(theta, z, opts) - eval(fitted, z, opts)) > 1e-8) return std::nullopt;
  return fit;
}

/// Nondecreasing, positive, unbounded function given by knots (t_i, eta_i).
/// Constant below the first knot, linear between knots, extended with the
/// last segment's slope above the last knot.
class EtaTable {
 public:
  EtaTable(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {  // NOLINT
    if (knots_.size() < 2) throw InvalidEtaError("eta table needs at least two knots");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const auto [t, v] = knots_[i];
      if (!std::isfinite(t) || !std::isfinite(v) || !(v > 0.0))
        throw InvalidEtaError("eta values must be finite and strictly positive");
      if (i > 0) {
        if (!(t > knots_[i - 1].first))
          throw InvalidEtaError("eta knots must be strictly increasing in t");
        if (v < knots_[i - 1].second) throw InvalidEtaError("eta table is not nondecreasing");
      }
    }
    if (!(last_slope() > 0.0)) throw InvalidEtaError("eta table is bounded");
  }

  static EtaTable identity() { return EtaTable({{1e-12, 1e-12}, {1.0, 1.0}}); }

  double operator()(double t) const {
    if (t <= knots_.front().first) return knots_.front().second;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (t <= knots_[i].first) {
        const auto [t0, v0] = knots_[i - 1];
        const auto [t1, v1] = knots_[i];
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
      }
    }
    const auto [tl, vl] = knots_.back();
    return vl + last_slope() * (t - tl);
  }

  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  double last_slope() const {
    const auto& a = knots_[knots_.size() - 2];
    const auto& b = knots_.back();
    return (b.second - a.second) / (b.first - a.first);
  }

  std::vector<std::pair<double, double>> knots_;
};

struct EtaVerdict {
  bool holds = true;
  std::optional<cplx> witness;
  // max over probes of |eta(t) - |theta'(z)|| / max(|theta'(z)|, eta(t)).
  double max_relative_gap = 0.0;
};

/// eta((1 - |theta(z)|^2) / (1 - |z|^2)) <= |theta'(z)| on every probe.
inline EtaVerdict eta_condition_check(const FunctionExpr& theta, const EtaTable& eta,
                                      const std::vector<cplx>& probes,
                                      double tolerance = 1e-10,
                                      const EvalOptions& opts = {}) {
  detail::require_nonconstant(theta);
  EtaVerdict out;
  for (const auto& z : probes) {
    const cplx v = eval(theta, z, opts);
    const double t = detail::one_minus_norm(v) / detail::one_minus_norm(z);
    const double lhs = eta(t);
    const double rhs = std::abs(deriv(theta, z, opts));
    out.max_relative_gap =
        std::max(out.max_relative_gap, std::abs(lhs - rhs) / std::max(lhs, rhs));
    if (lhs > rhs * (1.0 + tolerance) && out.holds) {
      out.holds = false;
      out.witness = z;
    }
  }
  return out;
}

/// max over guarded probes of | log|inn(S')(z)| - log|S(z)| |.
inline double singular_inheritance_check(const SingularAtomSpec& atoms,
                                         const FactorizationResult& fact,
                                         const std::vector<cplx>& probes,
                                         double shadow_guard = 1e-3) {
  if (atoms.atoms().empty()) throw DomainError("no singular atoms to inherit");
  const auto s = FunctionExpr::single(atoms);
  const auto ds = DiskFunction::derivative_of(s);
  double worst = 0.0;
  std::size_t used = 0;
  for (const auto& z : probes) {
    bool shadowed = false;
    if (std::abs(z) > 0.0)
      for (const auto& a : atoms.atoms())
        if (std::abs(std::arg(z / a.location)) < shadow_guard) shadowed = true;
    if (shadowed || !probe_admissible(ds, z)) continue;
    worst = std::max(worst, std::abs(inner_log_modulus(ds, fact, z) - log_abs(s, z)));
    ++used;
  }
  if (used == 0) throw GuardViolationError("every probe lies in a guard zone");
  return worst;
}

struct TheoremVerdict {
  bool is_mobius = false;
  std::optional<MobiusTransform> fit;
  double defect_max = 0.0;
  cplx defect_argmax = 0.0;
  double eps_grid = 0.0;
  bool consistent = false;
};

/// Outer derivative <=> Mobius, checked on one function: the verdict is
/// consistent when Mobius inputs have defect within the verdict multiple of
/// eps_grid and all other inputs exceed it.
inline TheoremVerdict theorem_verdict(const FunctionExpr& theta,
                                      const DiagnosticsOptions& opts = {},
                                      const EvalOptions& eopts = {}) {
  detail::require_nonconstant_inner(theta);
  const auto derivative = DiskFunction::derivative_of(theta, eopts);
  const auto fact = factorize(derivative, opts.grid_size, opts.factorization);
  const auto agg = aggregate_defect(derivative, fact,
                                    probe_set(opts.probe_count, opts.probe_radius),
                                    opts.factorization);
  TheoremVerdict v;
  v.fit = mobius_detect(theta, opts.mobius_threshold, eopts);
  v.is_mobius = v.fit.has_value();
  v.defect_max = agg.max_defect;
  v.defect_argmax = agg.argmax;
  v.eps_grid = fact.eps_grid();
  const double threshold = opts.verdict_multiplier * v.eps_grid;
  v.consistent = v.is_mobius ? v.defect_max <= threshold : v.defect_max > threshold;
  return v;
}

/// Per-function record of every check.
struct DiagnosticsReport {
  double schwarz_pick_max = 0.0;
  double schwarz_pick_min = 0.0;
  // min of |theta'(zeta)| - lhs over the (z, zeta) sample.
  double julia_residual_min = 0.0;
  // max of |lhs - rhs| / rhs; ~0 exactly for automorphisms.
  double julia_equality_gap = 0.0;
  std::size_t julia_samples = 0;
  bool julia_ok = true;
  TheoremVerdict theorem;
  EtaVerdict eta_identity;
  bool eta_consistent = false;
};

/// Boundary sample points for Julia checks, offset half a step and kept
/// away from the representation spectrum.
inline std::vector<cplx> julia_boundary_points(const FunctionExpr& theta, std::size_t count,
                                               double guard) {
  const auto spectrum = representation_spectrum(theta);
  std::vector<cplx> out;
  for (const auto& zeta : circle_points(count, 0.5)) {
    bool clear = true;
    for (const auto& p : spectrum)
      if (std::abs(zeta - p) < guard) clear = false;
    if (clear) out.push_back(zeta);
  }
  return out;
}

inline DiagnosticsReport diagnose(const FunctionExpr& theta, const DiagnosticsOptions& opts = {},
                                  const EvalOptions& eopts = {}) {
  detail::require_nonconstant_inner(theta);
  DiagnosticsReport r;
  const auto probes = probe_set(opts.probe_count, opts.probe_radius);
  bool first = true;
  for (const auto& z : probes) {
    const double ratio = schwarz_pick_ratio(theta, z, eopts);
    r.schwarz_pick_max = first ? ratio : std::max(r.schwarz_pick_max, ratio);
    r.schwarz_pick_min = first ? ratio : std::min(r.schwarz_pick_min, ratio);
    first = false;
  }
  first = true;
  for (const auto& z : probe_set(opts.julia_samples, opts.probe_radius)) {
    for (const auto& zeta : julia_boundary_points(theta, opts.julia_samples, opts.boundary_guard)) {
      const auto j = julia_check(theta, z, zeta, opts.julia_tolerance, eopts);
      const double residual = j.rhs - j.lhs;
      r.julia_residual_min = first ? residual : std::min(r.julia_residual_min, residual);
      r.julia_equality_gap = std::max(r.julia_equality_gap, std::abs(residual) / j.rhs);
      r.julia_ok = r.julia_ok && j.ok;
      ++r.julia_samples;
      first = false;
    }
  }
  r.theorem = theorem_verdict(theta, opts, eopts);
  r.eta_identity = eta_condition_check(theta, EtaTable::identity(), probes);
  r.eta_consistent = r.eta_identity.holds == r.theorem.is_mobius;
  return r;
}

}  // namespace innerfn
