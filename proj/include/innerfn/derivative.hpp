#pragma once

// Derivatives of product-form functions as first-class evaluands, and the
// interior zeros of those derivatives (critical points).

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "innerfn/disk_functions.hpp"
#include "innerfn/polynomial.hpp"

namespace innerfn {

namespace detail {

// N'/N for the numerator N = h * prod_k (z - a_k)(1 - conj(a_k) z) of
// h = B'/B = sum_k m_k (1 - |a_k|^2) / ((z - a_k)(1 - conj(a_k) z)), in
// partial-fraction form; stable even when the zeros cluster.
inline cplx numerator_log_derivative(const std::vector<BlaschkeZero>& zeros, cplx z) {
  cplx h = 0.0, dh = 0.0, poles = 0.0;
  for (const auto& zero : zeros) {
    const cplx a = zero.point;
    const cplx u = z - a, v = 1.0 - std::conj(a) * z;
    const cplx w = static_cast<double>(zero.multiplicity) * (1.0 - std::norm(a));
    const cplx dq_over_q = 1.0 / u - std::conj(a) / v;
    h += w / (u * v);
    dh -= w / (u * v) * dq_over_q;
    poles += dq_over_q;
  }
  return dh / h + poles;
}

// Aberth-Ehrlich iteration on all roots simultaneously, started from the
// companion eigenvalues.
inline void aberth_refine(std::vector<cplx>& roots, const std::vector<BlaschkeZero>& zeros) {
  const std::size_t n = roots.size();
  for (int sweep = 0; sweep < 200; ++sweep) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx g = numerator_log_derivative(zeros, roots[i]);
      if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
        roots[i] += 1e-10 * (1.0 + std::abs(roots[i]));
        worst = 1.0;
        continue;
      }
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) repulsion += 1.0 / (roots[i] - roots[j]);
      const cplx step = 1.0 / (g - repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      roots[i] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(roots[i])));
    }
    if (worst < 1e-15) break;
  }
}

}  // namespace detail

/// Zeros of B' in the disk, repeated by multiplicity; exactly degree - 1 of
/// them. Multiple zeros of B are returned exactly (with multiplicity m - 1);
/// the remaining ones are roots of the numerator of B'/B, which is formed
/// from the zero data, solved through its companion matrix and refined by
/// Aberth iteration on the partial-fraction form.
inline std::vector<cplx> critical_points(const std::vector<BlaschkeZero>& zeros_in) {
  std::vector<BlaschkeZero> zeros;
  for (const auto& z : zeros_in) {
    auto it = std::find_if(zeros.begin(), zeros.end(), [&](const auto& q) {
      return std::abs(q.point - z.point) <= 1e-14;
    });
    if (it != zeros.end())
      it->multiplicity += z.multiplicity;
    else
      zeros.push_back(z);
  }
  int degree = 0;
  for (const auto& z : zeros) degree += z.multiplicity;
  if (degree == 0) throw DegenerateError("critical points of a constant Blaschke product");

  std::vector<cplx> out;
  for (const auto& z : zeros)
    for (int k = 1; k < z.multiplicity; ++k) out.push_back(z.point);

  // B'/B = sum_k m_k (1 - |a_k|^2) / ((z - a_k)(1 - conj(a_k) z)).
  const std::size_t n = zeros.size();
  Polynomial numerator;
  for (std::size_t k = 0; k < n; ++k) {
    Polynomial term{cplx(zeros[k].multiplicity * (1.0 - std::norm(zeros[k].point)))};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const cplx a = zeros[j].point;
      const Polynomial quad{-a, 1.0 + std::norm(a), -std::conj(a)};
      term = poly_mul(term, quad);
    }
    poly_add_to(numerator, term);
  }
  auto roots = poly_roots(numerator);
  detail::aberth_refine(roots, zeros);
  std::sort(roots.begin(), roots.end(),
            [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
  for (std::size_t k = 0; k + 1 < n && k < roots.size(); ++k)
    if (std::abs(roots[k]) < 1.0 - 1e-12) out.push_back(roots[k]);
  return out;
}

inline std::vector<cplx> critical_points(const BlaschkeSpec& b) {
  return critical_points(b.zeros());
}

namespace detail {

// L = theta'/theta times prod (z - a_j) over the distinct zeros of theta: an
// analytic function in the disk whose zeros are the critical points that are
// not zeros of theta.
inline cplx regularized_log_derivative(const FunctionExpr& f,
                                       const std::vector<BlaschkeZero>& zeros,
                                       cplx z, const EvalOptions& opts) {
  cplx acc = 0.0;
  for (const auto& t : terms_at(f, z, opts)) acc += t.log_derivative;
  for (const auto& a : zeros) acc *= (z - a.point);
  return acc;
}

// Newton search for zeros of the regularized logarithmic derivative from a
// fixed polar seed grid. Zeros very close to the circle may be missed.
inline std::vector<cplx> numeric_critical_points(const FunctionExpr& f,
                                                 const EvalOptions& opts) {
  const auto zeros = interior_zeros(f);
  auto h = [&](cplx z) { return regularized_log_derivative(f, zeros, z, opts); };
  std::vector<cplx> seeds{0.0};
  for (double r : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98})
    for (int k = 0; k < 32; ++k)
      seeds.push_back(std::polar(r, 2.0 * kPi * (k + 0.5 * (r > 0.45)) / 32.0));

  std::vector<cplx> found;
  for (cplx z : seeds) {
    bool converged = false;
    for (int it = 0; it < 80; ++it) {
      const double step_h = 1e-6 * std::max(1e-3, 1.0 - std::abs(z));
      const cplx dh = (h(z + step_h) - h(z - step_h)) / (2.0 * step_h);
      const cplx hz = h(z);
      if (!std::isfinite(std::abs(hz)) || !std::isfinite(std::abs(dh)) ||
          dh == cplx(0.0))
        break;
      cplx step = hz / dh;
      // Damping keeps iterates inside the disk.
      const double room = 0.5 * (1.0 - std::abs(z));
      if (std::abs(step) > room) step *= room / std::abs(step);
      z -= step;
      if (!(std::abs(z) < 1.0)) break;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged || !(std::abs(z) < 1.0 - 1e-9)) continue;
    bool duplicate = false;
    for (const auto& q : found)
      if (std::abs(q - z) < 1e-7) duplicate = true;
    if (!duplicate) found.push_back(z);
  }
  for (const auto& a : zeros)
    for (int k = 1; k < a.multiplicity; ++k) found.push_back(a.point);
  return found;
}

}  // namespace detail

/// A function or the derivative of a product-form function, evaluated
/// through closed forms. Zeros are located once at construction.
class DiskFunction {
 public:
  DiskFunction(FunctionExpr f, EvalOptions opts = {})  // NOLINT: implicit by intent
      : base_(std::move(f)), opts_(opts) {
    for (const auto& z : interior_zeros(base_))
      for (int k = 0; k < z.multiplicity; ++k) zeros_.push_back(z.point);
  }

  static DiskFunction derivative_of(FunctionExpr f, EvalOptions opts = {}) {
    DiskFunction d(std::move(f), opts);
    d.derivative_ = true;
    d.zeros_.clear();
    if (d.base_.is_constant()) return d;
    if (d.base_.is_rational_inner())
      d.zeros_ = critical_points(interior_zeros(d.base_));
    else
      d.zeros_ = detail::numeric_critical_points(d.base_, opts);
    return d;
  }

  const FunctionExpr& base() const { return base_; }
  bool is_derivative() const { return derivative_; }
  const EvalOptions& options() const { return opts_; }

  bool is_identically_zero() const {
    return base_.constant() == cplx(0.0) || (derivative_ && base_.is_constant());
  }

  /// Interior zeros, repeated by multiplicity.
  const std::vector<cplx>& zeros() const { return zeros_; }

  cplx value(cplx z) const {
    return derivative_ ? deriv(base_, z, opts_) : eval(base_, z, opts_);
  }

  double log_abs(cplx z) const {
    detail::require_interior(z);
    const auto terms = detail::terms_at(base_, z, opts_);
    double s = 0.0;
    for (const auto& t : terms) s += t.log_modulus;
    if (!derivative_) return s;
    bool small = false;
    for (const auto& t : terms)
      if (!t.exponential && t.log_modulus < std::log(opts_.zero_switch_radius)) small = true;
    if (!small) {
      // Logarithmic derivative route: exact even where exp factors underflow.
      return s + std::log(std::abs(detail::sum_log_derivative(terms)));
    }
    return std::log(std::abs(detail::derivative_from_terms(terms, opts_)));
  }

  /// Value on the unit circle away from the boundary spectrum.
  cplx boundary_value(cplx zeta) const {
    return derivative_ ? boundary_deriv(base_, zeta, opts_)
                       : boundary_eval(base_, zeta, opts_);
  }

 private:
  FunctionExpr base_;
  EvalOptions opts_;
  bool derivative_ = false;
  std::vector<cplx> zeros_;
};

}  // namespace innerfn
