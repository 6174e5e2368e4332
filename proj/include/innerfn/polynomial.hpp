#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

namespace innerfn {

using cplx = std::complex<double>;

// Polynomials are stored with ascending coefficients: p(z) = sum_k c[k] z^k.
using Polynomial = std::vector<cplx>;

inline cplx poly_eval(std::span<const cplx> coeffs, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}

inline cplx poly_eval_derivative(std::span<const cplx> coeffs, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;)
    acc = acc * z + static_cast<double>(k) * coeffs[k];
  return acc;
}

inline Polynomial poly_derivative(std::span<const cplx> coeffs) {
  if (coeffs.size() <= 1) return {};
  Polynomial out(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    out[k - 1] = static_cast<double>(k) * coeffs[k];
  return out;
}

inline Polynomial poly_mul(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  Polynomial out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline void poly_add_to(Polynomial& acc, std::span<const cplx> b) {
  if (acc.size() < b.size()) acc.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) acc[i] += b[i];
}

/// Drops leading (highest-degree) coefficients whose modulus is at most
/// `tol` times the largest coefficient modulus.
inline Polynomial poly_trim(Polynomial p, double tol = 0.0) {
  double scale = 0.0;
  for (const auto& c : p) scale = std::max(scale, std::abs(c));
  while (!p.empty() && std::abs(p.back()) <= tol * scale) p.pop_back();
  return p;
}

/// All complex roots of p via eigenvalues of the companion matrix, each
/// polished with a few Newton steps on p itself. Leading coefficients that
/// vanish to working precision are dropped first.
inline std::vector<cplx> poly_roots(Polynomial p) {
  p = poly_trim(std::move(p), 1e-14);
  if (p.size() <= 1) return {};
  const int degree = static_cast<int>(p.size()) - 1;
  std::vector<cplx> roots;
  if (degree == 1) {
    roots.push_back(-p[0] / p[1]);
    return roots;
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  companion.diagonal(-1).setOnes();
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -p[i] / p[degree];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  roots.reserve(degree);
  const Polynomial dp = poly_derivative(p);
  for (int i = 0; i < degree; ++i) {
    cplx r = ev[i];
    for (int it = 0; it < 4; ++it) {
      const cplx d = poly_eval(dp, r);
      if (d == cplx(0.0)) break;
      const cplx step = poly_eval(p, r) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      // Polishing is only trusted while it stays local.
      if (std::abs(step) > 1e-3 * (1.0 + std::abs(r))) break;
      r -= step;
    }
    roots.push_back(r);
  }
  return roots;
}

}  // namespace innerfn
