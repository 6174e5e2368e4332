#pragma once

// Product-form functions on the unit disk: Mobius maps, Blaschke products,
// monomials, atomic singular inner functions and explicit outer factors.
// Values, derivatives and boundary values are all closed form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "innerfn/error.hpp"
#include "innerfn/polynomial.hpp"

namespace innerfn {

inline constexpr double kPi = 3.14159265358979323846;

struct EvalOptions {
  // |Re| of an exponential factor's exponent above which values are
  // reported as out of range instead of overflowing or flushing to zero.
  double exponent_bound = 700.0;
  // Below this factor modulus the derivative switches from the
  // logarithmic-derivative form to the explicit product rule.
  double zero_switch_radius = 1e-6;
  // Minimum distance from a boundary point to the boundary spectrum.
  double spectrum_guard = 1e-6;
};

namespace detail {

inline cplx normalize_unimodular(cplx value, double tol, const char* what) {
  const double m = std::abs(value);
  if (!(std::abs(m - 1.0) <= tol))
    throw DomainError(std::string(what) + " must be unimodular (|value| = " +
                      std::to_string(m) + ")");
  return value / m;
}

inline void require_in_disk(cplx a, const char* what) {
  if (!(std::abs(a) < 1.0))
    throw DomainError(std::string(what) + " must lie in the open unit disk");
}

}  // namespace detail

/// z -> lambda (z - a) / (1 - conj(a) z).
class MobiusTransform {
 public:
  MobiusTransform(cplx lambda, cplx a)
      : lambda_(detail::normalize_unimodular(lambda, 1e-9, "mobius lambda")),
        a_(a) {
    detail::require_in_disk(a_, "mobius point a");
  }

  cplx lambda() const { return lambda_; }
  cplx a() const { return a_; }

 private:
  cplx lambda_;
  cplx a_;
};

struct BlaschkeZero {
  cplx point;
  int multiplicity = 1;
};

/// Finite Blaschke product. Infinite products enter only as truncations, in
/// which case `accumulation_points` carries the boundary accumulation set of
/// the full sequence and `tail_mass` bounds the excluded sum of (1 - |a_k|).
class BlaschkeSpec {
 public:
  BlaschkeSpec() = default;
  explicit BlaschkeSpec(std::vector<BlaschkeZero> zeros, bool normalized = false,
                        std::vector<cplx> accumulation_points = {},
                        double tail_mass = 0.0)
      : zeros_(std::move(zeros)),
        normalized_(normalized),
        accumulation_points_(std::move(accumulation_points)),
        tail_mass_(tail_mass) {
    for (const auto& z : zeros_) {
      detail::require_in_disk(z.point, "blaschke zero");
      if (z.multiplicity < 1)
        throw DomainError("blaschke zero multiplicity must be >= 1");
    }
    for (auto& p : accumulation_points_)
      p = detail::normalize_unimodular(p, 1e-9, "accumulation point");
    if (!(tail_mass_ >= 0.0)) throw DomainError("tail mass must be >= 0");
  }

  const std::vector<BlaschkeZero>& zeros() const { return zeros_; }
  bool normalized() const { return normalized_; }
  const std::vector<cplx>& accumulation_points() const {
    return accumulation_points_;
  }
  double tail_mass() const { return tail_mass_; }

  int degree() const {
    int d = 0;
    for (const auto& z : zeros_) d += z.multiplicity;
    return d;
  }

 private:
  std::vector<BlaschkeZero> zeros_;
  bool normalized_ = false;
  std::vector<cplx> accumulation_points_;
  double tail_mass_ = 0.0;
};

struct Monomial {
  int power = 1;
};

struct SingularAtom {
  cplx location;
  double mass;
};

/// S(z) = exp(-sum_k c_k (zeta_k + z) / (zeta_k - z)). Atoms at the same
/// location are merged.
class SingularAtomSpec {
 public:
  SingularAtomSpec() = default;
  explicit SingularAtomSpec(std::vector<SingularAtom> atoms) {
    for (auto atom : atoms) {
      atom.location =
          detail::normalize_unimodular(atom.location, 1e-9, "singular atom");
      if (!(atom.mass > 0.0) || !std::isfinite(atom.mass))
        throw DomainError("singular atom mass must be positive");
      auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const auto& s) {
        return std::abs(s.location - atom.location) <= 1e-12;
      });
      if (it != atoms_.end())
        it->mass += atom.mass;
      else
        atoms_.push_back(atom);
    }
  }

  const std::vector<SingularAtom>& atoms() const { return atoms_; }

 private:
  std::vector<SingularAtom> atoms_;
};

/// p(z)^power with every root of p outside the closed unit disk.
class OuterPolynomial {
 public:
  explicit OuterPolynomial(Polynomial coeffs, int power = 1)
      : coeffs_(poly_trim(std::move(coeffs))), power_(power) {
    if (coeffs_.empty()) throw DomainError("outer polynomial is identically 0");
    if (power_ == 0) throw DomainError("outer polynomial power must be nonzero");
    for (const auto& r : poly_roots(coeffs_))
      if (!(std::abs(r) > 1.0 + 1e-12))
        throw DomainError("outer polynomial has a root in the closed disk");
  }

  const Polynomial& coeffs() const { return coeffs_; }
  int power() const { return power_; }

 private:
  Polynomial coeffs_;
  int power_;
};

/// exp(q(z)) for a polynomial q.
struct OuterExpPolynomial {
  Polynomial coeffs;
};

using Factor = std::variant<MobiusTransform, BlaschkeSpec, Monomial,
                            SingularAtomSpec, OuterPolynomial, OuterExpPolynomial>;

/// constant * product of factors. Immutable value type.
class FunctionExpr {
 public:
  FunctionExpr() = default;
  explicit FunctionExpr(std::vector<Factor> factors, cplx constant = 1.0)
      : constant_(constant), factors_(std::move(factors)) {
    for (const auto& f : factors_)
      if (const auto* m = std::get_if<Monomial>(&f); m && m->power < 0)
        throw DomainError("monomial power must be >= 0");
  }

  template <class F>
  static FunctionExpr single(F factor, cplx constant = 1.0) {
    return FunctionExpr({Factor(std::move(factor))}, constant);
  }

  cplx constant() const { return constant_; }
  const std::vector<Factor>& factors() const { return factors_; }

  FunctionExpr times(const FunctionExpr& other) const {
    std::vector<Factor> all = factors_;
    all.insert(all.end(), other.factors_.begin(), other.factors_.end());
    return FunctionExpr(std::move(all), constant_ * other.constant_);
  }

  bool is_inner() const {
    if (std::abs(std::abs(constant_) - 1.0) > 1e-12) return false;
    for (const auto& f : factors_)
      if (std::holds_alternative<OuterPolynomial>(f) ||
          std::holds_alternative<OuterExpPolynomial>(f))
        return false;
    return true;
  }

  /// True when every factor is constant in z (or the front constant is 0).
  bool is_constant() const {
    if (constant_ == cplx(0.0)) return true;
    for (const auto& f : factors_) {
      bool constant_factor = std::visit(
          [](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, MobiusTransform>) return false;
            else if constexpr (std::is_same_v<T, BlaschkeSpec>) return x.zeros().empty();
            else if constexpr (std::is_same_v<T, Monomial>) return x.power == 0;
            else if constexpr (std::is_same_v<T, SingularAtomSpec>) return x.atoms().empty();
            else if constexpr (std::is_same_v<T, OuterPolynomial>) return x.coeffs().size() <= 1;
            else return x.coeffs.size() <= 1;
          },
          f);
      if (!constant_factor) return false;
    }
    return true;
  }

  /// Only constants, Mobius maps, finite Blaschke products and monomials.
  bool is_rational_inner() const {
    if (!is_inner()) return false;
    for (const auto& f : factors_)
      if (std::holds_alternative<SingularAtomSpec>(f)) return false;
    return true;
  }

 private:
  cplx constant_ = 1.0;
  std::vector<Factor> factors_;
};

// ---------------------------------------------------------------------------
// Elementary terms. Every factor expands to one or more terms whose product is
// the function; each term knows its value, derivative, logarithmic derivative
// and log-modulus.

namespace detail {

struct Term {
  cplx value;
  cplx derivative;
  cplx log_derivative;
  double log_modulus;
  bool inner;
  bool overflow = false;
  // exp(...) terms never vanish; their modulus is carried in log_modulus.
  bool exponential = false;
};

inline cplx ipow(cplx b, int m) {
  cplx result = 1.0;
  const bool invert = m < 0;
  unsigned e = static_cast<unsigned>(invert ? -m : m);
  while (e != 0) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  return invert ? 1.0 / result : result;
}

inline Term power_term(cplx b, cplx db, int m, bool inner) {
  Term t;
  t.inner = inner;
  if (m == 0) {
    t.value = 1.0;
    t.derivative = 0.0;
    t.log_derivative = 0.0;
    t.log_modulus = 0.0;
    return t;
  }
  t.value = ipow(b, m);
  t.derivative = static_cast<double>(m) * ipow(b, m - 1) * db;
  t.log_derivative = static_cast<double>(m) * db / b;
  t.log_modulus = m * std::log(std::abs(b));
  return t;
}

inline Term exponential_term(cplx exponent, cplx exponent_derivative,
                             bool inner, const EvalOptions& opts) {
  Term t;
  t.inner = inner;
  t.exponential = true;
  t.log_modulus = exponent.real();
  t.log_derivative = exponent_derivative;
  if (std::abs(exponent.real()) > opts.exponent_bound || !std::isfinite(exponent.real())) {
    t.overflow = true;
    t.value = std::numeric_limits<double>::quiet_NaN();
    t.derivative = t.value;
  } else {
    t.value = std::exp(exponent);
    t.derivative = t.value * exponent_derivative;
  }
  return t;
}

inline void append_terms(const Factor& factor, cplx z, const EvalOptions& opts,
                         std::vector<Term>& out) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MobiusTransform>) {
          const cplx a = f.a();
          const cplx den = 1.0 - std::conj(a) * z;
          const cplx b = f.lambda() * (z - a) / den;
          const cplx db = f.lambda() * (1.0 - std::norm(a)) / (den * den);
          out.push_back(power_term(b, db, 1, true));
        } else if constexpr (std::is_same_v<T, BlaschkeSpec>) {
          for (const auto& zero : f.zeros()) {
            const cplx a = zero.point;
            cplx unit = 1.0;
            if (f.normalized() && a != cplx(0.0)) unit = -std::conj(a) / std::abs(a);
            const cplx den = 1.0 - std::conj(a) * z;
            const cplx b = unit * (z - a) / den;
            const cplx db = unit * (1.0 - std::norm(a)) / (den * den);
            out.push_back(power_term(b, db, zero.multiplicity, true));
          }
        } else if constexpr (std::is_same_v<T, Monomial>) {
          out.push_back(power_term(z, 1.0, f.power, true));
        } else if constexpr (std::is_same_v<T, SingularAtomSpec>) {
          cplx e = 0.0, de = 0.0;
          for (const auto& atom : f.atoms()) {
            const cplx d = atom.location - z;
            e -= atom.mass * (atom.location + z) / d;
            de -= atom.mass * 2.0 * atom.location / (d * d);
          }
          out.push_back(exponential_term(e, de, true, opts));
        } else if constexpr (std::is_same_v<T, OuterPolynomial>) {
          out.push_back(power_term(poly_eval(f.coeffs(), z),
                                   poly_eval_derivative(f.coeffs(), z), f.power(),
                                   false));
        } else {
          out.push_back(exponential_term(poly_eval(f.coeffs, z),
                                         poly_eval_derivative(f.coeffs, z), false,
                                         opts));
        }
      },
      factor);
}

inline std::vector<Term> terms_at(const FunctionExpr& f, cplx z,
                                  const EvalOptions& opts) {
  std::vector<Term> terms;
  terms.reserve(f.factors().size() + 1);
  Term c;
  c.value = f.constant();
  c.derivative = 0.0;
  c.log_derivative = 0.0;
  c.log_modulus = std::log(std::abs(f.constant()));
  c.inner = std::abs(std::abs(f.constant()) - 1.0) <= 1e-12;
  terms.push_back(c);
  for (const auto& factor : f.factors()) append_terms(factor, z, opts, terms);
  return terms;
}

inline void throw_if_overflow(const std::vector<Term>& terms) {
  for (const auto& t : terms)
    if (t.overflow)
      throw OutOfRangeError("exponential factor exceeds the exponent bound");
}

inline cplx product_value(const std::vector<Term>& terms) {
  cplx v = 1.0;
  for (const auto& t : terms) v *= t.value;
  return v;
}

inline bool has_small_term(const std::vector<Term>& terms, double rho) {
  for (const auto& t : terms)
    if (!t.exponential && std::abs(t.value) < rho) return true;
  return false;
}

inline cplx sum_log_derivative(const std::vector<Term>& terms) {
  cplx s = 0.0;
  for (const auto& t : terms) s += t.log_derivative;
  return s;
}

inline cplx product_rule(const std::vector<Term>& terms) {
  const std::size_t n = terms.size();
  std::vector<cplx> suffix(n + 1, 1.0);
  for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * terms[k].value;
  cplx prefix = 1.0, total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += prefix * terms[k].derivative * suffix[k + 1];
    prefix *= terms[k].value;
  }
  return total;
}

inline cplx derivative_from_terms(const std::vector<Term>& terms,
                                  const EvalOptions& opts) {
  throw_if_overflow(terms);
  if (has_small_term(terms, opts.zero_switch_radius)) return product_rule(terms);
  return product_value(terms) * sum_log_derivative(terms);
}

inline void require_interior(cplx z) {
  if (!(std::abs(z) < 1.0))
    throw DomainError("evaluation point must satisfy |z| < 1");
}

inline cplx require_boundary(cplx zeta) {
  return normalize_unimodular(zeta, 1e-12, "boundary point");
}

}  // namespace detail

/// Boundary spectrum carried by the representation: singular atom locations
/// and declared accumulation points of truncated Blaschke sequences.
inline std::vector<cplx> representation_spectrum(const FunctionExpr& f) {
  std::vector<cplx> pts;
  auto add = [&](cplx p) {
    for (const auto& q : pts)
      if (std::abs(q - p) <= 1e-12) return;
    pts.push_back(p);
  };
  for (const auto& factor : f.factors()) {
    if (const auto* s = std::get_if<SingularAtomSpec>(&factor))
      for (const auto& atom : s->atoms()) add(atom.location);
    if (const auto* b = std::get_if<BlaschkeSpec>(&factor))
      for (const auto& p : b->accumulation_points()) add(p);
  }
  return pts;
}

/// All atoms of all singular factors, merged by location.
inline std::vector<SingularAtom> merged_atoms(const FunctionExpr& f) {
  std::vector<SingularAtom> all;
  for (const auto& factor : f.factors())
    if (const auto* s = std::get_if<SingularAtomSpec>(&factor))
      all.insert(all.end(), s->atoms().begin(), s->atoms().end());
  return SingularAtomSpec(std::move(all)).atoms();
}

/// Interior zeros of f with multiplicity.
inline std::vector<BlaschkeZero> interior_zeros(const FunctionExpr& f) {
  std::vector<BlaschkeZero> out;
  auto add = [&](cplx p, int m) {
    if (m <= 0) return;
    for (auto& q : out)
      if (std::abs(q.point - p) <= 1e-14) {
        q.multiplicity += m;
        return;
      }
    out.push_back({p, m});
  };
  for (const auto& factor : f.factors()) {
    if (const auto* m = std::get_if<MobiusTransform>(&factor)) add(m->a(), 1);
    if (const auto* b = std::get_if<BlaschkeSpec>(&factor))
      for (const auto& z : b->zeros()) add(z.point, z.multiplicity);
    if (const auto* mono = std::get_if<Monomial>(&factor)) add(0.0, mono->power);
  }
  return out;
}

inline void require_spectrum_clearance(const FunctionExpr& f, cplx zeta,
                                       const EvalOptions& opts) {
  for (const auto& p : representation_spectrum(f))
    if (std::abs(zeta - p) < opts.spectrum_guard)
      throw SpectrumProximityError("boundary point lies within the spectrum guard");
}

inline cplx eval(const FunctionExpr& f, cplx z, const EvalOptions& opts = {}) {
  detail::require_interior(z);
  const auto terms = detail::terms_at(f, z, opts);
  detail::throw_if_overflow(terms);
  return detail::product_value(terms);
}

inline cplx deriv(const FunctionExpr& f, cplx z, const EvalOptions& opts = {}) {
  detail::require_interior(z);
  return detail::derivative_from_terms(detail::terms_at(f, z, opts), opts);
}

/// log|f(z)| accumulated factor by factor; never overflows.
inline double log_abs(const FunctionExpr& f, cplx z, const EvalOptions& opts = {}) {
  detail::require_interior(z);
  double s = 0.0;
  for (const auto& t : detail::terms_at(f, z, opts)) s += t.log_modulus;
  return s;
}

/// Nontangential boundary value at a unimodular point away from the spectrum.
inline cplx boundary_eval(const FunctionExpr& f, cplx zeta,
                          const EvalOptions& opts = {}) {
  zeta = detail::require_boundary(zeta);
  require_spectrum_clearance(f, zeta, opts);
  const auto terms = detail::terms_at(f, zeta, opts);
  detail::throw_if_overflow(terms);
  return detail::product_value(terms);
}

inline cplx boundary_deriv(const FunctionExpr& f, cplx zeta,
                           const EvalOptions& opts = {}) {
  zeta = detail::require_boundary(zeta);
  require_spectrum_clearance(f, zeta, opts);
  return detail::derivative_from_terms(detail::terms_at(f, zeta, opts), opts);
}

// ---------------------------------------------------------------------------
// Zero sequences and truncation.

/// a_k = (1 - base^k) * point, k >= 1.
struct RadialGeometricSequence {
  cplx point;
  double base;
};

/// a_k = (1 - k^-exponent) * point, k >= 1. Summable only for exponent > 1.
struct RadialPowerSequence {
  cplx point;
  double exponent;
};

struct FiniteSequence {
  std::vector<cplx> points;
};

using ZeroSequence =
    std::variant<RadialGeometricSequence, RadialPowerSequence, FiniteSequence>;

inline constexpr std::size_t kMaxTruncationLength = 1u << 20;

/// Shortest prefix whose excluded tail mass sum_{k>N} (1 - |a_k|) is at most
/// `tolerance`. The result uses convergence-normalized factors and records
/// the sequence's boundary accumulation point.
inline BlaschkeSpec truncate_blaschke(const ZeroSequence& seq, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  return std::visit(
      [&](const auto& s) -> BlaschkeSpec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteSequence>) {
          std::vector<BlaschkeZero> zeros;
          for (const auto& p : s.points) zeros.push_back({p, 1});
          return BlaschkeSpec(std::move(zeros), true);
        } else if constexpr (std::is_same_v<T, RadialGeometricSequence>) {
          const cplx point = detail::normalize_unimodular(s.point, 1e-9, "sequence point");
          if (!(s.base > 0.0 && s.base < 1.0))
            throw DomainError("geometric base must lie in (0, 1); tail not summable");
          std::vector<BlaschkeZero> zeros;
          double term = s.base;  // 1 - |a_k| = base^k
          double tail = s.base / (1.0 - s.base);
          while (tail > tolerance) {
            if (zeros.size() >= kMaxTruncationLength)
              throw ResolutionError("truncation exceeds the maximum length");
            zeros.push_back({(1.0 - term) * point, 1});
            tail -= term;
            term *= s.base;
            // Closed form keeps the tail exact instead of accumulating error.
            tail = term / (1.0 - s.base);
          }
          return BlaschkeSpec(std::move(zeros), true, {point}, tail);
        } else {
          const cplx point = detail::normalize_unimodular(s.point, 1e-9, "sequence point");
          if (!(s.exponent > 1.0))
            throw DomainError("sum of (1 - |a_k|) diverges: not a Blaschke sequence");
          const double p = s.exponent;
          std::vector<BlaschkeZero> zeros;
          auto tail_bound = [p](double n) { return std::pow(n, 1.0 - p) / (p - 1.0); };
          std::size_t n = 0;
          while (n == 0 || tail_bound(static_cast<double>(n)) > tolerance) {
            if (n >= kMaxTruncationLength)
              throw ResolutionError("truncation exceeds the maximum length");
            ++n;
            zeros.push_back({(1.0 - std::pow(static_cast<double>(n), -p)) * point, 1});
          }
          return BlaschkeSpec(std::move(zeros), true, {point},
                              tail_bound(static_cast<double>(n)));
        }
      },
      seq);
}

}  // namespace innerfn
