#pragma once

// JSON function spec files.
//
//   {"constant": [re, im], "derivative": false, "factors": [ ... ]}
//
// Factor objects have exactly one key: mobius, blaschke, blaschke_seq,
// monomial, singular, outer_poly, outer_exp_poly. With "derivative": true
// the file describes theta' for the product theta.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "innerfn/derivative.hpp"
#include "innerfn/disk_functions.hpp"
#include "innerfn/error.hpp"

namespace innerfn {

using json = nlohmann::json;

struct FunctionSpec {
  FunctionExpr expr;
  bool derivative = false;

  DiskFunction disk_function(const EvalOptions& opts = {}) const {
    return derivative ? DiskFunction::derivative_of(expr, opts) : DiskFunction(expr, opts);
  }
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& key, const std::string& what) {
  throw ParseError("invalid spec at '" + key + "': " + what);
}

inline const json& require_key(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path + "." + key, "missing key");
  return *it;
}

inline double parse_real(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(path, "non-finite number");
  return v;
}

inline cplx parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return parse_real(j, path);
  if (!j.is_array() || j.size() != 2) parse_fail(path, "expected [re, im]");
  return {parse_real(j[0], path + "[0]"), parse_real(j[1], path + "[1]")};
}

inline bool parse_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) parse_fail(path, "expected a boolean");
  return j.get<bool>();
}

inline int parse_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) parse_fail(path, "expected an integer");
  return j.get<int>();
}

inline const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  return j;
}

inline Polynomial parse_coeffs(const json& obj, const std::string& path) {
  const auto& arr = require_array(require_key(obj, "coeffs", path), path + ".coeffs");
  Polynomial p;
  for (std::size_t i = 0; i < arr.size(); ++i)
    p.push_back(parse_complex(arr[i], path + ".coeffs[" + std::to_string(i) + "]"));
  return p;
}

// Runs a constructor and reports domain failures as parse errors at `path`.
template <class Fn>
auto construct_at(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    parse_fail(path, e.what());
  } catch (const ResolutionError& e) {
    parse_fail(path, e.what());
  }
}

inline Factor parse_factor(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) parse_fail(path, "factor must be an object with one key");
  const auto& [key, body] = *j.items().begin();
  const std::string p = path + "." + key;
  if (key == "mobius") {
    const cplx lambda = parse_complex(require_key(body, "lambda", p), p + ".lambda");
    const cplx a = parse_complex(require_key(body, "a", p), p + ".a");
    return construct_at(p, [&] { return Factor(MobiusTransform(lambda, a)); });
  }
  if (key == "blaschke") {
    const auto& arr = require_array(require_key(body, "zeros", p), p + ".zeros");
    std::vector<BlaschkeZero> zeros;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string zp = p + ".zeros[" + std::to_string(i) + "]";
      const auto& z = arr[i];
      if (!z.is_array() || (z.size() != 2 && z.size() != 3)) parse_fail(zp, "expected [re, im, mult]");
      zeros.push_back({{parse_real(z[0], zp), parse_real(z[1], zp)}, z.size() == 3 ? parse_int(z[2], zp) : 1});
    }
    bool normalized = false;
    if (body.contains("normalized")) normalized = parse_bool(body["normalized"], p + ".normalized");
    std::vector<cplx> accumulation;
    if (body.contains("accumulation_points")) {
      const auto& acc = require_array(body["accumulation_points"], p + ".accumulation_points");
      for (std::size_t i = 0; i < acc.size(); ++i)
        accumulation.push_back(
            parse_complex(acc[i], p + ".accumulation_points[" + std::to_string(i) + "]"));
    }
    double tail = 0.0;
    if (body.contains("tail_mass")) tail = parse_real(body["tail_mass"], p + ".tail_mass");
    return construct_at(p, [&] {
      return Factor(BlaschkeSpec(std::move(zeros), normalized, std::move(accumulation), tail));
    });
  }
  if (key == "blaschke_seq") {
    const auto& kind_j = require_key(body, "kind", p);
    if (!kind_j.is_string()) parse_fail(p + ".kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    const cplx point = parse_complex(require_key(body, "point", p), p + ".point");
    const double tol = parse_real(require_key(body, "tolerance", p), p + ".tolerance");
    ZeroSequence seq;
    if (kind == "radial_geometric")
      seq = RadialGeometricSequence{point, parse_real(require_key(body, "base", p), p + ".base")};
    else if (kind == "radial_power")
      seq = RadialPowerSequence{point, parse_real(require_key(body, "exponent", p), p + ".exponent")};
    else
      parse_fail(p + ".kind", "unknown generator kind '" + kind + "'");
    return construct_at(p, [&] { return Factor(truncate_blaschke(seq, tol)); });
  }
  if (key == "monomial") {
    const int m = parse_int(body, p);
    if (m < 0) parse_fail(p, "monomial power must be >= 0");
    return Monomial{m};
  }
  if (key == "singular") {
    const auto& arr = require_array(require_key(body, "atoms", p), p + ".atoms");
    std::vector<SingularAtom> atoms;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ap = p + ".atoms[" + std::to_string(i) + "]";
      const auto& a = arr[i];
      if (!a.is_array() || a.size() != 3) parse_fail(ap, "expected [re, im, mass]");
      atoms.push_back({{parse_real(a[0], ap), parse_real(a[1], ap)}, parse_real(a[2], ap)});
    }
    return construct_at(p, [&] { return Factor(SingularAtomSpec(std::move(atoms))); });
  }
  if (key == "outer_poly") {
    auto coeffs = parse_coeffs(body, p);
    int power = 1;
    if (body.contains("power")) power = parse_int(body["power"], p + ".power");
    return construct_at(p, [&] { return Factor(OuterPolynomial(std::move(coeffs), power)); });
  }
  if (key == "outer_exp_poly") return OuterExpPolynomial{parse_coeffs(body, p)};
  parse_fail(p, "unknown factor type");
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json coeffs_json(const Polynomial& p) {
  json arr = json::array();
  for (const auto& c : p) arr.push_back(complex_json(c));
  return arr;
}

}  // namespace detail

inline FunctionSpec parse_function_spec(const json& j) {
  if (!j.is_object()) detail::parse_fail("$", "top level must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "constant" && key != "factors" && key != "derivative")
      detail::parse_fail("$." + key, "unknown top-level key");
  FunctionSpec spec;
  cplx constant = 1.0;
  if (j.contains("constant")) constant = detail::parse_complex(j["constant"], "$.constant");
  if (j.contains("derivative")) spec.derivative = detail::parse_bool(j["derivative"], "$.derivative");
  const auto& arr = detail::require_array(detail::require_key(j, "factors", "$"), "$.factors");
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < arr.size(); ++i)
    factors.push_back(detail::parse_factor(arr[i], "$.factors[" + std::to_string(i) + "]"));
  spec.expr = detail::construct_at("$", [&] { return FunctionExpr(std::move(factors), constant); });
  return spec;
}

inline FunctionSpec parse_function_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_function_spec(j);
}

inline FunctionSpec parse_function_spec(const char* text) {
  return parse_function_spec(std::string(text));
}

inline FunctionSpec load_function_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_function_spec(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline json to_json(const Factor& factor) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MobiusTransform>) {
          return {{"mobius", {{"lambda", detail::complex_json(f.lambda())}, {"a", detail::complex_json(f.a())}}}};
        } else if constexpr (std::is_same_v<T, BlaschkeSpec>) {
          json zeros = json::array();
          for (const auto& z : f.zeros())
            zeros.push_back(json::array({z.point.real(), z.point.imag(), z.multiplicity}));
          json body{{"zeros", zeros}, {"normalized", f.normalized()}};
          if (!f.accumulation_points().empty()) {
            json acc = json::array();
            for (const auto& p : f.accumulation_points()) acc.push_back(detail::complex_json(p));
            body["accumulation_points"] = acc;
            body["tail_mass"] = f.tail_mass();
          }
          return {{"blaschke", body}};
        } else if constexpr (std::is_same_v<T, Monomial>) {
          return {{"monomial", f.power}};
        } else if constexpr (std::is_same_v<T, SingularAtomSpec>) {
          json atoms = json::array();
          for (const auto& a : f.atoms())
            atoms.push_back(json::array({a.location.real(), a.location.imag(), a.mass}));
          return {{"singular", {{"atoms", atoms}}}};
        } else if constexpr (std::is_same_v<T, OuterPolynomial>) {
          return {{"outer_poly", {{"coeffs", detail::coeffs_json(f.coeffs())}, {"power", f.power()}}}};
        } else {
          return {{"outer_exp_poly", {{"coeffs", detail::coeffs_json(f.coeffs)}}}};
        }
      },
      factor);
}

inline json to_json(const FunctionSpec& spec) {
  json factors = json::array();
  for (const auto& f : spec.expr.factors()) factors.push_back(to_json(f));
  json j{{"constant", detail::complex_json(spec.expr.constant())}, {"factors", factors}};
  if (spec.derivative) j["derivative"] = true;
  return j;
}

}  // namespace innerfn
