#pragma once

// Serialization of results: factorization cache JSON, diagnostics reports,
// spectrum estimates, CSV scans and eta tables.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "innerfn/diagnostics.hpp"
#include "innerfn/factorization.hpp"
#include "innerfn/spec_io.hpp"
#include "innerfn/spectrum.hpp"

namespace innerfn {

/// %.{precision}g; deterministic across runs. Negative zero prints as 0.
inline std::string format_real(double v, int precision = 15) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline json factorization_to_json(const FactorizationResult& f) {
  json coeffs = json::array();
  for (const auto& c : f.analytic_log_coeffs()) coeffs.push_back(detail::complex_json(c));
  json sing = json::array();
  for (const auto& s : f.singularities())
    sing.push_back(json::array({s.location.real(), s.location.imag(), s.strength}));
  return {{"N", f.grid_size()},
          {"clipFloor", f.clip_floor()},
          {"eps_grid", f.eps_grid()},
          {"clipped_nodes", f.clipped_nodes()},
          {"guarded_nodes", f.guarded_nodes()},
          {"log_singularities", sing},
          {"coefficients", coeffs}};
}

inline FactorizationResult factorization_from_json(const json& j) {
  try {
    const auto n = j.at("N").get<std::size_t>();
    require_grid_size(n);
    std::vector<cplx> coeffs;
    for (const auto& c : j.at("coefficients"))
      coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    if (coeffs.size() != n / 2) throw ParseError("coefficient count must be N/2");
    std::vector<LogSingularity> sing;
    if (j.contains("log_singularities"))
      for (const auto& s : j.at("log_singularities"))
        sing.push_back({{s.at(0).get<double>(), s.at(1).get<double>()}, s.at(2).get<double>()});
    return FactorizationResult(n, j.at("clipFloor").get<double>(), std::move(coeffs),
                               std::move(sing), j.value("eps_grid", 0.0),
                               j.value("clipped_nodes", std::size_t{0}),
                               j.value("guarded_nodes", std::size_t{0}));
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid factorization cache: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid factorization cache: ") + e.what());
  }
}

inline json spectrum_to_json(const SpectrumEstimate& s) {
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back(detail::complex_json(p));
  json arcs = json::array();
  for (const auto& a : s.arcs) arcs.push_back(json::array({a.start, a.end}));
  return {{"points", pts}, {"arcs", arcs}, {"method", to_string(s.method)}};
}

inline json report_to_json(const DiagnosticsReport& r) {
  json mobius = {{"verdict", r.theorem.is_mobius}};
  if (r.theorem.fit) {
    mobius["lambda"] = detail::complex_json(r.theorem.fit->lambda());
    mobius["a"] = detail::complex_json(r.theorem.fit->a());
  }
  json eta = {{"eta", "identity"},
              {"holds", r.eta_identity.holds},
              {"max_relative_gap", r.eta_identity.max_relative_gap}};
  if (r.eta_identity.witness) eta["witness"] = detail::complex_json(*r.eta_identity.witness);
  return {{"schwarzPickMax", r.schwarz_pick_max},
          {"schwarzPickMin", r.schwarz_pick_min},
          {"juliaResidualMin", r.julia_residual_min},
          {"juliaEqualityGap", r.julia_equality_gap},
          {"juliaSamples", r.julia_samples},
          {"juliaOk", r.julia_ok},
          {"derivativeDefectMax", r.theorem.defect_max},
          {"derivativeDefectArgmax", detail::complex_json(r.theorem.defect_argmax)},
          {"eps_grid", r.theorem.eps_grid},
          {"mobiusVerdict", mobius},
          {"etaVerdict", json::array({eta})},
          {"theoremConsistent", r.theorem.consistent},
          {"etaConsistent", r.eta_consistent}};
}

/// Defaults embedded in every report header.
inline json config_header(const DiagnosticsOptions& o) {
  return {{"N", o.grid_size},
          {"clipFloor", o.factorization.clip_floor},
          {"verdictMultiplier", o.verdict_multiplier},
          {"probeSet", "v" + std::to_string(kProbeSetVersion)},
          {"probeCount", o.probe_count},
          {"probeRadius", o.probe_radius},
          {"mobiusThreshold", o.mobius_threshold},
          {"zeroGuard", o.factorization.zero_guard}};
}

/// Two-column CSV (t, eta(t)); a header line is allowed, '#' starts a comment.
inline EtaTable parse_eta_csv(const std::string& text) {
  std::vector<std::pair<double, double>> knots;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    double t = 0.0, v = 0.0;
    char comma = 0;
    std::istringstream ls(line);
    if (!(ls >> t >> comma >> v) || comma != ',') {
      if (knots.empty() && lineno == 1) continue;  // header
      throw ParseError("eta table line " + std::to_string(lineno) + ": expected 't,eta'");
    }
    knots.emplace_back(t, v);
  }
  return EtaTable(std::move(knots));
}

inline EtaTable load_eta_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open eta table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_eta_csv(ss.str());
}

}  // namespace innerfn
