// innerfn command-line front end.
//
//   innerfn eval           --spec PATH [--at RE,IM ...]
//   innerfn factor         --spec PATH [--n N] [--out DIR] [--at RE,IM ...]
//   innerfn verify-theorem [--select PREFIX] [--spec PATH] [--n N] [--out DIR] [--eta PATH]
//   innerfn scan           --kind K --spec PATH [--resolution R] [--n N] [--delta D] [--out DIR]
//
// Exit status: 0 success, 1 inconsistent verdict, 2 parse error, 3 domain
// error, 4 under-resolved computation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "innerfn/innerfn.hpp"

#ifndef INNERFN_CATALOG_DIR
#define INNERFN_CATALOG_DIR "catalog"
#endif

namespace fs = std::filesystem;
using namespace innerfn;

namespace {

struct RunConfig {
  std::string spec_path;
  std::vector<std::string> at;
  std::size_t n = 4096;
  std::string out_dir = ".";
  std::string kind;
  double delta = 0.1;
  std::size_t resolution = 0;
  std::string eta_path;
  std::string catalog_dir = INNERFN_CATALOG_DIR;
  std::string select = "all";
  double clip_floor = 40.0;
  double verdict_multiplier = 10.0;
};

int precision() {
  const char* env = std::getenv("INNERFN_PRECISION");
  if (env == nullptr || *env == '\0') return 15;
  char* end = nullptr;
  const long p = std::strtol(env, &end, 10);
  if (*end != '\0' || p < 1 || p > 17) throw ParseError("INNERFN_PRECISION must be an integer in [1, 17]");
  return static_cast<int>(p);
}

std::string fmt(double v) { return format_real(v, precision()); }

cplx parse_point(const std::string& s) {
  std::istringstream in(s);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) throw ParseError("bad point '" + s + "': expected RE or RE,IM");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw ParseError("bad point '" + s + "': expected RE,IM");
  }
  std::string rest;
  if (in >> rest) throw ParseError("bad point '" + s + "': trailing characters");
  return {re, im};
}

std::vector<cplx> parse_points(const std::vector<std::string>& at) {
  std::vector<cplx> out;
  for (const auto& s : at) out.push_back(parse_point(s));
  return out;
}

void check_config(const RunConfig& cfg) {
  try {
    require_grid_size(cfg.n);
  } catch (const DomainError& e) {
    throw ParseError(std::string("--n: ") + e.what());
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ParseError("--delta must lie in (0, 1)");
  if (!(cfg.clip_floor > 0.0)) throw ParseError("--clip-floor must be positive");
  if (!(cfg.verdict_multiplier > 0.0)) throw ParseError("--verdict-multiplier must be positive");
}

DiagnosticsOptions diagnostics_options(const RunConfig& cfg) {
  DiagnosticsOptions o;
  o.grid_size = cfg.n;
  o.verdict_multiplier = cfg.verdict_multiplier;
  o.factorization.clip_floor = cfg.clip_floor;
  return o;
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (!fs::is_directory(cfg.out_dir)) throw ParseError("cannot create output directory '" + cfg.out_dir + "'");
  return fs::path(cfg.out_dir) / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// ---- eval ------------------------------------------------------------------

int cmd_eval(const RunConfig& cfg) {
  const auto spec = load_function_spec(cfg.spec_path);
  auto points = parse_points(cfg.at);
  if (points.empty()) points.push_back(0.0);
  const auto f = spec.disk_function();
  std::ostringstream out;
  if (spec.derivative)
    out << "re,im,value_re,value_im\n";
  else
    out << "re,im,value_re,value_im,deriv_re,deriv_im\n";
  for (const auto& z : points) {
    const cplx v = f.value(z);
    out << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(v.real()) << ',' << fmt(v.imag());
    if (!spec.derivative) {
      const cplx d = deriv(spec.expr, z);
      out << ',' << fmt(d.real()) << ',' << fmt(d.imag());
    }
    out << '\n';
  }
  std::cout << out.str();
  return 0;
}

// ---- factor ----------------------------------------------------------------

std::string defect_csv(const DiskFunction& f, const FactorizationResult& fact,
                       const std::vector<cplx>& probes, AggregateDefect* agg) {
  std::ostringstream out;
  out << "re,im,defect,eps_grid\n";
  for (const auto& z : probes) {
    if (!probe_admissible(f, z)) continue;
    const auto d = outerness_defect(f, fact, z);
    out << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(d.defect) << ',' << fmt(d.eps_grid)
        << '\n';
  }
  if (agg != nullptr) *agg = aggregate_defect(f, fact, probes);
  return out.str();
}

int cmd_factor(const RunConfig& cfg) {
  const auto spec = load_function_spec(cfg.spec_path);
  const auto f = spec.disk_function();
  if (f.is_identically_zero()) throw DegenerateError("cannot factor the zero function");
  FactorizationOptions fopts;
  fopts.clip_floor = cfg.clip_floor;
  const auto fact = factorize(f, cfg.n, fopts);

  auto probes = probe_set(512);
  const auto extra = parse_points(cfg.at);
  probes.insert(probes.end(), extra.begin(), extra.end());
  AggregateDefect agg;
  const std::string csv = defect_csv(f, fact, probes, &agg);

  const std::string stem = stem_of(cfg.spec_path);
  json cache = factorization_to_json(fact);
  cache["probeSet"] = "v" + std::to_string(kProbeSetVersion);
  write_file(output_path(cfg, stem + ".factor.json"), cache.dump(2) + "\n");
  write_file(output_path(cfg, stem + ".defect.csv"), csv);
  std::cout << "N " << cfg.n << "\n"
            << "defectMax " << fmt(agg.max_defect) << "\n"
            << "defectArgmax " << fmt(agg.argmax.real()) << ',' << fmt(agg.argmax.imag()) << "\n"
            << "eps_grid " << fmt(fact.eps_grid()) << "\n"
            << "usedProbes " << agg.used_probes << "\n";
  return 0;
}

// ---- verify-theorem --------------------------------------------------------

json eta_json(const EtaVerdict& v, const std::string& name) {
  json j{{"eta", name}, {"holds", v.holds}, {"max_relative_gap", v.max_relative_gap}};
  if (v.witness) j["witness"] = json::array({v.witness->real(), v.witness->imag()});
  return j;
}

json points_json(const std::vector<cplx>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(json::array({p.real(), p.imag()}));
  return a;
}

int cmd_verify(const RunConfig& cfg) {
  std::vector<CatalogEntry> entries;
  if (!cfg.spec_path.empty())
    entries.push_back({stem_of(cfg.spec_path), cfg.spec_path, load_function_spec(cfg.spec_path)});
  else
    entries = load_catalog(cfg.catalog_dir, cfg.select);
  if (entries.empty()) throw ParseError("no catalog entries match '" + cfg.select + "'");
  std::optional<EtaTable> eta;
  if (!cfg.eta_path.empty()) eta = load_eta_csv(cfg.eta_path);

  const auto opts = diagnostics_options(cfg);
  json header = config_header(opts);
  header["delta"] = cfg.delta;
  json results = json::array();
  std::vector<std::string> inconsistent;
  for (const auto& e : entries) {
    if (e.spec.derivative) throw DomainError(e.name + ": verify-theorem needs an inner function, not a derivative");
    const auto report = diagnose(e.spec.expr, opts);
    json r = report_to_json(report);
    if (eta) r["etaVerdict"].push_back(eta_json(eta_condition_check(e.spec.expr, *eta, probe_set(opts.probe_count)), cfg.eta_path));

    SpectrumOptions sopts;
    sopts.delta = cfg.delta;
    const auto inc = inclusion_check(e.spec.expr, opts.grid_size, sopts, opts.factorization);
    r["spectrum"] = {{"exact", spectrum_to_json(inc.exact)},
                     {"numeric", spectrum_to_json(inc.numeric)},
                     {"subsetHolds", inc.subset_holds},
                     {"extraPoints", points_json(inc.extra_points)},
                     {"missedPoints", points_json(inc.missed_points)},
                     {"missedPointsExploratory", true}};
    const bool ok = report.theorem.consistent && report.eta_consistent && report.julia_ok &&
                    inc.subset_holds;
    r["consistent"] = ok;
    json entry{{"name", e.name}, {"report", r}};
    results.push_back(entry);
    if (!ok) inconsistent.push_back(e.name);
  }
  json doc{{"config", header},
           {"entries", results},
           {"allConsistent", inconsistent.empty()},
           {"inconsistent", inconsistent}};
  const std::string text = doc.dump(2) + "\n";
  write_file(output_path(cfg, "verify-theorem.json"), text);
  std::cout << text;
  for (const auto& name : inconsistent) std::cerr << "inconsistent: " << name << "\n";
  return inconsistent.empty() ? 0 : 1;
}

// ---- scan ------------------------------------------------------------------

int scan_schwarz_pick(const RunConfig& cfg, const FunctionSpec& spec) {
  const std::size_t res = cfg.resolution == 0 ? 64 : cfg.resolution;
  std::ostringstream out;
  out << "r,angle,re,im,ratio\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < res; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(res);
    for (std::size_t j = 0; j < res; ++j) {
      const double a = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(res);
      const cplx z = std::polar(r, a);
      const double ratio = schwarz_pick_ratio(spec.expr, z);
      worst = std::max(worst, ratio);
      out << fmt(r) << ',' << fmt(a) << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << ','
          << fmt(ratio) << '\n';
    }
  }
  write_file(output_path(cfg, stem_of(cfg.spec_path) + ".schwarz-pick.csv"), out.str());
  std::cout << "samples " << res * res << "\nmaxRatio " << fmt(worst) << "\n";
  return 0;
}

int scan_julia(const RunConfig& cfg, const FunctionSpec& spec) {
  const std::size_t res = cfg.resolution == 0 ? 64 : cfg.resolution;
  std::ostringstream out;
  out << "z_re,z_im,zeta_re,zeta_im,lhs,rhs,ok\n";
  double max_gap = 0.0;
  bool all_ok = true;
  const auto zetas = julia_boundary_points(spec.expr, res, 1e-3);
  for (const auto& z : probe_set(res)) {
    for (const auto& zeta : zetas) {
      const auto j = julia_check(spec.expr, z, zeta);
      max_gap = std::max(max_gap, std::abs(j.lhs - j.rhs));
      all_ok = all_ok && j.ok;
      out << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(zeta.real()) << ','
          << fmt(zeta.imag()) << ',' << fmt(j.lhs) << ',' << fmt(j.rhs) << ',' << (j.ok ? 1 : 0)
          << '\n';
    }
  }
  write_file(output_path(cfg, stem_of(cfg.spec_path) + ".julia.csv"), out.str());
  std::cout << "samples " << res * zetas.size() << "\nmax |lhs-rhs| " << fmt(max_gap)
            << "\nallOk " << (all_ok ? "true" : "false") << "\n";
  return 0;
}

int scan_defect(const RunConfig& cfg, const FunctionSpec& spec) {
  const auto f = spec.disk_function();
  if (f.is_identically_zero()) throw DegenerateError("cannot factor the zero function");
  FactorizationOptions fopts;
  fopts.clip_floor = cfg.clip_floor;
  const auto fact = factorize(f, cfg.n, fopts);
  const std::size_t count = cfg.resolution == 0 ? 512 : cfg.resolution;
  AggregateDefect agg;
  const std::string csv = defect_csv(f, fact, probe_set(count), &agg);
  write_file(output_path(cfg, stem_of(cfg.spec_path) + ".defect.csv"), csv);
  std::cout << "defectMax " << fmt(agg.max_defect) << "\neps_grid " << fmt(fact.eps_grid()) << "\n";
  return 0;
}

int scan_spectrum(const RunConfig& cfg, const FunctionSpec& spec) {
  const auto f = spec.disk_function();
  if (f.is_identically_zero()) throw DegenerateError("cannot factor the zero function");
  FactorizationOptions fopts;
  fopts.clip_floor = cfg.clip_floor;
  const auto fact = factorize(f, cfg.n, fopts);
  SpectrumOptions sopts;
  sopts.delta = cfg.delta;
  sopts.resolution = cfg.resolution == 0 ? 256 : cfg.resolution;
  SpectrumScan scan;
  const auto est = spectrum_numeric([&](cplx z) { return inner_log_modulus(f, fact, z); },
                                    f.zeros(), sopts, &scan);
  const double threshold = std::log1p(-cfg.delta);
  std::ostringstream out;
  out << "angle,min_log_modulus,marked\n";
  for (std::size_t j = 0; j < scan.angles.size(); ++j)
    out << fmt(scan.angles[j]) << ',' << fmt(scan.min_log_modulus[j]) << ','
        << (scan.min_log_modulus[j] < threshold ? 1 : 0) << '\n';
  const std::string stem = stem_of(cfg.spec_path);
  write_file(output_path(cfg, stem + ".spectrum.csv"), out.str());
  write_file(output_path(cfg, stem + ".spectrum.json"), spectrum_to_json(est).dump(2) + "\n");
  std::cout << "points " << est.points.size() << "\n";
  for (const auto& p : est.points) std::cout << "angle " << fmt(std::arg(p)) << "\n";
  std::cout << "arcs " << est.arcs.size() << "\n";
  return 0;
}

int cmd_scan(const RunConfig& cfg) {
  const auto spec = load_function_spec(cfg.spec_path);
  if (cfg.kind == "schwarz-pick") return scan_schwarz_pick(cfg, spec);
  if (cfg.kind == "julia") return scan_julia(cfg, spec);
  if (cfg.kind == "defect") return scan_defect(cfg, spec);
  if (cfg.kind == "spectrum") return scan_spectrum(cfg, spec);
  throw ParseError("unknown scan kind '" + cfg.kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner functions, inner-outer factorization and diagnostics on the unit disk"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "grid size, a power of two in [16, 2^20]")->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    sub->add_option("--clip-floor", cfg.clip_floor, "log-modulus clipping floor")->capture_default_str();
  };

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a function and its derivative");
  eval_cmd->add_option("--spec", cfg.spec_path, "function spec file")->required();
  eval_cmd->add_option("--at", cfg.at, "evaluation point RE,IM (repeatable)");

  auto* factor_cmd = app.add_subcommand("factor", "inner-outer factorization and defect probes");
  factor_cmd->add_option("--spec", cfg.spec_path, "function spec file")->required();
  factor_cmd->add_option("--at", cfg.at, "extra defect probe RE,IM (repeatable)");
  add_common(factor_cmd);

  auto* verify_cmd = app.add_subcommand("verify-theorem", "run the verdicts over catalog entries");
  verify_cmd->add_option("--spec", cfg.spec_path, "single spec file instead of the catalog");
  verify_cmd->add_option("--catalog-dir", cfg.catalog_dir, "catalog directory")->capture_default_str();
  verify_cmd->add_option("--select", cfg.select, "entry name prefix, or 'all'")->capture_default_str();
  verify_cmd->add_option("--eta", cfg.eta_path, "extra eta table, two-column CSV");
  verify_cmd->add_option("--delta", cfg.delta, "spectrum threshold")->capture_default_str();
  verify_cmd->add_option("--verdict-multiplier", cfg.verdict_multiplier, "defect threshold in units of eps_grid")
      ->capture_default_str();
  add_common(verify_cmd);

  auto* scan_cmd = app.add_subcommand("scan", "write a CSV scan");
  scan_cmd->add_option("--kind", cfg.kind, "schwarz-pick, julia, defect or spectrum")->required();
  scan_cmd->add_option("--spec", cfg.spec_path, "function spec file")->required();
  scan_cmd->add_option("--resolution", cfg.resolution, "grid or probe resolution");
  scan_cmd->add_option("--delta", cfg.delta, "spectrum threshold")->capture_default_str();
  add_common(scan_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    check_config(cfg);
    precision();
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (factor_cmd->parsed()) return cmd_factor(cfg);
    if (verify_cmd->parsed()) return cmd_verify(cfg);
    return cmd_scan(cfg);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
