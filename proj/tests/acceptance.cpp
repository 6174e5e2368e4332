// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "innerfn/innerfn.hpp"

using namespace innerfn;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Criterion {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) {
      ok_ = false;
      if (failures_.size() < 8) failures_.push_back(what);
    }
  }
  bool ok() const { return ok_; }
  std::string detail() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

FunctionExpr mobius(cplx lambda, cplx a) { return FunctionExpr::single(MobiusTransform(lambda, a)); }
FunctionExpr monomial(int m) { return FunctionExpr::single(Monomial{m}); }
FunctionExpr atom(double mass) { return FunctionExpr::single(SingularAtomSpec({{1.0, mass}})); }

std::vector<CatalogEntry> catalog() { return load_catalog(INNERFN_CATALOG_DIR); }
bool is_mobius_entry(const CatalogEntry& e) { return e.name.rfind("mobius_", 0) == 0; }

const std::vector<FunctionExpr>& mobius_cases() {
  static const std::vector<FunctionExpr> cases = {
      mobius(1.0, 0.5), mobius(cplx(0.0, 1.0), cplx(0.3, 0.2)), mobius(-1.0, -0.7)};
  return cases;
}

void mobius_forward(Criterion& c) {
  for (std::size_t i = 0; i < mobius_cases().size(); ++i) {
    const auto t0 = Clock::now();
    const auto d = DiskFunction::derivative_of(mobius_cases()[i]);
    const auto fact = factorize(d, 4096);
    const auto agg = aggregate_defect(d, fact, probe_set(512));
    const double elapsed = seconds_since(t0);
    c.check(agg.max_defect <= 1e-8, "case " + std::to_string(i) + " defect " + num(agg.max_defect));
    c.check(elapsed < 1.0, "case " + std::to_string(i) + " took " + num(elapsed) + " s");
  }
}

void monomial_converse(Criterion& c) {
  const auto d = DiskFunction::derivative_of(monomial(2));
  const auto fact = factorize(d, 4096);
  const double defect = outerness_defect(d, fact, 0.5).defect;
  c.check(std::abs(defect - std::log(2.0)) <= 1e-4, "defect(0.5) " + num(defect));
  double worst = 0.0;
  for (const auto& zeta : circle_points(256)) {
    const cplx z = 0.5 * zeta;
    worst = std::max(worst, std::abs(inner_part_eval(d, fact, z) - z));
  }
  c.check(worst <= 1e-6, "inner part error " + num(worst));
}

void blaschke_converse(Criterion& c) {
  const auto symmetric = critical_points(BlaschkeSpec({{0.5, 1}, {-0.5, 1}}));
  c.check(symmetric.size() == 1 && std::abs(symmetric[0]) <= 1e-10, "symmetric pair critical point");
  const auto b = FunctionExpr::single(BlaschkeSpec({{0.5, 1}, {-0.5, 1}}));
  const auto d = DiskFunction::derivative_of(b);
  const auto fact = factorize(d, 4096);
  double worst = 0.0;
  std::size_t used = 0;
  for (const auto& z : probe_set(128)) {
    if (!probe_admissible(d, z)) continue;
    worst = std::max(worst, std::abs(inner_log_modulus(d, fact, z) - std::log(std::abs(z))));
    ++used;
  }
  c.check(used > 0 && worst <= 1e-4, "inner log-modulus error " + num(worst));
  const auto pair = critical_points(BlaschkeSpec({{0.0, 1}, {0.5, 1}}));
  c.check(pair.size() == 1 && std::abs(pair[0] - (2.0 - std::sqrt(3.0))) <= 1e-10,
          "{0, 0.5} critical point");
}

void singular_converse(Criterion& c) {
  for (double mass : {1.0, 2.0}) {
    const auto s = SingularAtomSpec({{1.0, mass}});
    const auto d = DiskFunction::derivative_of(FunctionExpr::single(s));
    const auto fact = factorize(d, 8192);
    const double defect = outerness_defect(d, fact, 0.0).defect;
    c.check(std::abs(defect - mass) <= 1e-3, "mass " + num(mass) + " defect(0) " + num(defect));
    const double gap = singular_inheritance_check(s, fact, probe_set(128, 0.8));
    c.check(gap <= 1e-4, "mass " + num(mass) + " inheritance gap " + num(gap));
  }
}

void schwarz_pick(Criterion& c) {
  const auto probes = probe_set(512);
  for (const auto& e : catalog()) {
    for (const auto& z : probes) {
      const double r = schwarz_pick_ratio(e.spec.expr, z);
      c.check(r <= 1.0 + 1e-12, e.name + " ratio " + num(r));
      if (is_mobius_entry(e)) c.check(std::abs(r - 1.0) <= 1e-9, e.name + " ratio " + num(r));
    }
  }
  const double sq = schwarz_pick_ratio(monomial(2), 0.5);
  c.check(std::abs(sq - 0.8) <= 1e-12, "z^2 at 0.5 gives " + num(sq));
}

void julia(Criterion& c) {
  for (const auto& e : catalog()) {
    const auto boundary = julia_boundary_points(e.spec.expr, 64, 1e-3);
    c.check(!boundary.empty(), e.name + " has no boundary samples");
    for (const auto& z : probe_set(64))
      for (const auto& zeta : boundary) {
        const auto j = julia_check(e.spec.expr, z, zeta);
        c.check(j.lhs <= j.rhs * (1.0 + 1e-9), e.name + " lhs " + num(j.lhs) + " > rhs " + num(j.rhs));
        if (is_mobius_entry(e))
          c.check(std::abs(j.lhs - j.rhs) <= 1e-9 * j.rhs, e.name + " equality gap " + num(j.lhs - j.rhs));
      }
  }
  const auto hand = julia_check(mobius(1.0, 0.5), 0.0, 1.0);
  c.check(std::abs(hand.lhs - 3.0) <= 1e-10 && std::abs(hand.rhs - 3.0) <= 1e-10, "hand case");
}

void eta_condition(Criterion& c) {
  const auto identity = EtaTable::identity();
  for (const auto& e : catalog()) {
    if (!is_mobius_entry(e)) continue;
    const auto v = eta_condition_check(e.spec.expr, identity, probe_set(512));
    c.check(v.holds && v.max_relative_gap <= 1e-10, e.name + " gap " + num(v.max_relative_gap));
  }
  const auto sq = eta_condition_check(monomial(2), identity, probe_set(512));
  c.check(!sq.holds && sq.witness && std::abs(*sq.witness) == 0.0, "z^2 witness at 0");
  bool rejected = false;
  try {
    EtaTable({{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}});
  } catch (const InvalidEtaError&) {
    rejected = true;
  }
  c.check(rejected, "bounded eta table accepted");
}

double relative_error_on_circle(const FunctionExpr& f, const FactorizationResult& fact, double r) {
  double worst = 0.0;
  for (const auto& zeta : circle_points(360)) {
    const cplx z = r * zeta;
    worst = std::max(worst, std::abs(fact.outer(z) / eval(f, z) - 1.0));
  }
  return worst;
}

void round_trip(Criterion& c) {
  const std::vector<FunctionExpr> outers = {
      FunctionExpr::single(OuterPolynomial({1.0, -0.5})),
      FunctionExpr::single(OuterExpPolynomial{{0.0, 0.3, 0.1}})};
  for (std::size_t i = 0; i < outers.size(); ++i) {
    const auto fact = factorize(outers[i], 4096);
    const double err = relative_error_on_circle(outers[i], fact, 0.9);
    c.check(err <= 1e-6, "outer " + std::to_string(i) + " error " + num(err));
    double prev = -1.0;
    for (std::size_t n = 256; n <= 8192; n *= 2) {
      const double e = relative_error_on_circle(outers[i], factorize(outers[i], n), 0.9);
      if (prev >= 0.0)
        c.check(e <= prev + 1e-14, "outer " + std::to_string(i) + " N=" + std::to_string(n) + " error " + num(e));
      prev = e;
    }
  }
}

void spectrum(Criterion& c) {
  for (const auto& e : catalog()) {
    const auto r = inclusion_check(e.spec.expr, 4096);
    c.check(r.subset_holds, e.name + " has extra spectrum points");
  }
  const double tol = 2.0 * kPi / 256.0;
  for (const auto& e : catalog()) {
    std::vector<cplx> atoms;
    for (const auto& f : e.spec.expr.factors())
      if (const auto* s = std::get_if<SingularAtomSpec>(&f))
        for (const auto& a : s->atoms()) atoms.push_back(a.location);
    if (atoms.empty()) continue;
    const DiskFunction f(e.spec.expr);
    const auto est = spectrum_numeric([&](cplx z) { return f.log_abs(z); }, f.zeros());
    for (const auto& a : atoms) {
      bool found = false;
      for (const auto& p : est.points)
        if (angular_distance(p, a) <= tol) found = true;
      c.check(found, e.name + " atom at angle " + num(std::arg(a)) + " not detected");
    }
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Criterion& c) {
  const fs::path base = fs::temp_directory_path() / ("innerfn_acceptance_" + std::to_string(::getpid()));
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / std::to_string(i);
    fs::create_directories(dir);
    const std::string cmd = std::string(INNERFN_CLI_PATH) + " verify-theorem --out " + dir.string() + " >/dev/null 2>&1";
    const auto t0 = Clock::now();
    const int rc = std::system(cmd.c_str());
    const double elapsed = seconds_since(t0);
    c.check(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "run " + std::to_string(i) + " exit status");
    c.check(elapsed < 60.0, "run " + std::to_string(i) + " took " + num(elapsed) + " s");
    outputs[i] = read_file(dir / "verify-theorem.json");
  }
  c.check(!outputs[0].empty() && outputs[0] == outputs[1], "outputs differ");
  std::error_code ec;
  fs::remove_all(base, ec);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"mobius derivative is outer", mobius_forward},
      {"monomial converse", monomial_converse},
      {"blaschke converse", blaschke_converse},
      {"singular inheritance", singular_converse},
      {"schwarz-pick", schwarz_pick},
      {"julia", julia},
      {"eta condition", eta_condition},
      {"factorization round trip", round_trip},
      {"spectrum inclusion", spectrum},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %zu %s%s%s\n", c.ok() ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                c.ok() ? "" : ": ", c.detail().c_str());
    std::fflush(stdout);
    if (!c.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
