#include "verification.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "harness.hpp"
#include "reduced.hpp"
#include "resonance.hpp"
#include "series.hpp"
#include "spectral.hpp"
#include "toy.hpp"

namespace qdnls::verification {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// Collects sub-checks into one result.
struct Checks {
  CriterionResult r;
  bool all = true;
  std::string text;

  void add(const std::string& what, bool ok, const std::string& value) {
    all = all && ok;
    if (!text.empty()) text += "; ";
    text += what + " " + value + (ok ? "" : " [fails]");
    r.measured[what] = {{"ok", ok}, {"value", value}};
  }
  CriterionResult done() {
    r.passed = all;
    r.detail = text;
    return r;
  }
};

const reduced::Coefficients& consistent() {
  static const auto c = reduced::Coefficients::of(reduced::Variant::consistent);
  return c;
}

double full_period_02() {
  const auto res = reduced::find_period({0.0, 0.2, 0.0}, 1.0, consistent(), 1e-12);
  if (res.classification != reduced::PeriodClass::periodic) {
    throw std::runtime_error("no period detected from (0, 0.2)");
  }
  return res.full_period;
}

// [0, 2T] with T the half-exchange time.
double two_T_02() {
  const auto res = reduced::find_period({0.0, 0.2, 0.0}, 1.0, consistent(), 1e-12);
  if (res.classification != reduced::PeriodClass::periodic) {
    throw std::runtime_error("no period detected from (0, 0.2)");
  }
  return 2.0 * res.T;
}

CriterionResult c1() {
  Checks c;
  long quads = 0, identity_fail = 0, gauge_fail = 0, raw_fail = 0;
  for (long M = -1000; M <= 1000; ++M) {
    for (long N = -1000; N <= 1000; ++N) {
      if (M + N == 0) continue;
      const auto q = resonance::build_quad(M, N);
      ++quads;
      if (!resonance::cluster_identities_hold(q)) ++identity_fail;
      if (resonance::gauge_corrected_gap(q, 20.0 * static_cast<double>(M + N)) != 0.0) ++gauge_fail;
      try {
        if (resonance::raw_quintic_gap(q) != 10 * (M + N) * (M - N)) ++raw_fail;
      } catch (const std::logic_error&) {
        ++raw_fail;
      }
    }
  }
  c.add("quads", true, std::to_string(quads));
  c.add("identity failures", identity_fail == 0, std::to_string(identity_fail));
  c.add("nonzero gauge gaps", gauge_fail == 0, std::to_string(gauge_fail));
  c.add("raw gap law failures", raw_fail == 0, std::to_string(raw_fail));
  return c.done();
}

CriterionResult c2() {
  Checks c;
  const bool a = resonance::check_nondegeneracy(resonance::build_quad(5, -4)).nondegenerate;
  const bool b = resonance::check_nondegeneracy(resonance::build_quad(101, -100)).nondegenerate;
  const auto rep = resonance::check_nondegeneracy(resonance::build_quad(1, 0));
  bool found = false;
  for (const auto& v : rep.violations) {
    auto s1 = v.first_values, s2 = v.second_values;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    const std::array<resonance::Freq, 2> pm{-1, 1}, zz{0, 0};
    if ((s1 == pm && s2 == zz) || (s1 == zz && s2 == pm)) found = true;
  }
  c.add("Lambda(5,-4) nondegenerate", a, a ? "yes" : "no");
  c.add("Lambda(101,-100) nondegenerate", b, b ? "yes" : "no");
  c.add("Lambda(1,0) degenerate", !rep.nondegenerate, rep.nondegenerate ? "no" : "yes");
  c.add("collision {1,-1}/{0,0} reported", found, std::to_string(rep.violations.size()) + " collisions");
  return c.done();
}

CriterionResult c3() {
  Checks c;
  const auto scan = resonance::scan_dichotomy(resonance::build_quad(101, -100));
  c.add("tuples", scan.tuples == 1024, std::to_string(scan.tuples));
  c.add("applicable", scan.applicable > 0, std::to_string(scan.applicable));
  c.add("violations", scan.violations == 0, std::to_string(scan.violations));
  return c.done();
}

CriterionResult c4() {
  Checks c;
  const double mu = 1.0;
  const double P = full_period_02();
  const auto tr = reduced::integrate({0.0, 0.2, 0.0}, mu, consistent(), P, 1e-12, 0.0);
  const double H0 = reduced::hamiltonian(tr.samples.front(), mu);
  double drift = 0.0;
  for (const auto& s : tr.samples) drift = std::max(drift, std::abs(reduced::hamiltonian(s, mu) - H0) / std::abs(H0));
  c.add("H relative drift over one period", drift <= 1e-9, sci(drift));
  const double eps = std::numeric_limits<double>::epsilon();
  double hs = 0.0, het = 0.0;
  for (double phi : {kPi, -kPi}) {
    hs = std::max(hs, std::abs(reduced::hamiltonian({phi, 0.5, 0.0}, mu) - 45.0 * mu / 16.0));
    het = std::max(het, std::abs(reduced::heteroclinic_residual({phi, 0.5, 0.0})));
  }
  c.add("|H(+-pi,1/2) - 45mu/16|", hs <= 16 * eps * 45.0 / 16.0, sci(hs));
  c.add("|het residual at saddles|", het <= 16 * eps, sci(het));
  return c.done();
}

CriterionResult c5() {
  Checks c;
  std::array<double, 3> muT{};
  const std::array<double, 3> mus{0.5, 1.0, 2.0};
  reduced::PeriodResult r1;
  for (int i = 0; i < 3; ++i) {
    const auto r = reduced::find_period({0.0, 0.2, 0.0}, mus[i], consistent(), 1e-12);
    if (i == 1) r1 = r;
    muT[i] = mus[i] * r.T;
  }
  c.add("classification", r1.classification == reduced::PeriodClass::periodic,
        reduced::to_string(r1.classification) + " (" + reduced::to_string(r1.kind) + ")");
  c.add("|K(0)+K(T)-1|", r1.symmetry_defect <= 1e-6, sci(r1.symmetry_defect));
  double spread = 0.0;
  for (double v : muT) spread = std::max(spread, std::abs(v - muT[1]) / muT[1]);
  c.add("mu T spread", spread <= 1e-6, sci(spread) + " (mu T=" + series::format_double(muT[1]) + ")");
  c.r.measured["T"] = r1.T;
  c.r.measured["KT"] = r1.KT;
  return c.done();
}

toy::Params toy_params(toy::Flavor fl, double lambda) {
  toy::Params p;
  p.quad = resonance::build_quad(101, -100);
  p.mu = 1.0;
  p.lambda = lambda;
  p.M0 = 1.5;
  p.flavor = fl;
  return p;
}

CriterionResult c6() {
  Checks c;
  const double P = two_T_02();
  for (auto fl : {toy::Flavor::gauged, toy::Flavor::full}) {
    const auto tr = toy::integrate({toy::canonical_amplitudes(0.2), 0.0}, toy_params(fl, 20.0), P,
                                   1e-12, 0.0);
    const auto inv0 = toy::invariants(tr.samples.front().c);
    const auto sc = toy::invariant_scales(tr.samples.front().c);
    double drift = 0.0;
    for (const auto& s : tr.samples) {
      const auto inv = toy::invariants(s.c);
      for (int k = 0; k < 4; ++k) drift = std::max(drift, std::abs(inv[k] - inv0[k]) / sc[k]);
    }
    c.add(toy::to_string(fl) + " max invariant drift", drift <= 1e-9, sci(drift));
  }
  return c.done();
}

double moduli_gap(const toy::Trajectory& a, const toy::Trajectory& b) {
  double d = 0.0;
  const std::size_t n = std::min(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 4; ++k) {
      d = std::max(d, std::abs(std::abs(a.samples[i].c[k]) - std::abs(b.samples[i].c[k])));
    }
  }
  return d;
}

CriterionResult c7() {
  Checks c;
  const double P = two_T_02();
  const double stride = P / 400.0;
  const toy::State s0{toy::canonical_amplitudes(0.2), 0.0};
  const auto g = toy::integrate(s0, toy_params(toy::Flavor::gauged, 20.0), P, 1e-12, stride);
  const auto f = toy::integrate(s0, toy_params(toy::Flavor::full, 20.0), P, 1e-12, stride);
  const auto fp = toy::integrate(s0, toy_params(toy::Flavor::full, 40.0), P, 1e-12, stride);
  const double d = moduli_gap(f, g), dp = moduli_gap(fp, g);
  c.add("moduli gap at lambda=20(M+N)", d <= 1e-8, sci(d));
  c.add("moduli gap at lambda=20(M+N)+20", dp > 1e-3, sci(dp));
  return c.done();
}

CriterionResult c8() {
  Checks c;
  const double P = full_period_02();
  const double stride = P / 400.0;
  const auto g = toy::integrate({toy::canonical_amplitudes(0.2), 0.0},
                                toy_params(toy::Flavor::gauged, 20.0), P, 1e-12, stride);
  const auto r = reduced::integrate({0.0, 0.2, 0.0}, 1.0, consistent(), P, 1e-12, stride);
  double d = 0.0;
  const std::size_t n = std::min(g.samples.size(), r.samples.size());
  for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(std::norm(g.samples[i].c[0]) - r.samples[i].K));
  c.add("samples", n == g.samples.size() && n == r.samples.size(), std::to_string(n));
  c.add("sup |d_a1|^2 - K|", d <= 1e-8, sci(d));
  return c.done();
}

double single_mode_error(double dt, double t_end, double lambda, double mu) {
  auto f = spectral::make_field(1, 4);
  f.at(1) = 1.0;
  spectral::Solver s(1, 4, lambda, mu);
  const long n = std::lround(t_end / dt);
  double worst = 0.0;
  s.evolve(f, dt, n, 1, [&](const spectral::Field& g, long) {
    worst = std::max(worst, std::abs(g.at(1) - std::polar(1.0, -(1.0 - lambda + mu) * g.t)));
  });
  return worst;
}

CriterionResult c9() {
  Checks c;
  const double e = single_mode_error(1e-4, 1.0, 20.0, 1.0);
  c.add("single-mode sup error on [0,1]", e <= 1e-8, sci(e));

  const std::array<double, 4> dts{0.02, 0.01, 0.005, 0.0025};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double dt : dts) {
    const double x = std::log(dt), y = std::log(single_mode_error(dt, 1.0, 20.0, 1.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  c.add("convergence slope", std::abs(slope - 4.0) <= 0.2, sci(slope));

  harness::RunConfig cfg;  // quad(101,-100), mu=1, n=1024
  const auto run = harness::run_pde(cfg);
  const double drift = std::max({run.drift_mass, run.drift_energy, run.drift_momentum});
  c.add("M,E,P drift (n=1024)", drift <= 1e-6,
        sci(run.drift_mass) + "/" + sci(run.drift_energy) + "/" + sci(run.drift_momentum));
  c.add("momentum identity (n=1024)", run.momentum_identity_max <= 1e-6, sci(run.momentum_identity_max));
  c.add("energy nonnegative", run.energy_nonnegative, run.energy_nonnegative ? "yes" : "no");

  // Reference only: the same window resolved on a wider grid.
  harness::RunConfig wide = cfg;
  wide.grid = 4096;
  const auto ref = harness::run_pde(wide);
  c.r.measured["reference_n4096"] = {{"drift_M", ref.drift_mass},
                                     {"drift_E", ref.drift_energy},
                                     {"drift_P", ref.drift_momentum},
                                     {"momentum_identity", ref.momentum_identity_max}};
  c.text += "; reference n=4096 (not asserted): drift " + sci(ref.drift_mass) + "/" +
            sci(ref.drift_energy) + "/" + sci(ref.drift_momentum) + ", identity " +
            sci(ref.momentum_identity_max);
  return c.done();
}

CriterionResult c10() {
  Checks c;
  harness::RunConfig a;  // M*=101, n=1024
  const auto ra = harness::run_pde(a);
  const double track = harness::pde_vs_toy_intensity(a, ra);
  c.add("PDE vs toy intensities", track <= 1e-2, sci(track));
  c.add("weighted norm at t=0", ra.weighted_t0 == 0.0, sci(ra.weighted_t0));

  harness::RunConfig b = a;
  b.M = 201;
  b.N = -200;
  b.grid = 2048;
  const auto rb = harness::run_pde(b);
  const double Ca = ra.weighted_max * std::sqrt(101.0);
  const double Cb = rb.weighted_max * std::sqrt(201.0);
  const double ratio = ra.weighted_max / rb.weighted_max;
  const double base = std::sqrt(201.0 / 101.0);
  c.add("weighted max (M*=101, 201)", true, sci(ra.weighted_max) + ", " + sci(rb.weighted_max));
  c.add("C = max * M*^(1/2)", true, sci(Ca) + ", " + sci(Cb));
  c.add("ratio / (201/101)^(1/2)", ratio >= 1.0 * base && ratio <= 2.0 * base,
        sci(ratio / base) + " (ratio " + sci(ratio) + ")");

  // Reference only: both runs with four times the default resolution.
  harness::RunConfig a4 = a, b4 = b;
  a4.grid = 4096;
  b4.grid = 8192;
  const double wa = harness::run_pde(a4).weighted_max, wb = harness::run_pde(b4).weighted_max;
  c.r.measured["reference_4x_grid"] = {{"weighted_max_101", wa}, {"weighted_max_201", wb}};
  c.text += "; reference at 4x grid (not asserted): weighted max " + sci(wa) + ", " + sci(wb) +
            ", ratio / (201/101)^(1/2) " + sci(wa / wb / base);
  return c.done();
}

CriterionResult c11() {
  Checks c;
  harness::RunConfig cfg;  // M+N = 1, mu = 1
  const auto s40 = harness::scaling_corollary_check(cfg, 40.0);
  c.add("lambda'=40 sup difference", s40.sup_difference <= 1e-6,
        sci(s40.sup_difference) + " (mu'=" + series::format_double(s40.mu_prime) + ")");
  const auto s20 = harness::scaling_corollary_check(cfg, 20.0);
  c.add("lambda'=20(M+N) identity", s20.sup_difference == 0.0, sci(s20.sup_difference));
  const auto printed = harness::scaling_corollary_check(cfg, 40.0, true);
  c.r.measured["printed_form_sup_difference"] = printed.sup_difference;
  c.text += "; printed-form mu'=" + series::format_double(printed.mu_prime) +
            " gives " + sci(printed.sup_difference) + " (not asserted)";
  return c.done();
}

const std::vector<std::pair<int, std::pair<std::string, CriterionResult (*)()>>>& table() {
  static const std::vector<std::pair<int, std::pair<std::string, CriterionResult (*)()>>> t{
      {1, {"cluster algebra", c1}},
      {2, {"non-degeneracy", c2}},
      {3, {"resonance dichotomy scan", c3}},
      {4, {"reduced flow conservation", c4}},
      {5, {"period properties", c5}},
      {6, {"toy invariants", c6}},
      {7, {"gauge equivalence", c7}},
      {8, {"toy vs reduced", c8}},
      {9, {"PDE correctness", c9}},
      {10, {"desk-scale exchange", c10}},
      {11, {"amplitude scaling", c11}},
  };
  return t;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& e : table()) ids.push_back(e.first);
  return ids;
}

CriterionResult run_criterion(int id) {
  for (const auto& [cid, entry] : table()) {
    if (cid != id) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = entry.second();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.name = entry.first;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw std::invalid_argument("unknown criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_all(const std::vector<int>& ids,
                                     const std::function<void(const CriterionResult&)>& progress) {
  std::vector<CriterionResult> out;
  for (int id : ids.empty() ? criterion_ids() : ids) {
    out.push_back(run_criterion(id));
    if (progress) progress(out.back());
  }
  return out;
}

json to_json(const std::vector<CriterionResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"passed", r.passed},
                   {"detail", r.detail},
                   {"seconds", r.seconds},
                   {"measured", r.measured}});
  }
  return arr;
}

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof(head), "[%s] %2d ", r.passed ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + ": " + r.detail;
}

}  // namespace qdnls::verification
