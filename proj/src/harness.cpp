#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "errors.hpp"

namespace qdnls::harness {

using nlohmann::json;

long default_low_cutoff(const resonance::ResonantQuad& quad) { return 4 * std::abs(quad.m + quad.n); }

ResidualNorms residual_norms(const spectral::Field& f, const resonance::ResonantQuad& quad,
                             double delta, long low_cutoff) {
  if (!(delta >= 0.5 && delta < 1.0)) {
    throw ValidationError("delta must lie in [1/2, 1), got " + std::to_string(delta));
  }
  ResidualNorms r;
  r.delta = delta;
  r.low_cutoff = low_cutoff > 0 ? low_cutoff : default_low_cutoff(quad);
  for (long xi = -f.cutoff; xi <= f.cutoff; ++xi) {
    if (quad.contains(xi)) continue;
    const double a = std::abs(f.at(xi));
    if (a == 0.0) continue;
    if (std::abs(xi) <= r.low_cutoff) {
      r.A_L += a;
    } else {
      r.A_H += std::pow(1.0 + static_cast<double>(xi * xi), delta / 2.0) * a;
    }
  }
  r.weighted = std::pow(static_cast<double>(quad.m_star), delta) * r.A_L + r.A_H;
  return r;
}

double guaranteed_window(double lambda, double mu, resonance::Freq m_star) {
  const double a = 1.0 / (std::abs(lambda) * static_cast<double>(m_star));
  const double b = 1.0 / (lambda * lambda + std::abs(mu));
  return 0.1 * std::min(a, b);
}

json RunConfig::to_json() const {
  return {{"M", M},
          {"N", N},
          {"mu", mu},
          {"K0", K0},
          {"phases", phases},
          {"delta", delta},
          {"grid", grid},
          {"cutoff", resolved_cutoff()},
          {"padding", padding},
          {"dt", dt},
          {"steps", steps},
          {"sample_stride", sample_stride},
          {"variant", reduced::to_string(variant)},
          {"tol", tol},
          {"horizon", horizon},
          {"exploratory", exploratory},
          {"out_dir", out_dir}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "M") c.M = v.get<long>();
      else if (key == "N") c.N = v.get<long>();
      else if (key == "mu") c.mu = v.get<double>();
      else if (key == "K0") c.K0 = v.get<double>();
      else if (key == "phases") c.phases = v.get<std::array<double, 4>>();
      else if (key == "delta") c.delta = v.get<double>();
      else if (key == "grid") c.grid = v.get<int>();
      else if (key == "cutoff") c.cutoff = v.get<int>();
      else if (key == "padding") c.padding = v.get<int>();
      else if (key == "dt") c.dt = v.get<double>();
      else if (key == "steps") c.steps = v.get<long>();
      else if (key == "sample_stride") c.sample_stride = v.get<long>();
      else if (key == "variant") c.variant = reduced::parse_variant(v.get<std::string>());
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "horizon") c.horizon = v.get<double>();
      else if (key == "exploratory") c.exploratory = v.get<bool>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else throw ValidationError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (M + N == 0) throw ValidationError("M + N must be nonzero");
  if (!(K0 > 0.0 && K0 < 1.0)) throw ValidationError("K0 must lie in (0,1)");
  if (!(delta >= 0.5 && delta < 1.0)) throw ValidationError("delta must lie in [1/2, 1)");
  if (!spectral::is_power_of_two(grid)) throw ValidationError("grid must be a power of two");
  if (cutoff < 0) throw ValidationError("cutoff must be non-negative");
  if (padding < 1) throw ValidationError("padding must be >= 1");
  if (dt < 0.0) throw ValidationError("dt must be non-negative");
  if (steps < 0) throw ValidationError("steps must be non-negative");
  if (sample_stride < 1) throw ValidationError("sample_stride must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (horizon < 0.0) throw ValidationError("horizon must be non-negative");
  if (!std::isfinite(mu)) throw ValidationError("mu must be finite");
}

RegimeFlags regime_flags(const RunConfig& cfg) {
  const auto q = resonance::build_quad(cfg.M, cfg.N);
  const double ms = static_cast<double>(q.m_star);
  return {ms / std::abs(q.lambda), std::abs(cfg.mu) / (ms * ms)};
}

double initial_phi1(const std::array<double, 4>& ph) {
  return 2.0 * ph[0] + ph[1] - 2.0 * ph[2] - ph[3];
}

PdeRun run_pde(const RunConfig& cfg, double horizon) {
  cfg.validate();
  const auto quad = resonance::build_quad(cfg.M, cfg.N);
  PdeRun run;
  run.lambda = quad.lambda;
  run.mu = cfg.mu;
  run.window = guaranteed_window(quad.lambda, cfg.mu, quad.m_star);
  if (horizon <= 0.0) horizon = run.window;

  const int X = cfg.resolved_cutoff();
  spectral::Field f = spectral::synthesize_field(quad, cfg.K0, cfg.phases, X, cfg.grid);
  spectral::Solver solver(X, cfg.grid, run.lambda, run.mu, cfg.padding);

  if (cfg.dt > 0.0) {
    run.dt = cfg.dt;
    run.steps = cfg.steps > 0 ? cfg.steps : static_cast<long>(std::ceil(horizon / cfg.dt));
  } else {
    const double m2 = solver.max_abs2(f);
    const double heuristic =
        0.5 / (std::abs(run.lambda) * m2 * X + std::abs(run.mu) * m2 * m2 + 1.0);
    const double dt_max = std::min(heuristic, run.window / 64.0);
    run.steps = cfg.steps > 0 ? cfg.steps : static_cast<long>(std::ceil(horizon / dt_max));
    run.dt = cfg.steps > 0 ? dt_max : horizon / static_cast<double>(run.steps);
  }

  run.initial = solver.conserved(f);
  run.table.columns = series::pde_columns();
  auto rel = [](double now, double ref) {
    return ref != 0.0 ? std::abs(now - ref) / std::abs(ref) : std::abs(now);
  };
  solver.evolve(f, run.dt, run.steps, cfg.sample_stride, [&](const spectral::Field& g, long) {
    const auto c = solver.conserved(g);
    run.drift_mass = std::max(run.drift_mass, rel(c.mass, run.initial.mass));
    run.drift_energy = std::max(run.drift_energy, rel(c.energy, run.initial.energy));
    run.drift_momentum = std::max(run.drift_momentum, rel(c.momentum, run.initial.momentum));
    if (c.mass > 0.0 && c.energy < 0.0) run.energy_nonnegative = false;
    run.momentum_identity_max = std::max(
        run.momentum_identity_max,
        spectral::momentum_fourier_identity(g, run.lambda, run.initial.momentum));
    const auto norms = residual_norms(g, quad, cfg.delta);
    const double ratio = spectral::apriori_ratio(g, quad.m_star);
    if (run.times.empty()) {
      run.weighted_t0 = norms.weighted;
      run.apriori_t0 = ratio;
    }
    run.weighted_max = std::max(run.weighted_max, norms.weighted);
    run.apriori_max = std::max(run.apriori_max, ratio);
    std::array<double, 4> I;
    const auto modes = quad.modes();
    for (int j = 0; j < 4; ++j) I[j] = std::norm(g.at(modes[j]));
    run.times.push_back(g.t);
    run.intensities.push_back(I);
    run.table.add({g.t, c.mass, c.energy, c.momentum, I[0], I[1], I[2], I[3], norms.A_L,
                   norms.A_H, ratio});
  });
  run.final_field = f;
  return run;
}

double pde_vs_toy_intensity(const RunConfig& cfg, const PdeRun& pde) {
  if (pde.times.empty()) return 0.0;
  const auto quad = resonance::build_quad(cfg.M, cfg.N);
  toy::Params p;
  p.quad = quad;
  p.mu = cfg.mu;
  p.lambda = pde.lambda;
  p.M0 = pde.initial.mass;
  p.P0 = pde.initial.momentum;
  p.flavor = toy::Flavor::full;
  toy::State s{toy::canonical_amplitudes(cfg.K0, cfg.phases), 0.0};
  double sup = 0.0;
  // Advance the toy model sample to sample so both levels are compared at identical times.
  for (std::size_t i = 0; i < pde.times.size(); ++i) {
    const double gap = pde.times[i] - s.t;
    if (gap > 0.0) {
      const auto tr = toy::integrate(s, p, gap, cfg.tol, 0.0);
      s = tr.samples.back();
      s.t = pde.times[i];
    }
    for (int j = 0; j < 4; ++j) sup = std::max(sup, std::abs(pde.intensities[i][j] - std::norm(s.c[j])));
  }
  return sup;
}

namespace {

template <class F>
json guarded(const F& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return json{{"error", e.what()}};
  }
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

json period_json(const reduced::PeriodResult& r, double mu) {
  return {{"classification", reduced::to_string(r.classification)},
          {"orbit", reduced::to_string(r.kind)},
          {"T", r.T},
          {"full_period", r.full_period},
          {"mu_T", mu * r.T},
          {"K0", r.K0},
          {"KT", r.KT},
          {"symmetry_defect", r.symmetry_defect},
          {"c_star", r.c_star},
          {"winding", r.winding}};
}

nlohmann::json run_exchange_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto quad = resonance::build_quad(cfg.M, cfg.N);
  const bool write = !cfg.out_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  }
  const json config = cfg.to_json();
  const auto flags = regime_flags(cfg);
  json report = {{"config", config},
                 {"regime",
                  {{"m_star_over_lambda", flags.m_star_over_lambda},
                   {"mu_over_m_star_sq", flags.mu_over_m_star_sq}}}};

  // The toy phase angle runs opposite to the reduced one (see README), so the
  // reduced comparison orbit starts at -phi1(0).
  const double phi0 = initial_phi1(cfg.phases);
  const reduced::State r0{phi0 == 0.0 ? 0.0 : -phi0, cfg.K0, 0.0};

  std::optional<reduced::PeriodResult> period;
  double horizon = cfg.horizon;
  reduced::Trajectory red_traj;
  json red;
  for (auto v : {reduced::Variant::consistent, reduced::Variant::verbatim}) {
    red[reduced::to_string(v)] = guarded([&]() -> json {
      const auto c = reduced::Coefficients::of(v);
      const auto res = reduced::find_period(r0, cfg.mu, c, cfg.tol);
      json j = period_json(res, cfg.mu);
      if (v == reduced::Variant::consistent) {
        period = res;
        if (horizon <= 0.0) {
          if (res.classification != reduced::PeriodClass::periodic) {
            throw NumericalError("no period detected for the consistent reduced flow");
          }
          horizon = res.full_period;
        }
      }
      const double h = horizon > 0.0 ? horizon : 1.0 / std::abs(cfg.mu);
      const auto traj = reduced::integrate(r0, cfg.mu, c, h, cfg.tol, h / 400.0);
      double H0 = reduced::hamiltonian(traj.samples.front(), cfg.mu), drift = 0.0;
      for (const auto& s : traj.samples) {
        drift = std::max(drift, std::abs(reduced::hamiltonian(s, cfg.mu) - H0) / std::abs(H0));
      }
      j["hamiltonian_drift"] = drift;
      if (v == reduced::Variant::consistent) red_traj = traj;
      if (write) {
        emit_series(series::reduced_table(traj, cfg.mu),
                    join(cfg.out_dir, "reduced_" + reduced::to_string(v) + ".csv"), config);
      }
      return j;
    });
  }
  report["reduced"] = red;

  json toy_report;
  toy::Trajectory gauged_traj;
  for (auto fl : {toy::Flavor::gauged, toy::Flavor::full}) {
    toy_report[toy::to_string(fl)] = guarded([&]() -> json {
      if (horizon <= 0.0) throw NumericalError("no horizon: reduced period unavailable");
      toy::Params p;
      p.quad = quad;
      p.mu = cfg.mu;
      p.lambda = quad.lambda;
      p.M0 = 1.5;
      p.flavor = fl;
      if (fl == toy::Flavor::full) {
        const auto f0 = spectral::synthesize_field(quad, cfg.K0, cfg.phases, cfg.resolved_cutoff(),
                                                   cfg.grid);
        const auto c0 = spectral::conserved_triple(f0, quad.lambda, cfg.mu, cfg.padding);
        p.M0 = c0.mass;
        p.P0 = c0.momentum;
      }
      const auto traj = toy::integrate({toy::canonical_amplitudes(cfg.K0, cfg.phases), 0.0}, p,
                                       horizon, cfg.tol, horizon / 400.0);
      const auto inv0 = toy::invariants(traj.samples.front().c);
      const auto sc0 = toy::invariant_scales(traj.samples.front().c);
      std::array<double, 4> drift{};
      for (const auto& s : traj.samples) {
        const auto inv = toy::invariants(s.c);
        for (int k = 0; k < 4; ++k) drift[k] = std::max(drift[k], std::abs(inv[k] - inv0[k]) / sc0[k]);
      }
      json j = {{"invariant_drift", drift}, {"P0", p.P0}, {"M0", p.M0}, {"steps", traj.accepted_steps}};
      double per = 0.0;
      for (int k = 0; k < 4; ++k) {
        per = std::max(per, std::abs(std::norm(traj.samples.back().c[k]) -
                                     std::norm(traj.samples.front().c[k])));
      }
      j["periodicity_defect"] = per;
      if (fl == toy::Flavor::gauged) {
        gauged_traj = traj;
        const double H0 = toy::hamiltonian(traj.samples.front().c, cfg.mu);
        double hd = 0.0, kd = 0.0;
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
          hd = std::max(hd, std::abs(toy::hamiltonian(traj.samples[i].c, cfg.mu) - H0) / std::abs(H0));
          if (i < red_traj.samples.size()) {
            kd = std::max(kd, std::abs(std::norm(traj.samples[i].c[0]) - red_traj.samples[i].K));
          }
        }
        j["hamiltonian_drift"] = hd;
        j["vs_reduced_sup"] = red_traj.samples.empty() ? json(nullptr) : json(kd);
      } else if (!gauged_traj.samples.empty()) {
        double md = 0.0;
        const std::size_t n = std::min(traj.samples.size(), gauged_traj.samples.size());
        for (std::size_t i = 0; i < n; ++i) {
          for (int k = 0; k < 4; ++k) {
            md = std::max(md, std::abs(std::abs(traj.samples[i].c[k]) -
                                       std::abs(gauged_traj.samples[i].c[k])));
          }
        }
        j["vs_gauged_moduli_sup"] = md;
      }
      if (write) {
        emit_series(series::toy_table(traj), join(cfg.out_dir, "toy_" + toy::to_string(fl) + ".csv"),
                    config);
      }
      return j;
    });
  }
  report["toy"] = toy_report;

  if (write && !red_traj.samples.empty() && !gauged_traj.samples.empty()) {
    series::Table ex{{"t", "K_reduced", "K_toy"}, {}};
    const std::size_t n = std::min(red_traj.samples.size(), gauged_traj.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
      ex.add({red_traj.samples[i].t, red_traj.samples[i].K, std::norm(gauged_traj.samples[i].c[0])});
    }
    emit_series(ex, join(cfg.out_dir, "exchange.csv"), config);
  }

  report["pde"] = guarded([&]() -> json {
    const auto run = run_pde(cfg);
    json j = {{"window", run.window},
              {"dt", run.dt},
              {"steps", run.steps},
              {"cutoff", cfg.resolved_cutoff()},
              {"grid", cfg.grid},
              {"initial", {{"M", run.initial.mass}, {"E", run.initial.energy}, {"P", run.initial.momentum}}},
              {"drift", {{"M", run.drift_mass}, {"E", run.drift_energy}, {"P", run.drift_momentum}}},
              {"momentum_identity_max", run.momentum_identity_max},
              {"energy_nonnegative", run.energy_nonnegative},
              {"weighted_t0", run.weighted_t0},
              {"weighted_max", run.weighted_max},
              {"weighted_constant", run.weighted_max * std::pow(static_cast<double>(quad.m_star), cfg.delta)},
              {"apriori_t0", run.apriori_t0},
              {"apriori_max", run.apriori_max},
              {"intensity_sup_vs_toy", pde_vs_toy_intensity(cfg, run)}};
    if (write) emit_series(run.table, join(cfg.out_dir, "pde_window.csv"), config);
    return j;
  });

  if (cfg.exploratory) {
    report["pde_full_period"] = guarded([&]() -> json {
      if (horizon <= 0.0) throw NumericalError("no horizon: reduced period unavailable");
      // dt from the heuristic alone; the window cap does not apply here.
      RunConfig c = cfg;
      spectral::Field f0 = spectral::synthesize_field(quad, cfg.K0, cfg.phases, cfg.resolved_cutoff(), cfg.grid);
      c.dt = spectral::dt_heuristic(f0, quad.lambda, cfg.mu, cfg.padding);
      c.steps = static_cast<long>(std::ceil(horizon / c.dt));
      c.dt = horizon / static_cast<double>(c.steps);
      c.sample_stride = std::max(1L, c.steps / 400);
      const auto run = run_pde(c, horizon);
      const auto& Ilast = run.intensities.back();
      const auto& Ifirst = run.intensities.front();
      double kmax = 0.0;
      for (const auto& I : run.intensities) kmax = std::max(kmax, I[0]);
      json j = {{"label", "exploratory: beyond the guaranteed window, not asserted"},
                {"horizon", horizon},
                {"dt", run.dt},
                {"steps", run.steps},
                {"K_start", Ifirst[0]},
                {"K_end", Ilast[0]},
                {"K_max", kmax},
                {"drift", {{"M", run.drift_mass}, {"E", run.drift_energy}, {"P", run.drift_momentum}}},
                {"weighted_max", run.weighted_max}};
      if (write) emit_series(run.table, join(cfg.out_dir, "pde_full_period.csv"), config);
      return j;
    });
  }

  if (period) {
    report["T"] = period->T;
    report["full_period"] = period->full_period;
    report["K0"] = period->K0;
    report["KT"] = period->KT;
    report["c_star"] = period->c_star;
    report["orbit"] = reduced::to_string(period->kind);
  }
  if (write) series::write_json(report, join(cfg.out_dir, "report.json"));
  return report;
}

double scaled_mu(double mu, double lambda, double lambda_prime, bool printed_form) {
  const double r = printed_form ? lambda / lambda_prime : lambda_prime / lambda;
  return mu * r * r;
}

ScalingReport scaling_corollary_check(const RunConfig& cfg, double lambda_prime, bool printed_form) {
  cfg.validate();
  const auto quad = resonance::build_quad(cfg.M, cfg.N);
  if (!(lambda_prime * static_cast<double>(quad.m + quad.n) > 0.0)) {
    throw ValidationError("lambda' (M+N) must be positive");
  }
  ScalingReport r;
  r.lambda = quad.lambda;
  r.lambda_prime = lambda_prime;
  r.amplitude = std::sqrt(quad.lambda / lambda_prime);
  r.mu = cfg.mu;
  r.mu_prime = scaled_mu(cfg.mu, quad.lambda, lambda_prime, printed_form);
  r.window = guaranteed_window(quad.lambda, cfg.mu, quad.m_star);

  const int X = cfg.resolved_cutoff();
  spectral::Field u = spectral::synthesize_field(quad, cfg.K0, cfg.phases, X, cfg.grid);
  spectral::Field v = u;
  for (auto& z : v.coeff) z *= r.amplitude;
  spectral::Solver su(X, cfg.grid, r.lambda, r.mu, cfg.padding);
  spectral::Solver sv(X, cfg.grid, r.lambda_prime, r.mu_prime, cfg.padding);

  if (cfg.dt > 0.0) {
    r.dt = cfg.dt;
    r.steps = cfg.steps > 0 ? cfg.steps : static_cast<long>(std::ceil(r.window / cfg.dt));
  } else {
    const double m2 = su.max_abs2(u);
    const double heuristic = 0.5 / (std::abs(r.lambda) * m2 * X + std::abs(r.mu) * m2 * m2 + 1.0);
    const double dt_max = std::min(heuristic, r.window / 64.0);
    r.steps = cfg.steps > 0 ? cfg.steps : static_cast<long>(std::ceil(r.window / dt_max));
    r.dt = cfg.steps > 0 ? dt_max : r.window / static_cast<double>(r.steps);
  }
  for (long s = 0; s < r.steps; ++s) {
    su.step(u, r.dt);
    sv.step(v, r.dt);
    for (std::size_t i = 0; i < u.coeff.size(); ++i) {
      r.sup_difference = std::max(r.sup_difference, std::abs(v.coeff[i] - r.amplitude * u.coeff[i]));
    }
  }
  return r;
}

void emit_series(const series::Table& t, const std::string& path, const nlohmann::json& config) {
  series::write_table(t, path, json{{"columns", t.columns}, {"config", config}});
}

}  // namespace qdnls::harness
