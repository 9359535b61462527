#include "qdnls/qdnls.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "harness.hpp"
#include "reduced.hpp"
#include "resonance.hpp"
#include "series.hpp"
#include "spectral.hpp"
#include "toy.hpp"
#include "verification.hpp"

using nlohmann::json;
using namespace qdnls;

struct qdnls_config {
  harness::RunConfig cfg;
};

struct qdnls_field {
  spectral::Field field;
  double lambda = 0.0;
  double mu = 0.0;
};

namespace {

thread_local std::string g_last_error;

qdnls_status fail(qdnls_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs f, mapping exceptions to status codes.
template <class F>
qdnls_status guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return QDNLS_OK;
  } catch (const ValidationError& e) {
    return fail(QDNLS_E_INVALID, e.what());
  } catch (const DomainError& e) {
    return fail(QDNLS_E_DOMAIN, e.what());
  } catch (const NumericalError& e) {
    return fail(QDNLS_E_NUMERICAL, e.what());
  } catch (const IoError& e) {
    return fail(QDNLS_E_IO, e.what());
  } catch (const json::exception& e) {
    return fail(QDNLS_E_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(QDNLS_E_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(QDNLS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(QDNLS_E_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void emit(const json& j, char** out) {
  if (!out) throw ValidationError("output pointer is null");
  *out = dup_string(j.dump(2));
}

json parse_request(const char* text) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  if (!j.is_object()) throw ValidationError("request must be a JSON object");
  return j;
}

// Pulls known keys out of a request and rejects the rest.
class Request {
 public:
  explicit Request(const char* text) : j_(parse_request(text)) {}

  template <class T>
  T get(const char* key, T fallback) {
    seen_.push_back(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(std::string("request key '") + key + "': " + e.what());
    }
  }
  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [key, v] : j_.items()) {
      bool known = false;
      for (const auto& s : seen_) known = known || s == key;
      if (!known) throw ValidationError("unknown request key '" + key + "'");
    }
  }

 private:
  json j_;
  std::vector<std::string> seen_;
};

json quad_json(const resonance::ResonantQuad& q) {
  return {{"M", q.m},
          {"N", q.n},
          {"alpha1", q.alpha1},
          {"alpha2", q.alpha2},
          {"beta1", q.beta1},
          {"beta2", q.beta2},
          {"lambda", q.lambda},
          {"m_star", q.m_star}};
}

json conserved_json(const spectral::Conserved& c) {
  return {{"M", c.mass}, {"E", c.energy}, {"P", c.momentum}};
}

}  // namespace

extern "C" {

const char* qdnls_version(void) { return QDNLS_VERSION; }

const char* qdnls_last_error(void) { return g_last_error.c_str(); }

void qdnls_string_free(char* s) { std::free(s); }

qdnls_status qdnls_config_create(const char* text, qdnls_config** out) {
  return guard([&] {
    if (!out) throw ValidationError("output pointer is null");
    auto* h = new qdnls_config;
    try {
      h->cfg = harness::RunConfig::from_json(parse_request(text));
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

void qdnls_config_destroy(qdnls_config* cfg) { delete cfg; }

qdnls_status qdnls_config_to_json(const qdnls_config* cfg, char** out) {
  return guard([&] {
    if (!cfg) throw ValidationError("config is null");
    emit(cfg->cfg.to_json(), out);
  });
}

qdnls_status qdnls_resonance_report(int64_t m, int64_t n, char** json_out) {
  return guard([&] {
    const auto q = resonance::build_quad(m, n);
    const auto nd = resonance::check_nondegeneracy(q);
    json collisions = json::array();
    for (const auto& v : nd.violations) {
      collisions.push_back({{"first", v.first_values}, {"second", v.second_values}, {"sum", v.sum}});
    }
    const auto scan = resonance::scan_dichotomy(q);
    const auto gap = resonance::raw_quintic_gap(q);
    emit({{"quad", quad_json(q)},
          {"identities_hold", resonance::cluster_identities_hold(q)},
          {"nondegenerate", nd.nondegenerate},
          {"collisions", collisions},
          {"raw_gap", gap},
          {"raw_gap_small", resonance::gap_is_small(gap, q.m_star)},
          {"gauge_corrected_gap", resonance::gauge_corrected_gap(q, q.lambda)},
          {"dichotomy",
           {{"tuples", scan.tuples},
            {"applicable", scan.applicable},
            {"violations", scan.violations},
            {"violating", scan.violating}}}},
         json_out);
  });
}

qdnls_status qdnls_reduced_run(const char* request, const char* csv_path, char** json_out) {
  return guard([&] {
    Request r(request);
    const double mu = r.get("mu", 1.0);
    const double K0 = r.get("K0", 0.2);
    const double phi1 = r.get("phi1", 0.0);
    const auto variant = reduced::parse_variant(r.get<std::string>("variant", "consistent"));
    const double tol = r.get("tol", 1e-12);
    double horizon = r.get("horizon", 0.0);
    const double stride = r.get("stride", 0.0);
    const bool want_period = r.get("find_period", true);
    r.finish();
    if (!std::isfinite(mu) || mu == 0.0) throw ValidationError("mu must be finite and nonzero");
    if (!(K0 > 0.0 && K0 < 1.0)) throw ValidationError("K0 must lie in (0,1)");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (horizon < 0.0) throw ValidationError("horizon must be non-negative");

    const auto c = reduced::Coefficients::of(variant);
    const reduced::State s0{phi1, K0, 0.0};
    json report = {{"variant", reduced::to_string(variant)}, {"mu", mu}};
    if (want_period || horizon == 0.0) {
      const auto p = reduced::find_period(s0, mu, c, tol);
      if (want_period) report["period"] = harness::period_json(p, mu);
      if (horizon == 0.0) {
        horizon = p.classification == reduced::PeriodClass::periodic ? p.full_period
                                                                      : 100.0 / std::abs(mu);
      }
    }
    const auto traj = reduced::integrate(s0, mu, c, horizon, tol, stride);
    report["horizon"] = horizon;
    report["samples"] = traj.samples.size();
    report["accepted_steps"] = traj.accepted_steps;
    report["rejected_steps"] = traj.rejected_steps;
    const double H0 = reduced::hamiltonian(traj.samples.front(), mu);
    double drift = 0.0;
    for (const auto& s : traj.samples) {
      drift = std::max(drift, std::abs(reduced::hamiltonian(s, mu) - H0) / std::abs(H0));
    }
    report["hamiltonian_drift"] = drift;
    if (csv_path && *csv_path) series::write_table(series::reduced_table(traj, mu), csv_path);
    emit(report, json_out);
  });
}

qdnls_status qdnls_toy_run(const char* request, const char* csv_path, char** json_out) {
  return guard([&] {
    Request r(request);
    toy::Params p;
    p.quad = resonance::build_quad(r.get<long>("M", 101), r.get<long>("N", -100));
    p.mu = r.get("mu", 1.0);
    p.lambda = r.get("lambda", p.quad.lambda);
    const double K0 = r.get("K0", 0.2);
    const auto phases = r.get("phases", std::array<double, 4>{});
    p.M0 = r.get("M0", 1.5);
    p.P0 = r.get("P0", 0.0);
    p.flavor = toy::parse_flavor(r.get<std::string>("flavor", "gauged"));
    const auto frame = r.get<std::string>("frame", "corotating");
    if (frame == "corotating") p.frame = toy::FullFrame::corotating;
    else if (frame == "cartesian") p.frame = toy::FullFrame::cartesian;
    else throw ValidationError("frame must be corotating or cartesian");
    const double tol = r.get("tol", 1e-12);
    double horizon = r.get("horizon", 0.0);
    const double stride = r.get("stride", 0.0);
    r.finish();
    if (!std::isfinite(p.mu) || p.mu == 0.0) throw ValidationError("mu must be finite and nonzero");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (horizon < 0.0) throw ValidationError("horizon must be non-negative");

    if (horizon == 0.0) {
      const reduced::State r0{-harness::initial_phi1(phases), K0, 0.0};
      const auto per = reduced::find_period(r0, p.mu, reduced::Coefficients::of(reduced::Variant::consistent), tol);
      horizon = per.classification == reduced::PeriodClass::periodic ? per.full_period
                                                                      : 100.0 / std::abs(p.mu);
    }
    const auto traj = toy::integrate({toy::canonical_amplitudes(K0, phases), 0.0}, p, horizon, tol, stride);
    const auto inv0 = toy::invariants(traj.samples.front().c);
    const auto sc = toy::invariant_scales(traj.samples.front().c);
    std::array<double, 4> drift{};
    for (const auto& s : traj.samples) {
      const auto inv = toy::invariants(s.c);
      for (int k = 0; k < 4; ++k) drift[k] = std::max(drift[k], std::abs(inv[k] - inv0[k]) / sc[k]);
    }
    const double H0 = toy::hamiltonian(traj.samples.front().c, p.mu);
    double hdrift = 0.0;
    for (const auto& s : traj.samples) {
      hdrift = std::max(hdrift, std::abs(toy::hamiltonian(s.c, p.mu) - H0) / std::abs(H0));
    }
    json report = {{"quad", quad_json(p.quad)},
                   {"flavor", toy::to_string(p.flavor)},
                   {"lambda", p.lambda},
                   {"mu", p.mu},
                   {"horizon", horizon},
                   {"samples", traj.samples.size()},
                   {"accepted_steps", traj.accepted_steps},
                   {"rejected_steps", traj.rejected_steps},
                   {"invariant_drift", drift},
                   {"multiplicities", toy::interaction_multiplicities(p.quad)}};
    // The full flavor's energy is not autonomous, so its drift is only informative.
    report["hamiltonian_drift"] = hdrift;
    if (csv_path && *csv_path) series::write_table(series::toy_table(traj), csv_path);
    emit(report, json_out);
  });
}

qdnls_status qdnls_pde_run(const qdnls_config* cfg, double horizon, const char* csv_path,
                           const char* checkpoint_path, char** json_out) {
  return guard([&] {
    if (!cfg) throw ValidationError("config is null");
    if (horizon < 0.0) throw ValidationError("horizon must be non-negative");
    const auto& c = cfg->cfg;
    const auto run = harness::run_pde(c, horizon);
    json report = {{"lambda", run.lambda},
                   {"mu", run.mu},
                   {"dt", run.dt},
                   {"steps", run.steps},
                   {"window", run.window},
                   {"horizon", run.dt * static_cast<double>(run.steps)},
                   {"initial", conserved_json(run.initial)},
                   {"drift", {{"M", run.drift_mass}, {"E", run.drift_energy}, {"P", run.drift_momentum}}},
                   {"momentum_identity_max", run.momentum_identity_max},
                   {"weighted_t0", run.weighted_t0},
                   {"weighted_max", run.weighted_max},
                   {"apriori_t0", run.apriori_t0},
                   {"apriori_max", run.apriori_max},
                   {"energy_nonnegative", run.energy_nonnegative}};
    if (csv_path && *csv_path) harness::emit_series(run.table, csv_path, c.to_json());
    if (checkpoint_path && *checkpoint_path) {
      spectral::save_checkpoint(run.final_field, run.lambda, run.mu, resonance::build_quad(c.M, c.N),
                                checkpoint_path);
      report["checkpoint"] = checkpoint_path;
    }
    emit(report, json_out);
  });
}

qdnls_status qdnls_field_load(const char* path, qdnls_field** out) {
  return guard([&] {
    if (!path || !out) throw ValidationError("null argument");
    auto f = spectral::load_checkpoint(path);
    std::ifstream in(std::string(path) + ".json");
    if (!in) throw IoError(std::string("cannot open ") + path + ".json");
    json side;
    try {
      side = json::parse(in);
    } catch (const json::exception& e) {
      throw IoError(std::string("malformed checkpoint sidecar: ") + e.what());
    }
    auto* h = new qdnls_field{std::move(f), side.value("lambda", 0.0), side.value("mu", 0.0)};
    *out = h;
  });
}

void qdnls_field_destroy(qdnls_field* f) { delete f; }

qdnls_status qdnls_field_info(const qdnls_field* f, char** json_out) {
  return guard([&] {
    if (!f) throw ValidationError("field is null");
    emit({{"t", f->field.t},
          {"cutoff", f->field.cutoff},
          {"grid", f->field.grid},
          {"lambda", f->lambda},
          {"mu", f->mu},
          {"conserved", conserved_json(spectral::conserved_triple(f->field, f->lambda, f->mu))}},
         json_out);
  });
}

qdnls_status qdnls_compare(const qdnls_config* cfg, char** json_out) {
  return guard([&] {
    if (!cfg) throw ValidationError("config is null");
    emit(harness::run_exchange_experiment(cfg->cfg), json_out);
  });
}

qdnls_status qdnls_scaling_check(const qdnls_config* cfg, double lambda_prime, int printed_form,
                                 char** json_out) {
  return guard([&] {
    if (!cfg) throw ValidationError("config is null");
    const auto r = harness::scaling_corollary_check(cfg->cfg, lambda_prime, printed_form != 0);
    emit({{"lambda", r.lambda},
          {"lambda_prime", r.lambda_prime},
          {"amplitude", r.amplitude},
          {"mu", r.mu},
          {"mu_prime", r.mu_prime},
          {"window", r.window},
          {"dt", r.dt},
          {"steps", r.steps},
          {"sup_difference", r.sup_difference}},
         json_out);
  });
}

qdnls_status qdnls_verify(const int* ids, size_t count, qdnls_progress_fn progress, void* user,
                          int* all_passed, char** json_out) {
  return guard([&] {
    std::vector<int> wanted;
    if (count > 0) {
      if (!ids) throw ValidationError("ids is null");
      const auto known = verification::criterion_ids();
      for (size_t i = 0; i < count; ++i) {
        if (std::find(known.begin(), known.end(), ids[i]) == known.end()) {
          throw ValidationError("unknown criterion " + std::to_string(ids[i]));
        }
        wanted.push_back(ids[i]);
      }
    }
    const auto results = verification::run_all(wanted, [&](const verification::CriterionResult& r) {
      if (progress) progress(verification::format_line(r).c_str(), r.passed ? 1 : 0, user);
    });
    bool ok = true;
    for (const auto& r : results) ok = ok && r.passed;
    if (all_passed) *all_passed = ok ? 1 : 0;
    if (json_out) emit(verification::to_json(results), json_out);
  });
}

}  // extern "C"
