#pragma once

// Cross-model experiments: reduced vs toy vs PDE, residual norms, amplitude
// scaling check, CSV emission.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reduced.hpp"
#include "resonance.hpp"
#include "series.hpp"
#include "spectral.hpp"
#include "toy.hpp"

namespace qdnls::harness {

struct ResidualNorms {
  double delta = 0.5;
  long low_cutoff = 0;
  double A_L = 0.0;
  double A_H = 0.0;
  double weighted = 0.0;  // M*^delta A_L + A_H
};

/// 4 |M + N|.
long default_low_cutoff(const resonance::ResonantQuad& quad);

/// Off-cluster l1 sums. low_cutoff <= 0 selects the default.
ResidualNorms residual_norms(const spectral::Field& f, const resonance::ResonantQuad& quad,
                             double delta, long low_cutoff = 0);

/// 0.1 min(1 / (|lambda| M*), 1 / (lambda^2 + |mu|)).
double guaranteed_window(double lambda, double mu, resonance::Freq m_star);

struct RunConfig {
  long M = 101;
  long N = -100;
  double mu = 1.0;
  double K0 = 0.2;
  std::array<double, 4> phases{};
  double delta = 0.5;
  int grid = 1024;
  int cutoff = 0;        // 0: floor(grid / 3)
  int padding = spectral::kDefaultPadding;
  double dt = 0.0;       // 0: min(heuristic, window / 64)
  long steps = 0;        // 0: cover the guaranteed window
  long sample_stride = 1;
  reduced::Variant variant = reduced::Variant::consistent;
  double tol = 1e-12;
  double horizon = 0.0;  // ODE levels; 0: one full reduced period
  bool exploratory = false;  // also run the PDE over a full period
  std::string out_dir;

  nlohmann::json to_json() const;
  /// Unknown keys and wrong types are rejected with ValidationError.
  static RunConfig from_json(const nlohmann::json& j);
  void validate() const;

  double lambda() const { return 20.0 * static_cast<double>(M + N); }
  int resolved_cutoff() const { return cutoff > 0 ? cutoff : spectral::default_cutoff(grid); }
};

struct RegimeFlags {
  double m_star_over_lambda = 0.0;  // M* / |lambda|, should be large
  double mu_over_m_star_sq = 0.0;   // |mu| / M*^2, should be small
};

RegimeFlags regime_flags(const RunConfig& cfg);

/// Canonical reduced angle of the phases: 2 th_a1 + th_a2 - 2 th_b1 - th_b2.
double initial_phi1(const std::array<double, 4>& phases);

/// Period report as JSON; mu T included.
nlohmann::json period_json(const reduced::PeriodResult& r, double mu);

struct PdeRun {
  double lambda = 0.0, mu = 0.0;
  double dt = 0.0;
  long steps = 0;
  double window = 0.0;
  spectral::Conserved initial;
  double drift_mass = 0.0, drift_energy = 0.0, drift_momentum = 0.0;  // max relative
  double momentum_identity_max = 0.0;
  double weighted_t0 = 0.0;
  double weighted_max = 0.0;
  double apriori_t0 = 0.0;
  double apriori_max = 0.0;
  bool energy_nonnegative = true;
  std::vector<double> times;
  std::vector<std::array<double, 4>> intensities;  // |a_xi|^2 on the cluster
  series::Table table;
  spectral::Field final_field;
};

/// Evolves the canonical field for `horizon` time units (0: guaranteed window).
PdeRun run_pde(const RunConfig& cfg, double horizon = 0.0);

/// Sup over samples and cluster modes of | |a|^2 - |c_toy|^2 | against the full toy flavor.
double pde_vs_toy_intensity(const RunConfig& cfg, const PdeRun& pde);

/// Runs every level; writes CSVs under cfg.out_dir when it is set.
nlohmann::json run_exchange_experiment(const RunConfig& cfg);

struct ScalingReport {
  double lambda = 0.0, lambda_prime = 0.0;
  double amplitude = 1.0;  // sqrt(20 (M+N) / lambda')
  double mu = 0.0, mu_prime = 0.0;
  double window = 0.0, dt = 0.0;
  long steps = 0;
  double sup_difference = 0.0;
};

/// mu' = mu (lambda' / (20 (M+N)))^2 makes v = amplitude * u an exact map
/// between the two equations. `printed_form` uses mu (20 (M+N) / lambda')^2 instead.
ScalingReport scaling_corollary_check(const RunConfig& cfg, double lambda_prime,
                                      bool printed_form = false);

double scaled_mu(double mu, double lambda, double lambda_prime, bool printed_form = false);

/// CSV plus JSON sidecar carrying the config.
void emit_series(const series::Table& t, const std::string& path, const nlohmann::json& config);

}  // namespace qdnls::harness
