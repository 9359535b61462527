#pragma once

// Planar (phi1, K) system obtained after the action-angle reduction of the
// four-mode model.

#include <string>
#include <vector>

namespace qdnls::reduced {

enum class Variant { verbatim, consistent };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct Coefficients {
  Variant variant = Variant::consistent;
  double p = 1.5;  // additive constant in the phi1 equation
  double q = 6.0;  // prefactor of the K equation

  static Coefficients of(Variant v);
};

struct State {
  double phi1 = 0.0;
  double K = 0.5;
  double t = 0.0;
};

struct Derivative {
  double dphi1 = 0.0;
  double dK = 0.0;
};

/// K is kept at least this far from 0 and 1.
inline constexpr double kBoundaryEps = 1e-12;

/// Throws DomainError when K leaves (eps, 1 - eps).
Derivative rhs(const State& s, double mu, const Coefficients& c);

/// 33/8 mu (K^2 + (1-K)^2) + 3/2 mu K(1-K) - 3 mu (K(1-K))^{3/2} cos phi1.
double hamiltonian(const State& s, double mu);

/// K(1-K)(27/4 + 3 sqrt(K(1-K)) cos phi1) - 21/16; zero on the separatrix level.
double heteroclinic_residual(const State& s);

struct Trajectory {
  std::vector<State> samples;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// Samples at t0 + k * stride (and at the horizon). stride <= 0 records every
/// accepted step.
Trajectory integrate(const State& s0, double mu, const Coefficients& c, double horizon,
                     double tol, double stride);

enum class PeriodClass { periodic, equilibrium, no_return };
enum class OrbitKind { none, libration, rotation };

std::string to_string(PeriodClass c);
std::string to_string(OrbitKind k);

struct PeriodResult {
  PeriodClass classification = PeriodClass::no_return;
  OrbitKind kind = OrbitKind::none;
  double T = 0.0;            // time of the largest |K - K0| within the cycle
  double K0 = 0.0;
  double KT = 0.0;
  double full_period = 0.0;  // first return time
  int winding = 0;           // net 2 pi turns of phi1 over the cycle
  double symmetry_defect = 0.0;  // |K0 + KT - 1|
  double c_star = 0.0;           // min(1/2 - K0, KT - 1/2)
  double return_error = 0.0;     // distance to the initial point at the return
};

inline constexpr double kRecurrenceTol = 1e-8;

PeriodResult find_period(const State& s0, double mu, const Coefficients& c, double tol,
                         double recurrence_tol = kRecurrenceTol);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace qdnls::reduced
