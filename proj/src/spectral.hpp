#pragma once

// Fourier pseudospectral solver for
//   i u_t + u_xx = -i lambda u^2 conj(u_x) + mu |u|^4 u   on the torus,
// with u = sum_xi uhat(xi) e^{i xi x} truncated to |xi| <= cutoff.

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "resonance.hpp"

namespace qdnls::spectral {

using Complex = std::complex<double>;

struct Field {
  int cutoff = 0;  // Xi
  int grid = 0;    // base grid n, power of two >= 2 Xi + 2
  double t = 0.0;
  std::vector<Complex> coeff;  // index xi + cutoff

  Complex& at(long xi) { return coeff[static_cast<std::size_t>(xi + cutoff)]; }
  Complex at(long xi) const {
    return (xi < -cutoff || xi > cutoff) ? Complex{} : coeff[static_cast<std::size_t>(xi + cutoff)];
  }
  long size() const { return static_cast<long>(coeff.size()); }
};

inline constexpr int kDefaultPadding = 3;

/// Largest cutoff supported by a base grid: floor(n / 3).
int default_cutoff(int grid);

/// Zero field; validates the grid against the cutoff.
Field make_field(int cutoff, int grid);

/// Canonical four-mode data on the cluster, zero elsewhere.
Field synthesize_field(const resonance::ResonantQuad& quad, double K0,
                       const std::array<double, 4>& phases, int cutoff, int grid);

/// Zero-padded transform pair on padding * grid points.
class Transform {
 public:
  Transform(int cutoff, int grid, int padding);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  int points() const { return points_; }
  int cutoff() const { return cutoff_; }

  /// Physical values of sum_xi w(xi) c(xi) e^{i xi x_j}.
  void to_grid(const std::vector<Complex>& c, std::vector<Complex>& values,
               const std::function<Complex(long)>& weight = {});
  /// Coefficients |xi| <= cutoff of the grid function (exact for bandwidth < points - cutoff).
  void from_grid(const std::vector<Complex>& values, std::vector<Complex>& c);

 private:
  int cutoff_, points_;
  void* buf_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

struct Conserved {
  double mass = 0.0;
  double energy = 0.0;
  double momentum = 0.0;
};

/// Integrating-factor RK4 stepper. Owns its transforms; not shareable across threads.
class Solver {
 public:
  Solver(int cutoff, int grid, double lambda, double mu, int padding = kDefaultPadding);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  int padding() const { return padding_; }

  /// -i * N^ with N = -i lambda u^2 conj(u_x) + mu |u|^4 u, truncated.
  void nonlinear(const std::vector<Complex>& c, std::vector<Complex>& out);

  void step(Field& f, double dt);

  /// Calls `observe(field, step_index)` at step 0 and every `stride` steps and at the end.
  /// Throws NumericalError naming the last healthy step if the field stops being finite.
  void evolve(Field& f, double dt, long steps, long stride,
              const std::function<void(const Field&, long)>& observe);

  Conserved conserved(const Field& f);
  double max_abs2(const Field& f);

 private:
  int cutoff_, grid_, padding_;
  double lambda_, mu_;
  Transform tr_;
  std::vector<Complex> u_, ux_, k1_, k2_, k3_, k4_, tmp_;
  std::vector<Complex> half_;  // e^{-i xi^2 dt / 2} for cached_dt_
  double cached_dt_ = 0.0;
};

/// Mass, energy, momentum; rectangle rule on a padded grid.
Conserved conserved_triple(const Field& f, double lambda, double mu, int padding = kDefaultPadding);

/// a_xi = uhat(xi) e^{+i xi^2 t}; constant under free flow.
std::vector<Complex> interaction_coefficients(const Field& f);

/// |sum xi |a|^2 + (lambda/2) sum_k |sum_{xi1} uhat(xi1) uhat(k - xi1)|^2 + 2 P0|,
/// by direct convolution.
double momentum_fourier_identity(const Field& f, double lambda, double P0);

/// ||<xi> uhat||_{l2}.
double weighted_l2(const Field& f);

/// weighted_l2 / M*.
double apriori_ratio(const Field& f, resonance::Freq m_star);

/// 0.5 / (|lambda| max|u|^2 Xi + |mu| max|u|^4 + 1).
double dt_heuristic(const Field& f, double lambda, double mu, int padding = kDefaultPadding);

/// Flat little-endian (re, im) doubles for xi = -Xi..Xi, plus `<path>.json`.
void save_checkpoint(const Field& f, double lambda, double mu,
                     const resonance::ResonantQuad& quad, const std::string& path);
Field load_checkpoint(const std::string& path);

bool is_power_of_two(int n);

}  // namespace qdnls::spectral
