#pragma once

// Dormand-Prince 5(4) with embedded error control, shared by the reduced and
// toy models. Dense output is done by re-stepping from the last accepted
// point, so sampling never perturbs the accepted step sequence.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace qdnls::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

template <std::size_t N>
std::string describe_state(double t, const Vec<N>& y) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << t << " y=(";
  for (std::size_t i = 0; i < N; ++i) os << (i ? ", " : "") << y[i];
  os << ")";
  return os.str();
}

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
};

/// One DP5 step. Returns the 5th-order solution and writes the scaled RMS error.
/// `rhs(t, y)` returns dy/dt and may throw DomainError.
template <std::size_t N, class Rhs>
Vec<N> dp_step(const Rhs& rhs, double t, const Vec<N>& y, double h, double tol, double* err) {
  using namespace dp;
  Vec<N> yt, y5;
  const Vec<N> k1 = rhs(t, y);
  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
  const Vec<N> k2 = rhs(t + c2 * h, yt);
  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const Vec<N> k3 = rhs(t + c3 * h, yt);
  for (std::size_t i = 0; i < N; ++i)
    yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const Vec<N> k4 = rhs(t + c4 * h, yt);
  for (std::size_t i = 0; i < N; ++i)
    yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  const Vec<N> k5 = rhs(t + c5 * h, yt);
  for (std::size_t i = 0; i < N; ++i)
    yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  const Vec<N> k6 = rhs(t + h, yt);
  for (std::size_t i = 0; i < N; ++i)
    y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  if (err) {
    const Vec<N> k7 = rhs(t + h, y5);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      sum += (e / sc) * (e / sc);
    }
    *err = std::sqrt(sum / N);
  }
  return y5;
}

/// Adaptive driver. Integrates forward in time only.
template <std::size_t N, class Rhs>
class Stepper {
 public:
  Stepper(Rhs rhs, double t0, const Vec<N>& y0, double tol)
      : rhs_(std::move(rhs)), tol_(tol), t_(t0), y_(y0), t_prev_(t0), y_prev_(y0) {
    if (!(tol > 0.0)) throw ValidationError("integrator tolerance must be positive");
    h_ = initial_step();
  }

  double t() const { return t_; }
  const Vec<N>& y() const { return y_; }
  double t_prev() const { return t_prev_; }
  const Vec<N>& y_prev() const { return y_prev_; }
  const StepStats& stats() const { return stats_; }
  double tol() const { return tol_; }

  /// Takes one accepted step, never past t_stop.
  void step(double t_stop) {
    double h = std::min(h_, t_stop - t_);
    const bool clipped = h < h_;
    bool rejected_once = false;
    for (;;) {
      if (!(h > min_step())) {
        throw NumericalError("step size underflow (h=" + std::to_string(h) + ") at " +
                             describe_state(t_, y_));
      }
      double err = 0.0;
      Vec<N> ynew;
      bool ok = true;
      try {
        ynew = dp_step<N>(rhs_, t_, y_, h, tol_, &err);
        stats_.rhs_calls += 7;
        ok = std::isfinite(err);
      } catch (const DomainError&) {
        ok = false;
      }
      if (ok && err <= 1.0) {
        ++stats_.accepted;
        t_prev_ = t_;
        y_prev_ = y_;
        t_ = (h == t_stop - t_) ? t_stop : t_ + h;
        y_ = ynew;
        double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, 5.0);
        if (rejected_once) fac = std::min(fac, 1.0);
        // A step clipped to hit t_stop says nothing about the natural size.
        h_ = clipped ? std::max(h_, h * fac) : h * fac;
        return;
      }
      ++stats_.rejected;
      rejected_once = true;
      const double fac = ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.25;
      h *= fac;
    }
  }

  /// State at time s in [t_prev, t], by one DP step from the previous accepted point.
  Vec<N> state_at(double s) const {
    if (s == t_) return y_;
    if (s == t_prev_) return y_prev_;
    return dp_step<N>(rhs_, t_prev_, y_prev_, s - t_prev_, tol_, nullptr);
  }

  Vec<N> derivative(double s, const Vec<N>& y) const { return rhs_(s, y); }

 private:
  double min_step() const {
    return 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t_), 1e-300);
  }

  // h0 = 0.01 d0/d1 in the scaled norm; covariant under t -> c t.
  double initial_step() const {
    const Vec<N> f = rhs_(t_, y_);
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol_ + tol_ * std::abs(y_[i]);
      d0 += (y_[i] / sc) * (y_[i] / sc);
      d1 += (f[i] / sc) * (f[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    if (d0 < 1e-5 || d1 < 1e-5 * d0 || d1 == 0.0) return 1e-6;
    return 0.01 * d0 / d1;
  }

  Rhs rhs_;
  double tol_;
  double t_, h_ = 0.0;
  Vec<N> y_;
  double t_prev_;
  Vec<N> y_prev_;
  StepStats stats_;
};

}  // namespace qdnls::ode
