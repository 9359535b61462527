#include "reduced.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "ode.hpp"

namespace qdnls::reduced {

namespace {

using V2 = ode::Vec<2>;
constexpr double kPi = std::numbers::pi;

struct Flow {
  double mu;
  Coefficients c;
  V2 operator()(double, const V2& y) const {
    const auto d = rhs(State{y[0], y[1], 0.0}, mu, c);
    return {d.dphi1, d.dK};
  }
};

double sign(double x) { return (x > 0) - (x < 0); }

// Root of f on [a, b] given a sign change, by bisection on re-stepped states.
template <class Stepper, class F>
double bisect(const Stepper& st, double a, double b, double fa, const F& f) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = f(st.state_at(m));
    if (fm == 0.0) return m;
    if (sign(fm) == sign(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::verbatim ? "verbatim" : "consistent"; }

Variant parse_variant(const std::string& s) {
  if (s == "verbatim") return Variant::verbatim;
  if (s == "consistent") return Variant::consistent;
  throw ValidationError("unknown reduced variant '" + s + "' (expected verbatim|consistent)");
}

Coefficients Coefficients::of(Variant v) {
  if (v == Variant::verbatim) return {v, 3.5, 12.0};
  return {v, 1.5, 6.0};
}

Derivative rhs(const State& s, double mu, const Coefficients& c) {
  const double K = s.K;
  if (!(K > kBoundaryEps && K < 1.0 - kBoundaryEps)) {
    throw DomainError("reduced flow left the strip: K=" + std::to_string(K) +
                      " (phi1=" + std::to_string(s.phi1) + ", t=" + std::to_string(s.t) + ")");
  }
  const double prod = K * (1.0 - K);
  const double root = std::sqrt(prod);
  Derivative d;
  d.dphi1 = 9.0 * mu * (1.0 - 2.0 * K) * (c.p + root * std::cos(s.phi1));
  d.dK = c.q * mu * prod * root * std::sin(s.phi1);
  return d;
}

double hamiltonian(const State& s, double mu) {
  const double K = s.K;
  const double prod = std::max(0.0, K * (1.0 - K));
  return 33.0 / 8.0 * mu * (K * K + (1.0 - K) * (1.0 - K)) + 1.5 * mu * prod -
         3.0 * mu * prod * std::sqrt(prod) * std::cos(s.phi1);
}

double heteroclinic_residual(const State& s) {
  const double prod = std::max(0.0, s.K * (1.0 - s.K));
  return prod * (27.0 / 4.0 + 3.0 * std::sqrt(prod) * std::cos(s.phi1)) - 21.0 / 16.0;
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

Trajectory integrate(const State& s0, double mu, const Coefficients& c, double horizon,
                     double tol, double stride) {
  if (!(s0.K > 0.0 && s0.K < 1.0)) {
    throw ValidationError("initial K must lie in (0,1), got " + std::to_string(s0.K));
  }
  if (!(horizon >= 0.0)) throw ValidationError("horizon must be non-negative");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");

  Trajectory traj;
  const double t0 = s0.t;
  const double t_end = t0 + horizon;
  traj.samples.push_back(s0);
  // Reject starts already inside the clamp zone.
  rhs(s0, mu, c);

  ode::Stepper<2, Flow> st(Flow{mu, c}, t0, V2{s0.phi1, s0.K}, tol);
  long k = 1;
  while (st.t() < t_end) {
    st.step(t_end);
    if (stride > 0.0) {
      for (double ts = t0 + k * stride; ts <= st.t(); ts = t0 + (++k) * stride) {
        const V2 y = st.state_at(ts);
        traj.samples.push_back({y[0], y[1], ts});
      }
    } else {
      traj.samples.push_back({st.y()[0], st.y()[1], st.t()});
    }
  }
  if (traj.samples.back().t != t_end) traj.samples.push_back({st.y()[0], st.y()[1], t_end});
  traj.accepted_steps = st.stats().accepted;
  traj.rejected_steps = st.stats().rejected;
  return traj;
}

std::string to_string(PeriodClass c) {
  switch (c) {
    case PeriodClass::periodic: return "periodic";
    case PeriodClass::equilibrium: return "equilibrium";
    case PeriodClass::no_return: return "no-return";
  }
  return "unknown";
}

std::string to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::none: return "none";
    case OrbitKind::libration: return "libration";
    case OrbitKind::rotation: return "rotation";
  }
  return "unknown";
}

PeriodResult find_period(const State& s0, double mu, const Coefficients& c, double tol,
                         double recurrence_tol) {
  if (mu == 0.0 || !std::isfinite(mu)) throw ValidationError("find_period needs mu != 0");
  if (!(s0.K > 0.0 && s0.K < 1.0)) {
    throw ValidationError("initial K must lie in (0,1), got " + std::to_string(s0.K));
  }
  PeriodResult res;
  res.K0 = s0.K;

  const double w0 = wrap_angle(s0.phi1);
  const bool near_half = std::abs(s0.K - 0.5) <= recurrence_tol;
  const bool near_centre = std::abs(w0) <= recurrence_tol;
  const bool near_saddle = kPi - std::abs(w0) <= recurrence_tol;
  if (near_half && (near_centre || near_saddle)) {
    res.classification = PeriodClass::equilibrium;
    res.KT = s0.K;
    res.symmetry_defect = std::abs(2.0 * s0.K - 1.0);
    return res;
  }

  const Derivative d0 = rhs(s0, mu, c);
  // Section on phi1 unless phi1 is momentarily stationary; then on K.
  const bool phi_section = std::abs(d0.dphi1) >= std::abs(d0.dK);
  const double dir = phi_section ? sign(d0.dphi1) : sign(d0.dK);
  const double phi0 = s0.phi1;
  const double K0 = s0.K;

  auto g = [&](const V2& y) { return phi_section ? y[0] - phi0 : y[1] - K0; };
  auto dK_of = [&](const V2& y) { return rhs(State{y[0], y[1], 0.0}, mu, c).dK; };

  const double horizon = 100.0 / std::abs(mu);
  ode::Stepper<2, Flow> st(Flow{mu, c}, s0.t, V2{s0.phi1, s0.K}, tol);

  double best_excursion = -1.0;
  double best_t = 0.0;
  double best_K = K0;
  double dK_prev = d0.dK;

  while (st.t() < s0.t + horizon) {
    st.step(s0.t + horizon);
    const double ta = st.t_prev(), tb = st.t();
    const double ga = g(st.y_prev()), gb = g(st.y());

    // Section crossings inside this step, in time order.
    std::optional<double> t_return;
    int winding = 0;
    if (dir != 0.0 && sign(gb - ga) == dir) {
      const double period = phi_section ? 2.0 * kPi : 0.0;
      std::vector<double> levels;
      if (phi_section) {
        const long k_lo = static_cast<long>(std::ceil(std::min(ga, gb) / period));
        const long k_hi = static_cast<long>(std::floor(std::max(ga, gb) / period));
        for (long k = k_lo; k <= k_hi; ++k) levels.push_back(k * period);
        if (dir < 0) std::reverse(levels.begin(), levels.end());
      } else if (std::min(ga, gb) <= 0.0 && std::max(ga, gb) >= 0.0) {
        levels.push_back(0.0);
      }
      for (double L : levels) {
        if (ga == L) continue;
        const double ts = (gb == L) ? tb
                                    : bisect(st, ta, tb, ga - L,
                                             [&](const V2& y) { return g(y) - L; });
        const V2 y = st.state_at(ts);
        const double miss = phi_section ? std::abs(y[1] - K0) : std::abs(wrap_angle(y[0] - phi0));
        if (miss <= recurrence_tol) {
          t_return = ts;
          winding = static_cast<int>(std::lround((y[0] - phi0) / (2.0 * kPi)));
          res.return_error = miss;
          break;
        }
      }
    }

    // Turning points of K, bisected; keep the largest excursion.
    const double dK_new = dK_of(st.y());
    if (dK_prev * dK_new < 0.0) {
      const double tz = bisect(st, ta, tb, dK_prev, dK_of);
      if (!t_return || tz < *t_return) {
        const V2 y = st.state_at(tz);
        const double exc = std::abs(y[1] - K0);
        if (exc > best_excursion) {
          best_excursion = exc;
          best_t = tz;
          best_K = y[1];
        }
      }
    }
    dK_prev = dK_new;

    if (t_return) {
      res.classification = PeriodClass::periodic;
      res.full_period = *t_return - s0.t;
      res.winding = winding;
      res.kind = winding == 0 ? OrbitKind::libration : OrbitKind::rotation;
      if (best_excursion < 0.0) {
        res.T = 0.5 * res.full_period;
        res.KT = K0;
      } else {
        res.T = best_t - s0.t;
        res.KT = best_K;
      }
      res.symmetry_defect = std::abs(res.K0 + res.KT - 1.0);
      res.c_star = std::min(0.5 - res.K0, res.KT - 0.5);
      return res;
    }
  }
  res.classification = PeriodClass::no_return;
  res.KT = best_K;
  res.T = best_t - s0.t;
  res.symmetry_defect = std::abs(res.K0 + res.KT - 1.0);
  return res;
}

}  // namespace qdnls::reduced
