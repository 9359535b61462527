#include "toy.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "ode.hpp"

namespace qdnls::toy {

namespace {

using V8 = ode::Vec<8>;
constexpr Complex kI{0.0, 1.0};

V8 pack(const Amplitudes& c) {
  V8 y;
  for (int j = 0; j < 4; ++j) {
    y[2 * j] = c[j].real();
    y[2 * j + 1] = c[j].imag();
  }
  return y;
}

Amplitudes unpack(const V8& y) {
  Amplitudes c;
  for (int j = 0; j < 4; ++j) c[j] = {y[2 * j], y[2 * j + 1]};
  return c;
}

std::array<int, 3> sorted(int a, int b, int c) {
  std::array<int, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v;
}

struct Flow {
  Params p;
  V8 operator()(double t, const V8& y) const {
    const Amplitudes c = unpack(y);
    const Amplitudes d = p.flavor == Flavor::full ? rhs_full({c, t}, p) : rhs_gauged({c, t}, p);
    return pack(d);
  }
};

using V12 = ode::Vec<12>;

}  // namespace

std::string to_string(Flavor f) { return f == Flavor::full ? "full" : "gauged"; }

Flavor parse_flavor(const std::string& s) {
  if (s == "full") return Flavor::full;
  if (s == "gauged") return Flavor::gauged;
  throw ValidationError("unknown toy flavor '" + s + "' (expected full|gauged)");
}

std::vector<InteractionTerm> enumerate_interactions(const resonance::ResonantQuad& quad) {
  const auto xi = quad.modes();
  // Lambda* as multisets of mode positions.
  const std::array<int, 3> low = sorted(resonance::kAlpha1, resonance::kAlpha1, resonance::kAlpha2);
  const std::array<int, 3> high = sorted(resonance::kBeta1, resonance::kBeta1, resonance::kBeta2);

  std::vector<InteractionTerm> terms;
  for (int target = 0; target < 4; ++target) {
    for (int code = 0; code < 1024; ++code) {
      std::array<int, 5> idx;
      int c = code;
      for (int j = 0; j < 5; ++j) {
        idx[j] = c % 4;
        c /= 4;
      }
      const auto odd = sorted(idx[0], idx[2], idx[4]);
      const auto even = sorted(idx[1], idx[3], target);
      if (!((odd == low && even == high) || (odd == high && even == low))) continue;
      InteractionTerm t;
      t.target = target;
      t.idx = idx;
      t.omega = xi[idx[0]] * xi[idx[0]] - xi[idx[1]] * xi[idx[1]] + xi[idx[2]] * xi[idx[2]] -
                xi[idx[3]] * xi[idx[3]] + xi[idx[4]] * xi[idx[4]] - xi[target] * xi[target];
      terms.push_back(t);
    }
  }
  return terms;
}

std::array<int, 4> interaction_multiplicities(const resonance::ResonantQuad& quad) {
  std::array<int, 4> m{};
  for (const auto& t : enumerate_interactions(quad)) ++m[t.target];
  return m;
}

Amplitudes interaction(const Amplitudes& c, const std::vector<InteractionTerm>& terms, double t,
                       bool with_phase) {
  Amplitudes out{};
  for (const auto& term : terms) {
    const auto& k = term.idx;
    Complex prod = c[k[0]] * std::conj(c[k[1]]) * c[k[2]] * std::conj(c[k[3]]) * c[k[4]];
    if (with_phase) prod *= std::polar(1.0, t * static_cast<double>(term.omega));
    out[term.target] += prod;
  }
  return out;
}

namespace {

// Interaction terms depend only on the quad; cache the last one built.
const std::vector<InteractionTerm>& terms_for(const resonance::ResonantQuad& q) {
  thread_local resonance::ResonantQuad cached_quad{};
  thread_local std::vector<InteractionTerm> cached;
  if (cached.empty() || cached_quad.m != q.m || cached_quad.n != q.n) {
    cached = enumerate_interactions(q);
    cached_quad = q;
  }
  return cached;
}

}  // namespace

Amplitudes rhs_gauged(const State& s, const Params& p) {
  const Amplitudes x = interaction(s.c, terms_for(p.quad));
  Amplitudes d;
  for (int j = 0; j < 4; ++j) {
    const double I = std::norm(s.c[j]);
    d[j] = -kI * p.mu * (I * (4.0 * I - 6.0 * p.M0) * s.c[j] + x[j]);
  }
  return d;
}

Amplitudes rhs_full(const State& s, const Params& p) {
  const Amplitudes x = interaction(s.c, terms_for(p.quad), s.t, true);
  const auto xi = p.quad.modes();
  const double lam = p.lambda, mu = p.mu;
  const double quartic = quartic_sum(s.c);
  const double constant = 2.0 * (p.M0 * p.M0 * (lam * lam + 3.0 * mu) + 2.0 * lam * p.P0) -
                          (lam * lam + 3.0 * mu) * quartic;
  Amplitudes d;
  for (int j = 0; j < 4; ++j) {
    const double I = std::norm(s.c[j]);
    const double diag = (lam * static_cast<double>(xi[j]) - 6.0 * p.M0 * mu) * I +
                        4.0 * mu * I * I + constant;
    d[j] = -kI * (diag * s.c[j] + mu * x[j]);
  }
  return d;
}

namespace {

// y = (d as 4 complex, G as 4 reals), c = d e^{-iG}.
struct CorotatingFlow {
  Params p;
  std::vector<InteractionTerm> terms;

  V12 operator()(double t, const V12& y) const {
    Amplitudes d;
    for (int j = 0; j < 4; ++j) d[j] = {y[2 * j], y[2 * j + 1]};
    const auto xi = p.quad.modes();
    const double lam = p.lambda, mu = p.mu;
    const double constant = 2.0 * (p.M0 * p.M0 * (lam * lam + 3.0 * mu) + 2.0 * lam * p.P0) -
                            (lam * lam + 3.0 * mu) * quartic_sum(d);
    Amplitudes x{};
    for (const auto& term : terms) {
      const auto& k = term.idx;
      const double phase = t * static_cast<double>(term.omega) - y[8 + k[0]] + y[8 + k[1]] -
                           y[8 + k[2]] + y[8 + k[3]] - y[8 + k[4]] + y[8 + term.target];
      x[term.target] += d[k[0]] * std::conj(d[k[1]]) * d[k[2]] * std::conj(d[k[3]]) * d[k[4]] *
                        std::polar(1.0, phase);
    }
    V12 out;
    for (int j = 0; j < 4; ++j) {
      const double I = std::norm(d[j]);
      const Complex dd = -kI * mu * ((4.0 * I - 6.0 * p.M0) * I * d[j] + x[j]);
      out[2 * j] = dd.real();
      out[2 * j + 1] = dd.imag();
      out[8 + j] = lam * static_cast<double>(xi[j]) * I + constant;
    }
    return out;
  }
};

Amplitudes from_corotating(const V12& y) {
  Amplitudes c;
  for (int j = 0; j < 4; ++j) c[j] = Complex{y[2 * j], y[2 * j + 1]} * std::polar(1.0, -y[8 + j]);
  return c;
}

template <std::size_t N, class Flow, class Unpack>
Trajectory drive(const Flow& flow, const ode::Vec<N>& y0, const State& s0, double horizon,
                 double tol, double stride, const Unpack& unpack_state) {
  Trajectory traj;
  traj.samples.push_back(s0);
  const double t0 = s0.t, t_end = t0 + horizon;
  ode::Stepper<N, Flow> st(flow, t0, y0, tol);
  long k = 1;
  while (st.t() < t_end) {
    st.step(t_end);
    if (stride > 0.0) {
      for (double ts = t0 + k * stride; ts <= st.t(); ts = t0 + (++k) * stride) {
        traj.samples.push_back({unpack_state(st.state_at(ts)), ts});
      }
    } else {
      traj.samples.push_back({unpack_state(st.y()), st.t()});
    }
  }
  if (traj.samples.back().t != t_end) traj.samples.push_back({unpack_state(st.y()), t_end});
  traj.accepted_steps = st.stats().accepted;
  traj.rejected_steps = st.stats().rejected;
  return traj;
}

}  // namespace

Amplitudes rhs(const State& s, const Params& p) {
  return p.flavor == Flavor::full ? rhs_full(s, p) : rhs_gauged(s, p);
}

Trajectory integrate(const State& s0, const Params& p, double horizon, double tol, double stride) {
  if (!(horizon >= 0.0)) throw ValidationError("horizon must be non-negative");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (p.flavor == Flavor::full && p.frame == FullFrame::corotating) {
    V12 y0{};
    for (int j = 0; j < 4; ++j) {
      y0[2 * j] = s0.c[j].real();
      y0[2 * j + 1] = s0.c[j].imag();
    }
    return drive<12>(CorotatingFlow{p, enumerate_interactions(p.quad)}, y0, s0, horizon, tol,
                     stride, from_corotating);
  }
  return drive<8>(Flow{p}, pack(s0.c), s0, horizon, tol, stride, unpack);
}

std::array<double, 4> invariants(const Amplitudes& c) {
  const double a1 = std::norm(c[0]), a2 = std::norm(c[1]);
  const double b1 = std::norm(c[2]), b2 = std::norm(c[3]);
  return {a1 + b1, a2 + b2, a1 - 2.0 * a2, b1 - 2.0 * b2};
}

std::array<double, 4> invariant_scales(const Amplitudes& c) {
  const double a1 = std::norm(c[0]), a2 = std::norm(c[1]);
  const double b1 = std::norm(c[2]), b2 = std::norm(c[3]);
  return {a1 + b1, a2 + b2, a1 + 2.0 * a2, b1 + 2.0 * b2};
}

std::array<std::array<int, 4>, 4> angle_matrix() {
  return {{{2, 1, -2, -1}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
}

std::array<std::array<int, 4>, 4> twice_inverse_transpose() {
  return {{{1, 0, 0, 0}, {-1, 2, 0, 0}, {2, 0, 2, 0}, {1, 0, 0, 2}}};
}

ActionAngles actions_angles(const Amplitudes& c) {
  ActionAngles aa;
  for (int j = 0; j < 4; ++j) {
    aa.I[j] = std::norm(c[j]);
    aa.defined[j] = c[j] != Complex{};
    aa.theta[j] = aa.defined[j] ? std::arg(c[j]) : 0.0;
  }
  const auto A = angle_matrix();
  const auto B = twice_inverse_transpose();
  for (int r = 0; r < 4; ++r) {
    double phi = 0.0, J = 0.0;
    for (int k = 0; k < 4; ++k) {
      phi += A[r][k] * aa.theta[k];
      J += 0.5 * B[r][k] * aa.I[k];
    }
    aa.phi[r] = phi;
    aa.J[r] = J;
  }
  aa.phi1 = aa.phi[0];
  aa.phi1_defined = std::all_of(aa.defined.begin(), aa.defined.end(), [](bool b) { return b; });
  return aa;
}

double hamiltonian(const Amplitudes& c, double mu) {
  double poly = 0.0;
  for (const auto& z : c) {
    const double I = std::norm(z);
    poly += 4.0 / 3.0 * I * I * I - 4.5 * I * I;
  }
  const Complex coupling = std::conj(c[0] * c[0] * c[1]) * c[2] * c[2] * c[3];
  return -mu * poly - 6.0 * mu * coupling.real();
}

Amplitudes canonical_amplitudes(double K0, const std::array<double, 4>& phases) {
  if (!(K0 > 0.0 && K0 < 1.0)) {
    throw ValidationError("K0 must lie in the open interval (0,1), got " + std::to_string(K0));
  }
  const std::array<double, 4> I{K0, K0 / 2.0, 1.0 - K0, (1.0 - K0) / 2.0};
  Amplitudes c;
  for (int j = 0; j < 4; ++j) c[j] = std::polar(std::sqrt(I[j]), phases[j]);
  return c;
}

double quartic_sum(const Amplitudes& c) {
  double s = 0.0;
  for (const auto& z : c) s += std::norm(z) * std::norm(z);
  return s;
}

}  // namespace qdnls::toy
