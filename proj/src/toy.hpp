#pragma once

// Four-mode resonant truncation on Lambda(M,N): the non-autonomous model with
// explicit oscillation factors ("full") and its gauged autonomous form.
// Mode order is alpha1, alpha2, beta1, beta2 throughout.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "resonance.hpp"

namespace qdnls::toy {

using Complex = std::complex<double>;
using Amplitudes = std::array<Complex, 4>;

enum class Flavor { full, gauged };

/// How the full flavor is integrated. `corotating` carries c = d e^{-iG} with
/// the diagonal phases G as separate real states (an exact rewrite of the same
/// equations); `cartesian` integrates c directly.
enum class FullFrame { corotating, cartesian };

std::string to_string(Flavor f);
Flavor parse_flavor(const std::string& s);

struct Params {
  resonance::ResonantQuad quad;
  double mu = 1.0;
  double lambda = 0.0;
  double M0 = 1.5;
  double P0 = 0.0;
  Flavor flavor = Flavor::gauged;
  FullFrame frame = FullFrame::corotating;
};

struct State {
  Amplitudes c{};
  double t = 0.0;
};

/// One ordered term d_{xi1} conj(d_{xi2}) d_{xi3} conj(d_{xi4}) d_{xi5} feeding
/// `target`. Indices are mode positions 0..3.
struct InteractionTerm {
  int target = 0;
  std::array<int, 5> idx{};
  resonance::Freq omega = 0;  // xi1^2 - xi2^2 + xi3^2 - xi4^2 + xi5^2 - xi^2
};

/// Ordered 5-tuples whose odd/even multisets (with the target on the even side)
/// form the Lambda* pair {{a1,a1,a2},{b1,b1,b2}} in either order.
std::vector<InteractionTerm> enumerate_interactions(const resonance::ResonantQuad& quad);

/// Number of enumerated terms per target, in mode order.
std::array<int, 4> interaction_multiplicities(const resonance::ResonantQuad& quad);

/// Sum over the Lambda* terms of the target; with `t` and `with_phase` the
/// factor exp(+i t omega) is attached to each term.
Amplitudes interaction(const Amplitudes& c, const std::vector<InteractionTerm>& terms,
                       double t = 0.0, bool with_phase = false);

Amplitudes rhs_gauged(const State& s, const Params& p);
Amplitudes rhs_full(const State& s, const Params& p);
Amplitudes rhs(const State& s, const Params& p);

struct Trajectory {
  std::vector<State> samples;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

Trajectory integrate(const State& s0, const Params& p, double horizon, double tol, double stride);

/// (|a1|^2 + |b1|^2, |a2|^2 + |b2|^2, |a1|^2 - 2|a2|^2, |b1|^2 - 2|b2|^2).
std::array<double, 4> invariants(const Amplitudes& c);

/// Scale used for relative drift of each invariant: sum of the absolute
/// constituent terms.
std::array<double, 4> invariant_scales(const Amplitudes& c);

struct ActionAngles {
  std::array<double, 4> I{};
  std::array<double, 4> theta{};
  std::array<bool, 4> defined{};  // false for zero-amplitude modes
  std::array<double, 4> phi{};    // A theta
  std::array<double, 4> J{};      // A^{-T} I
  double phi1 = 0.0;
  bool phi1_defined = true;
};

ActionAngles actions_angles(const Amplitudes& c);

/// The change-of-variables matrix and twice its inverse transpose (integers).
std::array<std::array<int, 4>, 4> angle_matrix();
std::array<std::array<int, 4>, 4> twice_inverse_transpose();

/// -mu sum(4/3 I^3 - 9/2 I^2) - 6 mu Re(conj(d_a1^2 d_a2) d_b1^2 d_b2).
double hamiltonian(const Amplitudes& c, double mu);

/// Amplitudes sqrt(K0), sqrt(K0/2), sqrt(1-K0), sqrt((1-K0)/2) with given phases.
Amplitudes canonical_amplitudes(double K0, const std::array<double, 4>& phases = {});

/// sum |c|^4 on canonical data: 5/4 - 5/2 K(1-K).
double quartic_sum(const Amplitudes& c);

}  // namespace qdnls::toy
