#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "reduced.hpp"
#include "toy.hpp"

using namespace qdnls;
using namespace qdnls::toy;

namespace {

Params params(long m, long n, Flavor fl, double lambda_shift = 0.0) {
  Params p;
  p.quad = resonance::build_quad(m, n);
  p.mu = 1.0;
  p.lambda = p.quad.lambda + lambda_shift;
  p.flavor = fl;
  return p;
}

// Counts ordered (i1..i5) whose odd positions and (even positions + target)
// are {a1,a1,a2} and {b1,b1,b2} in some order. Positions: 0 a1, 1 a2, 2 b1, 3 b2.
std::array<int, 4> count_terms() {
  const std::vector<int> A{0, 0, 1}, B{2, 2, 3};
  std::array<int, 4> out{};
  for (int target = 0; target < 4; ++target) {
    for (int code = 0; code < 1024; ++code) {
      int i[5];
      for (int k = 0, c = code; k < 5; ++k, c /= 4) i[k] = c % 4;
      std::vector<int> odd{i[0], i[2], i[4]}, even{i[1], i[3], target};
      std::sort(odd.begin(), odd.end());
      std::sort(even.begin(), even.end());
      if ((odd == A && even == B) || (odd == B && even == A)) ++out[target];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("interaction multiplicities") {
  const auto q = resonance::build_quad(101, -100);
  CHECK(interaction_multiplicities(q) == std::array<int, 4>{6, 3, 6, 3});
  CHECK(interaction_multiplicities(q) == count_terms());
  // Every term has a vanishing gap after the gauge, and the raw gap is +-Omega.
  for (const auto& t : enumerate_interactions(q)) {
    const auto m = q.modes();
    resonance::Freq w = -m[t.target] * m[t.target];
    for (int k = 0; k < 5; ++k) w += (k % 2 == 0 ? 1 : -1) * m[t.idx[k]] * m[t.idx[k]];
    CHECK(t.omega == w);
    CHECK(std::abs(t.omega) == 2010);
  }
}

TEST_CASE("interaction on symmetric data") {
  const auto q = resonance::build_quad(101, -100);
  const auto c = canonical_amplitudes(0.5);
  const auto X = interaction(c, enumerate_interactions(q));
  // Each of the six a1 terms is b1^2 b2 conj(a1) conj(a2) = 0.5 * 0.5 * sqrt(0.5) * 0.5.
  const double term = 0.5 * 0.5 * std::sqrt(0.5) * 0.5;
  CHECK(X[0].real() == doctest::Approx(6 * term).epsilon(1e-15));
  CHECK(X[0].real() == doctest::Approx(0.5303300858899106).epsilon(1e-14));
  CHECK(std::abs(X[0].imag()) < 1e-16);

  // Real data: no intensity changes.
  const auto d = rhs_gauged({c, 0.0}, params(101, -100, Flavor::gauged));
  for (int j = 0; j < 4; ++j) CHECK(std::abs((std::conj(c[j]) * d[j]).real()) < 1e-15);
}

TEST_CASE("zero coupling leaves the gauged state constant") {
  auto p = params(101, -100, Flavor::gauged);
  p.mu = 0.0;
  const auto c = canonical_amplitudes(0.3, {0.1, 0.2, 0.3, 0.4});
  const auto d = rhs_gauged({c, 0.0}, p);
  for (const auto& z : d) CHECK(z == Complex{});
}

TEST_CASE("invariants") {
  const auto inv = invariants(canonical_amplitudes(0.37, {0.5, -1.0, 2.0, 0.0}));
  CHECK(inv[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(inv[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(inv[2]) < 1e-15);
  CHECK(std::abs(inv[3]) < 1e-15);
  CHECK(invariants({}) == std::array<double, 4>{0, 0, 0, 0});
  CHECK(invariants({Complex{1, 0}, {}, {}, {}}) == std::array<double, 4>{1, 0, 1, 0});
}

TEST_CASE("action-angle coordinates") {
  const double K = 0.3;
  const auto aa = actions_angles(canonical_amplitudes(K));
  CHECK(aa.phi1 == 0.0);
  CHECK(aa.J[0] == doctest::Approx(K / 2));
  CHECK(std::abs(aa.J[1]) < 1e-15);
  CHECK(aa.J[2] == doctest::Approx(1.0));
  CHECK(aa.J[3] == doctest::Approx(0.5));

  const auto bb = actions_angles(canonical_amplitudes(K, {0.3, 0.1, 0.2, -0.1}));
  CHECK(bb.phi1 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(bb.phi1_defined);

  const auto zero = actions_angles({Complex{1, 0}, {}, {}, {}});
  CHECK_FALSE(zero.phi1_defined);

  // A (2 A^{-T})^T = 2 I in integers.
  const auto A = angle_matrix();
  const auto B = twice_inverse_transpose();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      int s = 0;
      for (int k = 0; k < 4; ++k) s += A[r][k] * B[c][k];
      CHECK(s == (r == c ? 2 : 0));
    }
}

TEST_CASE("quartic sum") {
  CHECK(quartic_sum(canonical_amplitudes(0.5)) == doctest::Approx(5.0 / 8.0).epsilon(1e-15));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int k = 0; k < 50; ++k) {
    const double K = u(rng);
    CHECK(quartic_sum(canonical_amplitudes(K)) ==
          doctest::Approx(1.25 - 2.5 * K * (1 - K)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(canonical_amplitudes(0.0), ValidationError);
  CHECK_THROWS_AS(canonical_amplitudes(1.0), ValidationError);
}

TEST_CASE("gauged flow conserves energy and invariants") {
  const auto p = params(101, -100, Flavor::gauged);
  const auto tr = integrate({canonical_amplitudes(0.2, {0.2, 0, -0.3, 0.1}), 0.0}, p, 0.5, 1e-12, 0.0);
  const double H0 = hamiltonian(tr.samples.front().c, p.mu);
  const auto i0 = invariants(tr.samples.front().c);
  double dh = 0.0, di = 0.0;
  for (const auto& s : tr.samples) {
    dh = std::max(dh, std::abs(hamiltonian(s.c, p.mu) - H0) / std::abs(H0));
    const auto inv = invariants(s.c);
    for (int k = 0; k < 4; ++k) di = std::max(di, std::abs(inv[k] - i0[k]));
  }
  CHECK(dh <= 1e-10);
  CHECK(di <= 1e-10);
}

TEST_CASE("gauged toy follows the reduced flow with the angle reversed") {
  const std::array<double, 4> ph{0.3, 0.1, 0.2, -0.1};  // phi1 = 0.4
  const auto p = params(101, -100, Flavor::gauged);
  const auto toy = integrate({canonical_amplitudes(0.25, ph), 0.0}, p, 0.6, 1e-12, 0.05);
  const auto red = reduced::integrate({-0.4, 0.25, 0.0}, 1.0,
                                      reduced::Coefficients::of(reduced::Variant::consistent), 0.6,
                                      1e-12, 0.05);
  REQUIRE(toy.samples.size() == red.samples.size());
  for (std::size_t i = 0; i < toy.samples.size(); ++i) {
    CHECK(std::abs(std::norm(toy.samples[i].c[0]) - red.samples[i].K) <= 1e-9);
    CHECK(std::abs(reduced::wrap_angle(-actions_angles(toy.samples[i].c).phi1 - red.samples[i].phi1)) <= 1e-8);
  }
}

TEST_CASE("full flavor: gauge equivalence and its failure off the gauge") {
  const State s0{canonical_amplitudes(0.2), 0.0};
  const auto g = integrate(s0, params(5, -4, Flavor::gauged), 0.5, 1e-12, 0.01);
  const auto f = integrate(s0, params(5, -4, Flavor::full), 0.5, 1e-12, 0.01);
  const auto off = integrate(s0, params(5, -4, Flavor::full, 20.0), 0.5, 1e-12, 0.01);
  REQUIRE(g.samples.size() == f.samples.size());
  double same = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i)
    for (int k = 0; k < 4; ++k) {
      same = std::max(same, std::abs(std::abs(f.samples[i].c[k]) - std::abs(g.samples[i].c[k])));
      diff = std::max(diff, std::abs(std::abs(off.samples[i].c[k]) - std::abs(g.samples[i].c[k])));
    }
  CHECK(same <= 1e-9);
  CHECK(diff > 1e-3);
}

TEST_CASE("full flavor: co-rotating and cartesian frames agree") {
  auto pc = params(5, -4, Flavor::full);
  auto pk = pc;
  pk.frame = FullFrame::cartesian;
  const State s0{canonical_amplitudes(0.3, {0.1, 0.0, 0.5, 0.2}), 0.0};
  const auto a = integrate(s0, pc, 0.2, 1e-12, 0.05);
  const auto b = integrate(s0, pk, 0.2, 1e-12, 0.05);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    for (int k = 0; k < 4; ++k) CHECK(std::abs(a.samples[i].c[k] - b.samples[i].c[k]) <= 1e-7);
}

TEST_CASE("flavor parsing and validation") {
  CHECK(parse_flavor("full") == Flavor::full);
  CHECK(parse_flavor("gauged") == Flavor::gauged);
  CHECK_THROWS_AS(parse_flavor("half"), ValidationError);
  const auto p = params(101, -100, Flavor::gauged);
  CHECK_THROWS_AS(integrate({canonical_amplitudes(0.2), 0.0}, p, -1.0, 1e-12, 0.0), ValidationError);
  CHECK_THROWS_AS(integrate({canonical_amplitudes(0.2), 0.0}, p, 1.0, 0.0, 0.0), ValidationError);
}
