#include <doctest.h>

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "reduced.hpp"

using namespace qdnls;
using namespace qdnls::reduced;

namespace {

constexpr double kPi = std::numbers::pi;
const Coefficients kCons = Coefficients::of(Variant::consistent);
const Coefficients kVerb = Coefficients::of(Variant::verbatim);

// dH/dt along the flow from central differences of H.
double dHdt(const State& s, double mu, const Coefficients& c) {
  const double h = 1e-6;
  const double Hp = (hamiltonian({s.phi1 + h, s.K, 0}, mu) - hamiltonian({s.phi1 - h, s.K, 0}, mu)) / (2 * h);
  const double HK = (hamiltonian({s.phi1, s.K + h, 0}, mu) - hamiltonian({s.phi1, s.K - h, 0}, mu)) / (2 * h);
  const auto d = rhs(s, mu, c);
  return Hp * d.dphi1 + HK * d.dK;
}

}  // namespace

TEST_CASE("coefficients and parsing") {
  CHECK(kCons.p == 1.5);
  CHECK(kCons.q == 6.0);
  CHECK(kVerb.p == 3.5);
  CHECK(kVerb.q == 12.0);
  CHECK(parse_variant("verbatim") == Variant::verbatim);
  CHECK(parse_variant("consistent") == Variant::consistent);
  CHECK_THROWS_AS(parse_variant("other"), ValidationError);
  CHECK(to_string(Variant::verbatim) == "verbatim");
}

TEST_CASE("rhs examples") {
  auto d = rhs({0.0, 0.5, 0}, 1.0, kCons);
  CHECK(d.dphi1 == 0.0);
  CHECK(d.dK == 0.0);
  d = rhs({0.0, 0.5, 0}, 1.0, kVerb);
  CHECK(d.dphi1 == 0.0);
  CHECK(d.dK == 0.0);

  d = rhs({kPi / 2, 0.5, 0}, 1.0, kCons);
  CHECK(d.dphi1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d.dK == doctest::Approx(0.75).epsilon(1e-15));

  d = rhs({0.0, 0.2, 0}, 1.0, kVerb);
  CHECK(d.dphi1 == doctest::Approx(21.06).epsilon(1e-14));
  CHECK(d.dK == 0.0);
  d = rhs({0.0, 0.2, 0}, 1.0, kCons);
  CHECK(d.dphi1 == doctest::Approx(10.26).epsilon(1e-14));

  CHECK_THROWS_AS(rhs({0.0, 0.0, 0}, 1.0, kCons), DomainError);
  CHECK_THROWS_AS(rhs({0.0, 1.0, 0}, 1.0, kCons), DomainError);
}

TEST_CASE("hamiltonian examples") {
  for (double mu : {1.0, 0.5, -2.0}) {
    CHECK(hamiltonian({kPi, 0.5, 0}, mu) == doctest::Approx(45.0 * mu / 16.0).epsilon(1e-15));
    CHECK(hamiltonian({-kPi, 0.5, 0}, mu) == doctest::Approx(45.0 * mu / 16.0).epsilon(1e-15));
    CHECK(hamiltonian({0.0, 0.5, 0}, mu) == doctest::Approx(33.0 * mu / 16.0).epsilon(1e-15));
    CHECK(hamiltonian({1.234, 0.0, 0}, mu) == doctest::Approx(33.0 * mu / 8.0).epsilon(1e-15));
  }
}

TEST_CASE("heteroclinic residual examples") {
  CHECK(std::abs(heteroclinic_residual({kPi, 0.5, 0})) < 1e-15);
  CHECK(heteroclinic_residual({0.0, 0.5, 0}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(heteroclinic_residual({2.0, 0.0, 0}) == doctest::Approx(-21.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("consistent variant is hamiltonian, verbatim is not") {
  // Fixed grid of states: dH/dt vanishes for the consistent flow only.
  double worst_c = 0.0, best_v = 1e300;
  for (double phi = -3.0; phi <= 3.0; phi += 0.37) {
    for (double K = 0.05; K < 0.96; K += 0.07) {
      worst_c = std::max(worst_c, std::abs(dHdt({phi, K, 0}, 1.0, kCons)));
      const double v = std::abs(dHdt({phi, K, 0}, 1.0, kVerb));
      if (std::abs(std::sin(phi)) > 0.1 && std::abs(K - 0.5) > 0.1) best_v = std::min(best_v, v);
    }
  }
  CHECK(worst_c < 1e-7);
  CHECK(best_v > 1e-3);
}

TEST_CASE("equilibrium start stays put") {
  const auto tr = integrate({0.0, 0.5, 0}, 1.0, kCons, 5.0, 1e-12, 0.5);
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.K - 0.5) < 1e-11);
    CHECK(std::abs(s.phi1) < 1e-11);
  }
}

TEST_CASE("H conserved over one period") {
  const auto p = find_period({0.0, 0.2, 0}, 1.0, kCons, 1e-12);
  REQUIRE(p.classification == PeriodClass::periodic);
  const auto tr = integrate({0.0, 0.2, 0}, 1.0, kCons, p.full_period, 1e-12, 0.0);
  const double H0 = hamiltonian(tr.samples.front(), 1.0);
  double drift = 0.0;
  for (const auto& s : tr.samples) drift = std::max(drift, std::abs(hamiltonian(s, 1.0) - H0) / std::abs(H0));
  CHECK(drift <= 10 * 1e-12);
  CHECK(tr.samples.back().t == doctest::Approx(p.full_period).epsilon(1e-14));
}

TEST_CASE("mu rescaling of time") {
  const double T = 0.3;
  const auto a = integrate({0.4, 0.3, 0}, 2.0, kCons, T, 1e-12, 0.05);
  const auto b = integrate({0.4, 0.3, 0}, 1.0, kCons, 2 * T, 1e-12, 0.1);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(std::abs(a.samples[i].K - b.samples[i].K) <= 1e-10);
    CHECK(std::abs(wrap_angle(a.samples[i].phi1 - b.samples[i].phi1)) <= 1e-10);
  }
}

TEST_CASE("period detection") {
  const auto eq = find_period({0.0, 0.5, 0}, 1.0, kCons, 1e-12);
  CHECK(eq.classification == PeriodClass::equilibrium);

  const auto p = find_period({0.0, 0.2, 0}, 1.0, kCons, 1e-12);
  CHECK(p.classification == PeriodClass::periodic);
  CHECK(p.T > 0.0);
  CHECK(p.full_period >= p.T);
  CHECK(p.return_error <= kRecurrenceTol);

  // Small orbit around the centre (0, 1/2).
  const auto lib = find_period({0.0, 0.45, 0}, 1.0, kCons, 1e-12);
  CHECK(lib.classification == PeriodClass::periodic);
  CHECK(lib.kind == OrbitKind::libration);
  CHECK(lib.winding == 0);
  CHECK(lib.symmetry_defect <= 1e-6);
  CHECK(lib.c_star == doctest::Approx(0.05).epsilon(1e-5));

  // mu T invariance.
  const auto h = find_period({0.0, 0.2, 0}, 0.5, kCons, 1e-12);
  const auto d = find_period({0.0, 0.2, 0}, 2.0, kCons, 1e-12);
  CHECK(std::abs(0.5 * h.T - p.T) / p.T <= 1e-6);
  CHECK(std::abs(2.0 * d.T - p.T) / p.T <= 1e-6);

  // Negative mu flips the direction but keeps the period.
  const auto n = find_period({0.0, 0.2, 0}, -1.0, kCons, 1e-12);
  CHECK(n.full_period == doctest::Approx(p.full_period).epsilon(1e-6));

  CHECK_THROWS_AS(find_period({0.0, 0.2, 0}, 0.0, kCons, 1e-12), ValidationError);
  CHECK_THROWS_AS(find_period({0.0, 1.2, 0}, 1.0, kCons, 1e-12), ValidationError);
}

TEST_CASE("integrate input validation") {
  CHECK_THROWS_AS(integrate({0.0, 0.2, 0}, 1.0, kCons, -1.0, 1e-12, 0.0), ValidationError);
  CHECK_THROWS_AS(integrate({0.0, 0.2, 0}, 1.0, kCons, 1.0, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(integrate({0.0, -0.1, 0}, 1.0, kCons, 1.0, 1e-12, 0.0), ValidationError);
  const auto z = integrate({0.0, 0.2, 0}, 1.0, kCons, 0.0, 1e-12, 0.0);
  CHECK(z.samples.size() == 1);
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(0.25) == 0.25);
}
