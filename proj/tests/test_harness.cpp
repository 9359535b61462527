#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "harness.hpp"
#include "series.hpp"

using namespace qdnls;
using namespace qdnls::harness;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.M = 5;
  c.N = -4;
  c.grid = 64;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("residual norms examples") {
  const auto q = resonance::build_quad(101, -100);
  auto f = spectral::synthesize_field(q, 0.2, {}, 341, 1024);
  auto r = residual_norms(f, q, 0.5);
  CHECK(r.A_L == 0.0);
  CHECK(r.A_H == 0.0);
  CHECK(r.weighted == 0.0);
  CHECK(r.low_cutoff == 4);

  f.at(300) = 1e-3;
  r = residual_norms(f, q, 0.5);
  CHECK(r.A_L == 0.0);
  CHECK(r.A_H == doctest::Approx(std::pow(1.0 + 300.0 * 300.0, 0.25) * 1e-3).epsilon(1e-14));
  CHECK(r.A_H == doctest::Approx(1.732e-2).epsilon(1e-3));

  f.at(300) = 0.0;
  f.at(2) = 1e-3;
  r = residual_norms(f, q, 0.5);
  CHECK(r.A_L == doctest::Approx(1e-3));
  CHECK(r.weighted == doctest::Approx(std::sqrt(101.0) * 1e-3).epsilon(1e-14));
  CHECK(r.weighted == doctest::Approx(1.005e-2).epsilon(1e-3));

  CHECK_THROWS_AS(residual_norms(f, q, 0.4), ValidationError);
  CHECK_THROWS_AS(residual_norms(f, q, 1.0), ValidationError);
}

TEST_CASE("residual norms are monotone under domination") {
  const auto q = resonance::build_quad(5, -4);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = spectral::make_field(21, 64);
    for (auto& z : f.coeff) z = std::polar(u(rng), 6.0 * u(rng));
    const auto a = residual_norms(f, q, 0.5 + 0.4 * u(rng));
    auto g = f;
    const long xi = static_cast<long>(u(rng) * 43) - 21;
    g.at(xi) *= 1.0 + u(rng);
    const auto b = residual_norms(g, q, a.delta);
    CHECK(b.A_L >= a.A_L);
    CHECK(b.A_H >= a.A_H);
    CHECK(b.weighted >= a.weighted);
  }
}

TEST_CASE("window and regime") {
  CHECK(guaranteed_window(20.0, 1.0, 101) == doctest::Approx(0.1 / 2020.0).epsilon(1e-15));
  CHECK(guaranteed_window(20.0, 1.0, 5) == doctest::Approx(0.1 / 401.0).epsilon(1e-15));
  RunConfig c;
  const auto f = regime_flags(c);
  CHECK(f.m_star_over_lambda == doctest::Approx(101.0 / 20.0));
  CHECK(f.mu_over_m_star_sq == doctest::Approx(1.0 / (101.0 * 101.0)));
  CHECK(initial_phi1({0.3, 0.1, 0.2, -0.1}) == doctest::Approx(0.4));
}

TEST_CASE("run config json") {
  RunConfig c;
  c.mu = 2.5;
  c.phases = {0.1, 0.2, 0.3, 0.4};
  c.variant = reduced::Variant::verbatim;
  const auto back = RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.mu == 2.5);
  CHECK(back.variant == reduced::Variant::verbatim);

  CHECK_THROWS_AS(RunConfig::from_json({{"bogus", 1}}), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_json({{"grid", "big"}}), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_json({{"grid", 1000}}), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_json({{"M", 3}, {"N", -3}}), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_json({{"K0", 1.0}}), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::array()), ValidationError);
  CHECK(RunConfig{}.resolved_cutoff() == 341);
}

TEST_CASE("scaled coupling") {
  // lambda' = 10, M + N = 1: amplitude sqrt(2).
  CHECK(scaled_mu(1.0, 20.0, 10.0) == doctest::Approx(0.25));
  CHECK(scaled_mu(1.0, 20.0, 10.0, true) == doctest::Approx(4.0));
  CHECK(scaled_mu(1.0, 20.0, 40.0) == doctest::Approx(4.0));
  CHECK(scaled_mu(1.0, 20.0, 40.0, true) == doctest::Approx(0.25));
  CHECK(scaled_mu(3.0, 20.0, 20.0) == 3.0);
}

TEST_CASE("amplitude scaling check") {
  const auto c = small_config();
  const auto same = scaling_corollary_check(c, 20.0);
  CHECK(same.amplitude == 1.0);
  CHECK(same.sup_difference == 0.0);

  const auto half = scaling_corollary_check(c, 10.0);
  CHECK(half.amplitude == doctest::Approx(std::sqrt(2.0)));
  CHECK(half.mu_prime == doctest::Approx(0.25));
  CHECK(half.sup_difference <= 1e-10);

  const auto printed = scaling_corollary_check(c, 10.0, true);
  CHECK(printed.mu_prime == doctest::Approx(4.0));
  CHECK(printed.sup_difference > 1e-6);

  CHECK_THROWS_AS(scaling_corollary_check(c, -20.0), ValidationError);
}

TEST_CASE("small PDE run") {
  auto c = small_config();
  c.grid = 256;
  const auto r = run_pde(c);
  CHECK(r.weighted_t0 == 0.0);
  CHECK(r.steps >= 64);
  CHECK(r.dt * r.steps == doctest::Approx(r.window).epsilon(1e-12));
  CHECK(r.drift_mass < 1e-12);
  CHECK(r.drift_energy < 1e-9);
  CHECK(r.drift_momentum < 1e-9);
  CHECK(r.momentum_identity_max < 1e-10);
  CHECK(r.energy_nonnegative);
  CHECK(r.table.columns == series::pde_columns());
  CHECK(r.table.rows.size() == r.times.size());
  CHECK(pde_vs_toy_intensity(c, r) < 1e-2);

  // Same window with the cluster close to the cutoff: mass still holds,
  // energy drifts through truncation.
  const auto coarse = run_pde(small_config());
  CHECK(coarse.drift_mass < 1e-12);
  CHECK(coarse.drift_energy > 100 * r.drift_energy);
}

TEST_CASE("exchange experiment writes deterministic series") {
  const auto base = fs::temp_directory_path() / "qdnls_harness_test";
  fs::remove_all(base);
  auto c = small_config();
  c.out_dir = (base / "a").string();
  const auto ra = run_exchange_experiment(c);
  c.out_dir = (base / "b").string();
  const auto rb = run_exchange_experiment(c);

  CHECK(ra.contains("reduced"));
  CHECK(ra.contains("toy"));
  CHECK(ra.contains("pde"));
  CHECK_FALSE(ra["reduced"]["consistent"].contains("error"));
  CHECK(ra["reduced"]["consistent"]["hamiltonian_drift"].get<double>() < 1e-10);
  for (const char* name : {"reduced_consistent.csv", "reduced_verbatim.csv", "toy_gauged.csv",
                           "toy_full.csv", "exchange.csv", "pde_window.csv", "report.json"}) {
    INFO(name);
    CHECK(fs::exists(base / "a" / name));
    if (std::string(name) != "report.json") CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
  }
  const std::string head = slurp(base / "a" / "reduced_consistent.csv").substr(0, 27);
  CHECK(head == "t,phi1,K,H,het_residual\n0,0");
  fs::remove_all(base);
}

TEST_CASE("csv formatting") {
  series::Table t;
  t.columns = {"a", "b"};
  t.add({0.1, 1.0 / 3.0});
  CHECK(series::to_csv(t) == "a,b\n0.10000000000000001,0.33333333333333331\n");
  CHECK_THROWS(t.add({1.0}));
}
