#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>
#include <set>

#include "errors.hpp"
#include "resonance.hpp"

using namespace qdnls;
using namespace qdnls::resonance;

namespace {

// Independent count of pair-sum collisions over unordered pairs with repetition.
int brute_collisions(const std::array<Freq, 4>& v) {
  std::vector<std::pair<std::array<int, 2>, Freq>> pairs;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) pairs.push_back({{i, j}, v[i] + v[j]});
  int c = 0;
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b)
      if (pairs[a].second == pairs[b].second) ++c;
  return c;
}

}  // namespace

TEST_CASE("build_quad examples") {
  const auto q = build_quad(5, -4);
  CHECK(q.modes() == std::array<Freq, 4>{5, -11, -4, 7});
  CHECK(q.lambda == 20.0);
  CHECK(q.m_star == 5);

  const auto r = build_quad(101, -100);
  CHECK(r.modes() == std::array<Freq, 4>{101, -203, -100, 199});
  CHECK(r.lambda == 20.0);
  CHECK(r.m_star == 101);
  CHECK(r.contains(199));
  CHECK_FALSE(r.contains(200));

  CHECK_THROWS_AS(build_quad(1, -1), ValidationError);
  CHECK_THROWS_AS(build_quad(0, 0), ValidationError);
}

TEST_CASE("non-degeneracy") {
  CHECK(check_nondegeneracy(build_quad(5, -4)).nondegenerate);
  CHECK(check_nondegeneracy(build_quad(101, -100)).nondegenerate);

  const auto rep = check_nondegeneracy(build_quad(1, 0));
  CHECK_FALSE(rep.nondegenerate);
  bool found = false;
  for (const auto& v : rep.violations) {
    CHECK(v.first_values[0] + v.first_values[1] == v.sum);
    CHECK(v.second_values[0] + v.second_values[1] == v.sum);
    std::multiset<Freq> a(v.first_values.begin(), v.first_values.end());
    std::multiset<Freq> b(v.second_values.begin(), v.second_values.end());
    if ((a == std::multiset<Freq>{-1, 1} && b == std::multiset<Freq>{0, 0}) ||
        (b == std::multiset<Freq>{-1, 1} && a == std::multiset<Freq>{0, 0}))
      found = true;
  }
  CHECK(found);
}

TEST_CASE("non-degeneracy agrees with a brute-force count on random quads") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<Freq> d(-60, 60);
  for (int k = 0; k < 500; ++k) {
    const Freq m = d(rng), n = d(rng);
    if (m + n == 0) continue;
    const auto q = build_quad(m, n);
    const int c = brute_collisions(q.modes());
    const auto rep = check_nondegeneracy(q);
    CHECK(rep.nondegenerate == (c == 0));
    CHECK(static_cast<int>(rep.violations.size()) == c);
  }
}

TEST_CASE("cubic phase") {
  // 2 (xi1 - xi2)(xi1 - xi), xi = xi1 - xi2 + xi3
  CHECK(cubic_phase(101, -100, -203) == 41406);
  CHECK(cubic_phase(3, 3, 7) == 0);
}

TEST_CASE("sextuple classification") {
  const std::array<Freq, 6> rd{0, 1, 3, 1, 3, 4};  // {0,3,3 | 1,1,4}
  const auto a = classify_sextuple(rd);
  CHECK(a.classification == SextupleClass::resonant_disjoint);
  CHECK(a.support_cardinality == 4);
  CHECK(a.sum_defect == 0);
  CHECK(a.quintic_gap == 0);
  CHECK(to_string(a.classification) == "resonant-disjoint");

  const std::array<Freq, 6> dg{2, 5, 5, 7, 7, 2};  // {2,5,7 | 5,7,2}
  const auto b = classify_sextuple(dg);
  CHECK(b.classification == SextupleClass::diagonal);
  CHECK(b.multisets_equal);

  const std::array<Freq, 6> nr{0, 1, 0, 0, 2, 1};
  CHECK(classify_sextuple(nr).classification == SextupleClass::non_resonant);
}

TEST_CASE("resonant sextuples from random integers are disjoint or diagonal") {
  // Fixed-seed property: any sum- and square-balanced sextuple has equal or
  // disjoint multisets.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Freq> d(-6, 6);
  int resonant = 0;
  for (int k = 0; k < 200000; ++k) {
    std::array<Freq, 6> x;
    for (auto& v : x) v = d(rng);
    const auto r = classify_sextuple(x);
    if (r.sum_defect != 0 || r.quintic_gap != 0) continue;
    ++resonant;
    CHECK((r.multisets_equal || r.multisets_disjoint));
    CHECK(r.lemma_disjoint_holds);
  }
  CHECK(resonant > 100);
}

TEST_CASE("dichotomy scan on the desk-scale cluster") {
  const auto s = scan_dichotomy(build_quad(101, -100));
  CHECK(s.tuples == 1024);
  CHECK(s.applicable > 0);
  CHECK(s.violations == 0);
  CHECK(s.violating.empty());
}

TEST_CASE("small-gap threshold") {
  CHECK(gap_is_small(0, 101));
  CHECK(gap_is_small(2550, 101));   // 4 * 2550 = 10200 <= 10201
  CHECK_FALSE(gap_is_small(2551, 101));
  CHECK(gap_is_small(-2550, 101));
}

TEST_CASE("gaps") {
  const auto q = build_quad(5, -4);
  CHECK(raw_quintic_gap(q) == 90);
  CHECK(gauge_corrected_gap(q, 20.0) == 0.0);
  CHECK(gauge_corrected_gap(q, 40.0) == -90.0);

  const auto r = build_quad(101, -100);
  const auto m = r.modes();
  CHECK(raw_quintic_gap(r) == 2 * m[0] * m[0] + m[1] * m[1] - 2 * m[2] * m[2] - m[3] * m[3]);
  CHECK(raw_quintic_gap(r) == 2010);
  CHECK(gauge_corrected_gap(r, 20.0) == 0.0);
}

TEST_CASE("cluster identities on random quads") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<Freq> d(-100000, 100000);
  for (int k = 0; k < 2000; ++k) {
    const Freq m = d(rng), n = d(rng);
    if (m + n == 0) continue;
    const auto q = build_quad(m, n);
    CHECK(cluster_identities_hold(q));
    // momentum balance of the exchange: 2 a1 + a2 = 2 b1 + b2
    CHECK(2 * q.alpha1 + q.alpha2 == 2 * q.beta1 + q.beta2);
    CHECK(raw_quintic_gap(q) == 10 * (m + n) * (m - n));
  }
}
