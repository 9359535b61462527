#include "resonance.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "errors.hpp"

namespace qdnls::resonance {

namespace {

Freq abs_freq(Freq x) { return x < 0 ? -x : x; }

std::array<Freq, 3> sorted3(Freq a, Freq b, Freq c) {
  std::array<Freq, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

bool ResonantQuad::contains(Freq xi) const {
  return xi == alpha1 || xi == alpha2 || xi == beta1 || xi == beta2;
}

ResonantQuad build_quad(Freq m, Freq n) {
  if (m + n == 0) {
    throw ValidationError("resonant cluster requires lambda (M+N) > 0 with lambda = 20 (M+N); "
                          "M + N = 0 makes it unsatisfiable (M=" +
                          std::to_string(m) + ", N=" + std::to_string(n) + ")");
  }
  ResonantQuad q;
  q.m = m;
  q.n = n;
  q.alpha1 = m;
  q.alpha2 = -3 * m - n;
  q.beta1 = n;
  q.beta2 = -3 * n - m;
  q.lambda = 20.0 * static_cast<double>(m + n);
  q.m_star = std::max(abs_freq(m), abs_freq(n));
  return q;
}

NondegeneracyReport check_nondegeneracy(const ResonantQuad& quad) {
  const auto modes = quad.modes();
  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) pairs.push_back({i, j});
  }
  NondegeneracyReport report;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t r = p + 1; r < pairs.size(); ++r) {
      const auto [a, b] = pairs[p];
      const auto [c, d] = pairs[r];
      const Freq s1 = modes[a] + modes[b];
      const Freq s2 = modes[c] + modes[d];
      if (s1 != s2) continue;
      report.nondegenerate = false;
      report.violations.push_back(
          {pairs[p], pairs[r], {modes[a], modes[b]}, {modes[c], modes[d]}, s1});
    }
  }
  return report;
}

Freq cubic_phase(Freq xi1, Freq xi2, Freq xi3) {
  const Freq xi = xi1 - xi2 + xi3;
  const Freq product = 2 * (xi1 - xi2) * (xi1 - xi);
  const Freq squares = xi1 * xi1 - xi2 * xi2 + xi3 * xi3 - xi * xi;
  if (product != squares || product != 2 * (xi3 - xi2) * (xi3 - xi)) {
    throw std::logic_error("cubic phase identity failed for (" + std::to_string(xi1) + ", " +
                           std::to_string(xi2) + ", " + std::to_string(xi3) + ")");
  }
  return product;
}

std::string to_string(SextupleClass c) {
  switch (c) {
    case SextupleClass::diagonal: return "diagonal";
    case SextupleClass::resonant_disjoint: return "resonant-disjoint";
    case SextupleClass::non_resonant: return "non-resonant";
  }
  return "unknown";
}

bool gap_is_small(Freq gap, Freq m_star) { return 4 * abs_freq(gap) <= m_star * m_star; }

SextupleReport classify_sextuple(std::span<const Freq, 6> xis,
                                 const std::optional<ResonantQuad>& quad) {
  SextupleReport r;
  const auto odd = sorted3(xis[0], xis[2], xis[4]);
  const auto even = sorted3(xis[1], xis[3], xis[5]);

  r.sum_defect = (xis[0] + xis[2] + xis[4]) - (xis[1] + xis[3] + xis[5]);
  r.quintic_gap = xis[0] * xis[0] - xis[1] * xis[1] + xis[2] * xis[2] - xis[3] * xis[3] +
                  xis[4] * xis[4] - xis[5] * xis[5];
  r.multisets_equal = odd == even;
  r.multisets_disjoint = std::none_of(odd.begin(), odd.end(), [&](Freq x) {
    return std::find(even.begin(), even.end(), x) != even.end();
  });

  std::array<Freq, 6> all{xis[0], xis[1], xis[2], xis[3], xis[4], xis[5]};
  std::sort(all.begin(), all.end());
  r.support_cardinality =
      static_cast<int>(std::unique(all.begin(), all.end()) - all.begin());

  if (r.sum_defect != 0 || r.quintic_gap != 0) {
    r.classification = SextupleClass::non_resonant;
  } else if (r.multisets_equal) {
    r.classification = SextupleClass::diagonal;
  } else {
    r.classification = SextupleClass::resonant_disjoint;
    r.lemma_disjoint_holds = r.multisets_disjoint && r.support_cardinality >= 4;
  }

  if (quad) {
    r.dichotomy_checked = true;
    const bool five_in_cluster = std::all_of(xis.begin(), xis.begin() + 5,
                                             [&](Freq x) { return quad->contains(x); });
    r.dichotomy_applicable =
        five_in_cluster && r.sum_defect == 0 && gap_is_small(r.quintic_gap, quad->m_star);
    if (r.dichotomy_applicable) {
      r.dichotomy_holds = r.multisets_equal || quad->contains(xis[5]);
    }
  }
  return r;
}

DichotomyScan scan_dichotomy(const ResonantQuad& quad) {
  const auto modes = quad.modes();
  DichotomyScan scan;
  std::array<Freq, 6> xi{};
  for (int code = 0; code < 4 * 4 * 4 * 4 * 4; ++code) {
    int c = code;
    for (int j = 0; j < 5; ++j) {
      xi[j] = modes[c % 4];
      c /= 4;
    }
    xi[5] = xi[0] - xi[1] + xi[2] - xi[3] + xi[4];
    const auto r = classify_sextuple(std::span<const Freq, 6>(xi), quad);
    ++scan.tuples;
    if (!r.dichotomy_applicable) continue;
    ++scan.applicable;
    if (!r.dichotomy_holds) {
      ++scan.violations;
      scan.violating.push_back(xi);
    }
  }
  return scan;
}

Freq raw_quintic_gap(const ResonantQuad& q) {
  const Freq omega = 2 * q.alpha1 * q.alpha1 + q.alpha2 * q.alpha2 - 2 * q.beta1 * q.beta1 -
                     q.beta2 * q.beta2;
  if (omega != 10 * (q.m + q.n) * (q.m - q.n)) {
    throw std::logic_error("raw quintic gap disagrees with 10 (M+N)(M-N)");
  }
  return omega;
}

double gauge_corrected_gap(const ResonantQuad& q, double lambda_used) {
  return 10.0 * static_cast<double>(q.alpha1 - q.beta1) *
         (static_cast<double>(q.alpha1 + q.beta1) - lambda_used / 20.0);
}

bool cluster_identities_hold(const ResonantQuad& q) {
  const bool sum_identity = 4 * q.alpha1 + 4 * q.beta1 + q.alpha2 + q.beta2 == 0;
  const bool diff_identity = 2 * q.alpha1 - 2 * q.beta1 + q.alpha2 - q.beta2 == 0;
  return sum_identity && diff_identity;
}

}  // namespace qdnls::resonance
