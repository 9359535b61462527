#pragma once

// Resonant four-mode cluster Lambda(M,N) and exact integer oracles for the
// phase and resonance identities the model hierarchy relies on.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qdnls::resonance {

using Freq = std::int64_t;

/// Mode order used everywhere in the project: alpha1, alpha2, beta1, beta2.
enum ModeIndex : int { kAlpha1 = 0, kAlpha2 = 1, kBeta1 = 2, kBeta2 = 3 };

struct ResonantQuad {
  Freq m = 0;
  Freq n = 0;
  Freq alpha1 = 0;
  Freq alpha2 = 0;
  Freq beta1 = 0;
  Freq beta2 = 0;
  double lambda = 0.0;  // 20 (M + N)
  Freq m_star = 0;      // max(|M|, |N|)

  std::array<Freq, 4> modes() const { return {alpha1, alpha2, beta1, beta2}; }
  bool contains(Freq xi) const;
};

/// Throws ValidationError when M + N = 0.
ResonantQuad build_quad(Freq m, Freq n);

struct PairCollision {
  std::array<int, 2> first;   // mode indices
  std::array<int, 2> second;
  std::array<Freq, 2> first_values;
  std::array<Freq, 2> second_values;
  Freq sum = 0;
};

struct NondegeneracyReport {
  bool nondegenerate = true;
  std::vector<PairCollision> violations;
};

/// Brute force over all unordered index pairs (with repetition) drawn from the
/// ordered quadruple. Duplicate frequencies show up as collisions.
NondegeneracyReport check_nondegeneracy(const ResonantQuad& quad);

/// 2 (xi1 - xi2)(xi1 - xi) with xi = xi1 - xi2 + xi3. Verifies the
/// square-difference identity exactly; throws std::logic_error if it fails.
Freq cubic_phase(Freq xi1, Freq xi2, Freq xi3);

enum class SextupleClass { diagonal, resonant_disjoint, non_resonant };

std::string to_string(SextupleClass c);

struct SextupleReport {
  SextupleClass classification = SextupleClass::non_resonant;
  int support_cardinality = 0;
  Freq sum_defect = 0;     // (xi1 + xi3 + xi5) - (xi2 + xi4 + xi6)
  Freq quintic_gap = 0;    // xi1^2 - xi2^2 + xi3^2 - xi4^2 + xi5^2 - xi6^2
  bool multisets_equal = false;
  bool multisets_disjoint = false;
  // For resonant sextuples: disjoint odd/even multisets with support >= 4.
  bool lemma_disjoint_holds = true;

  // Populated only when a cluster is supplied.
  bool dichotomy_checked = false;
  bool dichotomy_applicable = false;  // xi1..xi5 in Lambda, sums balance, small gap
  bool dichotomy_holds = true;        // equal multisets or xi6 in Lambda
};

/// `xis` is (xi1, ..., xi6); odd positions form the left multiset.
SextupleReport classify_sextuple(std::span<const Freq, 6> xis,
                                 const std::optional<ResonantQuad>& quad = std::nullopt);

/// Small-gap threshold of the dichotomy check: |gap| <= M*^2 / 4.
bool gap_is_small(Freq gap, Freq m_star);

struct DichotomyScan {
  std::size_t tuples = 0;
  std::size_t applicable = 0;
  std::size_t violations = 0;
  std::vector<std::array<Freq, 6>> violating;
};

/// Exhaustive scan of all 4^5 ordered choices xi1..xi5 from the cluster with
/// xi6 forced by the sum constraint.
DichotomyScan scan_dichotomy(const ResonantQuad& quad);

/// Omega = 2 alpha1^2 + alpha2^2 - 2 beta1^2 - beta2^2; self-checks the
/// closed form 10 (M + N)(M - N).
Freq raw_quintic_gap(const ResonantQuad& quad);

/// 10 (alpha1 - beta1)(alpha1 + beta1 - lambda_used / 20).
double gauge_corrected_gap(const ResonantQuad& quad, double lambda_used);

/// Linear identities 2a1 + 2b1 + (a2 + b2)/2 = 0 and 2a1 - 2b1 + a2 - b2 = 0,
/// evaluated in integers (the first one doubled).
bool cluster_identities_hold(const ResonantQuad& quad);

}  // namespace qdnls::resonance
