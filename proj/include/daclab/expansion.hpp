#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "daclab/rng.hpp"

#include <json.hpp>

namespace daclab::expansion {

/// Subsets of a finite space as bitmasks; the exhaustive checks cap the
/// space at 22 points, so 32 bits suffice.
using PointSet = std::uint32_t;

PointSet mask_from_indices(const std::vector<int>& idx);
std::vector<int> indices_from_mask(PointSet s);

/// Finite probability space with class labels and augmentation sets A(x).
struct FiniteSpace {
  std::vector<std::string> points;
  std::vector<double> prob;                // sums to 1, entries > 0
  std::vector<int> class_of;               // labels in [0, K)
  std::vector<std::vector<int>> aug_sets;  // A(x) as point indices, x in A(x)

  int size() const { return static_cast<int>(points.size()); }
  int num_classes() const;
  double mass(PointSet s) const;
  PointSet class_mask(int k) const;

  /// Strict expansion-based augmentation requires {x} properly contained
  /// in A(x); degenerate A(x) = {x} fixtures are allowed but reported.
  bool strict_augmentation() const;

  /// Throws when the invariants (membership, class invariance,
  /// normalized positive probabilities) fail.
  void validate() const;

  nlohmann::json to_json() const;
  static FiniteSpace from_json(const nlohmann::json& j);
};

struct ClassifierTable {
  std::vector<int> h;  // predicted label per point
};

/// NB(S) = union over x in S of { x' : A(x) intersects A(x') }.
PointSet neighborhood(const FiniteSpace& space, PointSet s);

struct CheckOptions {
  int max_exhaustive_points = 22;
  int samples = 10000;  // sampled mode beyond the exhaustive cap
  std::uint64_t seed = 0;
};

struct ExpansionCheckResult {
  bool holds = true;
  bool exhaustive = true;
  std::int64_t checked = 0;
  std::optional<PointSet> witness;
  std::optional<int> witness_class;  // multiplicative check only
};

/// (q, xi)-constant expansion: every S with P(S) >= q and
/// P(S & X_k) <= 1/2 for all k satisfies P(NB(S)) >= min{P(S), xi} + P(S).
ExpansionCheckResult check_constant_expansion(const FiniteSpace& space,
                                              double q, double xi,
                                              const CheckOptions& opts = {});

/// (a, c)-multiplicative expansion, checked class by class (augmentations
/// never cross classes, so per-class subsets are the worst case).
/// The c-expansion of the main definition is a = 1/2.
ExpansionCheckResult check_multiplicative_expansion(
    const FiniteSpace& space, double a, double c, const CheckOptions& opts = {});

struct MinoritySet {
  PointSet m = 0;
  double p_m = 0.0;
  std::vector<int> majority;  // per-class majority label of h
};

/// Class-wise majority labels (ties to the smallest label), minority set
/// M and its mass.
MinoritySet minority_set(const FiniteSpace& space, const ClassifierTable& h);

/// P-mass of the consistency-violation set
/// { x : exists x' in A(x) with h(x') != h(x) }.
double mu_of(const FiniteSpace& space, const ClassifierTable& h);

struct LemmaC3Report {
  double mu = 0.0;
  double p_m = 0.0;
  bool strict_augmentation = true;

  // Branch (a): (q, 2mu)-constant expansion premise with q < 1/2.
  bool a_applicable = false;
  std::string a_skip_reason;
  double a_bound = 0.0;  // max{q, 2mu}
  bool a_holds = true;

  // Branch (b): (1/2, c)-multiplicative premise with c > 1 + 4mu.
  bool b_applicable = false;
  std::string b_skip_reason;
  double b_bound = 0.0;  // max{2mu/(c-1), 2mu}
  bool b_holds = true;

  bool mu_within_margin = false;  // mu <= (c-1)/4

  bool any_violation() const {
    return (a_applicable && !a_holds) || (b_applicable && !b_holds);
  }
};

/// Checks the minority-set bounds P(M) <= max{q, 2mu} (constant branch)
/// and P(M) <= max{2mu/(c-1), 2mu} (multiplicative branch) whenever the
/// matching expansion premise holds on the space.
LemmaC3Report verify_lemma_c3(const FiniteSpace& space, const ClassifierTable& h,
                              double q, double c);

/// Random small spaces with class-invariant chain-style augmentations,
/// used by the fuzzing harness and tests.
FiniteSpace random_space(int max_points, int num_classes, Rng& rng);
ClassifierTable random_classifier(const FiniteSpace& space, Rng& rng);

}  // namespace daclab::expansion
