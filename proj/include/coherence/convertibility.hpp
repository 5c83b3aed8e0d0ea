#pragma once

#include <vector>

#include "coherence/measures.hpp"
#include "coherence/states.hpp"

namespace coherence {

inline constexpr double kTolDecision = 1e-9;

// One failed comparison: the measure, the source-side value and the
// target-side value it had to dominate.
struct Violation {
  MeasureId measure;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConversionVerdict {
  bool convertible = false;
  std::vector<Violation> violations;  // empty iff convertible; worst per l
};

// Pure-to-pure: convertible iff every tail sum of the source profile
// dominates the target's, equivalently the source profile is majorized by
// the target profile. Comparisons are additive: lhs >= rhs - tol.
ConversionVerdict can_convert_pure_pure(const PureState& src,
                                        const PureState& dst,
                                        double tol = kTolDecision);

// Pure-to-ensemble: convertible iff every tail sum of the source dominates
// the weighted average of the target members' tail sums.
ConversionVerdict can_convert_pure_ensemble(const PureState& src,
                                            const Ensemble& dst,
                                            double tol = kTolDecision);

// The caps that matter for the ensemble decision at a given l: the sorted,
// deduplicated set of member tail sums from both ensembles, restricted to
// (0, 1], with 1 always included.
std::vector<double> breakpoints(const Ensemble& src, const Ensemble& dst,
                                int l);

// Ensemble-to-ensemble. The defining condition compares weighted averages of
// the capped tail measures for every cap k in (0, 1]. Multiplying both sides
// by k > 0 turns the condition into nonnegativity of a piecewise-linear
// function of k that vanishes at k = 0 and has kinks exactly at the member
// tail sums, so checking the kinks and k = 1 is equivalent to checking all
// of (0, 1]. Only those finitely many caps are evaluated here; the reduction
// is cross-validated against a dense-grid oracle in the test suite. Each
// check reads sum_j p_j min(S_j, k) >= sum_i q_i min(T_i, k) - tol.
ConversionVerdict can_convert_ensembles(const Ensemble& src,
                                        const Ensemble& dst,
                                        double tol = kTolDecision);

// min over all (l, k) of lhs - rhs in the k-multiplied form; negative means
// some comparison is violated. Used to classify near-boundary instances.
double conversion_margin(const Ensemble& src, const Ensemble& dst);

// Constructive reduction helper: given weights p, values a_prime and a target
// a with sum p_i a_prime_i >= a, returns values a_i <= a_prime_i with
// sum p_i a_i = a. Scans ascending indices, lowering each value toward zero
// until the weighted sum lands on a. Throws when infeasible.
std::vector<double> reduce_to_target(const std::vector<double>& p,
                                     const std::vector<double>& a_prime,
                                     double a, double tol = kTolZero);

}  // namespace coherence
