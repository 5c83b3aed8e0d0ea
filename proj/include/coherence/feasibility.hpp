#pragma once

#include <optional>
#include <vector>

#include "coherence/states.hpp"

namespace coherence {

inline constexpr double kTolFeasible = 1e-8;

// ── Small dense linear feasibility ────────────────────────────────────────────

struct LinearConstraint {
  std::vector<double> coeffs;  // length num_vars
  double rhs = 0.0;
};

struct VariableBounds {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

// equalities: coeffs . x = rhs;  inequalities: coeffs . x <= rhs.
// Lower bounds must be finite; upper bounds may be +inf.
struct LinearProgram {
  int num_vars = 0;
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> inequalities;
  std::vector<VariableBounds> bounds;
};

// Phase-1 simplex with Bland's rule: returns a point satisfying every
// constraint within tol, or nullopt when the phase-1 objective cannot reach
// zero. Deterministic given the input. Malformed programs (non-finite data,
// mismatched sizes, a failed ratio test) throw std::invalid_argument or, for
// states a well-formed instance cannot reach, std::runtime_error.
std::optional<std::vector<double>> solve_feasibility(const LinearProgram& lp,
                                                     double tol = kTolFeasible);

// ── Transition matrices between ensembles ─────────────────────────────────────

// Finds a row-stochastic t (m x n) with weighted column sums matching the
// target weights and, for every source member j and every l, the average
// target tail sum under row j bounded by the source tail sum. Those are
// exactly the conditions under which each source member can reach its
// conditional ensemble and the mixture reproduces the target. Columns with
// zero target weight are fixed to zero before solving. Returns nullopt when
// the program is infeasible; any returned matrix has been re-verified against
// every constraint within tol.
std::optional<TransitionMatrix> find_transition_matrix(
    const Ensemble& src, const Ensemble& dst, double tol = kTolFeasible);

}  // namespace coherence
