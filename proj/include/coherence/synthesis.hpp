#pragma once

#include <vector>

#include "coherence/feasibility.hpp"
#include "coherence/states.hpp"

namespace coherence {

// ── Elementary two-coordinate step ────────────────────────────────────────────

struct TwoOutcomeStep {
  double q;  // probability of the first outcome
  KrausOperator k1;
  KrausOperator k2;
};

// Two-outcome measurement acting on coordinates (a, b). Block source masses
// (x1, x2) and block target masses (y1, y2) must satisfy x1 + x2 = y1 + y2
// and y2 <= x1 <= y1. With q = (x1 - y2)/(y1 - y2),
//   k1 = diag(sqrt(q y1/x1), sqrt(q y2/x2)) on the block, sqrt(q) elsewhere,
//   k2 = swap(a,b) . diag(sqrt((1-q) y2/x1), sqrt((1-q) y1/x2)), sqrt(1-q)
//        elsewhere,
// so q y1 + (1-q) y2 = x1 and q y2 + (1-q) y1 = x2 hold identically, making
// k1'k1 + k2'k2 = I, and both outcomes land on the block target profile.
// Coordinates with mass <= kTolZero in a denominator contribute zero entries.
TwoOutcomeStep two_outcome_step(int d, int a, int b, double x1, double x2,
                                double y1, double y2);

// ── Pure-to-pure synthesis ────────────────────────────────────────────────────

// Builds an incoherent channel mapping |src><src| to |dst><dst| whenever the
// source profile is majorized by the target profile. Construction: strip the
// source phases with a diagonal unitary, sort both profiles descending with
// permutations, walk a chain of at most d-1 elementary two-coordinate steps
// (each undoing one T-transform of the majorization), then unsort and restore
// the target phases. The chain's branch tree (at most 2^(d-1) paths) is
// composed step by step and reduced to a convex combination of at most d
// monomial operators, so the flat list — including completeness repairs for
// dead coordinates — never exceeds max(1, 2(d-1)) operators. Throws
// std::domain_error when majorization fails.
IncoherentChannel synthesize_pure_pure(const PureState& src,
                                       const PureState& dst,
                                       double tol = 1e-9);

// ── Ensemble splitting ────────────────────────────────────────────────────────

// The pure state whose profile is the weight-averaged descending-sorted
// profile of the ensemble members: the intermediate target that a source is
// first concentrated into before being split into the ensemble.
PureState pooled_state(const Ensemble& ens);

// The measurement splitting the pooled state into the ensemble: one monomial
// operator per member, built from the member's sorted amplitudes divided by
// the pooled amplitudes and permuted back into the member's original order,
// plus completeness repairs |1><i| for coordinates the pooled state does not
// support. Branch j fires with probability w_j and outputs member j exactly.
// Requires pooled = pooled_state(ens).
IncoherentChannel splitter_channel(const PureState& pooled,
                                   const Ensemble& ens);

// ── Pure-to-ensemble and ensemble-to-ensemble synthesis ───────────────────────

// Composition of the concentrate step (src -> pooled_state(dst)) with the
// splitter, flattened into a single Kraus list. The admissibility condition
// is the tail-sum dominance of can_convert_pure_ensemble; throws
// std::domain_error when it fails.
IncoherentChannel synthesize_pure_ensemble(const PureState& src,
                                           const Ensemble& dst,
                                           double tol = 1e-9);

struct EnsembleMapPlan {
  TransitionMatrix transition;
  // One channel per source member j, sending member j to the conditional
  // ensemble { t(j,i), target_i : t(j,i) > threshold }.
  std::vector<IncoherentChannel> per_source;
};

// Finds a transition matrix and synthesizes the per-source channels. The row
// constraints of the transition program imply each per-source synthesis is
// admissible; that is re-checked defensively. Throws std::domain_error when
// no transition matrix exists.
EnsembleMapPlan synthesize_ensemble_map(const Ensemble& src,
                                        const Ensemble& dst,
                                        double tol = 1e-9,
                                        double feas_tol = kTolFeasible);

}  // namespace coherence
