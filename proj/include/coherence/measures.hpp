#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coherence/states.hpp"

namespace coherence {

// ── Measure identifiers ───────────────────────────────────────────────────────

enum class MeasureKind { TailSum, CappedTail };

// TailSum:    sum of the d-l+1 smallest profile entries, l in [2, d].
// CappedTail: same sum with each entry x replaced by min(x/k, 1), k in (0, 1].
struct MeasureId {
  MeasureKind kind = MeasureKind::TailSum;
  int l = 2;
  double k = 1.0;  // meaningful for CappedTail only

  static MeasureId tail(int l);
  static MeasureId capped(int l, double k);
};

// ── Pure-state evaluations ────────────────────────────────────────────────────

// Sort entries descending and sum positions l..d (1-based).
double tail_sum(const ProbVector& x, int l);

// Sort descending and sum min(entry/k, 1) over positions l..d. Coincides with
// tail_sum when k = 1 (every tail entry is at most 1/l < 1).
double capped_tail(const ProbVector& x, int l, double k);

double pure_coherence(const PureState& psi, const MeasureId& m);

// Weighted average of the member coherences.
double ensemble_coherence(const Ensemble& ens, const MeasureId& m);

// The vector (tail_sum(profile, l))_{l=2..d}. Entrywise dominance of
// fingerprints decides pure-to-pure convertibility.
std::vector<double> coherence_fingerprint(const PureState& psi);

// ── Mixed states: heuristic convex-roof upper bound ───────────────────────────

struct ConvexRoofEstimate {
  double value;
  Ensemble witness;
};

// Searches decompositions of rho and returns the lowest ensemble-average
// found together with the witnessing ensemble. Decompositions are generated
// from the eigendecomposition mixed by random isometries over purification
// degrees of freedom, so the result is an upper bound on the convex roof; it
// is exact on pure and on incoherent inputs. Whether the true minimum is
// attained by any finite ensemble is unknown, so no API here claims
// optimality. When a hint decomposition of the same rho is supplied, its
// average joins the candidate set, making the result never worse than the
// hint. Deterministic given the seed.
ConvexRoofEstimate convex_roof_upper_bound(
    const DensityMatrix& rho, const MeasureId& m, int trials, std::uint64_t seed,
    const std::optional<Ensemble>& hint = std::nullopt);

}  // namespace coherence
