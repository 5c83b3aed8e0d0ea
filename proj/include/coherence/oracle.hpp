#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coherence/convertibility.hpp"
#include "coherence/measures.hpp"
#include "coherence/states.hpp"

namespace coherence::oracle {

// ── Deterministic random streams ──────────────────────────────────────────────

// splitmix64-based generator with portable uniform and normal draws, so the
// same (seed, trial) pair produces bit-identical instances on every run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for (seed, index); used for per-trial derivation so
  // parallel execution order cannot change results.
  static Rng derived(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  double uniform01();                    // [0, 1)
  double uniform(double a, double b);    // [a, b)
  int uniform_int(int n);                // [0, n)
  double normal();
  Cx normal_cx();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ── Instance generators ───────────────────────────────────────────────────────

// Haar-distributed direction: independent complex standard normals,
// normalized.
PureState random_pure_state(int d, Rng& rng);

// m random pure states with weights from a flat simplex sample (sorted
// uniform spacings).
Ensemble random_ensemble(int d, int m, Rng& rng);

// Product of `depth` random factors, each a permutation, a diagonal phase
// unitary, or an elementary two-outcome step at random block values, with the
// factor products flattened into one Kraus list. Valid by construction.
IncoherentChannel random_incoherent_channel(int d, int depth, Rng& rng);

// ── Brute-force verifiers ─────────────────────────────────────────────────────

// Semantic incoherence: K |i><i| K' diagonal for every basis state i.
bool semantic_incoherent_operator(const KrausOperator& k,
                                  double tol = kTolZero);

// Evaluates the defining capped-tail inequality directly, for every l and
// every cap in a uniform grid over (0, 1] joined with all breakpoints. The
// independent cross-check for the finite breakpoint reduction.
ConversionVerdict grid_check_ensembles(const Ensemble& src,
                                       const Ensemble& dst, int grid_points,
                                       double tol = kTolDecision);

struct TransformationReport {
  bool pass = false;
  double max_weight_err = 0.0;
  double max_state_err = 0.0;  // 1 - overlap modulus over matched members
  std::string detail;          // failure description, empty on pass
};

// Computes branch_outcomes(phi, input), merges the expected members up to
// global phase, greedily matches outcomes to expected members by
// phase-canonical overlap, and reports the worst weight and state deviations.
// Passes iff every member matches and both deviations are <= tol.
TransformationReport verify_transformation(const IncoherentChannel& phi,
                                           const PureState& input,
                                           const Ensemble& expected,
                                           double tol);

// ── Decision vs feasibility fuzzing ───────────────────────────────────────────

enum class CounterexampleKind {
  Hard,                // disagreement a proven direction forbids
  Warning,             // disagreement in the unproven regime
  ToleranceAmbiguous,  // decision margin within 10x tol of the boundary
};

struct FuzzCounterexample {
  int trial = 0;
  bool realizable_pool = false;
  CounterexampleKind kind = CounterexampleKind::Warning;
  double margin = 0.0;
  Ensemble source;
  Ensemble target;
  ConversionVerdict decision;
  bool feasible = false;
};

struct FuzzReport {
  int d = 0;
  int m = 0;
  int n = 0;
  int trials = 0;
  int agreements = 0;
  std::uint64_t seed = 0;
  std::vector<FuzzCounterexample> counterexamples;
  bool hard_failure = false;  // any Hard counterexample recorded
};

// Per trial, generates an instance pair from one of two pools — realizable by
// construction (the target built by pushing each source member through a
// random incoherent channel and mixing) or unconstrained random — and
// compares the breakpoint decision against transition-matrix feasibility.
// Realizable instances must come out convertible and feasible; on random
// instances the two verdicts must agree. Feasible-but-not-convertible is
// always a hard counterexample; convertible-but-infeasible is hard only where
// the equivalence is on firm ground (d <= 3 and both ensembles of size <= 2)
// and a recorded warning elsewhere. Near-boundary disagreements are
// classified tolerance-ambiguous. Trials are independent and derive their
// streams from (seed, trial), so jobs > 1 changes nothing but wall time.
FuzzReport fuzz_ensemble_conversion(int d, int m, int n, int trials,
                                    std::uint64_t seed, int jobs = 1,
                                    double tol = kTolDecision,
                                    double feas_tol = 1e-8);

// ── Property-test support ─────────────────────────────────────────────────────

// The measure grid used by monotonicity tests: every tail measure for
// l = 2..d, and every capped measure at the instance's breakpoints (the tail
// sums of the supplied states) joined with a fixed cap ladder.
std::vector<MeasureId> measure_test_grid(const std::vector<PureState>& states);

}  // namespace coherence::oracle
