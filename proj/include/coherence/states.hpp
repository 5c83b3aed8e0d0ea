#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coherence {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Default numerical tolerances. Every predicate and constructor that uses one
// accepts an override.
inline constexpr double kTolZero = 1e-12;      // structural zero tests
inline constexpr double kTolSum = 1e-9;        // probability / norm sums
inline constexpr double kTolComplete = 1e-9;   // channel completeness residual

// ── Probability vectors ───────────────────────────────────────────────────────

// A point of the probability simplex: nonnegative entries summing to one.
// Entries within tol_zero below zero are clamped to zero at construction.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> entries, double tol_zero = kTolZero,
                      double tol_sum = kTolSum);

  int dim() const { return static_cast<int>(entries_.size()); }
  double operator[](int i) const { return entries_[static_cast<size_t>(i)]; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  std::vector<double> entries_;
};

// ── Pure states ───────────────────────────────────────────────────────────────

// Complex amplitude vector in the fixed incoherent basis, unit norm.
class PureState {
 public:
  explicit PureState(Vec amplitudes, double tol_sum = kTolSum);

  int dim() const { return static_cast<int>(amp_.size()); }
  Cx operator[](int i) const { return amp_(i); }
  const Vec& amplitudes() const { return amp_; }

 private:
  Vec amp_;
};

PureState basis_state(int d, int i);
PureState uniform_state(int d);

// The vector of squared amplitude moduli.
ProbVector profile(const PureState& psi);

// Canonical global phase: the first entry with modulus > tol is made real
// positive, so equality up to phase becomes plain entrywise comparison.
PureState phase_canonical(const PureState& psi, double tol = kTolZero);

// |<a|b>|
double overlap_modulus(const PureState& a, const PureState& b);

// ── Ensembles ─────────────────────────────────────────────────────────────────

struct EnsembleMember {
  double weight;
  PureState state;
};

// Weighted list of pure states. Weights are positive and sum to one; members
// with weight <= tol_zero are dropped at construction.
class Ensemble {
 public:
  explicit Ensemble(std::vector<EnsembleMember> members,
                    double tol_zero = kTolZero, double tol_sum = kTolSum);

  static Ensemble singleton(PureState psi);

  int dim() const { return members_.front().state.dim(); }
  int size() const { return static_cast<int>(members_.size()); }
  const EnsembleMember& operator[](int j) const {
    return members_[static_cast<size_t>(j)];
  }
  const std::vector<EnsembleMember>& members() const { return members_; }

 private:
  std::vector<EnsembleMember> members_;
};

// ── Density matrices ──────────────────────────────────────────────────────────

// Hermitian, positive semidefinite, unit trace.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat matrix, double tol_zero = kTolZero,
                         double tol_sum = kTolSum);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Mat& matrix() const { return mat_; }

 private:
  Mat mat_;
};

DensityMatrix pure_density(const PureState& psi);

// Sum of w_j |phi_j><phi_j| over the ensemble.
DensityMatrix density_of(const Ensemble& ens);

// ── Kraus operators and channels ──────────────────────────────────────────────

// A single square Kraus operator. Incoherence is a predicate, not a
// constructor constraint.
class KrausOperator {
 public:
  explicit KrausOperator(Mat matrix);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Mat& matrix() const { return mat_; }

 private:
  Mat mat_;
};

// True iff every off-diagonal entry has modulus <= tol.
bool is_incoherent_state(const DensityMatrix& rho, double tol = kTolZero);

// Structural criterion: each column has at most one entry with modulus > tol.
// Equivalent to the semantic condition that K maps every incoherent state to
// an (unnormalized) incoherent state; the equivalence is checked against the
// semantic oracle in the test suite rather than assumed silently.
bool is_incoherent_operator(const KrausOperator& k, double tol = kTolZero);

struct ChannelCheck {
  bool complete = false;
  double completeness_residual = 0.0;  // max |entry| of sum K'K - I
  bool all_incoherent = false;
  int first_bad_operator = -1;  // -1 when all operators pass
  bool ok() const { return complete && all_incoherent; }
};

ChannelCheck check_channel(const std::vector<KrausOperator>& kraus,
                           double tol_complete = kTolComplete,
                           double tol_zero = kTolZero);

// A complete list of structurally incoherent Kraus operators, all of one
// dimension. Construction validates both properties.
class IncoherentChannel {
 public:
  explicit IncoherentChannel(std::vector<KrausOperator> kraus,
                             double tol_complete = kTolComplete,
                             double tol_zero = kTolZero);

  static IncoherentChannel identity(int d);

  int dim() const { return kraus_.front().dim(); }
  int size() const { return static_cast<int>(kraus_.size()); }
  const KrausOperator& operator[](int n) const {
    return kraus_[static_cast<size_t>(n)];
  }
  const std::vector<KrausOperator>& kraus() const { return kraus_; }

 private:
  std::vector<KrausOperator> kraus_;
};

// Kraus action: sum_n K_n rho K_n'.
DensityMatrix apply_channel(const IncoherentChannel& phi,
                            const DensityMatrix& rho);

// The post-measurement ensemble { (w_n, K_n psi / sqrt(w_n)) : w_n > tol }
// with w_n = |K_n psi|^2. Branches whose normalized outputs coincide up to
// global phase (overlap modulus > 1 - tol) are merged greedily in input
// order; the surviving weights are renormalized so the mass dropped with
// sub-tol branches is redistributed.
Ensemble branch_outcomes(const IncoherentChannel& phi, const PureState& psi,
                         double tol = kTolSum);

// ── Transition matrices ───────────────────────────────────────────────────────

// Row-stochastic m x n matrix of conditional probabilities coupling source
// ensemble members to target members.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Eigen::MatrixXd t, double tol_sum = kTolSum);

  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return static_cast<int>(t_.cols()); }
  double operator()(int j, int i) const { return t_(j, i); }
  const Eigen::MatrixXd& matrix() const { return t_; }

 private:
  Eigen::MatrixXd t_;
};

}  // namespace coherence
