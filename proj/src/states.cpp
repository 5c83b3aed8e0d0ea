#include "coherence/states.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace coherence {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool finite(double x) { return std::isfinite(x); }
bool finite(const Cx& c) { return finite(c.real()) && finite(c.imag()); }

}  // namespace

// ── ProbVector ────────────────────────────────────────────────────────────────

ProbVector::ProbVector(std::vector<double> entries, double tol_zero,
                       double tol_sum)
    : entries_(std::move(entries)) {
  require(!entries_.empty(), "ProbVector: empty");
  double sum = 0.0;
  for (double& e : entries_) {
    require(finite(e), "ProbVector: non-finite entry");
    require(e >= -tol_zero, "ProbVector: negative entry");
    if (e < 0.0) e = 0.0;
    sum += e;
  }
  require(std::abs(sum - 1.0) <= tol_sum, "ProbVector: entries do not sum to 1");
}

// ── PureState ─────────────────────────────────────────────────────────────────

PureState::PureState(Vec amplitudes, double tol_sum)
    : amp_(std::move(amplitudes)) {
  require(amp_.size() >= 1, "PureState: empty amplitude vector");
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    require(finite(amp_(i)), "PureState: non-finite amplitude");
    norm2 += std::norm(amp_(i));
  }
  require(std::abs(norm2 - 1.0) <= tol_sum, "PureState: not normalized");
}

PureState basis_state(int d, int i) {
  require(d >= 1 && i >= 0 && i < d, "basis_state: index out of range");
  Vec v = Vec::Zero(d);
  v(i) = Cx{1.0, 0.0};
  return PureState(std::move(v));
}

PureState uniform_state(int d) {
  require(d >= 1, "uniform_state: bad dimension");
  Vec v = Vec::Constant(d, Cx{1.0 / std::sqrt(static_cast<double>(d)), 0.0});
  return PureState(std::move(v));
}

ProbVector profile(const PureState& psi) {
  std::vector<double> p(static_cast<size_t>(psi.dim()));
  for (int i = 0; i < psi.dim(); ++i) p[static_cast<size_t>(i)] = std::norm(psi[i]);
  return ProbVector(std::move(p));
}

PureState phase_canonical(const PureState& psi, double tol) {
  const Vec& a = psi.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double mod = std::abs(a(i));
    if (mod > tol) {
      Cx phase = std::conj(a(i)) / mod;
      return PureState(a * phase);
    }
  }
  return psi;  // nothing above tol; cannot happen for a normalized state
}

double overlap_modulus(const PureState& a, const PureState& b) {
  require(a.dim() == b.dim(), "overlap_modulus: dimension mismatch");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

// ── Ensemble ──────────────────────────────────────────────────────────────────

Ensemble::Ensemble(std::vector<EnsembleMember> members, double tol_zero,
                   double tol_sum) {
  require(!members.empty(), "Ensemble: no members");
  const int d = members.front().state.dim();
  double sum = 0.0;
  for (auto& m : members) {
    require(finite(m.weight), "Ensemble: non-finite weight");
    require(m.weight >= -tol_zero, "Ensemble: negative weight");
    require(m.state.dim() == d, "Ensemble: mixed dimensions");
    sum += std::max(m.weight, 0.0);
    if (m.weight > tol_zero) members_.push_back(std::move(m));
  }
  require(!members_.empty(), "Ensemble: all members have zero weight");
  require(std::abs(sum - 1.0) <= tol_sum, "Ensemble: weights do not sum to 1");
}

Ensemble Ensemble::singleton(PureState psi) {
  return Ensemble({EnsembleMember{1.0, std::move(psi)}});
}

// ── DensityMatrix ─────────────────────────────────────────────────────────────

DensityMatrix::DensityMatrix(Mat matrix, double tol_zero, double tol_sum)
    : mat_(std::move(matrix)) {
  require(mat_.rows() >= 1 && mat_.rows() == mat_.cols(),
          "DensityMatrix: not square");
  double trace = 0.0;
  for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat_.cols(); ++j) {
      require(finite(mat_(i, j)), "DensityMatrix: non-finite entry");
      require(std::abs(mat_(i, j) - std::conj(mat_(j, i))) <= tol_zero,
              "DensityMatrix: not Hermitian");
    }
    trace += mat_(i, i).real();
  }
  require(std::abs(trace - 1.0) <= tol_sum, "DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (mat_ + mat_.adjoint()),
                                        Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -tol_zero,
          "DensityMatrix: not positive semidefinite");
}

DensityMatrix pure_density(const PureState& psi) {
  const Vec& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix density_of(const Ensemble& ens) {
  const int d = ens.dim();
  Mat rho = Mat::Zero(d, d);
  for (const auto& m : ens.members()) {
    const Vec& a = m.state.amplitudes();
    rho += m.weight * (a * a.adjoint());
  }
  return DensityMatrix(std::move(rho));
}

// ── Kraus operators and channels ──────────────────────────────────────────────

KrausOperator::KrausOperator(Mat matrix) : mat_(std::move(matrix)) {
  require(mat_.rows() >= 1 && mat_.rows() == mat_.cols(),
          "KrausOperator: not square");
  for (Eigen::Index i = 0; i < mat_.rows(); ++i)
    for (Eigen::Index j = 0; j < mat_.cols(); ++j)
      require(finite(mat_(i, j)), "KrausOperator: non-finite entry");
}

bool is_incoherent_state(const DensityMatrix& rho, double tol) {
  const Mat& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

bool is_incoherent_operator(const KrausOperator& k, double tol) {
  const Mat& m = k.matrix();
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    int nonzero = 0;
    for (Eigen::Index row = 0; row < m.rows(); ++row)
      if (std::abs(m(row, col)) > tol && ++nonzero > 1) return false;
  }
  return true;
}

ChannelCheck check_channel(const std::vector<KrausOperator>& kraus,
                           double tol_complete, double tol_zero) {
  ChannelCheck out;
  if (kraus.empty()) return out;
  const int d = kraus.front().dim();
  Mat acc = Mat::Zero(d, d);
  for (const auto& k : kraus) {
    if (k.dim() != d) return out;  // mixed dimensions: neither check passes
    acc += k.matrix().adjoint() * k.matrix();
  }
  out.completeness_residual = (acc - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  out.complete = out.completeness_residual <= tol_complete;
  out.all_incoherent = true;
  for (size_t n = 0; n < kraus.size(); ++n) {
    if (!is_incoherent_operator(kraus[n], tol_zero)) {
      out.all_incoherent = false;
      out.first_bad_operator = static_cast<int>(n);
      break;
    }
  }
  return out;
}

IncoherentChannel::IncoherentChannel(std::vector<KrausOperator> kraus,
                                     double tol_complete, double tol_zero)
    : kraus_(std::move(kraus)) {
  require(!kraus_.empty(), "IncoherentChannel: no Kraus operators");
  const int d = kraus_.front().dim();
  for (const auto& k : kraus_)
    require(k.dim() == d, "IncoherentChannel: mixed dimensions");
  ChannelCheck check = check_channel(kraus_, tol_complete, tol_zero);
  require(check.complete, "IncoherentChannel: Kraus list is not complete");
  require(check.all_incoherent,
          "IncoherentChannel: operator " +
              std::to_string(check.first_bad_operator) + " is not incoherent");
}

IncoherentChannel IncoherentChannel::identity(int d) {
  return IncoherentChannel({KrausOperator(Mat::Identity(d, d))});
}

DensityMatrix apply_channel(const IncoherentChannel& phi,
                            const DensityMatrix& rho) {
  require(phi.dim() == rho.dim(), "apply_channel: dimension mismatch");
  Mat out = Mat::Zero(rho.dim(), rho.dim());
  for (const auto& k : phi.kraus())
    out += k.matrix() * rho.matrix() * k.matrix().adjoint();
  return DensityMatrix(std::move(out));
}

Ensemble branch_outcomes(const IncoherentChannel& phi, const PureState& psi,
                         double tol) {
  require(phi.dim() == psi.dim(), "branch_outcomes: dimension mismatch");
  std::vector<EnsembleMember> merged;
  for (const auto& k : phi.kraus()) {
    Vec v = k.matrix() * psi.amplitudes();
    double w = v.squaredNorm();
    if (w <= tol) continue;
    PureState out(v / std::sqrt(w));
    bool absorbed = false;
    for (auto& m : merged) {
      if (overlap_modulus(m.state, out) > 1.0 - tol) {
        m.weight += w;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back(EnsembleMember{w, std::move(out)});
  }
  // Completeness makes all-branches-below-tol impossible.
  double total = 0.0;
  for (const auto& m : merged) total += m.weight;
  for (auto& m : merged) m.weight /= total;
  return Ensemble(std::move(merged));
}

// ── TransitionMatrix ──────────────────────────────────────────────────────────

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd t, double tol_sum)
    : t_(std::move(t)) {
  require(t_.rows() >= 1 && t_.cols() >= 1, "TransitionMatrix: empty");
  for (Eigen::Index j = 0; j < t_.rows(); ++j) {
    double row_sum = 0.0;
    for (Eigen::Index i = 0; i < t_.cols(); ++i) {
      require(finite(t_(j, i)), "TransitionMatrix: non-finite entry");
      require(t_(j, i) >= 0.0 && t_(j, i) <= 1.0,
              "TransitionMatrix: entry outside [0, 1]");
      row_sum += t_(j, i);
    }
    require(std::abs(row_sum - 1.0) <= tol_sum,
            "TransitionMatrix: row does not sum to 1");
  }
}

}  // namespace coherence
