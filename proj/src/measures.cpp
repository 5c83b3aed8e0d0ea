#include "coherence/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coherence/oracle.hpp"

namespace coherence {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Entries sorted descending, ties broken by original index.
std::vector<double> sorted_desc(const std::vector<double>& x) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return x[static_cast<size_t>(a)] > x[static_cast<size_t>(b)];
  });
  std::vector<double> out(x.size());
  for (size_t r = 0; r < idx.size(); ++r)
    out[r] = x[static_cast<size_t>(idx[r])];
  return out;
}

}  // namespace

MeasureId MeasureId::tail(int l) {
  require(l >= 2, "MeasureId: l must be at least 2");
  return MeasureId{MeasureKind::TailSum, l, 1.0};
}

MeasureId MeasureId::capped(int l, double k) {
  require(l >= 2, "MeasureId: l must be at least 2");
  require(k > 0.0 && k <= 1.0, "MeasureId: k must lie in (0, 1]");
  return MeasureId{MeasureKind::CappedTail, l, k};
}

double tail_sum(const ProbVector& x, int l) {
  require(l >= 2 && l <= x.dim(), "tail_sum: l out of range");
  std::vector<double> s = sorted_desc(x.entries());
  double sum = 0.0;
  for (int i = l - 1; i < x.dim(); ++i) sum += s[static_cast<size_t>(i)];
  return sum;
}

double capped_tail(const ProbVector& x, int l, double k) {
  require(l >= 2 && l <= x.dim(), "capped_tail: l out of range");
  require(k > 0.0 && k <= 1.0, "capped_tail: k out of range");
  std::vector<double> s = sorted_desc(x.entries());
  double sum = 0.0;
  for (int i = l - 1; i < x.dim(); ++i)
    sum += std::min(s[static_cast<size_t>(i)] / k, 1.0);
  return sum;
}

double pure_coherence(const PureState& psi, const MeasureId& m) {
  ProbVector x = profile(psi);
  return m.kind == MeasureKind::TailSum ? tail_sum(x, m.l)
                                        : capped_tail(x, m.l, m.k);
}

double ensemble_coherence(const Ensemble& ens, const MeasureId& m) {
  double sum = 0.0;
  for (const auto& member : ens.members())
    sum += member.weight * pure_coherence(member.state, m);
  return sum;
}

std::vector<double> coherence_fingerprint(const PureState& psi) {
  ProbVector x = profile(psi);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(std::max(0, psi.dim() - 1)));
  for (int l = 2; l <= psi.dim(); ++l) out.push_back(tail_sum(x, l));
  return out;
}

// ── Convex-roof upper bound ───────────────────────────────────────────────────

namespace {

Ensemble diagonal_ensemble(const DensityMatrix& rho) {
  std::vector<EnsembleMember> members;
  for (int i = 0; i < rho.dim(); ++i) {
    double w = rho.matrix()(i, i).real();
    if (w > kTolZero)
      members.push_back(EnsembleMember{w, basis_state(rho.dim(), i)});
  }
  return Ensemble(std::move(members));
}

Ensemble columns_to_ensemble(const Mat& cols) {
  std::vector<EnsembleMember> members;
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    double w = cols.col(c).squaredNorm();
    if (w > kTolZero)
      members.push_back(EnsembleMember{w, PureState(cols.col(c) / std::sqrt(w))});
  }
  return Ensemble(std::move(members));
}

}  // namespace

ConvexRoofEstimate convex_roof_upper_bound(const DensityMatrix& rho,
                                           const MeasureId& m, int trials,
                                           std::uint64_t seed,
                                           const std::optional<Ensemble>& hint) {
  require(trials >= 1, "convex_roof_upper_bound: trials must be at least 1");
  require(m.l >= 2 && m.l <= rho.dim(), "convex_roof_upper_bound: l out of range");

  // Incoherent inputs get the exact answer regardless of how the
  // eigensolver resolves degenerate eigenspaces.
  if (is_incoherent_state(rho, kTolZero))
    return ConvexRoofEstimate{0.0, diagonal_ensemble(rho)};

  const int d = rho.dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 *
                                        (rho.matrix() + rho.matrix().adjoint()));
  std::vector<int> kept;
  for (int a = 0; a < d; ++a)
    if (es.eigenvalues()(a) > kTolZero) kept.push_back(a);
  const int rank = static_cast<int>(kept.size());

  Mat root(d, rank);  // rho = root root'
  for (int c = 0; c < rank; ++c)
    root.col(c) =
        es.eigenvectors().col(kept[static_cast<size_t>(c)]) *
        std::sqrt(es.eigenvalues()(kept[static_cast<size_t>(c)]));

  ConvexRoofEstimate best{0.0, columns_to_ensemble(root)};
  best.value = ensemble_coherence(best.witness, m);

  if (hint.has_value()) {
    double value = ensemble_coherence(*hint, m);
    if (value < best.value) best = ConvexRoofEstimate{value, *hint};
  }

  const int max_size = std::min(d * d, rank + d);
  for (int trial = 1; trial <= trials; ++trial) {
    oracle::Rng rng = oracle::Rng::derived(seed, static_cast<std::uint64_t>(trial));
    const int size = rank + rng.uniform_int(max_size - rank + 1);
    Mat gauss(size, rank);
    for (Eigen::Index r = 0; r < gauss.rows(); ++r)
      for (Eigen::Index c = 0; c < gauss.cols(); ++c)
        gauss(r, c) = rng.normal_cx();
    // Orthonormal columns of the QR factor give an isometry; its adjoint
    // mixes the purification degrees of freedom.
    Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ() *
            Mat::Identity(size, rank);
    Ensemble candidate = columns_to_ensemble(root * q.adjoint());
    double value = ensemble_coherence(candidate, m);
    if (value < best.value) best = ConvexRoofEstimate{value, std::move(candidate)};
  }
  return best;
}

}  // namespace coherence
