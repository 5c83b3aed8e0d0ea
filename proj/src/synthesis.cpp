#include "coherence/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coherence/convertibility.hpp"

namespace coherence {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Operators with at most one nonzero per column and per row: closed under
// products, structurally incoherent by construction, and exact to compose
// (no arithmetic on the zero pattern).
struct Monomial {
  int d = 0;
  std::vector<int> row;  // row[i] = target row of column i, -1 for a zero column
  std::vector<Cx> w;     // weight of column i

  static Monomial zero(int d) {
    return Monomial{d, std::vector<int>(static_cast<size_t>(d), -1),
                    std::vector<Cx>(static_cast<size_t>(d), Cx{0.0, 0.0})};
  }

  Mat to_matrix() const {
    Mat out = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      if (row[static_cast<size_t>(i)] >= 0)
        out(row[static_cast<size_t>(i)], i) = w[static_cast<size_t>(i)];
    return out;
  }

  bool vanishes() const {
    for (int i = 0; i < d; ++i)
      if (row[static_cast<size_t>(i)] >= 0 &&
          std::abs(w[static_cast<size_t>(i)]) > 0.0)
        return false;
    return true;
  }
};

// second . first
Monomial compose(const Monomial& second, const Monomial& first) {
  Monomial out = Monomial::zero(first.d);
  for (int i = 0; i < first.d; ++i) {
    int mid = first.row[static_cast<size_t>(i)];
    if (mid < 0) continue;
    int top = second.row[static_cast<size_t>(mid)];
    if (top < 0) continue;
    out.row[static_cast<size_t>(i)] = top;
    out.w[static_cast<size_t>(i)] =
        second.w[static_cast<size_t>(mid)] * first.w[static_cast<size_t>(i)];
  }
  return out;
}

Cx unit_phase(const Cx& c) {
  double mod = std::abs(c);
  return mod > kTolZero ? c / mod : Cx{1.0, 0.0};
}

// Ranks sorted by descending value, ties by original index.
std::vector<int> sort_ranks_desc(const std::vector<double>& x) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return x[static_cast<size_t>(a)] > x[static_cast<size_t>(b)];
  });
  return idx;
}

std::vector<double> state_profile(const PureState& psi) {
  std::vector<double> p(static_cast<size_t>(psi.dim()));
  for (int i = 0; i < psi.dim(); ++i) p[static_cast<size_t>(i)] = std::norm(psi[i]);
  return p;
}

// ── Majorization chain ────────────────────────────────────────────────────────

// One mass transfer z_a -> z_a - delta, z_b -> z_b + delta undoing a
// T-transform; q is the probability weight of the untransposed branch when
// the move is inverted by a channel step.
struct Move {
  int a = 0;
  int b = 0;
  double q = 1.0;
};

constexpr double kChainEps = 1e-13;

// Walks z from the target profile down to the source profile, taking mass
// from the leftmost surplus coordinate to the leftmost deficit behind it.
// Each move finalizes at least one coordinate, so at most d - 1 moves occur.
std::vector<Move> majorization_moves(const std::vector<double>& s,
                                     std::vector<double> z) {
  const int d = static_cast<int>(s.size());
  std::vector<Move> moves;
  for (int guard = 0; guard < 2 * d; ++guard) {
    int a = -1;
    for (int i = 0; i < d; ++i) {
      if (z[static_cast<size_t>(i)] - s[static_cast<size_t>(i)] > kChainEps) {
        a = i;
        break;
      }
    }
    if (a < 0) break;
    int b = -1;
    for (int i = a + 1; i < d; ++i) {
      if (s[static_cast<size_t>(i)] - z[static_cast<size_t>(i)] > kChainEps) {
        b = i;
        break;
      }
    }
    if (b < 0) break;  // tolerance-level residue only
    double za = z[static_cast<size_t>(a)];
    double zb = z[static_cast<size_t>(b)];
    double delta = std::min(za - s[static_cast<size_t>(a)],
                            s[static_cast<size_t>(b)] - zb);
    if (za - zb <= kChainEps) break;
    moves.push_back(Move{a, b, (za - delta - zb) / (za - zb)});
    z[static_cast<size_t>(a)] -= delta;
    z[static_cast<size_t>(b)] += delta;
  }
  if (moves.size() > static_cast<size_t>(std::max(0, d - 1)))
    throw std::logic_error("majorization_moves: chain exceeded d - 1 steps");
  return moves;
}

// ── Branch-tree reduction ─────────────────────────────────────────────────────

// A convex-combination term: weight w on the permutation perm of the target
// profile. perm[i] is the target index whose mass sits at coordinate i, so
// the permuted vector is exact — only the weights carry arithmetic.
struct Term {
  double w = 0.0;
  std::vector<int> perm;
};

// Shrinks the term list to at most d entries: d + 1 points of the simplex
// are affinely dependent, so weight can be moved along a dependence until
// one term's weight reaches zero without changing the combination.
void caratheodory_reduce(std::vector<Term>& terms, const std::vector<double>& t) {
  const int d = static_cast<int>(t.size());
  while (terms.size() > static_cast<size_t>(d)) {
    const int k = d + 1;
    Eigen::MatrixXd m(d + 1, k);
    for (int c = 0; c < k; ++c) {
      for (int i = 0; i < d; ++i)
        m(i, c) = t[static_cast<size_t>(
            terms[static_cast<size_t>(c)].perm[static_cast<size_t>(i)])];
      m(d, c) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    Eigen::VectorXd c = svd.matrixV().col(k - 1);
    if (c.maxCoeff() <= 0.0) c = -c;

    double theta = std::numeric_limits<double>::infinity();
    int drop = -1;
    for (int r = 0; r < k; ++r) {
      if (c(r) > 0.0) {
        double limit = terms[static_cast<size_t>(r)].w / c(r);
        if (limit < theta) {
          theta = limit;
          drop = r;
        }
      }
    }
    if (drop < 0) throw std::logic_error("caratheodory_reduce: no descent direction");
    for (int r = 0; r < k; ++r) terms[static_cast<size_t>(r)].w -= theta * c(r);
    terms[static_cast<size_t>(drop)].w = 0.0;
    std::erase_if(terms, [](const Term& term) { return term.w <= 1e-15; });
  }
}

std::vector<Term> expand_chain(const std::vector<double>& t,
                               const std::vector<Move>& moves) {
  const int d = static_cast<int>(t.size());
  std::vector<int> identity(static_cast<size_t>(d));
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<Term> terms{Term{1.0, identity}};

  for (const Move& mv : moves) {
    std::vector<Term> next;
    next.reserve(2 * terms.size());
    for (const Term& term : terms) {
      if (term.w * mv.q > 1e-15) next.push_back(Term{term.w * mv.q, term.perm});
      double w2 = term.w * (1.0 - mv.q);
      if (w2 > 1e-15) {
        Term swapped{w2, term.perm};
        std::swap(swapped.perm[static_cast<size_t>(mv.a)],
                  swapped.perm[static_cast<size_t>(mv.b)]);
        next.push_back(std::move(swapped));
      }
    }
    // Branches that reconverged onto one permutation merge exactly.
    std::vector<Term> merged;
    for (auto& term : next) {
      bool absorbed = false;
      for (auto& seen : merged) {
        if (seen.perm == term.perm) {
          seen.w += term.w;
          absorbed = true;
          break;
        }
      }
      if (!absorbed) merged.push_back(std::move(term));
    }
    terms = std::move(merged);
    caratheodory_reduce(terms, t);
  }
  return terms;
}

// Numerically measured completeness deficits are filled with |1><i| repairs;
// a single-nonzero-column operator cannot excite coherence.
void append_repairs(std::vector<Monomial>& ops, int d) {
  std::vector<double> cover(static_cast<size_t>(d), 0.0);
  for (const auto& op : ops)
    for (int i = 0; i < d; ++i)
      if (op.row[static_cast<size_t>(i)] >= 0)
        cover[static_cast<size_t>(i)] += std::norm(op.w[static_cast<size_t>(i)]);
  for (int i = 0; i < d; ++i) {
    double deficit = 1.0 - cover[static_cast<size_t>(i)];
    if (deficit > kTolZero) {
      Monomial repair = Monomial::zero(d);
      repair.row[static_cast<size_t>(i)] = 0;
      repair.w[static_cast<size_t>(i)] = Cx{std::sqrt(deficit), 0.0};
      ops.push_back(std::move(repair));
    }
  }
}

IncoherentChannel to_channel(const std::vector<Monomial>& ops) {
  std::vector<KrausOperator> kraus;
  kraus.reserve(ops.size());
  for (const auto& op : ops)
    if (!op.vanishes()) kraus.push_back(KrausOperator(op.to_matrix()));
  return IncoherentChannel(std::move(kraus));
}

}  // namespace

// ── two_outcome_step ──────────────────────────────────────────────────────────

TwoOutcomeStep two_outcome_step(int d, int a, int b, double x1, double x2,
                                double y1, double y2) {
  require(d >= 2 && a >= 0 && b >= 0 && a < d && b < d && a != b,
          "two_outcome_step: bad coordinates");
  require(x1 >= 0.0 && x2 >= 0.0 && y1 >= 0.0 && y2 >= 0.0,
          "two_outcome_step: negative mass");
  require(std::abs((x1 + x2) - (y1 + y2)) <= 1e-9,
          "two_outcome_step: block mass not conserved");
  require(x1 >= y2 - kTolZero && x1 <= y1 + kTolZero,
          "two_outcome_step: source mass outside target interval");

  double q = y1 - y2 > kTolZero ? std::clamp((x1 - y2) / (y1 - y2), 0.0, 1.0)
                                : 1.0;

  Mat k1 = Mat::Identity(d, d) * std::sqrt(q);
  k1(a, a) = x1 > kTolZero ? Cx{std::sqrt(q * y1 / x1), 0.0} : Cx{0.0, 0.0};
  k1(b, b) = x2 > kTolZero ? Cx{std::sqrt(q * y2 / x2), 0.0} : Cx{0.0, 0.0};

  Mat diag2 = Mat::Identity(d, d) * std::sqrt(1.0 - q);
  diag2(a, a) = x1 > kTolZero ? Cx{std::sqrt((1.0 - q) * y2 / x1), 0.0} : Cx{0.0, 0.0};
  diag2(b, b) = x2 > kTolZero ? Cx{std::sqrt((1.0 - q) * y1 / x2), 0.0} : Cx{0.0, 0.0};
  Mat swap = Mat::Identity(d, d);
  swap(a, a) = swap(b, b) = Cx{0.0, 0.0};
  swap(a, b) = swap(b, a) = Cx{1.0, 0.0};

  return TwoOutcomeStep{q, KrausOperator(std::move(k1)),
                        KrausOperator(swap * diag2)};
}

// ── synthesize_pure_pure ──────────────────────────────────────────────────────

IncoherentChannel synthesize_pure_pure(const PureState& src,
                                       const PureState& dst, double tol) {
  require(src.dim() == dst.dim(), "synthesize_pure_pure: dimension mismatch");
  ConversionVerdict verdict = can_convert_pure_pure(src, dst, tol);
  if (!verdict.convertible)
    throw std::domain_error(
        "synthesize_pure_pure: source profile is not majorized by the target");

  const int d = src.dim();
  std::vector<double> sprof = state_profile(src);
  std::vector<double> tprof = state_profile(dst);
  std::vector<int> sorder = sort_ranks_desc(sprof);
  std::vector<int> torder = sort_ranks_desc(tprof);

  // Work on exactly normalized sorted profiles.
  std::vector<double> s(static_cast<size_t>(d)), t(static_cast<size_t>(d));
  double ssum = 0.0, tsum = 0.0;
  for (int r = 0; r < d; ++r) {
    s[static_cast<size_t>(r)] = sprof[static_cast<size_t>(sorder[static_cast<size_t>(r)])];
    t[static_cast<size_t>(r)] = tprof[static_cast<size_t>(torder[static_cast<size_t>(r)])];
    ssum += s[static_cast<size_t>(r)];
    tsum += t[static_cast<size_t>(r)];
  }
  for (int r = 0; r < d; ++r) {
    s[static_cast<size_t>(r)] /= ssum;
    t[static_cast<size_t>(r)] /= tsum;
  }

  // win: strip source phases, permute into descending order.
  Monomial win = Monomial::zero(d);
  for (int r = 0; r < d; ++r) {
    int orig = sorder[static_cast<size_t>(r)];
    win.row[static_cast<size_t>(orig)] = r;
    win.w[static_cast<size_t>(orig)] = std::conj(unit_phase(src[orig]));
  }
  // wout: unsort into the target's order, restore its phases.
  Monomial wout = Monomial::zero(d);
  for (int r = 0; r < d; ++r) {
    int orig = torder[static_cast<size_t>(r)];
    wout.row[static_cast<size_t>(r)] = orig;
    wout.w[static_cast<size_t>(r)] = unit_phase(dst[orig]);
  }

  std::vector<Move> moves = majorization_moves(s, t);
  std::vector<Term> terms = expand_chain(t, moves);

  std::vector<Monomial> ops;
  ops.reserve(terms.size());
  for (const Term& term : terms) {
    Monomial g = Monomial::zero(d);
    for (int i = 0; i < d; ++i) {
      if (s[static_cast<size_t>(i)] <= kTolZero) continue;
      int target = term.perm[static_cast<size_t>(i)];
      g.row[static_cast<size_t>(i)] = target;
      g.w[static_cast<size_t>(i)] =
          Cx{std::sqrt(term.w * t[static_cast<size_t>(target)] /
                       s[static_cast<size_t>(i)]),
             0.0};
    }
    ops.push_back(std::move(g));
  }
  append_repairs(ops, d);

  if (ops.size() > static_cast<size_t>(std::max(1, 2 * (d - 1))))
    throw std::logic_error("synthesize_pure_pure: operator count bound violated");

  std::vector<Monomial> framed;
  framed.reserve(ops.size());
  for (const auto& op : ops) framed.push_back(compose(wout, compose(op, win)));
  return to_channel(framed);
}

// ── pooled_state / splitter_channel ───────────────────────────────────────────

namespace {

struct SortedMember {
  std::vector<int> order;  // order[r] = original coordinate of rank r
  Vec sigma;               // amplitudes permuted into descending-profile order
};

SortedMember sort_member(const PureState& psi) {
  std::vector<double> prof = state_profile(psi);
  SortedMember out;
  out.order = sort_ranks_desc(prof);
  out.sigma = Vec(psi.dim());
  for (int r = 0; r < psi.dim(); ++r)
    out.sigma(r) = psi[out.order[static_cast<size_t>(r)]];
  return out;
}

}  // namespace

PureState pooled_state(const Ensemble& ens) {
  const int d = ens.dim();
  Vec eta = Vec::Zero(d);
  for (const auto& m : ens.members()) {
    SortedMember sm = sort_member(m.state);
    for (int r = 0; r < d; ++r)
      eta(r) += m.weight * std::norm(sm.sigma(r));
  }
  for (int r = 0; r < d; ++r) eta(r) = Cx{std::sqrt(eta(r).real()), 0.0};
  return PureState(std::move(eta));
}

IncoherentChannel splitter_channel(const PureState& pooled,
                                   const Ensemble& ens) {
  require(pooled.dim() == ens.dim(), "splitter_channel: dimension mismatch");
  PureState eta = pooled_state(ens);
  for (int r = 0; r < eta.dim(); ++r)
    require(std::abs(pooled[r] - eta[r]) <= 1e-9,
            "splitter_channel: state is not the pooled state of the ensemble");

  const int d = ens.dim();
  std::vector<Monomial> ops;
  ops.reserve(static_cast<size_t>(ens.size()));
  for (const auto& m : ens.members()) {
    SortedMember sm = sort_member(m.state);
    Monomial a = Monomial::zero(d);
    for (int r = 0; r < d; ++r) {
      double eta_r = eta[r].real();
      if (eta_r <= kTolZero) continue;  // member amplitudes vanish there too
      a.row[static_cast<size_t>(r)] = sm.order[static_cast<size_t>(r)];
      a.w[static_cast<size_t>(r)] = std::sqrt(m.weight) * sm.sigma(r) / eta_r;
    }
    ops.push_back(std::move(a));
  }
  append_repairs(ops, d);
  return to_channel(ops);
}

// ── synthesize_pure_ensemble ──────────────────────────────────────────────────

IncoherentChannel synthesize_pure_ensemble(const PureState& src,
                                           const Ensemble& dst, double tol) {
  require(src.dim() == dst.dim(), "synthesize_pure_ensemble: dimension mismatch");
  ConversionVerdict verdict = can_convert_pure_ensemble(src, dst, tol);
  if (!verdict.convertible)
    throw std::domain_error(
        "synthesize_pure_ensemble: average target coherence exceeds the source");

  PureState eta = pooled_state(dst);
  // The admissibility inequalities pass through the pooled state, so the
  // concentrate step is admissible whenever the pair is.
  IncoherentChannel concentrate = synthesize_pure_pure(src, eta, tol);
  IncoherentChannel split = splitter_channel(eta, dst);

  std::vector<KrausOperator> flat;
  flat.reserve(static_cast<size_t>(split.size() * concentrate.size()));
  for (const auto& a : split.kraus()) {
    for (const auto& k : concentrate.kraus()) {
      Mat product = a.matrix() * k.matrix();
      if (product.cwiseAbs().maxCoeff() > 0.0)
        flat.push_back(KrausOperator(std::move(product)));
    }
  }
  return IncoherentChannel(std::move(flat));
}

// ── synthesize_ensemble_map ───────────────────────────────────────────────────

EnsembleMapPlan synthesize_ensemble_map(const Ensemble& src,
                                        const Ensemble& dst, double tol,
                                        double feas_tol) {
  require(src.dim() == dst.dim(), "synthesize_ensemble_map: dimension mismatch");
  auto transition = find_transition_matrix(src, dst, feas_tol);
  if (!transition.has_value())
    throw std::domain_error(
        "synthesize_ensemble_map: no transition matrix exists for this pair");

  constexpr double kPruneThreshold = 1e-12;
  std::vector<IncoherentChannel> per_source;
  per_source.reserve(static_cast<size_t>(src.size()));
  for (int j = 0; j < src.size(); ++j) {
    std::vector<EnsembleMember> members;
    for (int i = 0; i < dst.size(); ++i)
      if ((*transition)(j, i) > kPruneThreshold)
        members.push_back(EnsembleMember{(*transition)(j, i), dst[i].state});
    Ensemble conditional(std::move(members));
    // The transition constraints make each row admissible; a synthesis
    // failure here is a solver bug, not a caller error.
    per_source.push_back(synthesize_pure_ensemble(
        src[j].state, conditional, std::max(tol, 10.0 * feas_tol)));
  }
  return EnsembleMapPlan{std::move(*transition), std::move(per_source)};
}

}  // namespace coherence
