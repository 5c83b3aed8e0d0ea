#include "coherence/convertibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coherence {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<double> member_tails(const Ensemble& ens, int l) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(ens.size()));
  for (const auto& m : ens.members())
    out.push_back(tail_sum(profile(m.state), l));
  return out;
}

double averaged_min(const Ensemble& ens, const std::vector<double>& tails,
                    double k) {
  double sum = 0.0;
  for (int j = 0; j < ens.size(); ++j)
    sum += ens[j].weight * std::min(tails[static_cast<size_t>(j)], k);
  return sum;
}

}  // namespace

ConversionVerdict can_convert_pure_pure(const PureState& src,
                                        const PureState& dst, double tol) {
  require(src.dim() == dst.dim(), "can_convert_pure_pure: dimension mismatch");
  ConversionVerdict verdict{true, {}};
  ProbVector xs = profile(src);
  ProbVector xt = profile(dst);
  for (int l = 2; l <= src.dim(); ++l) {
    double lhs = tail_sum(xs, l);
    double rhs = tail_sum(xt, l);
    if (lhs < rhs - tol) {
      verdict.convertible = false;
      verdict.violations.push_back(Violation{MeasureId::tail(l), lhs, rhs});
    }
  }
  return verdict;
}

ConversionVerdict can_convert_pure_ensemble(const PureState& src,
                                            const Ensemble& dst, double tol) {
  require(src.dim() == dst.dim(),
          "can_convert_pure_ensemble: dimension mismatch");
  ConversionVerdict verdict{true, {}};
  ProbVector xs = profile(src);
  for (int l = 2; l <= src.dim(); ++l) {
    double lhs = tail_sum(xs, l);
    double rhs = 0.0;
    for (const auto& m : dst.members())
      rhs += m.weight * tail_sum(profile(m.state), l);
    if (lhs < rhs - tol) {
      verdict.convertible = false;
      verdict.violations.push_back(Violation{MeasureId::tail(l), lhs, rhs});
    }
  }
  return verdict;
}

std::vector<double> breakpoints(const Ensemble& src, const Ensemble& dst,
                                int l) {
  require(src.dim() == dst.dim(), "breakpoints: dimension mismatch");
  std::vector<double> ks{1.0};
  for (double v : member_tails(src, l))
    if (v > 0.0 && v <= 1.0) ks.push_back(v);
  for (double v : member_tails(dst, l))
    if (v > 0.0 && v <= 1.0) ks.push_back(v);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

ConversionVerdict can_convert_ensembles(const Ensemble& src,
                                        const Ensemble& dst, double tol) {
  require(src.dim() == dst.dim(), "can_convert_ensembles: dimension mismatch");
  ConversionVerdict verdict{true, {}};
  for (int l = 2; l <= src.dim(); ++l) {
    std::vector<double> s_tails = member_tails(src, l);
    std::vector<double> t_tails = member_tails(dst, l);
    double worst_deficit = 0.0;
    Violation worst{MeasureId::capped(l, 1.0), 0.0, 0.0};
    for (double k : breakpoints(src, dst, l)) {
      double lhs = averaged_min(src, s_tails, k);
      double rhs = averaged_min(dst, t_tails, k);
      double deficit = rhs - lhs;
      if (deficit > tol && deficit > worst_deficit) {
        worst_deficit = deficit;
        worst = Violation{MeasureId::capped(l, k), lhs, rhs};
      }
    }
    if (worst_deficit > 0.0) {
      verdict.convertible = false;
      verdict.violations.push_back(worst);
    }
  }
  return verdict;
}

double conversion_margin(const Ensemble& src, const Ensemble& dst) {
  require(src.dim() == dst.dim(), "conversion_margin: dimension mismatch");
  double margin = std::numeric_limits<double>::infinity();
  for (int l = 2; l <= src.dim(); ++l) {
    std::vector<double> s_tails = member_tails(src, l);
    std::vector<double> t_tails = member_tails(dst, l);
    for (double k : breakpoints(src, dst, l)) {
      margin = std::min(
          margin, averaged_min(src, s_tails, k) - averaged_min(dst, t_tails, k));
    }
  }
  return margin;
}

std::vector<double> reduce_to_target(const std::vector<double>& p,
                                     const std::vector<double>& a_prime,
                                     double a, double tol) {
  require(p.size() == a_prime.size(), "reduce_to_target: size mismatch");
  require(!p.empty(), "reduce_to_target: empty input");
  for (double w : p)
    require(w >= 0.0 && w <= 1.0, "reduce_to_target: weight outside [0, 1]");
  for (double v : a_prime)
    require(v >= 0.0, "reduce_to_target: negative value");

  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) total += p[i] * a_prime[i];
  double surplus = total - a;
  if (surplus < -tol)
    throw std::domain_error("reduce_to_target: weighted sum falls short of target");

  std::vector<double> out = a_prime;
  for (size_t i = 0; i < out.size() && surplus > 0.0; ++i) {
    if (p[i] <= 0.0) continue;  // lowering a zero-weight slot absorbs nothing
    double drop = std::min(out[i], surplus / p[i]);
    out[i] -= drop;
    surplus -= p[i] * drop;
  }
  return out;
}

}  // namespace coherence
