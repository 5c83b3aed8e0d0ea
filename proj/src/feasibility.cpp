#include "coherence/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coherence/measures.hpp"

namespace coherence {

namespace {

constexpr double kPivotEps = 1e-11;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_well_formed(const LinearProgram& lp) {
  require(lp.num_vars >= 1, "LinearProgram: no variables");
  require(static_cast<int>(lp.bounds.size()) == lp.num_vars,
          "LinearProgram: bounds size mismatch");
  auto check_rows = [&](const std::vector<LinearConstraint>& rows) {
    for (const auto& row : rows) {
      require(static_cast<int>(row.coeffs.size()) == lp.num_vars,
              "LinearProgram: coefficient length mismatch");
      require(std::isfinite(row.rhs), "LinearProgram: non-finite rhs");
      for (double c : row.coeffs)
        require(std::isfinite(c), "LinearProgram: non-finite coefficient");
    }
  };
  check_rows(lp.equalities);
  check_rows(lp.inequalities);
  for (const auto& b : lp.bounds) {
    require(std::isfinite(b.lo), "LinearProgram: lower bound must be finite");
    require(!(b.hi < b.lo), "LinearProgram: empty bound interval");
  }
}

}  // namespace

std::optional<std::vector<double>> solve_feasibility(const LinearProgram& lp,
                                                     double tol) {
  check_well_formed(lp);
  const int n = lp.num_vars;

  // Shift to y = x - lo >= 0; finite upper bounds become inequality rows.
  struct Row {
    std::vector<double> a;
    double b;
    bool is_eq;
  };
  std::vector<Row> rows;
  for (const auto& eq : lp.equalities) {
    double b = eq.rhs;
    for (int i = 0; i < n; ++i) b -= eq.coeffs[static_cast<size_t>(i)] * lp.bounds[static_cast<size_t>(i)].lo;
    rows.push_back(Row{eq.coeffs, b, true});
  }
  for (const auto& ineq : lp.inequalities) {
    double b = ineq.rhs;
    for (int i = 0; i < n; ++i) b -= ineq.coeffs[static_cast<size_t>(i)] * lp.bounds[static_cast<size_t>(i)].lo;
    rows.push_back(Row{ineq.coeffs, b, false});
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(lp.bounds[static_cast<size_t>(i)].hi)) {
      std::vector<double> a(static_cast<size_t>(n), 0.0);
      a[static_cast<size_t>(i)] = 1.0;
      rows.push_back(Row{std::move(a),
                         lp.bounds[static_cast<size_t>(i)].hi -
                             lp.bounds[static_cast<size_t>(i)].lo,
                         false});
    }
  }

  const int num_rows = static_cast<int>(rows.size());
  int num_slacks = 0;
  for (const auto& r : rows)
    if (!r.is_eq) ++num_slacks;

  // Columns: y variables, slacks, artificials, rhs.
  const int cols = n + num_slacks + num_rows;
  std::vector<std::vector<double>> t(
      static_cast<size_t>(num_rows + 1),
      std::vector<double>(static_cast<size_t>(cols + 1), 0.0));
  std::vector<int> basis(static_cast<size_t>(num_rows), -1);

  int slack = 0;
  for (int r = 0; r < num_rows; ++r) {
    double sign = rows[static_cast<size_t>(r)].b < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i)
      t[static_cast<size_t>(r)][static_cast<size_t>(i)] =
          sign * rows[static_cast<size_t>(r)].a[static_cast<size_t>(i)];
    if (!rows[static_cast<size_t>(r)].is_eq) {
      t[static_cast<size_t>(r)][static_cast<size_t>(n + slack)] = sign;
      ++slack;
    }
    t[static_cast<size_t>(r)][static_cast<size_t>(n + num_slacks + r)] = 1.0;
    t[static_cast<size_t>(r)][static_cast<size_t>(cols)] =
        sign * rows[static_cast<size_t>(r)].b;
    basis[static_cast<size_t>(r)] = n + num_slacks + r;
  }

  // Phase-1 objective: minimize the artificial sum. With the artificial
  // basis priced out, the reduced cost of column j is -sum_r t[r][j].
  auto& cost = t[static_cast<size_t>(num_rows)];
  for (int j = 0; j <= cols; ++j) {
    double sum = 0.0;
    for (int r = 0; r < num_rows; ++r)
      sum += t[static_cast<size_t>(r)][static_cast<size_t>(j)];
    cost[static_cast<size_t>(j)] = -sum;
  }
  for (int r = 0; r < num_rows; ++r)
    cost[static_cast<size_t>(n + num_slacks + r)] = 0.0;

  // Bland's rule on both the entering and the leaving choice.
  while (true) {
    int entering = -1;
    for (int j = 0; j < cols; ++j) {
      if (cost[static_cast<size_t>(j)] < -kPivotEps) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;

    int leaving = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < num_rows; ++r) {
      double piv = t[static_cast<size_t>(r)][static_cast<size_t>(entering)];
      if (piv <= kPivotEps) continue;
      double ratio = t[static_cast<size_t>(r)][static_cast<size_t>(cols)] / piv;
      if (leaving < 0 || ratio < best_ratio - kPivotEps ||
          (std::abs(ratio - best_ratio) <= kPivotEps &&
           basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leaving)])) {
        leaving = r;
        best_ratio = ratio;
      }
    }
    if (leaving < 0)
      throw std::runtime_error(
          "solve_feasibility: unbounded phase-1 pivot; malformed input");

    auto& prow = t[static_cast<size_t>(leaving)];
    double piv = prow[static_cast<size_t>(entering)];
    for (double& v : prow) v /= piv;
    for (int r = 0; r <= num_rows; ++r) {
      if (r == leaving) continue;
      double factor = t[static_cast<size_t>(r)][static_cast<size_t>(entering)];
      if (factor == 0.0) continue;
      for (int j = 0; j <= cols; ++j)
        t[static_cast<size_t>(r)][static_cast<size_t>(j)] -=
            factor * prow[static_cast<size_t>(j)];
    }
    basis[static_cast<size_t>(leaving)] = entering;
  }

  double objective = -cost[static_cast<size_t>(cols)];
  if (objective > tol) return std::nullopt;

  std::vector<double> x(static_cast<size_t>(n), 0.0);
  for (int r = 0; r < num_rows; ++r)
    if (basis[static_cast<size_t>(r)] < n)
      x[static_cast<size_t>(basis[static_cast<size_t>(r)])] =
          t[static_cast<size_t>(r)][static_cast<size_t>(cols)];
  for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] += lp.bounds[static_cast<size_t>(i)].lo;

  // Independent re-check of the original program.
  for (const auto& eq : lp.equalities) {
    double v = -eq.rhs;
    for (int i = 0; i < n; ++i) v += eq.coeffs[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    if (std::abs(v) > tol)
      throw std::runtime_error("solve_feasibility: returned point violates an equality");
  }
  for (const auto& ineq : lp.inequalities) {
    double v = -ineq.rhs;
    for (int i = 0; i < n; ++i) v += ineq.coeffs[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    if (v > tol)
      throw std::runtime_error("solve_feasibility: returned point violates an inequality");
  }
  for (int i = 0; i < n; ++i) {
    if (x[static_cast<size_t>(i)] < lp.bounds[static_cast<size_t>(i)].lo - tol ||
        x[static_cast<size_t>(i)] > lp.bounds[static_cast<size_t>(i)].hi + tol)
      throw std::runtime_error("solve_feasibility: returned point violates a bound");
  }
  return x;
}

std::optional<TransitionMatrix> find_transition_matrix(const Ensemble& src,
                                                       const Ensemble& dst,
                                                       double tol) {
  require(src.dim() == dst.dim(), "find_transition_matrix: dimension mismatch");
  const int d = src.dim();
  const int m = src.size();
  const int n = dst.size();

  std::vector<std::vector<double>> src_tails(static_cast<size_t>(m));
  std::vector<std::vector<double>> dst_tails(static_cast<size_t>(n));
  for (int j = 0; j < m; ++j)
    src_tails[static_cast<size_t>(j)] = coherence_fingerprint(src[j].state);
  for (int i = 0; i < n; ++i)
    dst_tails[static_cast<size_t>(i)] = coherence_fingerprint(dst[i].state);

  // Zero-weight target columns are forced to zero by the mass condition;
  // drop them before solving.
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (dst[i].weight > kTolZero) active.push_back(i);
  const int na = static_cast<int>(active.size());

  LinearProgram lp;
  lp.num_vars = m * na;
  lp.bounds.assign(static_cast<size_t>(lp.num_vars), VariableBounds{0.0, 1.0});
  auto var = [&](int j, int c) { return j * na + c; };

  for (int j = 0; j < m; ++j) {  // rows are conditional distributions
    LinearConstraint row{std::vector<double>(static_cast<size_t>(lp.num_vars), 0.0), 1.0};
    for (int c = 0; c < na; ++c) row.coeffs[static_cast<size_t>(var(j, c))] = 1.0;
    lp.equalities.push_back(std::move(row));
  }
  for (int c = 0; c < na; ++c) {  // mixture reproduces the target weights
    LinearConstraint row{std::vector<double>(static_cast<size_t>(lp.num_vars), 0.0),
                         dst[active[static_cast<size_t>(c)]].weight};
    for (int j = 0; j < m; ++j)
      row.coeffs[static_cast<size_t>(var(j, c))] = src[j].weight;
    lp.equalities.push_back(std::move(row));
  }
  for (int j = 0; j < m; ++j) {  // per-source admissibility, every tail index
    for (int l = 2; l <= d; ++l) {
      LinearConstraint row{std::vector<double>(static_cast<size_t>(lp.num_vars), 0.0),
                           src_tails[static_cast<size_t>(j)][static_cast<size_t>(l - 2)]};
      for (int c = 0; c < na; ++c)
        row.coeffs[static_cast<size_t>(var(j, c))] =
            dst_tails[static_cast<size_t>(active[static_cast<size_t>(c)])]
                     [static_cast<size_t>(l - 2)];
      lp.inequalities.push_back(std::move(row));
    }
  }

  auto solution = solve_feasibility(lp, tol);
  if (!solution.has_value()) return std::nullopt;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, n);
  for (int j = 0; j < m; ++j)
    for (int c = 0; c < na; ++c)
      t(j, active[static_cast<size_t>(c)]) =
          std::clamp((*solution)[static_cast<size_t>(var(j, c))], 0.0, 1.0);

  // Re-verify the full matrix against the original conditions.
  for (int j = 0; j < m; ++j) {
    double row_sum = 0.0;
    for (int i = 0; i < n; ++i) row_sum += t(j, i);
    if (std::abs(row_sum - 1.0) > tol)
      throw std::runtime_error("find_transition_matrix: row sum check failed");
    for (int l = 2; l <= d; ++l) {
      double avg = 0.0;
      for (int i = 0; i < n; ++i)
        avg += t(j, i) * dst_tails[static_cast<size_t>(i)][static_cast<size_t>(l - 2)];
      if (avg > src_tails[static_cast<size_t>(j)][static_cast<size_t>(l - 2)] + tol)
        throw std::runtime_error("find_transition_matrix: tail check failed");
    }
  }
  for (int i = 0; i < n; ++i) {
    double mass = 0.0;
    for (int j = 0; j < m; ++j) mass += src[j].weight * t(j, i);
    if (std::abs(mass - dst[i].weight) > tol)
      throw std::runtime_error("find_transition_matrix: mass check failed");
  }
  return TransitionMatrix(std::move(t));
}

}  // namespace coherence
