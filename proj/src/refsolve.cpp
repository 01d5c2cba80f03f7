#include "psps/refsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "psps/errors.hpp"

namespace psps {

namespace {

// One linear constraint row over x = (w, s): coeff_w . w + coeff_s * s +
// offset (== 0 when is_eq, <= 0 otherwise).
struct ConstraintRow {
  DenseVec coeff_w;
  double coeff_s = 0.0;
  double offset = 0.0;
  bool is_eq = false;
};

// Objective in expanded form 1/2 x'Qx + q'x (+ const), Q diagonal positive.
struct ExpandedQP {
  int d = 0;
  bool has_s = false;
  DenseVec qdiag_w;
  DenseVec qlin_w;
  double qdiag_s = 0.0;
  double qlin_s = 0.0;
  std::vector<ConstraintRow> constraints;

  int num_vars() const { return d + (has_s ? 1 : 0); }
};

void validate(const ProjectionProblem& p) {
  const int d = static_cast<int>(p.anchor_w.size());
  if (d == 0) throw std::invalid_argument("refsolve: empty problem");
  if (d > kRefsolveMaxDim)
    throw std::invalid_argument("refsolve: dimension exceeds desk-scale cap");
  if (p.grad.size() != p.anchor_w.size() || p.diag.size() != p.anchor_w.size())
    throw std::invalid_argument("refsolve: dimension mismatch");
  for (double b : p.diag)
    if (!(b > 0.0))
      throw std::invalid_argument("refsolve: diagonal must be positive");
  switch (p.kind) {
    case ProgramKind::LinearizedEq:
      break;
    case ProgramKind::SlackL1:
    case ProgramKind::SlackL2:
      if (!(p.lambda > 0.0) || !(p.mu > 0.0))
        throw std::invalid_argument("refsolve: lambda and mu must be positive");
      break;
    case ProgramKind::Halfspace:
      if (!(p.delta > 0.0))
        throw std::invalid_argument("refsolve: delta must be positive");
      break;
  }
}

ExpandedQP expand(const ProjectionProblem& p) {
  const int d = static_cast<int>(p.anchor_w.size());
  ExpandedQP qp;
  qp.d = d;
  qp.qdiag_w.resize(d);
  qp.qlin_w.resize(d);

  // 1/2 ||w - w_t||^2_B expands to Q_w = B; ||.||^2 (no half) to Q_w = 2B.
  const double w_factor =
      (p.kind == ProgramKind::LinearizedEq || p.kind == ProgramKind::SlackL1)
          ? 1.0
          : 2.0;
  for (int j = 0; j < d; ++j) {
    qp.qdiag_w[j] = w_factor * p.diag[j];
    qp.qlin_w[j] = -w_factor * p.diag[j] * p.anchor_w[j];
  }

  switch (p.kind) {
    case ProgramKind::LinearizedEq:
      qp.has_s = false;
      break;
    case ProgramKind::SlackL1:
      // mu (s - s_t)^2 + lambda s
      qp.has_s = true;
      qp.qdiag_s = 2.0 * p.mu;
      qp.qlin_s = -2.0 * p.mu * p.anchor_s + p.lambda;
      break;
    case ProgramKind::SlackL2:
      // mu (s - s_t)^2 + lambda s^2
      qp.has_s = true;
      qp.qdiag_s = 2.0 * (p.mu + p.lambda);
      qp.qlin_s = -2.0 * p.mu * p.anchor_s;
      break;
    case ProgramKind::Halfspace:
      // delta (s - s0)^2
      qp.has_s = true;
      qp.qdiag_s = 2.0 * p.delta;
      qp.qlin_s = -2.0 * p.delta * p.anchor_s;
      break;
  }

  // Linearization constraint c + a'(w - w_t) (= 0 | <= s).
  ConstraintRow lin;
  lin.coeff_w = p.grad;
  lin.offset = p.offset - dot(p.grad, p.anchor_w);
  lin.coeff_s = qp.has_s ? -1.0 : 0.0;
  lin.is_eq = (p.kind == ProgramKind::LinearizedEq);
  qp.constraints.push_back(std::move(lin));

  if (p.kind == ProgramKind::SlackL1) {
    ConstraintRow sign;
    sign.coeff_w.assign(d, 0.0);
    sign.coeff_s = -1.0;  // -s <= 0
    sign.offset = 0.0;
    qp.constraints.push_back(std::move(sign));
  }
  return qp;
}

double constraint_value(const ExpandedQP& qp, const ConstraintRow& row,
                        const DenseVec& w, double s) {
  double v = row.offset + dot(row.coeff_w, w);
  if (qp.has_s) v += row.coeff_s * s;
  return v;
}

// Gaussian elimination with partial pivoting; A row-major n x n, solves in
// place. Returns false on a (near-)singular pivot.
bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& x) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < 1e-13) return false;
    if (pivot != col) {
      for (int c2 = 0; c2 < n; ++c2) std::swap(a[col * n + c2], a[pivot * n + c2]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] * inv;
      if (factor == 0.0) continue;
      for (int c2 = col; c2 < n; ++c2) a[r * n + c2] -= factor * a[col * n + c2];
      b[r] -= factor * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c2 = r + 1; c2 < n; ++c2) acc -= a[r * n + c2] * x[c2];
    x[r] = acc / a[r * n + r];
  }
  return true;
}

struct Candidate {
  DenseVec w;
  double s = 0.0;
  std::vector<double> duals;  // one per active constraint, in active order
  std::vector<int> active;
  double objective = 0.0;
  bool ok = false;
};

// Solves the equality-constrained KKT system for one active set.
Candidate solve_active_set(const ExpandedQP& qp, const std::vector<int>& active) {
  Candidate cand;
  cand.active = active;
  const int m = qp.num_vars();
  const int k = static_cast<int>(active.size());
  const int n = m + k;
  std::vector<double> a(n * n, 0.0);
  std::vector<double> rhs(n, 0.0);

  for (int j = 0; j < qp.d; ++j) {
    a[j * n + j] = qp.qdiag_w[j];
    rhs[j] = -qp.qlin_w[j];
  }
  if (qp.has_s) {
    a[qp.d * n + qp.d] = qp.qdiag_s;
    rhs[qp.d] = -qp.qlin_s;
  }
  for (int i = 0; i < k; ++i) {
    const ConstraintRow& row = qp.constraints[active[i]];
    const int rc = m + i;
    for (int j = 0; j < qp.d; ++j) {
      a[j * n + rc] = row.coeff_w[j];
      a[rc * n + j] = row.coeff_w[j];
    }
    if (qp.has_s) {
      a[qp.d * n + rc] = row.coeff_s;
      a[rc * n + qp.d] = row.coeff_s;
    }
    rhs[rc] = -row.offset;
  }

  std::vector<double> x;
  if (!solve_dense(std::move(a), std::move(rhs), n, x)) return cand;

  cand.w.assign(x.begin(), x.begin() + qp.d);
  cand.s = qp.has_s ? x[qp.d] : 0.0;
  cand.duals.assign(x.begin() + m, x.end());
  cand.ok = true;
  return cand;
}

double candidate_residual(const ExpandedQP& qp, const Candidate& cand) {
  const int m = qp.num_vars();
  std::vector<double> stat(m, 0.0);
  for (int j = 0; j < qp.d; ++j)
    stat[j] = qp.qdiag_w[j] * cand.w[j] + qp.qlin_w[j];
  if (qp.has_s) stat[qp.d] = qp.qdiag_s * cand.s + qp.qlin_s;
  for (std::size_t i = 0; i < cand.active.size(); ++i) {
    const ConstraintRow& row = qp.constraints[cand.active[i]];
    for (int j = 0; j < qp.d; ++j) stat[j] += cand.duals[i] * row.coeff_w[j];
    if (qp.has_s) stat[qp.d] += cand.duals[i] * row.coeff_s;
  }
  double res = 0.0;
  for (double v : stat) res = std::max(res, std::abs(v));

  for (std::size_t ci = 0; ci < qp.constraints.size(); ++ci) {
    const ConstraintRow& row = qp.constraints[ci];
    const double val = constraint_value(qp, row, cand.w, cand.s);
    double dual = 0.0;
    for (std::size_t i = 0; i < cand.active.size(); ++i)
      if (cand.active[i] == static_cast<int>(ci)) dual = cand.duals[i];
    if (row.is_eq) {
      res = std::max(res, std::abs(val));
    } else {
      res = std::max(res, std::max(0.0, val));  // primal feasibility
      res = std::max(res, std::max(0.0, -dual));  // dual feasibility
      res = std::max(res, std::abs(dual * val));  // complementarity
    }
  }
  return res;
}

}  // namespace

double evaluate_objective(const ProjectionProblem& p, const DenseVec& w,
                          double s) {
  const int d = static_cast<int>(p.anchor_w.size());
  double quad = 0.0;
  for (int j = 0; j < d; ++j) {
    const double dw = w[j] - p.anchor_w[j];
    quad += p.diag[j] * dw * dw;
  }
  const double ds = s - p.anchor_s;
  switch (p.kind) {
    case ProgramKind::LinearizedEq:
      return 0.5 * quad;
    case ProgramKind::SlackL1:
      return 0.5 * quad + p.mu * ds * ds + p.lambda * s;
    case ProgramKind::SlackL2:
      return quad + p.mu * ds * ds + p.lambda * s * s;
    case ProgramKind::Halfspace:
      return quad + p.delta * ds * ds;
  }
  return 0.0;
}

RefSolution solve_numeric(const ProjectionProblem& problem, double tol) {
  validate(problem);
  const ExpandedQP qp = expand(problem);

  // Every subset of the inequality constraints; equalities always active.
  std::vector<int> eq_idx, ineq_idx;
  for (std::size_t i = 0; i < qp.constraints.size(); ++i)
    (qp.constraints[i].is_eq ? eq_idx : ineq_idx)
        .push_back(static_cast<int>(i));

  const int subsets = 1 << ineq_idx.size();
  Candidate best;
  double best_obj = std::numeric_limits<double>::infinity();

  for (int mask = 0; mask < subsets; ++mask) {
    std::vector<int> active = eq_idx;
    for (std::size_t b = 0; b < ineq_idx.size(); ++b)
      if (mask & (1 << b)) active.push_back(ineq_idx[b]);

    Candidate cand = solve_active_set(qp, active);
    if (!cand.ok) continue;

    bool feasible = true;
    for (std::size_t ci = 0; ci < qp.constraints.size() && feasible; ++ci) {
      const ConstraintRow& row = qp.constraints[ci];
      if (row.is_eq) continue;
      const double val = constraint_value(qp, row, cand.w, cand.s);
      if (val > tol * (1.0 + std::abs(row.offset))) feasible = false;
    }
    for (std::size_t i = 0; i < cand.active.size() && feasible; ++i)
      if (!qp.constraints[cand.active[i]].is_eq &&
          cand.duals[i] < -tol * (1.0 + std::abs(cand.duals[i])))
        feasible = false;
    if (!feasible) continue;

    cand.objective = evaluate_objective(problem, cand.w, cand.s);
    if (cand.objective < best_obj) {
      best_obj = cand.objective;
      best = std::move(cand);
    }
  }

  if (!best.ok)
    throw std::runtime_error(
        "refsolve: no feasible active set (implementation bug or degenerate "
        "instance)");

  RefSolution sol;
  sol.w = best.w;
  sol.s = best.s;
  sol.has_s = qp.has_s;
  sol.objective = best.objective;
  sol.kkt_residual = candidate_residual(qp, best);
  if (!(sol.kkt_residual < tol))
    throw std::runtime_error("refsolve: KKT residual " +
                             std::to_string(sol.kkt_residual) +
                             " not below tolerance");
  return sol;
}

double evaluate_kkt_residual(const ProjectionProblem& problem,
                             const DenseVec& w, double s) {
  validate(problem);
  const ExpandedQP qp = expand(problem);
  const int m = qp.num_vars();

  std::vector<double> stat(m, 0.0);
  for (int j = 0; j < qp.d; ++j) stat[j] = qp.qdiag_w[j] * w[j] + qp.qlin_w[j];
  if (qp.has_s) stat[qp.d] = qp.qdiag_s * s + qp.qlin_s;

  // Constraints within act_tol of the boundary (or violating it) get a
  // least-squares multiplier; clearly inactive ones get zero.
  std::vector<int> near_active;
  std::vector<double> values(qp.constraints.size());
  for (std::size_t ci = 0; ci < qp.constraints.size(); ++ci) {
    values[ci] = constraint_value(qp, qp.constraints[ci], w, s);
    const double act_tol = 1e-7 * (1.0 + std::abs(qp.constraints[ci].offset));
    if (qp.constraints[ci].is_eq || values[ci] > -act_tol)
      near_active.push_back(static_cast<int>(ci));
  }

  // Normal equations (R R') mu = -R stat, k <= 2.
  const int k = static_cast<int>(near_active.size());
  std::vector<double> duals(k, 0.0);
  if (k > 0) {
    auto row_dot_vec = [&](int ci, const std::vector<double>& v) {
      const ConstraintRow& row = qp.constraints[ci];
      double acc = 0.0;
      for (int j = 0; j < qp.d; ++j) acc += row.coeff_w[j] * v[j];
      if (qp.has_s) acc += row.coeff_s * v[qp.d];
      return acc;
    };
    auto row_dot_row = [&](int ci, int cj) {
      const ConstraintRow& ri = qp.constraints[ci];
      const ConstraintRow& rj = qp.constraints[cj];
      double acc = dot(ri.coeff_w, rj.coeff_w);
      if (qp.has_s) acc += ri.coeff_s * rj.coeff_s;
      return acc;
    };
    std::vector<double> gram(k * k, 0.0), rhs(k, 0.0);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j)
        gram[i * k + j] = row_dot_row(near_active[i], near_active[j]);
      rhs[i] = -row_dot_vec(near_active[i], stat);
    }
    std::vector<double> mu;
    if (solve_dense(gram, rhs, k, mu)) duals = mu;
  }

  for (int i = 0; i < k; ++i) {
    const ConstraintRow& row = qp.constraints[near_active[i]];
    for (int j = 0; j < qp.d; ++j) stat[j] += duals[i] * row.coeff_w[j];
    if (qp.has_s) stat[qp.d] += duals[i] * row.coeff_s;
  }

  double res = 0.0;
  for (double v : stat) res = std::max(res, std::abs(v));
  for (std::size_t ci = 0; ci < qp.constraints.size(); ++ci) {
    const ConstraintRow& row = qp.constraints[ci];
    double dual = 0.0;
    for (int i = 0; i < k; ++i)
      if (near_active[i] == static_cast<int>(ci)) dual = duals[i];
    if (row.is_eq) {
      res = std::max(res, std::abs(values[ci]));
    } else {
      res = std::max(res, std::max(0.0, values[ci]));
      res = std::max(res, std::max(0.0, -dual));
      res = std::max(res, std::abs(dual * values[ci]));
    }
  }
  return res;
}

}  // namespace psps
