#pragma once

#include "psps/vecops.hpp"

namespace psps {

// The four projection programs behind the closed-form steppers.
//
//   LinearizedEq: min 1/2 ||w - w_t||^2_B        s.t. c + a'(w - w_t)  = 0
//   SlackL1:      min 1/2 ||w - w_t||^2_B + mu (s - s_t)^2 + lambda s
//                                                s.t. c + a'(w - w_t) <= s,
//                                                     s >= 0
//   SlackL2:      min ||w - w_t||^2_B + mu (s - s_t)^2 + lambda s^2
//                                                s.t. c + a'(w - w_t) <= s
//   Halfspace:    min ||w - w0||^2_B + delta (s - s0)^2
//                                                s.t. a'(w - w0) + c  <= s
//
// (The 1/2 on the first two norms and its absence on the last two match the
// programs the closed forms are stated for.)
enum class ProgramKind { LinearizedEq, SlackL1, SlackL2, Halfspace };

struct ProjectionProblem {
  ProgramKind kind = ProgramKind::LinearizedEq;
  DenseVec anchor_w;        // w_t (or w0)
  double anchor_s = 0.0;    // s_t (or s0); ignored for LinearizedEq
  DenseVec grad;            // a
  double offset = 0.0;      // c, the linearization constant f_i(w_t)
  DenseVec diag;            // diagonal of B_t, all positive
  double lambda = 0.0;
  double mu = 0.0;
  double delta = 0.0;
};

struct RefSolution {
  DenseVec w;
  double s = 0.0;   // meaningful only when has_s
  bool has_s = false;
  double objective = 0.0;
  double kkt_residual = 0.0;
};

// Desk-scale cap; the oracle is deliberately simple and slow.
inline constexpr int kRefsolveMaxDim = 50;

// Independent numeric minimizer: enumerates the active sets of the (at most
// two) inequality constraints, solves each candidate's KKT equalities as one
// dense linear system by Gaussian elimination with partial pivoting, keeps
// the feasible dual-feasible candidate with least objective, and reports its
// exact multipliers' KKT residual. No step-size formula from the closed-form
// steppers is used anywhere. Throws if no candidate is feasible or the
// winning residual is not below tol (either signals an implementation bug).
RefSolution solve_numeric(const ProjectionProblem& problem, double tol = 1e-9);

// The program's objective at an arbitrary point, straight from the
// definitions above.
double evaluate_objective(const ProjectionProblem& problem, const DenseVec& w,
                          double s);

// KKT residual of an arbitrary candidate: least-squares multipliers are
// fitted for the near-active constraints, then the max over stationarity,
// primal feasibility, complementarity, and dual sign violations is
// returned. Zero (to rounding) certifies optimality for these programs.
double evaluate_kkt_residual(const ProjectionProblem& problem,
                             const DenseVec& w, double s);

}  // namespace psps
