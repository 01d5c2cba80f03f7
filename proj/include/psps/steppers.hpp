#pragma once

#include <optional>

#include "psps/precond.hpp"
#include "psps/vecops.hpp"

namespace psps {

// Scalar slack iterate of the L1/L2-relaxed projections.
struct SlackState {
  double s = 0.0;
};

struct SlackConfig {
  double lambda = 0.01;  // slack penalty
  double mu = 0.1;       // proximity weight
  double s0 = 0.0;       // initial slack
};

struct StepDiagnostics {
  double loss = 0.0;
  double grad_norm = 0.0;
  double weighted_grad_norm = 0.0;
};

struct StepResult {
  DenseVec w_next;
  double gamma = 0.0;  // >= 0 for every stepper
  std::optional<double> slack_next;
  StepDiagnostics diagnostics;
};

// Below this threshold on the squared gradient norm the Polyak-type steps
// return gamma = 0 instead of dividing by ~0; at interpolation points the
// numerator vanishes too, so the zero step is the correct limit.
inline double degenerate_grad_tol(const DenseVec& g) {
  const double m = inf_norm(g);
  return 1e-12 * (1.0 + m * m);
}

// w - gamma g.
StepResult sgd_step(const DenseVec& w, const DenseVec& g, double gamma);

// Baseline Adam step: w - lr * mhat_t / (sqrt(vhat_t) + eps). The state must
// have been updated with the current gradient; step_index is the caller's
// step counter and must equal the state's update count.
StepResult adam_step(const DenseVec& w, const PreconditionerState& state,
                     const AdamConfig& cfg, double lr, long step_index);

// Baseline AdaGrad step: w - lr * g_t / (sqrt(accumulator) + eps), with g_t
// the gradient most recently folded into the state.
StepResult adagrad_step(const DenseVec& w, const PreconditionerState& state,
                        double lr, long step_index);

// Stochastic Polyak step, gamma = (f - f*) / ||g||^2, optionally capped at
// gamma_b (the SPS_max variant).
StepResult sps_step(const DenseVec& w, double f_val, const DenseVec& g,
                    double f_star, std::optional<double> gamma_b = {});

// Preconditioned Polyak step (weighted projection onto the linearized
// interpolation constraint):
//   gamma = (f - f*) / ||g||^2_{B^{-1}},   w_next = w - gamma B^{-1} g.
StepResult psps_step(const DenseVec& w, double f_val, const DenseVec& g,
                     double f_star, const PreconditionerState& precond);

// L1 slack relaxation. With q = ||g||^2_{B^{-1}} and s0 = s_t - lambda/(2mu):
//   gammaL1 = (f - s0)_+ / (1/(2mu) + q)
//   gamma   = min{gammaL1, f / q}
//   w_next  = w - gamma B^{-1} g
//   s_next  = (s0 + gammaL1/(2mu))_+
// The slack recursion uses the sign that satisfies the program's KKT
// conditions (equivalently s_next = (s_t - (lambda - gammaL1)/(2mu))_+).
StepResult pspsl1_step(const DenseVec& w, double f_val, const DenseVec& g,
                       SlackState slack, const SlackConfig& cfg,
                       const PreconditionerState& precond);

// L2 slack relaxation. With lhat = 1/(mu+lambda), nu = (f - mu lhat s_t)_+:
//   gamma  = nu / (lhat + q),  w_next = w - gamma B^{-1} g,
//   s_next = lhat (mu s_t + gamma).
StepResult pspsl2_step(const DenseVec& w, double f_val, const DenseVec& g,
                       SlackState slack, const SlackConfig& cfg,
                       const PreconditionerState& precond);

struct HalfspaceResult {
  DenseVec w;
  double s;
};

// Weighted projection of (w0, s0) onto {a'(w - w0) + c <= s} with proximity
// weight delta on the slack coordinate. Feasible anchors are returned
// unchanged; otherwise with t = (c - s0) / (1 + delta ||a||^2_{B^{-1}}):
//   w' = w0 - delta t B^{-1} a,   s' = s0 + t.
HalfspaceResult halfspace_project(const DenseVec& w0, double s0,
                                  const DenseVec& a, double c, double delta,
                                  const PreconditionerState& precond);

}  // namespace psps
