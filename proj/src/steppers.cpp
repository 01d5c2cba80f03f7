#include "psps/steppers.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace psps {

namespace {

StepDiagnostics make_diagnostics(double f_val, const DenseVec& g, double q) {
  return {f_val, l2_norm(g), std::sqrt(std::max(q, 0.0))};
}

void check_slack_config(const SlackConfig& cfg) {
  if (!(cfg.lambda > 0.0) || !(cfg.mu > 0.0))
    throw std::invalid_argument("slack lambda and mu must be positive");
}

}  // namespace

StepResult sgd_step(const DenseVec& w, const DenseVec& g, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("sgd step needs gamma > 0");
  if (g.size() != w.size()) throw std::invalid_argument("dimension mismatch");
  StepResult res;
  res.w_next = w;
  axpy(-gamma, g, res.w_next);
  res.gamma = gamma;
  res.diagnostics = make_diagnostics(0.0, g, l2_norm_sq(g));
  return res;
}

StepResult adam_step(const DenseVec& w, const PreconditionerState& state,
                     const AdamConfig& cfg, double lr, long step_index) {
  if (state.kind != PrecondKind::Adam)
    throw std::invalid_argument("adam_step: preconditioner kind mismatch");
  if (state.step_count != step_index)
    throw std::invalid_argument(
        "adam_step: stale state (update the gradient moments first)");
  if (!(lr > 0.0)) throw std::invalid_argument("adam step needs lr > 0");
  const DenseVec mhat = adam_first_moment_hat(state, cfg);
  const DenseVec dir = apply_inverse(state, mhat);  // mhat / (sqrt(vhat)+eps)
  StepResult res;
  res.w_next = w;
  axpy(-lr, dir, res.w_next);
  res.gamma = lr;
  res.diagnostics = make_diagnostics(0.0, state.last_grad,
                                     l2_norm_sq(state.last_grad));
  return res;
}

StepResult adagrad_step(const DenseVec& w, const PreconditionerState& state,
                        double lr, long step_index) {
  if (state.kind != PrecondKind::AdaGrad)
    throw std::invalid_argument("adagrad_step: preconditioner kind mismatch");
  if (state.step_count != step_index)
    throw std::invalid_argument(
        "adagrad_step: stale state (fold in the gradient first)");
  if (!(lr > 0.0)) throw std::invalid_argument("adagrad step needs lr > 0");
  const DenseVec dir = apply_inverse(state, state.last_grad);
  StepResult res;
  res.w_next = w;
  axpy(-lr, dir, res.w_next);
  res.gamma = lr;
  res.diagnostics = make_diagnostics(0.0, state.last_grad,
                                     l2_norm_sq(state.last_grad));
  return res;
}

StepResult sps_step(const DenseVec& w, double f_val, const DenseVec& g,
                    double f_star, std::optional<double> gamma_b) {
  if (g.size() != w.size()) throw std::invalid_argument("dimension mismatch");
  const double norm_sq = l2_norm_sq(g);
  double gamma = 0.0;
  if (norm_sq >= degenerate_grad_tol(g))
    gamma = std::max(0.0, f_val - f_star) / norm_sq;
  if (gamma_b) gamma = std::min(gamma, *gamma_b);
  StepResult res;
  res.w_next = w;
  axpy(-gamma, g, res.w_next);
  res.gamma = gamma;
  res.diagnostics = make_diagnostics(f_val, g, norm_sq);
  return res;
}

StepResult psps_step(const DenseVec& w, double f_val, const DenseVec& g,
                     double f_star, const PreconditionerState& precond) {
  const double q = weighted_norm_sq(g, precond);
  StepResult res;
  res.w_next = w;
  res.gamma = 0.0;
  if (q >= degenerate_grad_tol(g)) {
    res.gamma = std::max(0.0, f_val - f_star) / q;
    const DenseVec dir = apply_inverse(precond, g);
    axpy(-res.gamma, dir, res.w_next);
  }
  res.diagnostics = make_diagnostics(f_val, g, q);
  return res;
}

StepResult pspsl1_step(const DenseVec& w, double f_val, const DenseVec& g,
                       SlackState slack, const SlackConfig& cfg,
                       const PreconditionerState& precond) {
  check_slack_config(cfg);
  if (slack.s < 0.0)
    throw std::invalid_argument("pspsl1 slack must be nonnegative");
  const double q = weighted_norm_sq(g, precond);
  const double inv_2mu = 1.0 / (2.0 * cfg.mu);
  const double s0 = slack.s - cfg.lambda * inv_2mu;
  const double gamma_l1 = std::max(0.0, f_val - s0) / (inv_2mu + q);

  StepResult res;
  res.w_next = w;
  if (q < degenerate_grad_tol(g)) {
    res.gamma = 0.0;
    res.slack_next = std::max(0.0, s0);
  } else {
    res.gamma = std::min(gamma_l1, std::max(0.0, f_val) / q);
    const DenseVec dir = apply_inverse(precond, g);
    axpy(-res.gamma, dir, res.w_next);
    res.slack_next = std::max(0.0, s0 + gamma_l1 * inv_2mu);
  }
  res.diagnostics = make_diagnostics(f_val, g, q);
  return res;
}

StepResult pspsl2_step(const DenseVec& w, double f_val, const DenseVec& g,
                       SlackState slack, const SlackConfig& cfg,
                       const PreconditionerState& precond) {
  check_slack_config(cfg);
  const double q = weighted_norm_sq(g, precond);
  const double lhat = 1.0 / (cfg.mu + cfg.lambda);
  const double nu = std::max(0.0, f_val - cfg.mu * lhat * slack.s);
  const double gamma = nu / (lhat + q);

  StepResult res;
  res.w_next = w;
  if (gamma != 0.0) {
    const DenseVec dir = apply_inverse(precond, g);
    axpy(-gamma, dir, res.w_next);
  }
  res.gamma = gamma;
  res.slack_next = lhat * (cfg.mu * slack.s + gamma);
  if (*res.slack_next < 0.0)
    std::cerr << "pspsl2: slack went negative (" << *res.slack_next
              << "); check s0 and the loss lower bound\n";
  res.diagnostics = make_diagnostics(f_val, g, q);
  return res;
}

HalfspaceResult halfspace_project(const DenseVec& w0, double s0,
                                  const DenseVec& a, double c, double delta,
                                  const PreconditionerState& precond) {
  if (!(delta > 0.0))
    throw std::invalid_argument("halfspace projection needs delta > 0");
  if (c <= s0) return {w0, s0};
  const double q = weighted_norm_sq(a, precond);
  const double t = (c - s0) / (1.0 + delta * q);
  HalfspaceResult res{w0, s0 + t};
  const DenseVec dir = apply_inverse(precond, a);
  axpy(-delta * t, dir, res.w);
  return res;
}

}  // namespace psps
