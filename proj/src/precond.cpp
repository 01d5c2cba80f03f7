#include "psps/precond.hpp"

#include <cmath>
#include <stdexcept>

namespace psps {

namespace detail {

void validate_hutchinson_config(const HutchinsonConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0))
    throw std::invalid_argument("hutchinson beta must lie in (0, 1)");
  if (!(cfg.alpha > 0.0))
    throw std::invalid_argument("hutchinson alpha must be positive");
  if (cfg.init_batches < 1)
    throw std::invalid_argument("hutchinson init_batches must be >= 1");
}

void throw_kind_mismatch(const char* op) {
  throw std::invalid_argument(std::string(op) +
                              ": preconditioner kind mismatch");
}

}  // namespace detail

PreconditionerState make_identity_state(int d) {
  PreconditionerState state;
  state.kind = PrecondKind::Identity;
  state.diag.assign(d, 1.0);
  return state;
}

PreconditionerState make_adagrad_state(int d, const AdaGradConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("adagrad eps must be positive");
  PreconditionerState state;
  state.kind = PrecondKind::AdaGrad;
  state.eps = cfg.eps;
  state.grad_sq_sum.assign(d, 0.0);
  state.last_grad.assign(d, 0.0);
  state.diag.assign(d, cfg.eps);
  return state;
}

PreconditionerState make_adam_state(int d, const AdamConfig& cfg) {
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 > 0.0 && cfg.beta2 < 1.0))
    throw std::invalid_argument("adam betas must lie in (0, 1)");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("adam eps must be positive");
  PreconditionerState state;
  state.kind = PrecondKind::Adam;
  state.eps = cfg.eps;
  state.moment1.assign(d, 0.0);
  state.moment2.assign(d, 0.0);
  state.last_grad.assign(d, 0.0);
  state.diag.assign(d, cfg.eps);
  return state;
}

DenseVec hutchinson_probe(Rng& rng, int d, ProbeKind kind) {
  DenseVec z(d);
  if (kind == ProbeKind::Rademacher) {
    for (double& x : z) x = rng.rademacher();
  } else {
    for (double& x : z) x = rng.normal();
  }
  return z;
}

void hutchinson_accumulate(PreconditionerState& state, const DenseVec& sample,
                           double beta, double alpha) {
  if (state.kind != PrecondKind::Hutchinson)
    detail::throw_kind_mismatch("hutchinson_accumulate");
  if (sample.size() != state.hutch_raw.size())
    throw std::invalid_argument("sample dimension mismatch");
  for (std::size_t j = 0; j < sample.size(); ++j) {
    state.hutch_raw[j] = beta * state.hutch_raw[j] + (1.0 - beta) * sample[j];
    state.diag[j] = std::max(alpha, std::abs(state.hutch_raw[j]));
  }
}

void adagrad_update(PreconditionerState& state, const DenseVec& g) {
  if (state.kind != PrecondKind::AdaGrad)
    detail::throw_kind_mismatch("adagrad_update");
  if (g.size() != state.grad_sq_sum.size())
    throw std::invalid_argument("gradient dimension mismatch");
  for (std::size_t j = 0; j < g.size(); ++j) {
    state.grad_sq_sum[j] += g[j] * g[j];
    state.diag[j] = std::sqrt(state.grad_sq_sum[j]) + state.eps;
  }
  state.last_grad = g;
  ++state.step_count;
}

void adam_update(PreconditionerState& state, const DenseVec& g,
                 const AdamConfig& cfg) {
  if (state.kind != PrecondKind::Adam)
    detail::throw_kind_mismatch("adam_update");
  if (g.size() != state.moment1.size())
    throw std::invalid_argument("gradient dimension mismatch");
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double corr2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t j = 0; j < g.size(); ++j) {
    state.moment1[j] = cfg.beta1 * state.moment1[j] + (1.0 - cfg.beta1) * g[j];
    state.moment2[j] =
        cfg.beta2 * state.moment2[j] + (1.0 - cfg.beta2) * g[j] * g[j];
    state.diag[j] = std::sqrt(state.moment2[j] / corr2) + state.eps;
  }
  state.last_grad = g;
}

DenseVec adam_first_moment_hat(const PreconditionerState& state,
                               const AdamConfig& cfg) {
  if (state.kind != PrecondKind::Adam)
    detail::throw_kind_mismatch("adam_first_moment_hat");
  if (state.step_count == 0)
    throw std::invalid_argument("adam state has seen no gradient yet");
  const double corr1 =
      1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
  DenseVec mhat = state.moment1;
  for (double& x : mhat) x /= corr1;
  return mhat;
}

double weighted_norm_sq(const DenseVec& g, const PreconditionerState& state) {
  if (g.size() != state.diag.size())
    throw std::invalid_argument("dimension mismatch");
  double q = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!(state.diag[j] > 0.0))
      throw std::invalid_argument("preconditioner diagonal must be positive");
    q += g[j] * g[j] / state.diag[j];
  }
  return q;
}

DenseVec apply_inverse(const PreconditionerState& state, const DenseVec& g) {
  if (g.size() != state.diag.size())
    throw std::invalid_argument("dimension mismatch");
  DenseVec out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!(state.diag[j] > 0.0))
      throw std::invalid_argument("preconditioner diagonal must be positive");
    out[j] = g[j] / state.diag[j];
  }
  return out;
}

}  // namespace psps
