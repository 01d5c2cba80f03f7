#pragma once

#include <concepts>
#include <span>
#include <vector>

#include "psps/rng.hpp"
#include "psps/vecops.hpp"

namespace psps {

enum class PrecondKind { Identity, Hutchinson, AdaGrad, Adam };
enum class ProbeKind { Rademacher, Normal };

struct HutchinsonConfig {
  double beta = 0.999;    // EMA momentum
  double alpha = 1e-4;    // truncation floor
  ProbeKind probe = ProbeKind::Rademacher;
  int init_batches = 10;  // m batches for D_0
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdaGradConfig {
  double eps = 1e-8;
};

// Diagonal of B_t plus the method-specific accumulators. `diag` is the
// effective positive diagonal every stepper consumes; the invariant
// diag_j > 0 holds after construction and after every update.
struct PreconditionerState {
  PrecondKind kind = PrecondKind::Identity;
  DenseVec diag;

  DenseVec hutch_raw;     // signed EMA estimate D_t; diag = max(alpha, |D_t|)
  DenseVec grad_sq_sum;   // AdaGrad accumulator, elementwise non-decreasing
  DenseVec moment1;       // Adam first-moment buffer
  DenseVec moment2;       // Adam second-moment buffer
  DenseVec last_grad;     // gradient most recently folded in (AdaGrad/Adam)
  long step_count = 0;    // AdaGrad/Adam update counter
  double eps = 1e-8;      // floor added to sqrt-type diagonals

  int dim() const { return static_cast<int>(diag.size()); }
};

PreconditionerState make_identity_state(int d);
PreconditionerState make_adagrad_state(int d, const AdaGradConfig& cfg = {});
PreconditionerState make_adam_state(int d, const AdamConfig& cfg = {});

// One probe vector: Rademacher +/-1 entries or standard normal entries.
DenseVec hutchinson_probe(Rng& rng, int d, ProbeKind kind);

// Folds one sample z (.) Hz into the EMA and refreshes the truncated
// diagonal: D_t = beta D_{t-1} + (1-beta) sample, diag = max(alpha, |D_t|).
// The EMA always consumes the raw signed D, never the truncated copy.
void hutchinson_accumulate(PreconditionerState& state, const DenseVec& sample,
                           double beta, double alpha);

// AdaGrad: accumulator += g (.) g; diag = sqrt(accumulator) + eps.
void adagrad_update(PreconditionerState& state, const DenseVec& g);

// Adam: EMA both moment buffers, bump t, diag = sqrt(vhat_t) + eps where
// vhat is the bias-corrected second moment.
void adam_update(PreconditionerState& state, const DenseVec& g,
                 const AdamConfig& cfg);

// Bias-corrected first moment m_t / (1 - beta1^t); direction used by the
// Adam baseline stepper only (the Polyak steppers keep the raw gradient).
DenseVec adam_first_moment_hat(const PreconditionerState& state,
                               const AdamConfig& cfg);

// ||g||^2 over B_t^{-1}: sum g_j^2 / diag_j.
double weighted_norm_sq(const DenseVec& g, const PreconditionerState& state);

// B_t^{-1} g, elementwise g_j / diag_j.
DenseVec apply_inverse(const PreconditionerState& state, const DenseVec& g);

template <typename O>
concept HvpOracle = requires(const O& o, const DenseVec& w,
                             std::span<const int> batch, const DenseVec& z) {
  { o.hessian_vector_product(w, batch, z) } -> std::convertible_to<DenseVec>;
};

// D_0 = (1/m) sum_i z_i (.) H_i z_i with a fresh probe per batch; the stored
// diagonal is the truncated |D_0| floored at alpha.
template <HvpOracle O>
PreconditionerState hutchinson_init(const O& oracle, const DenseVec& w0,
                                    const std::vector<std::vector<int>>& batches,
                                    const HutchinsonConfig& cfg, Rng& rng);

// One EMA step with a fresh probe on the given batch.
template <HvpOracle O>
void hutchinson_update(PreconditionerState& state, const O& oracle,
                       const DenseVec& w, std::span<const int> batch,
                       const HutchinsonConfig& cfg, Rng& rng);

namespace detail {
void validate_hutchinson_config(const HutchinsonConfig& cfg);
[[noreturn]] void throw_kind_mismatch(const char* op);
}  // namespace detail

template <HvpOracle O>
PreconditionerState hutchinson_init(const O& oracle, const DenseVec& w0,
                                    const std::vector<std::vector<int>>& batches,
                                    const HutchinsonConfig& cfg, Rng& rng) {
  detail::validate_hutchinson_config(cfg);
  if (batches.empty())
    throw std::invalid_argument("hutchinson_init: empty batch list");
  const int d = static_cast<int>(w0.size());
  DenseVec d0(d, 0.0);
  for (const auto& batch : batches) {
    const DenseVec z = hutchinson_probe(rng, d, cfg.probe);
    const DenseVec hz = oracle.hessian_vector_product(w0, batch, z);
    for (int j = 0; j < d; ++j) d0[j] += z[j] * hz[j];
  }
  const double inv_m = 1.0 / static_cast<double>(batches.size());
  PreconditionerState state;
  state.kind = PrecondKind::Hutchinson;
  state.hutch_raw.resize(d);
  state.diag.resize(d);
  for (int j = 0; j < d; ++j) {
    state.hutch_raw[j] = d0[j] * inv_m;
    state.diag[j] = std::max(cfg.alpha, std::abs(state.hutch_raw[j]));
  }
  return state;
}

template <HvpOracle O>
void hutchinson_update(PreconditionerState& state, const O& oracle,
                       const DenseVec& w, std::span<const int> batch,
                       const HutchinsonConfig& cfg, Rng& rng) {
  detail::validate_hutchinson_config(cfg);
  if (state.kind != PrecondKind::Hutchinson)
    detail::throw_kind_mismatch("hutchinson_update");
  const int d = state.dim();
  const DenseVec z = hutchinson_probe(rng, d, cfg.probe);
  const DenseVec hz = oracle.hessian_vector_product(w, batch, z);
  DenseVec sample(d);
  for (int j = 0; j < d; ++j) sample[j] = z[j] * hz[j];
  hutchinson_accumulate(state, sample, cfg.beta, cfg.alpha);
}

}  // namespace psps
