#include "psps/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "psps/batch.hpp"
#include "psps/errors.hpp"
#include "psps/rng.hpp"

namespace psps {

namespace {

// Stream salts so that scaling, probe draws, and the D_0 batches are
// decorrelated from the shuffle stream of the same seed.
constexpr std::uint64_t kPerSeedScaleSalt = 0x5ca1ab1e5eedULL;
constexpr std::uint64_t kProbeStream = 0x9042;
constexpr std::uint64_t kHutchInitStream = 0xd0d0;

bool is_polyak(Method m) {
  return m == Method::Sps || m == Method::SpsMax || m == Method::Psps ||
         m == Method::PspsL1 || m == Method::PspsL2;
}

bool is_preconditioned(Method m) {
  return m == Method::Psps || m == Method::PspsL1 || m == Method::PspsL2;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
  if (cfg.scale_k < 0.0) throw ConfigError("scale k must be nonnegative");
  if (!is_preconditioned(cfg.method) && cfg.precond != PrecondKind::Identity)
    throw ConfigError(
        "preconditioners apply to the psps/pspsl1/pspsl2 methods only");
  if (!is_polyak(cfg.method) && !(cfg.lr > 0.0))
    throw ConfigError("baseline methods need lr > 0");
  if (!(cfg.slack.lambda > 0.0) || !(cfg.slack.mu > 0.0))
    throw ConfigError("slack lambda and mu must be positive");
  if (cfg.slack.s0 < 0.0) throw ConfigError("initial slack must be >= 0");
  if (cfg.gamma_b && !(*cfg.gamma_b > 0.0))
    throw ConfigError("gamma-b must be positive");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<TraceRecord> run_single_seed(const RunConfig& cfg,
                                         const SparseDataset& base,
                                         const SparseDataset* shared_scaled,
                                         std::uint64_t seed) {
  SparseDataset own;
  const SparseDataset* data = shared_scaled;
  if (data == nullptr) {
    own = scale_columns(base, cfg.scale_k, seed ^ kPerSeedScaleSalt).first;
    data = &own;
  }

  const LossOracle oracle(cfg.loss, *data, cfg.f_star);
  const int d = data->d;
  const int n = data->n();
  const int batch_size = cfg.batch_size;

  DenseVec w(d, 0.0);
  Rng probe_rng(mix_seed(seed, kProbeStream));
  BatchPlan plan(n, batch_size, seed);

  PreconditionerState precond = make_identity_state(d);
  const AdaGradConfig adagrad_cfg{cfg.eps};
  if (cfg.method == Method::Adam) {
    precond = make_adam_state(d, cfg.adam);
  } else if (cfg.method == Method::AdaGrad) {
    precond = make_adagrad_state(d, adagrad_cfg);
  } else if (is_preconditioned(cfg.method)) {
    switch (cfg.precond) {
      case PrecondKind::Identity:
        break;
      case PrecondKind::AdaGrad:
        precond = make_adagrad_state(d, adagrad_cfg);
        break;
      case PrecondKind::Adam:
        precond = make_adam_state(d, cfg.adam);
        break;
      case PrecondKind::Hutchinson: {
        BatchPlan init_plan(n, batch_size, mix_seed(seed, kHutchInitStream));
        std::vector<std::vector<int>> batches;
        batches.reserve(cfg.hutch.init_batches);
        for (int b = 0; b < cfg.hutch.init_batches; ++b) {
          const auto idx = init_plan.next_batch();
          batches.emplace_back(idx.begin(), idx.end());
        }
        precond = hutchinson_init(oracle, w, batches, cfg.hutch, probe_rng);
        break;
      }
    }
  }

  SlackState slack{cfg.slack.s0};
  const double gamma_b =
      cfg.method == Method::SpsMax ? cfg.gamma_b.value_or(1.0) : 0.0;

  std::vector<TraceRecord> records;
  records.reserve(cfg.epochs + 1);

  auto start = std::chrono::steady_clock::now();
  {
    TraceRecord rec;
    rec.seed = seed;
    rec.epoch = 0;
    rec.full_loss = oracle.full_value(w);
    rec.grad_norm = l2_norm(oracle.full_gradient(w));
    rec.mean_step_size = 0.0;
    rec.wallclock_ms = cfg.no_timing ? 0.0 : elapsed_ms(start);
    records.push_back(rec);
  }

  long step_counter = 0;
  bool diverged = false;
  for (int epoch = 1; epoch <= cfg.epochs && !diverged; ++epoch) {
    start = std::chrono::steady_clock::now();
    double gamma_sum = 0.0;
    long steps = 0;

    const int batches = plan.batches_per_epoch();
    for (int b = 0; b < batches; ++b) {
      const auto batch = plan.next_batch();
      const double f_val = oracle.value(w, batch);
      const DenseVec g = oracle.gradient(w, batch);

      StepResult res;
      switch (cfg.method) {
        case Method::Sgd:
          res = sgd_step(w, g, cfg.lr);
          break;
        case Method::Adam:
          adam_update(precond, g, cfg.adam);
          ++step_counter;
          res = adam_step(w, precond, cfg.adam, cfg.lr, step_counter);
          break;
        case Method::AdaGrad:
          adagrad_update(precond, g);
          ++step_counter;
          res = adagrad_step(w, precond, cfg.lr, step_counter);
          break;
        case Method::Sps:
          res = sps_step(w, f_val, g, cfg.f_star);
          break;
        case Method::SpsMax:
          res = sps_step(w, f_val, g, cfg.f_star, gamma_b);
          break;
        case Method::Psps:
        case Method::PspsL1:
        case Method::PspsL2: {
          switch (cfg.precond) {
            case PrecondKind::Identity:
              break;
            case PrecondKind::Hutchinson:
              hutchinson_update(precond, oracle, w, batch, cfg.hutch,
                                probe_rng);
              break;
            case PrecondKind::AdaGrad:
              adagrad_update(precond, g);
              break;
            case PrecondKind::Adam:
              adam_update(precond, g, cfg.adam);
              break;
          }
          if (cfg.method == Method::Psps) {
            res = psps_step(w, f_val, g, cfg.f_star, precond);
          } else if (cfg.method == Method::PspsL1) {
            res = pspsl1_step(w, f_val, g, slack, cfg.slack, precond);
            slack.s = *res.slack_next;
          } else {
            res = pspsl2_step(w, f_val, g, slack, cfg.slack, precond);
            slack.s = *res.slack_next;
          }
          break;
        }
      }

      w = std::move(res.w_next);
      gamma_sum += res.gamma;
      ++steps;
      if (!std::isfinite(f_val) || !all_finite(w)) {
        diverged = true;
        break;
      }
    }

    TraceRecord rec;
    rec.seed = seed;
    rec.epoch = epoch;
    rec.full_loss = oracle.full_value(w);
    rec.grad_norm = l2_norm(oracle.full_gradient(w));
    rec.mean_step_size = steps > 0 ? gamma_sum / static_cast<double>(steps) : 0.0;
    rec.wallclock_ms = cfg.no_timing ? 0.0 : elapsed_ms(start);
    records.push_back(rec);
    if (!std::isfinite(rec.full_loss)) diverged = true;
  }
  return records;
}

}  // namespace

std::vector<TraceRecord> run_experiment(const RunConfig& cfg,
                                        const SparseDataset& raw_data) {
  validate_config(cfg);
  const SparseDataset base =
      remap_labels(raw_data, cfg.loss == LossFamily::LogReg
                                 ? LabelConvention::PlusMinusOne
                                 : LabelConvention::ZeroOne);
  std::optional<SparseDataset> shared;
  if (!cfg.per_seed_scale)
    shared = scale_columns(base, cfg.scale_k, cfg.scale_seed).first;
  const SparseDataset* shared_ptr = shared ? &*shared : nullptr;

  std::vector<std::vector<TraceRecord>> per_seed(cfg.seeds.size());
  if (cfg.parallel) {
    std::vector<std::future<std::vector<TraceRecord>>> futures;
    futures.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds)
      futures.push_back(std::async(std::launch::async, [&, seed] {
        return run_single_seed(cfg, base, shared_ptr, seed);
      }));
    for (std::size_t i = 0; i < futures.size(); ++i)
      per_seed[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      per_seed[i] = run_single_seed(cfg, base, shared_ptr, cfg.seeds[i]);
  }

  std::vector<TraceRecord> records;
  for (auto& seed_records : per_seed)
    records.insert(records.end(), seed_records.begin(), seed_records.end());
  std::stable_sort(records.begin(), records.end(),
                   [](const TraceRecord& a, const TraceRecord& b) {
                     return a.seed != b.seed ? a.seed < b.seed
                                             : a.epoch < b.epoch;
                   });
  return records;
}

std::vector<TraceRecord> run_experiment(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) throw ConfigError("dataset path is required");
  const SparseDataset raw = parse_libsvm_file(cfg.dataset_path, cfg.d_override);
  return run_experiment(cfg, raw);
}

bool seed_diverged(const std::vector<TraceRecord>& records, std::uint64_t seed,
                   int epochs) {
  int count = 0;
  for (const auto& rec : records) {
    if (rec.seed != seed) continue;
    ++count;
    if (!std::isfinite(rec.full_loss)) return true;
  }
  return count < epochs + 1;
}

bool all_seeds_diverged(const std::vector<TraceRecord>& records,
                        const RunConfig& cfg) {
  for (std::uint64_t seed : cfg.seeds)
    if (!seed_diverged(records, seed, cfg.epochs)) return false;
  return true;
}

namespace {

void append_float(std::string& out, double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  out.append(buf, buf + len);
}

const char kCsvHeader[] = "seed,epoch,full_loss,grad_norm,mean_step_size,wallclock_ms";

}  // namespace

void write_csv(const std::vector<TraceRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  std::string line;
  for (const auto& rec : records) {
    line.clear();
    line += std::to_string(rec.seed);
    line += ',';
    line += std::to_string(rec.epoch);
    line += ',';
    append_float(line, rec.full_loss);
    line += ',';
    append_float(line, rec.grad_norm);
    line += ',';
    append_float(line, rec.mean_step_size);
    line += ',';
    append_float(line, rec.wallclock_ms);
    line += '\n';
    out << line;
  }
}

void write_csv_file(const std::vector<TraceRecord>& records,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path);
  write_csv(records, out);
  if (!out) throw DataError("write failed: " + path);
}

std::vector<TraceRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw DataError("unexpected CSV header: '" + line + "'");

  std::vector<TraceRecord> records;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    TraceRecord rec;
    try {
      auto next = [&]() -> std::string {
        if (!std::getline(ls, field, ',')) throw DataError("missing field");
        return field;
      };
      rec.seed = std::stoull(next());
      rec.epoch = std::stoi(next());
      rec.full_loss = std::strtod(next().c_str(), nullptr);
      rec.grad_norm = std::strtod(next().c_str(), nullptr);
      rec.mean_step_size = std::strtod(next().c_str(), nullptr);
      rec.wallclock_ms = std::strtod(next().c_str(), nullptr);
    } catch (const std::exception&) {
      throw ParseError("malformed CSV row", line_number);
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<TraceRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return read_csv(in);
}

Summary summarize(const std::vector<TraceRecord>& records) {
  if (records.empty()) throw DataError("no records to summarize");

  std::map<std::uint64_t, std::map<int, double>> by_seed;
  for (const auto& rec : records) {
    auto [it, inserted] = by_seed[rec.seed].emplace(rec.epoch, rec.full_loss);
    (void)it;
    if (!inserted)
      throw DataError("duplicate (seed, epoch) pair; records mix runs");
  }

  int max_epochs = 0;
  for (const auto& [seed, epochs] : by_seed)
    max_epochs = std::max(max_epochs, epochs.rbegin()->first);

  // A seed is diverged if its trace is cut short or contains a non-finite
  // loss; it is excluded from the statistics entirely.
  std::vector<const std::map<int, double>*> healthy;
  int diverged = 0;
  for (const auto& [seed, epochs] : by_seed) {
    bool ok = epochs.rbegin()->first == max_epochs;
    for (const auto& [epoch, loss] : epochs)
      if (!std::isfinite(loss)) ok = false;
    if (ok)
      healthy.push_back(&epochs);
    else
      ++diverged;
  }

  Summary summary;
  summary.diverged_seeds = diverged;
  for (int epoch = 0; epoch <= max_epochs; ++epoch) {
    std::vector<double> losses;
    for (const auto* epochs : healthy) {
      auto it = epochs->find(epoch);
      if (it != epochs->end()) losses.push_back(it->second);
    }
    if (losses.empty()) continue;
    std::sort(losses.begin(), losses.end());
    SummaryRow row;
    row.epoch = epoch;
    row.n_seeds = static_cast<int>(losses.size());
    row.min_loss = losses.front();
    row.max_loss = losses.back();
    const std::size_t mid = losses.size() / 2;
    row.median_loss = losses.size() % 2 == 1
                          ? losses[mid]
                          : 0.5 * (losses[mid - 1] + losses[mid]);
    summary.per_epoch.push_back(row);
  }
  if (summary.per_epoch.empty())
    throw DataError("every seed diverged; nothing to summarize");
  summary.final_median_loss = summary.per_epoch.back().median_loss;
  return summary;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Sgd: return "sgd";
    case Method::Adam: return "adam";
    case Method::AdaGrad: return "adagrad";
    case Method::Sps: return "sps";
    case Method::SpsMax: return "spsmax";
    case Method::Psps: return "psps";
    case Method::PspsL1: return "pspsl1";
    case Method::PspsL2: return "pspsl2";
  }
  return "?";
}

const char* precond_name(PrecondKind k) {
  switch (k) {
    case PrecondKind::Identity: return "identity";
    case PrecondKind::Hutchinson: return "hutchinson";
    case PrecondKind::AdaGrad: return "adagrad";
    case PrecondKind::Adam: return "adam";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  for (Method m : {Method::Sgd, Method::Adam, Method::AdaGrad, Method::Sps,
                   Method::SpsMax, Method::Psps, Method::PspsL1,
                   Method::PspsL2})
    if (name == method_name(m)) return m;
  return std::nullopt;
}

std::optional<PrecondKind> precond_from_name(const std::string& name) {
  for (PrecondKind k : {PrecondKind::Identity, PrecondKind::Hutchinson,
                        PrecondKind::AdaGrad, PrecondKind::Adam})
    if (name == precond_name(k)) return k;
  return std::nullopt;
}

}  // namespace psps
