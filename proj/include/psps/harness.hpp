#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psps/dataset.hpp"
#include "psps/losses.hpp"
#include "psps/precond.hpp"
#include "psps/steppers.hpp"

namespace psps {

enum class Method { Sgd, Adam, AdaGrad, Sps, SpsMax, Psps, PspsL1, PspsL2 };

struct RunConfig {
  std::string dataset_path;
  LossFamily loss = LossFamily::LogReg;
  Method method = Method::Sps;
  PrecondKind precond = PrecondKind::Identity;

  HutchinsonConfig hutch;
  AdamConfig adam;
  double eps = 1e-8;  // AdaGrad floor

  int batch_size = 32;
  int epochs = 50;
  double scale_k = 0.0;
  std::uint64_t scale_seed = 13;  // shared corruption across seeds by default
  bool per_seed_scale = false;    // derive the scaling seed from each run seed
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double f_star = 0.0;
  double lr = 0.1;                     // baselines only
  std::optional<double> gamma_b;       // SPS_max cap; defaults to 1.0
  SlackConfig slack;
  int d_override = 0;   // 0 = infer d from the file
  bool no_timing = false;  // write wallclock_ms = 0 (byte-stable CSV)
  bool parallel = false;   // run seeds on separate threads
  std::string out_path;
};

// One row of a convergence trace. Epoch 0 is the pre-training evaluation at
// w0 = 0. full_loss and grad_norm are whole-dataset quantities;
// mean_step_size averages gamma_t over the epoch's batches.
struct TraceRecord {
  std::uint64_t seed = 0;
  int epoch = 0;
  double full_loss = 0.0;
  double grad_norm = 0.0;
  double mean_step_size = 0.0;
  double wallclock_ms = 0.0;
};

// Runs every seed (sequentially or thread-parallel; the trace is identical
// either way) and returns records sorted by (seed, epoch). A seed whose loss
// or iterate goes non-finite is cut short: its partial trace ends with the
// non-finite record.
std::vector<TraceRecord> run_experiment(const RunConfig& config);
std::vector<TraceRecord> run_experiment(const RunConfig& config,
                                        const SparseDataset& raw_data);

bool seed_diverged(const std::vector<TraceRecord>& records, std::uint64_t seed,
                   int epochs);
bool all_seeds_diverged(const std::vector<TraceRecord>& records,
                        const RunConfig& config);

// CSV schema: header `seed,epoch,full_loss,grad_norm,mean_step_size,
// wallclock_ms`, floats with 17 significant digits.
void write_csv(const std::vector<TraceRecord>& records, std::ostream& out);
void write_csv_file(const std::vector<TraceRecord>& records,
                    const std::string& path);
std::vector<TraceRecord> read_csv(std::istream& in);
std::vector<TraceRecord> read_csv_file(const std::string& path);

struct SummaryRow {
  int epoch = 0;
  double median_loss = 0.0;
  double min_loss = 0.0;
  double max_loss = 0.0;
  int n_seeds = 0;
};

struct Summary {
  std::vector<SummaryRow> per_epoch;
  double final_median_loss = 0.0;
  int diverged_seeds = 0;
};

// Per-epoch median/min/max of full_loss across seeds. Diverged seeds are
// excluded from the statistics and counted separately. Duplicate
// (seed, epoch) keys mean the records mix runs and are rejected.
Summary summarize(const std::vector<TraceRecord>& records);

const char* method_name(Method m);
const char* precond_name(PrecondKind k);
std::optional<Method> method_from_name(const std::string& name);
std::optional<PrecondKind> precond_from_name(const std::string& name);

}  // namespace psps
