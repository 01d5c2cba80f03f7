// Benchmark CLI: run convergence experiments on LIBSVM datasets, summarize
// traces, and generate synthetic fixture datasets.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 all seeds diverged.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psps/errors.hpp"
#include "psps/harness.hpp"
#include "psps/synth.hpp"

namespace {

int run_command(const psps::RunConfig& cfg) {
  const auto records = psps::run_experiment(cfg);
  if (cfg.out_path.empty()) {
    psps::write_csv(records, std::cout);
  } else {
    psps::write_csv_file(records, cfg.out_path);
    std::cerr << "wrote " << records.size() << " records to " << cfg.out_path
              << "\n";
  }
  if (psps::all_seeds_diverged(records, cfg)) {
    std::cerr << "all seeds diverged\n";
    return 4;
  }
  return 0;
}

int summarize_command(const std::string& in_path) {
  const auto records = psps::read_csv_file(in_path);
  const psps::Summary summary = psps::summarize(records);
  std::printf("epoch,median_loss,min_loss,max_loss,n_seeds\n");
  for (const auto& row : summary.per_epoch)
    std::printf("%d,%.17g,%.17g,%.17g,%d\n", row.epoch, row.median_loss,
                row.min_loss, row.max_loss, row.n_seeds);
  std::printf("# final_median_loss=%.17g\n", summary.final_median_loss);
  std::printf("# diverged_seeds=%d\n", summary.diverged_seeds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyak step-size benchmark harness"};
  app.require_subcommand(1);

  // --- run ---
  psps::RunConfig cfg;
  std::string loss_name = "logreg";
  std::string method_name = "sps";
  std::string precond_name = "identity";
  std::string probe_name = "rademacher";
  double gamma_b = 1.0;
  bool gamma_b_set = false;

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--dataset", cfg.dataset_path, "LIBSVM dataset path")
      ->required();
  run->add_option("--loss", loss_name, "logreg|nllsq");
  run->add_option("--method", method_name,
                  "sgd|adam|adagrad|sps|spsmax|psps|pspsl1|pspsl2");
  run->add_option("--precond", precond_name,
                  "identity|hutchinson|adagrad|adam (psps methods only)");
  run->add_option("--epochs", cfg.epochs, "training epochs");
  run->add_option("--batch-size", cfg.batch_size, "mini-batch size");
  run->add_option("--scale-k", cfg.scale_k, "bad-scaling factor k");
  run->add_option("--scale-seed", cfg.scale_seed, "scaling seed (fixed)");
  run->add_flag("--per-seed-scale", cfg.per_seed_scale,
                "derive the scaling seed from each run seed");
  run->add_option("--seeds", cfg.seeds, "run seeds")->delimiter(',');
  run->add_option("--f-star", cfg.f_star, "Polyak lower bound");
  run->add_option("--lr", cfg.lr, "learning rate (baselines)");
  run->add_option("--gamma-b", gamma_b, "SPS_max step cap")
      ->each([&](const std::string&) { gamma_b_set = true; });
  run->add_option("--slack.lambda", cfg.slack.lambda, "slack penalty");
  run->add_option("--slack.mu", cfg.slack.mu, "slack proximity weight");
  run->add_option("--slack.s0", cfg.slack.s0, "initial slack");
  run->add_option("--hutch.beta", cfg.hutch.beta, "Hutchinson EMA momentum");
  run->add_option("--hutch.alpha", cfg.hutch.alpha, "Hutchinson floor");
  run->add_option("--hutch.probe", probe_name, "rademacher|normal");
  run->add_option("--hutch.init-batches", cfg.hutch.init_batches,
                  "batches for D_0");
  run->add_option("--adam.beta1", cfg.adam.beta1, "Adam first-moment decay");
  run->add_option("--adam.beta2", cfg.adam.beta2, "Adam second-moment decay");
  run->add_option("--eps", cfg.eps, "AdaGrad/Adam diagonal floor");
  run->add_option("--dim", cfg.d_override,
                  "feature dimension override (trailing zero columns)");
  run->add_flag("--no-timing", cfg.no_timing, "write wallclock_ms = 0");
  run->add_flag("--parallel", cfg.parallel, "run seeds on separate threads");
  run->add_option("--out", cfg.out_path, "output CSV path (default stdout)");

  // --- summarize ---
  std::string in_path;
  CLI::App* summarize = app.add_subcommand("summarize", "summarize a trace CSV");
  summarize->add_option("--in", in_path, "trace CSV path")->required();

  // --- gen-data ---
  std::string preset = "separable";
  std::string out_path;
  int gen_n = 0, gen_d = 0;
  std::uint64_t gen_seed = 7;
  double margin = 1.0;
  CLI::App* gen = app.add_subcommand(
      "gen-data", "write a synthetic LIBSVM dataset");
  gen->add_option("--preset", preset, "separable|mushrooms-like|colon-like");
  gen->add_option("--n", gen_n, "sample count override");
  gen->add_option("--d", gen_d, "feature dimension override");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--margin", margin, "separation margin (separable preset)");
  gen->add_option("--out", out_path, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (loss_name == "logreg")
        cfg.loss = psps::LossFamily::LogReg;
      else if (loss_name == "nllsq")
        cfg.loss = psps::LossFamily::Nllsq;
      else
        throw psps::ConfigError("unknown loss: " + loss_name);

      const auto method = psps::method_from_name(method_name);
      if (!method) throw psps::ConfigError("unknown method: " + method_name);
      cfg.method = *method;

      const auto precond = psps::precond_from_name(precond_name);
      if (!precond)
        throw psps::ConfigError("unknown preconditioner: " + precond_name);
      cfg.precond = *precond;

      if (probe_name == "rademacher")
        cfg.hutch.probe = psps::ProbeKind::Rademacher;
      else if (probe_name == "normal")
        cfg.hutch.probe = psps::ProbeKind::Normal;
      else
        throw psps::ConfigError("unknown probe: " + probe_name);

      if (gamma_b_set) cfg.gamma_b = gamma_b;
      return run_command(cfg);
    }
    if (summarize->parsed()) return summarize_command(in_path);
    if (gen->parsed()) {
      psps::SparseDataset data;
      if (preset == "separable") {
        data = psps::make_separable_logreg(gen_n > 0 ? gen_n : 200,
                                           gen_d > 0 ? gen_d : 10, gen_seed,
                                           margin);
      } else if (preset == "mushrooms-like") {
        data = psps::make_onehot_categorical(gen_n > 0 ? gen_n : 8124, 22,
                                             gen_d > 0 ? gen_d : 112, gen_seed);
      } else if (preset == "colon-like") {
        data = psps::make_dense_planted(gen_n > 0 ? gen_n : 62,
                                        gen_d > 0 ? gen_d : 2000, gen_seed);
      } else {
        throw psps::ConfigError("unknown preset: " + preset);
      }
      psps::write_libsvm_file(data, out_path);
      std::cerr << "wrote " << data.n() << " x " << data.d << " dataset to "
                << out_path << "\n";
      return 0;
    }
  } catch (const psps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const psps::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
