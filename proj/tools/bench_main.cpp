#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "zoka/bench.hpp"
#include "zoka/verify.hpp"

using namespace zoka;
using namespace zoka::bench;

namespace {

void print_summary(const ExperimentResult& result) {
  std::printf("F* = %.12g, initial gap = %.6g\n", result.reference.F_star, result.initial_gap);
  std::printf("%-24s %14s %14s %14s\n", "solver", "q->1e-4", "q->1e-6", "final gap");
  for (const auto& solver : result.solvers) {
    std::vector<double> to4, to6, finals;
    for (const auto& t : solver.traces) {
      const auto a = t.queries_to_gap(1e-4);
      const auto b = t.queries_to_gap(1e-6);
      to4.push_back(a ? static_cast<double>(*a) : INFINITY);
      to6.push_back(b ? static_cast<double>(*b) : INFINITY);
      finals.push_back(t.final_gap());
    }
    std::printf("%-24s %14.6g %14.6g %14.6g\n", solver.label.c_str(), quantile(to4, 0.5),
                quantile(to6, 0.5), quantile(finals, 0.5));
  }
}

void apply_common(ExperimentConfig& config, const std::string& out, int trials, int threads) {
  if (!out.empty()) config.output = out;
  if (trials > 0) config.trials = trials;
  if (threads > 0) config.threads = threads;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order loopless Katyusha benchmarks"};
  app.require_subcommand(1);

  std::string config_path, out;
  int trials = 0, threads = 0;

  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("config", config_path, "key = value or JSON config")->required();
  run->add_option("--out", out, "Override the output directory");
  run->add_option("--threads", threads, "Worker threads (0: ZOKA_THREADS or all cores)");

  auto* fig1 = app.add_subcommand("fig1", "Logistic-regression comparison of four solvers");
  fig1->add_option("--out", out, "Output directory")->default_str("results/fig1");
  fig1->add_option("--trials", trials, "Trials per solver");
  fig1->add_option("--threads", threads, "Worker threads");

  auto* fig2 = app.add_subcommand("fig2", "Naive accelerated scheme with and without a box");
  fig2->add_option("--out", out, "Output directory")->default_str("results/fig2");
  fig2->add_option("--trials", trials, "Trials per case");
  fig2->add_option("--threads", threads, "Worker threads");

  VerifyConfig verify_config;
  auto* verify = app.add_subcommand("verify", "Empirical checks of the estimator and decay bounds");
  verify->add_option("--seed", verify_config.seed, "Base seed");
  verify->add_option("--samples", verify_config.mc_samples, "Monte-Carlo samples");
  verify->add_option("--trials", verify_config.trials, "Trials of the decay regression");
  verify->add_flag("--y-next", verify_config.w_update_uses_y_next,
                   "Refresh w with y^{k+1} instead of y^k");

  PresetRequest request;
  std::string preset_name = "MiniBatchI";
  auto* presets = app.add_subcommand("presets", "Print derived Katyusha parameters");
  presets->add_option("--preset", preset_name, "MiniBatchI, MiniBatchII or FullBatchI")
      ->check(CLI::IsMember({"MiniBatchI", "MiniBatchII", "FullBatchI"}));
  presets->add_option("--d", request.d, "Dimension")->required();
  presets->add_option("--L", request.L, "Smoothness constant")->required();
  presets->add_option("--mu", request.mu, "Strong convexity of F")->required();
  presets->add_option("--mu-f", request.mu_f, "Strong convexity of f");
  presets->add_option("--batch", request.batch_size, "Batch size |S|");
  presets->add_option("--eps", request.epsilon, "Target accuracy");
  presets->add_option("--x0-norm", request.x0_norm, "Norm of the starting point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig config = load_config(config_path);
      apply_common(config, out, 0, threads);
      print_summary(run_experiment(config));
    } else if (*fig1) {
      ExperimentConfig config = fig1_config();
      apply_common(config, out, trials, threads);
      print_summary(run_experiment(config));
    } else if (*fig2) {
      Fig2Configs configs = fig2_config();
      apply_common(configs.unconstrained, out, trials, threads);
      apply_common(configs.constrained, out, trials, threads);
      const Fig2Result result = run_fig2_demo(configs);
      print_summary(result.unconstrained);
      print_summary(result.constrained);
    } else if (*verify) {
      const VerifyReport report = verify_theory(verify_config);
      for (const auto& c : report.checks) {
        std::printf("%s  %-52s measured=%-12.4g bound=%-12.4g %s\n", c.passed ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.bound, c.detail.c_str());
      }
      return report.all_passed() ? 0 : 1;
    } else if (*presets) {
      request.corollary = parse_corollary(preset_name);
      const KatyushaParams p = preset(request);
      std::printf("preset      %s\n", std::string(to_string(request.corollary)).c_str());
      std::printf("theta       %.10g\n", p.theta);
      std::printf("M           %.10g\n", p.M);
      std::printf("eta         %.10g\n", p.eta());
      std::printf("p           %.10g\n", p.p);
      std::printf("beta        %.10g\n", p.beta);
      std::printf("batch_size  %d\n", p.batch_size);
      std::printf("option      %s\n", std::string(to_string(p.option)).c_str());
      std::printf("Delta       %.10g\n", lyapunov_rate(p, request.mu));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
