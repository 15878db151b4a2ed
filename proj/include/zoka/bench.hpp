#ifndef ZOKA_BENCH_HPP
#define ZOKA_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zoka/problems.hpp"
#include "zoka/solvers.hpp"
#include "zoka/trace.hpp"

namespace zoka::bench {

enum class ProblemKind { Logistic, Quadratic };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::Logistic;
  int d = 40;
  int n = 30;
  double mu = 0.02;
  /// Symmetric box [-box, box]^d; <= 0 means no box.
  double box = 0.5;
  std::uint64_t data_seed = 2024;
  /// Logistic only: norm of every feature row; <= 0 selects sqrt(d).
  double row_norm = 0.0;
  /// Quadratic only: spectrum bounds of H and the norm of the planted
  /// unconstrained minimizer.
  double quad_L = 1.0;
  double quad_mu = 0.01;
  double center_norm = 3.0;
};

/// Known tags: katyusha-minibatch, katyusha-minibatch-ii, katyusha-fullbatch,
/// katyusha, zo-svrg, projected-zo-gd, naive-accel.
struct SolverConfig {
  std::string tag;
  /// Output subdirectory; defaults to the tag.
  std::string label;
  int batch_size = 1;
  double epsilon = 1e-8;
  std::optional<SamplingOption> option;
  /// Explicit overrides of preset-derived values.
  std::optional<double> theta;
  std::optional<double> M;
  std::optional<double> p;
  std::optional<double> beta;
  std::optional<double> step;
  std::optional<int> epoch_length;
  bool w_update_uses_y_next = false;
  std::optional<int> record_every;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::vector<SolverConfig> solvers;
  int trials = 50;
  std::uint64_t seed = 1;
  Budget budget;
  int record_every = 10;
  bool lyapunov = false;
  int grid_points = 200;
  /// Empty: nothing written.
  std::filesystem::path output;
  /// 0: read ZOKA_THREADS, falling back to hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct QuantileBand {
  std::vector<double> queries;
  std::vector<double> q05;
  std::vector<double> median;
  std::vector<double> q95;
  std::vector<double> mean;
};

struct SolverResult {
  std::string label;
  std::vector<TrialTrace> traces;
  QuantileBand band;
};

struct ExperimentResult {
  ReferenceSolution reference;
  double initial_gap = 0.0;
  std::vector<SolverResult> solvers;

  const SolverResult& solver(const std::string& label) const;
};

/// Builds the configured problem (without a meter history).
OracleProblem build_problem(const ProblemConfig& config);

/// Every solver, trials seeded base_seed + i, traces aligned on a shared
/// query grid. Writes <out>/<label>/trial_<i>.csv, band.csv and summary.json when an output
/// directory is configured.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Quantiles are taken over log10(max(gap, 1e-16)) and mapped back; `mean` is
/// the arithmetic mean of the gap. A trial contributes to a grid point only
/// when the point lies inside [first record, last record] of that trial.
QuantileBand aggregate_band(const std::vector<TrialTrace>& traces,
                            const std::vector<double>& grid);
std::vector<double> make_query_grid(const std::vector<TrialTrace>& traces, int points);

/// Linear-interpolated (type 7) quantile of an unsorted sample.
double quantile(std::vector<double> sample, double prob);

void write_band_csv(const QuantileBand& band, std::ostream& out);

/// Writes through a temporary file followed by a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Default setups.
ExperimentConfig fig1_config();
/// Two configs sharing everything but the box.
struct Fig2Configs {
  ExperimentConfig unconstrained;
  ExperimentConfig constrained;
};
Fig2Configs fig2_config();

struct Fig2Result {
  ExperimentResult unconstrained;
  ExperimentResult constrained;
};
Fig2Result run_fig2_demo(const Fig2Configs& configs);

// ---------------------------------------------------------------------------
// Configuration files
// ---------------------------------------------------------------------------

/// Flat key -> value pairs: problem.*, solver[i].*, trials, seed, budget.*,
/// record_every, output, threads.
using FlatConfig = std::map<std::string, std::string>;

/// JSON objects are flattened with '.', arrays with [i]. Anything else is read
/// as `key = value` lines with '#' comments; [section] headers prefix keys.
FlatConfig parse_flat_config(const std::string& text);
ExperimentConfig config_from_flat(const FlatConfig& flat);
ExperimentConfig load_config(const std::filesystem::path& path);

int resolve_thread_count(int requested);

}  // namespace zoka::bench

#endif
