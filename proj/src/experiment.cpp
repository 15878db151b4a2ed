#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <exception>
#include <iterator>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "zoka/bench.hpp"

namespace zoka::bench {

namespace {

constexpr double kGapFloor = 1e-16;

using TrialRunner = std::function<TrialTrace(OracleProblem&, Rng&, const Instrumentation&)>;

double resolved_row_norm(const ProblemConfig& config) {
  return config.row_norm > 0.0 ? config.row_norm : std::sqrt(static_cast<double>(config.d));
}

KatyushaParams katyusha_params(const SolverConfig& s, const OracleProblem& problem,
                               const Vector& x0) {
  PresetRequest request;
  request.epsilon = s.epsilon;
  request.L = problem.L();
  request.mu = problem.mu();
  request.mu_f = problem.mu_f();
  request.d = problem.dimension();
  request.batch_size = s.batch_size;
  request.x0_norm = x0.norm();
  if (s.tag == "katyusha-fullbatch") {
    request.corollary = Corollary::FullBatchI;
  } else if (s.tag == "katyusha-minibatch-ii" ||
             (s.option && *s.option == SamplingOption::UniformSphere)) {
    request.corollary = Corollary::MiniBatchII;
  } else {
    request.corollary = Corollary::MiniBatchI;
  }

  KatyushaParams params;
  if (s.tag == "katyusha") {
    // Free-form: start from the mini-batch Option I constants without the batch limit.
    PresetRequest base = request;
    base.batch_size = 1;
    params = preset(base);
    params.batch_size = s.batch_size;
    if (s.option) params.option = *s.option;
    const double A = (params.option == SamplingOption::CoordinateNoReplacement &&
                      params.batch_size == problem.dimension())
                         ? 1.0
                         : derive_A(params.option, problem.dimension(), params.batch_size);
    params.M = (A + 1.0) * problem.L() / 3.0;
    params.theta = std::min(std::sqrt(static_cast<double>(problem.dimension()) * problem.mu() /
                                      params.M),
                            0.5);
  } else {
    params = preset(request);
  }
  if (s.theta) params.theta = *s.theta;
  if (s.M) params.M = *s.M;
  if (s.p) params.p = *s.p;
  if (s.beta) params.beta = *s.beta;
  params.w_update_uses_y_next = s.w_update_uses_y_next;
  params.validate(problem.dimension());
  return params;
}

/// Smoothing radius shared by the baselines: the mini-batch Option I rule for the
/// solver's epsilon, unless overridden.
double baseline_beta(const SolverConfig& s, const OracleProblem& problem, const Vector& x0) {
  if (s.beta) return *s.beta;
  const double d = static_cast<double>(problem.dimension());
  const double L = problem.L();
  const double beta = std::sqrt(problem.mu() * s.epsilon / (std::pow(d, 1.5) * L * L));
  return std::max(beta, 1e-8 * (1.0 + x0.norm()));
}

TrialRunner make_runner(const SolverConfig& s, const OracleProblem& problem, const Vector& x0,
                        const Budget& budget) {
  if (s.tag.rfind("katyusha", 0) == 0) {
    const KatyushaParams params = katyusha_params(s, problem, x0);
    return [params, x0, budget](OracleProblem& p, Rng& rng, const Instrumentation& inst) {
      return run_katyusha(p, params, x0, budget, rng, &inst);
    };
  }
  if (s.tag == "zo-svrg") {
    ZoSvrgParams params;
    params.batch_size = s.batch_size;
    params.beta = baseline_beta(s, problem, x0);
    params.epoch_length = s.epoch_length.value_or(0);
    params.step = s.step.value_or(0.0);
    params.option = s.option.value_or(SamplingOption::CoordinateNoReplacement);
    return [params, x0, budget](OracleProblem& p, Rng& rng, const Instrumentation& inst) {
      return run_zo_svrg(p, x0, budget, rng, params, &inst);
    };
  }
  if (s.tag == "projected-zo-gd") {
    ProjectedGdParams params;
    params.beta = baseline_beta(s, problem, x0);
    params.alpha0 = s.step.value_or(0.0);
    return [params, x0, budget](OracleProblem& p, Rng& rng, const Instrumentation& inst) {
      return run_projected_zo_gd(p, x0, budget, rng, params, &inst);
    };
  }
  if (s.tag == "naive-accel") {
    NaiveAccelParams params;
    params.beta = baseline_beta(s, problem, x0);
    return [params, x0, budget](OracleProblem& p, Rng& rng, const Instrumentation& inst) {
      return run_naive_accel(p, x0, budget, rng, params, &inst);
    };
  }
  throw ConfigError("unknown solver tag '" + s.tag + "'");
}

std::vector<TrialTrace> run_trials(const TrialRunner& runner, const OracleProblem& problem,
                                   const ExperimentConfig& config,
                                   const Instrumentation& instrumentation,
                                   const std::string& label) {
  std::vector<TrialTrace> traces(static_cast<std::size_t>(config.trials));
  std::vector<std::exception_ptr> errors(traces.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < traces.size(); i = next++) {
      try {
        OracleProblem clone = problem;
        clone.reset_queries();
        const std::uint64_t seed = config.seed + i;
        Rng rng(seed);
        traces[i] = runner(clone, rng, instrumentation);
        traces[i].solver = label;
        traces[i].seed = seed;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int threads = std::min<int>(resolve_thread_count(config.threads), config.trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return traces;
}

std::string trace_to_string(const TrialTrace& trace) {
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

std::string band_to_string(const QuantileBand& band) {
  std::ostringstream out;
  write_band_csv(band, out);
  return out.str();
}

double median_or_nan(std::vector<double> values) {
  if (values.empty()) return kNaN;
  return quantile(std::move(values), 0.5);
}

nlohmann::json solver_summary(const SolverResult& result) {
  nlohmann::json out;
  out["label"] = result.label;
  out["trials"] = result.traces.size();
  for (double target : {1e-4, 1e-6}) {
    std::vector<double> hits;
    for (const auto& trace : result.traces) {
      // Trials that never reach the target count as +inf for the median.
      const auto q = trace.queries_to_gap(target);
      hits.push_back(q ? static_cast<double>(*q) : std::numeric_limits<double>::infinity());
    }
    const double median = median_or_nan(hits);
    out["median_queries_to_" + format_double(target)] =
        std::isfinite(median) ? nlohmann::json(median) : nlohmann::json(nullptr);
  }
  std::vector<double> finals;
  for (const auto& trace : result.traces) finals.push_back(trace.final_gap());
  out["median_final_gap"] = median_or_nan(finals);
  if (!result.traces.empty()) out["params"] = result.traces.front().params;
  return out;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  for (const SolverResult& solver : result.solvers) {
    const fs::path dir = config.output / solver.label;
    fs::create_directories(dir);
    for (std::size_t i = 0; i < solver.traces.size(); ++i) {
      write_file_atomic(dir / ("trial_" + std::to_string(i) + ".csv"),
                        trace_to_string(solver.traces[i]));
    }
    write_file_atomic(dir / "band.csv", band_to_string(solver.band));

    nlohmann::json summary = solver_summary(solver);
    summary["F_star"] = result.reference.F_star;
    summary["initial_gap"] = result.initial_gap;
    summary["seed"] = config.seed;
    summary["max_queries"] = config.budget.max_queries;
    write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  }
}

}  // namespace

const SolverResult& ExperimentResult::solver(const std::string& label) const {
  for (const auto& s : solvers) {
    if (s.label == label) return s;
  }
  throw ArgumentError("no solver labelled '" + label + "' in experiment result");
}

OracleProblem build_problem(const ProblemConfig& config) {
  if (config.kind == ProblemKind::Logistic) {
    const LogisticDataset data =
        synthesize_dataset(config.d, config.n, config.data_seed, resolved_row_norm(config));
    if (config.box > 0.0) return make_logistic_problem(data, config.mu, config.box);
    OracleProblem boxed = make_logistic_problem(data, config.mu, 1.0);
    // Same smooth part, psi without the indicator.
    const double L = boxed.L();
    return OracleProblem(
        config.d, [boxed](const Vector& x) { return boxed.value_f(x); }, PsiL2{config.mu}, L,
        0.0, [boxed](const Vector& x) { return boxed.reference_gradient(x); });
  }
  Rng rng(config.data_seed);
  Quadratic q = random_quadratic(config.d, config.quad_L, config.quad_mu, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector center(config.d);
  for (int i = 0; i < config.d; ++i) center[i] = normal(rng);
  q.center = center * (config.center_norm / center.norm());
  if (config.box > 0.0) {
    const Vector hi = Vector::Constant(config.d, config.box);
    return make_quadratic_problem(q, PsiBox{-hi, hi});
  }
  return make_quadratic_problem(q, PsiZero{});
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const OracleProblem problem = build_problem(config.problem);
  const Vector x0 = project_feasible(problem.psi(), Vector::Zero(problem.dimension()));

  // Solver construction validates every tag and parameter before any run.
  std::vector<TrialRunner> runners;
  for (const SolverConfig& s : config.solvers) {
    try {
      runners.push_back(make_runner(s, problem, x0, config.budget));
    } catch (const ArgumentError& e) {
      throw ConfigError("solver '" + s.tag + "': " + e.what());
    }
  }

  ExperimentResult result;
  result.reference = solve_reference(problem, 1e-12);
  if (psi_has_box(problem.psi()) &&
      count_active_bounds(problem.psi(), result.reference.x_star) == 0) {
    std::cerr << "warning: no box constraint is active at the reference solution\n";
  }
  result.initial_gap = problem.value_F(x0) - result.reference.F_star;

  for (std::size_t s = 0; s < config.solvers.size(); ++s) {
    const SolverConfig& solver = config.solvers[s];
    Instrumentation inst;
    inst.x_star = result.reference.x_star;
    inst.F_star = result.reference.F_star;
    inst.record_every = solver.record_every.value_or(config.record_every);
    inst.lyapunov = config.lyapunov && solver.tag.rfind("katyusha", 0) == 0;

    SolverResult out;
    out.label = solver.label.empty() ? solver.tag : solver.label;
    out.traces = run_trials(runners[s], problem, config, inst, out.label);
    out.band = aggregate_band(out.traces, make_query_grid(out.traces, config.grid_points));
    result.solvers.push_back(std::move(out));
  }

  if (!config.output.empty()) write_outputs(config, result);
  return result;
}

// ---------------------------------------------------------------------------

double quantile(std::vector<double> sample, double prob) {
  require(!sample.empty(), "quantile of an empty sample");
  require(prob >= 0.0 && prob <= 1.0, "quantile probability must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double h = prob * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  if (std::isinf(sample[lo]) || std::isinf(sample[hi])) return h - lo < 0.5 ? sample[lo] : sample[hi];
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

std::vector<double> make_query_grid(const std::vector<TrialTrace>& traces, int points) {
  require(points >= 2, "grid needs at least two points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& trace : traces) {
    if (trace.records.empty()) continue;
    lo = std::min(lo, static_cast<double>(trace.records.front().queries));
    hi = std::max(hi, static_cast<double>(trace.records.back().queries));
  }
  if (!std::isfinite(lo)) return {};
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[i] = std::round(lo + (hi - lo) * static_cast<double>(i) / (points - 1));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

QuantileBand aggregate_band(const std::vector<TrialTrace>& traces,
                            const std::vector<double>& grid) {
  QuantileBand band;
  std::vector<double> logs;
  for (const double q : grid) {
    logs.clear();
    double sum = 0.0;
    for (const auto& trace : traces) {
      const auto& records = trace.records;
      if (records.empty()) continue;
      if (q < static_cast<double>(records.front().queries) ||
          q > static_cast<double>(records.back().queries)) {
        continue;
      }
      // Last record at or before q.
      const auto it = std::upper_bound(
          records.begin(), records.end(), q,
          [](double value, const TraceRecord& r) { return value < static_cast<double>(r.queries); });
      const double gap = std::prev(it)->gap;
      logs.push_back(std::log10(std::max(gap, kGapFloor)));
      sum += gap;
    }
    if (logs.empty()) continue;
    band.queries.push_back(q);
    band.q05.push_back(std::pow(10.0, quantile(logs, 0.05)));
    band.median.push_back(std::pow(10.0, quantile(logs, 0.5)));
    band.q95.push_back(std::pow(10.0, quantile(logs, 0.95)));
    band.mean.push_back(sum / static_cast<double>(logs.size()));
  }
  return band;
}

void write_band_csv(const QuantileBand& band, std::ostream& out) {
  out << "queries,q05,median,q95,mean\n";
  for (std::size_t i = 0; i < band.queries.size(); ++i) {
    out << format_double(band.queries[i]) << ',' << format_double(band.q05[i]) << ','
        << format_double(band.median[i]) << ',' << format_double(band.q95[i]) << ','
        << format_double(band.mean[i]) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------

ExperimentConfig fig1_config() {
  ExperimentConfig config;
  config.problem = ProblemConfig{};
  config.trials = 50;
  config.seed = 1;
  config.budget.max_queries = 200000;
  config.record_every = 10;

  SolverConfig minibatch;
  minibatch.tag = "katyusha-minibatch";
  SolverConfig fullbatch;
  fullbatch.tag = "katyusha-fullbatch";
  fullbatch.record_every = 1;
  SolverConfig svrg;
  svrg.tag = "zo-svrg";
  SolverConfig gd;
  gd.tag = "projected-zo-gd";
  gd.record_every = 100;
  config.solvers = {minibatch, fullbatch, svrg, gd};
  config.output = "results/fig1";
  return config;
}

Fig2Configs fig2_config() {
  ExperimentConfig base;
  base.problem.kind = ProblemKind::Quadratic;
  base.problem.d = 20;
  base.problem.quad_L = 1.0;
  base.problem.quad_mu = 0.05;
  base.problem.center_norm = 3.0;
  base.problem.data_seed = 99;
  base.trials = 50;
  base.seed = 1;
  base.budget.max_queries = 40000;
  base.record_every = 100;

  SolverConfig naive;
  naive.tag = "naive-accel";
  naive.beta = 1e-7;
  base.solvers = {naive};

  Fig2Configs configs{base, base};
  configs.unconstrained.problem.box = 0.0;
  configs.unconstrained.solvers[0].label = "unconstrained";
  configs.unconstrained.output = "results/fig2";
  configs.constrained.problem.box = 0.3;
  configs.constrained.solvers[0].label = "constrained";
  configs.constrained.output = "results/fig2";
  return configs;
}

Fig2Result run_fig2_demo(const Fig2Configs& configs) {
  for (const auto* config : {&configs.unconstrained, &configs.constrained}) {
    if (config->problem.kind != ProblemKind::Quadratic) {
      throw ConfigError("fig2 demo runs on quadratic problems");
    }
  }
  Fig2Result result;
  result.unconstrained = run_experiment(configs.unconstrained);
  result.constrained = run_experiment(configs.constrained);
  return result;
}

}  // namespace zoka::bench
