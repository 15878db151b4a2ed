#include <chrono>
#include <cmath>

#include "zoka/prox.hpp"
#include "zoka/solvers.hpp"

namespace zoka {

namespace {

/// Shared bookkeeping for the single-sequence baselines: recording, target
/// detection and budget checks.
class BaselineRun {
 public:
  BaselineRun(OracleProblem& problem, const Budget& budget, const Instrumentation* inst,
              std::string name)
      : problem_(problem),
        budget_(budget),
        inst_(inst),
        every_(inst ? std::max(1, inst->record_every) : 0),
        base_(problem.queries()),
        start_(std::chrono::steady_clock::now()) {
    trace_.solver = std::move(name);
  }

  std::uint64_t queries() const { return problem_.queries() - base_; }
  bool within_budget(std::uint64_t k) const {
    return !done_ && k < budget_.max_iters && queries() < budget_.max_queries;
  }

  /// Records at k == 0, every record_every steps, and when forced.
  void observe(std::uint64_t k, const Vector& x, bool force = false) {
    if (!force && k != 0 && (every_ == 0 || k % every_ != 0)) return;
    if (!trace_.records.empty() && trace_.records.back().k == k) return;
    TraceRecord r{k, queries(), kNaN, kNaN};
    if (inst_) r.gap = problem_.value_F(x) - inst_->F_star;
    trace_.records.push_back(r);
    if (inst_ && budget_.target_gap && r.gap <= *budget_.target_gap) done_ = true;
  }

  TrialTrace finish(std::uint64_t k, const Vector& x) {
    observe(k, x, true);
    trace_.converged = done_;
    trace_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(trace_);
  }

  TrialTrace& trace() { return trace_; }

 private:
  OracleProblem& problem_;
  const Budget& budget_;
  const Instrumentation* inst_;
  int every_;
  std::uint64_t base_;
  std::chrono::steady_clock::time_point start_;
  TrialTrace trace_;
  bool done_ = false;
};

Vector single_sphere_estimate(OracleProblem& problem, const Vector& x, double beta, Rng& rng) {
  const DirectionBatch batch = sample_option_II(problem.dimension(), 1, rng);
  return minibatch_estimate(problem, x, batch, beta).vector;
}

}  // namespace

TrialTrace run_projected_zo_gd(OracleProblem& problem, const Vector& x0, const Budget& budget,
                               Rng& rng, const ProjectedGdParams& params,
                               const Instrumentation* instrumentation) {
  require(x0.size() == problem.dimension(), "starting point has the wrong dimension");
  require(params.beta > 0.0, "smoothing radius must be positive");
  const double d = static_cast<double>(problem.dimension());
  const double alpha0 = params.alpha0 > 0.0 ? params.alpha0 : 1.0 / (d * problem.L());

  BaselineRun run(problem, budget, instrumentation, "projected-zo-gd");
  run.trace().params = {{"alpha0", alpha0},
                        {"beta", params.beta},
                        {"diminishing", params.diminishing ? 1.0 : 0.0}};

  Vector x = project_feasible(problem.psi(), x0);
  std::uint64_t k = 0;
  run.observe(k, x);
  while (run.within_budget(k)) {
    const double alpha =
        params.diminishing ? alpha0 / std::sqrt(static_cast<double>(k) + 1.0) : alpha0;
    const Vector g = single_sphere_estimate(problem, x, params.beta, rng);
    x = prox(problem.psi(), x - alpha * g, alpha);
    ++k;
    run.observe(k, x);
  }
  return run.finish(k, x);
}

TrialTrace run_zo_svrg(OracleProblem& problem, const Vector& x0, const Budget& budget, Rng& rng,
                       const ZoSvrgParams& params, const Instrumentation* instrumentation) {
  const Eigen::Index d = problem.dimension();
  require(x0.size() == d, "starting point has the wrong dimension");
  require(params.beta > 0.0, "smoothing radius must be positive");
  const int epoch = params.epoch_length > 0 ? params.epoch_length : static_cast<int>(d);
  double step = params.step;
  if (step <= 0.0) {
    const double A = (params.option == SamplingOption::CoordinateNoReplacement &&
                      params.batch_size == d)
                         ? 1.0
                         : derive_A(params.option, d, params.batch_size);
    const double M = (A + 1.0) * problem.L() / 3.0;
    step = 1.0 / (3.0 * M);
  }

  BaselineRun run(problem, budget, instrumentation, "zo-svrg");
  run.trace().params = {{"step", step},
                        {"epoch_length", epoch},
                        {"batch_size", params.batch_size},
                        {"beta", params.beta}};

  Vector x = project_feasible(problem.psi(), x0);
  std::uint64_t k = 0;
  run.observe(k, x);
  while (run.within_budget(k)) {
    const Vector ref_grad = full_estimate(problem, x, params.beta).vector;
    for (int inner = 0; inner < epoch && run.within_budget(k); ++inner) {
      const DirectionBatch batch = sample_directions(params.option, d, params.batch_size, rng);
      const Vector g = vr_gradient(problem, x, ref_grad, batch, params.beta).vector;
      x = prox(problem.psi(), x - step * g, step);
      ++k;
      run.observe(k, x);
    }
  }
  return run.finish(k, x);
}

TrialTrace run_naive_accel(OracleProblem& problem, const Vector& x0, const Budget& budget,
                           Rng& rng, const NaiveAccelParams& params,
                           const Instrumentation* instrumentation) {
  const PsiSpec& psi = problem.psi();
  if (!std::holds_alternative<PsiZero>(psi) && !std::holds_alternative<PsiBox>(psi)) {
    throw UnsupportedError("naive accelerated scheme needs psi = 0 or a box indicator");
  }
  require(x0.size() == problem.dimension(), "starting point has the wrong dimension");
  require(params.beta > 0.0, "smoothing radius must be positive");
  const double d = static_cast<double>(problem.dimension());
  const double L = problem.L();
  const double kappa_root = std::sqrt(problem.mu() / L);
  const double momentum = (1.0 - kappa_root) / (1.0 + kappa_root);

  BaselineRun run(problem, budget, instrumentation, "naive-accel");
  run.trace().params = {{"beta", params.beta}, {"momentum", momentum}};

  Vector x = project_feasible(psi, x0);
  Vector y = x;
  std::uint64_t k = 0;
  run.observe(k, x);
  while (run.within_budget(k)) {
    const Vector g = single_sphere_estimate(problem, y, params.beta, rng);
    const Vector x_next = project_feasible(psi, y - g / (d * L));
    y = x_next - momentum * (x_next - x);
    x = x_next;
    ++k;
    run.observe(k, x);
  }
  return run.finish(k, x);
}

}  // namespace zoka
