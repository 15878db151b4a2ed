#include <chrono>
#include <cmath>

#include "zoka/prox.hpp"
#include "zoka/solvers.hpp"

namespace zoka {

void KatyushaParams::validate(Eigen::Index d) const {
  require(theta > 0.0 && theta <= 0.5, "theta must lie in (0, 1/2]");
  require(M > 0.0, "M must be positive");
  require(beta > 0.0, "smoothing radius must be positive");
  require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
  require(batch_size >= 1, "batch size must be positive");
  if (option == SamplingOption::CoordinateNoReplacement) {
    require(batch_size <= d, "Option I needs batch size <= d");
  }
}

SolverState init_katyusha(OracleProblem& problem, const KatyushaParams& params,
                          const Vector& x0) {
  params.validate(problem.dimension());
  require(x0.size() == problem.dimension(), "starting point has the wrong dimension");
  require(x0.allFinite(), "starting point must be finite");
  const std::uint64_t before = problem.queries();

  SolverState state;
  state.w = project_feasible(problem.psi(), x0);
  state.x = state.w;
  state.y = state.w;
  state.z = state.w;
  state.ref_grad = full_estimate(problem, state.w, params.beta).vector;
  state.queries = problem.queries() - before;
  return state;
}

StepRecord katyusha_step(SolverState& state, const KatyushaParams& params,
                         OracleProblem& problem, Rng& rng) {
  const std::uint64_t before = problem.queries();
  const double theta = params.theta;

  state.x = theta * state.z + 0.5 * state.w + (0.5 - theta) * state.y;

  const DirectionBatch batch =
      sample_directions(params.option, problem.dimension(), params.batch_size, rng);
  StepRecord record;
  record.gradient = vr_gradient(problem, state.x, state.ref_grad, batch, params.beta).vector;

  const Vector z_next = katyusha_z_step(state.z, state.x, record.gradient, params.eta(),
                                        params.sigma(problem.mu_f()), params.M, problem.psi());
  Vector y_next = state.x + theta * (z_next - state.z);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < params.p) {
    state.w = params.w_update_uses_y_next ? y_next : state.y;
    state.ref_grad = full_estimate(problem, state.w, params.beta).vector;
    record.w_updated = true;
  }
  state.z = z_next;
  state.y = std::move(y_next);
  ++state.k;

  record.queries = problem.queries() - before;
  state.queries += record.queries;
  return record;
}

TrialTrace run_katyusha(OracleProblem& problem, const KatyushaParams& params, const Vector& x0,
                        const Budget& budget, Rng& rng, const Instrumentation* instrumentation) {
  const auto start = std::chrono::steady_clock::now();
  TrialTrace trace;
  trace.solver = "katyusha";
  trace.params = {{"theta", params.theta},
                  {"M", params.M},
                  {"batch_size", params.batch_size},
                  {"beta", params.beta},
                  {"p", params.p},
                  {"option", params.option == SamplingOption::CoordinateNoReplacement ? 1.0 : 2.0},
                  {"w_update_uses_y_next", params.w_update_uses_y_next ? 1.0 : 0.0}};

  SolverState state = init_katyusha(problem, params, x0);
  const int every = instrumentation ? std::max(1, instrumentation->record_every) : 0;

  auto record = [&] {
    TraceRecord r{state.k, state.queries, kNaN, kNaN};
    if (instrumentation) {
      r.gap = problem.value_F(state.y) - instrumentation->F_star;
      if (instrumentation->lyapunov) {
        r.lyapunov =
            lyapunov(state, params, problem, instrumentation->x_star, instrumentation->F_star)
                .psi_total;
      }
    }
    trace.records.push_back(r);
    return instrumentation && budget.target_gap && r.gap <= *budget.target_gap;
  };

  bool done = record();
  while (!done && state.k < budget.max_iters && state.queries < budget.max_queries) {
    katyusha_step(state, params, problem, rng);
    if (every > 0 && state.k % every == 0) done = record();
  }
  if (trace.records.back().k != state.k) done = record();

  trace.converged = done;
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace zoka
