#include "zoka/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <sstream>

namespace zoka::bench {

namespace {

// Room for rounding in the deterministic (exhaustive) comparisons.
constexpr double kExactTol = 1e-9;

struct TestProblem {
  std::string name;
  OracleProblem problem;
};

std::vector<TestProblem> small_problems(std::uint64_t seed) {
  std::vector<TestProblem> out;
  Rng rng(seed);
  for (int d : {5, 6}) {
    Quadratic q = random_quadratic(d, 1.0, 0.1, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < d; ++i) q.center[i] = normal(rng);
    out.push_back({"quadratic d=" + std::to_string(d), make_quadratic_problem(q, PsiZero{})});
  }
  const LogisticDataset data = synthesize_dataset(6, 30, seed + 1, std::sqrt(6.0));
  out.push_back({"logistic d=6", make_logistic_problem(data, 0.02, 0.5)});
  return out;
}

Vector random_point(Eigen::Index d, Rng& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x[i] = normal(rng);
  return x;
}

/// f(w) - f(x) - <grad f(x), w - x>
double bregman(const OracleProblem& problem, const Vector& w, const Vector& x) {
  return problem.value_f(w) - problem.value_f(x) -
         problem.reference_gradient(x).dot(w - x);
}

/// Every size-k subset of {0, ..., d-1} as an Option I batch.
std::vector<DirectionBatch> all_coordinate_batches(Eigen::Index d, int k) {
  std::vector<DirectionBatch> out;
  std::vector<bool> mask(static_cast<std::size_t>(d), false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    DirectionBatch batch;
    batch.option = SamplingOption::CoordinateNoReplacement;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) continue;
      batch.coordinates.push_back(i);
      batch.directions.push_back(Vector::Unit(d, i));
    }
    out.push_back(std::move(batch));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

/// Tracks the comparison with the smallest relative slack.
struct Worst {
  double measured = 0.0;
  double bound = 0.0;
  double ratio = -1.0;
  std::string where;

  void offer(double m, double b, const std::string& context) {
    const double r = b > 0.0 ? m / b : (m > 0.0 ? INFINITY : 0.0);
    if (r > ratio) {
      ratio = r;
      measured = m;
      bound = b;
      where = context;
    }
  }

  ClaimCheck check(const std::string& name, double allowance) const {
    ClaimCheck c;
    c.name = name;
    c.measured = measured;
    c.bound = bound * (1.0 + allowance);
    c.passed = measured <= c.bound;
    c.detail = where;
    return c;
  }
};

std::string context(double beta, int batch, int pair) {
  std::ostringstream out;
  out << "beta=" << beta << " |S|=" << batch << " pair=" << pair;
  return out.str();
}

const std::vector<double> kBetas = {1e-3, 1e-1};

void option_I_checks(const TestProblem& tp, const VerifyConfig& config, Rng& rng,
                     std::vector<ClaimCheck>& out) {
  OracleProblem problem = tp.problem;
  const Eigen::Index d = problem.dimension();
  const double L = problem.L();
  const double dd = static_cast<double>(d);

  Worst unbiased, bias, variance;
  for (int batch_size = 1; batch_size <= std::min<int>(3, d); ++batch_size) {
    const auto batches = all_coordinate_batches(d, batch_size);
    const double S = batch_size;
    for (double beta : kBetas) {
      for (int pair = 0; pair < config.pairs; ++pair) {
        const Vector x = random_point(d, rng, 1.0);
        const Vector w = x + random_point(d, rng, 0.5);
        const Vector grad = problem.reference_gradient(x);
        const Vector ref = full_estimate(problem, w, beta).vector;
        const Vector fd = full_estimate(problem, x, beta).vector;

        Vector mean = Vector::Zero(d);
        double second = 0.0;
        for (const auto& b : batches) {
          const Vector g = vr_gradient(problem, x, ref, b, beta).vector;
          mean += g;
          second += (g - grad).squaredNorm();
        }
        mean /= static_cast<double>(batches.size());
        second /= static_cast<double>(batches.size());

        const std::string where = context(beta, batch_size, pair);
        unbiased.offer((mean - fd).cwiseAbs().maxCoeff(), 1e-12, where);
        bias.offer((mean - grad).squaredNorm(), 0.25 * L * L * beta * beta * dd, where);
        const double a_term = d > 1 ? 4.0 * dd * (dd - S) * L / ((dd - 1.0) * S) : 0.0;
        variance.offer(second,
                       a_term * bregman(problem, w, x) + 2.0 * L * L * beta * beta * dd * dd,
                       where);
      }
    }
  }
  out.push_back(unbiased.check("option-I unbiasedness, " + tp.name, 0.0));
  out.push_back(bias.check("option-I bias, " + tp.name, kExactTol));
  out.push_back(variance.check("option-I variance, " + tp.name, kExactTol));

  // Full batch: the variance-reduction term vanishes and only the
  // smoothing term remains.
  Worst full;
  const auto everything = all_coordinate_batches(d, static_cast<int>(d));
  for (double beta : kBetas) {
    for (int pair = 0; pair < config.pairs; ++pair) {
      const Vector x = random_point(d, rng, 1.0);
      const Vector w = x + random_point(d, rng, 0.5);
      const Vector ref = full_estimate(problem, w, beta).vector;
      const Vector g = vr_gradient(problem, x, ref, everything.front(), beta).vector;
      full.offer((g - problem.reference_gradient(x)).squaredNorm(),
                 2.0 * L * L * beta * beta * dd * dd, context(beta, static_cast<int>(d), pair));
    }
  }
  out.push_back(full.check("option-I full-batch variance, " + tp.name, kExactTol));
}

void option_II_checks(const TestProblem& tp, const VerifyConfig& config, Rng& rng,
                      std::vector<ClaimCheck>& out) {
  OracleProblem problem = tp.problem;
  const Eigen::Index d = problem.dimension();
  const double L = problem.L();
  const double dd = static_cast<double>(d);
  const int pairs = std::max(1, config.pairs / 3);

  Worst bias, variance;
  for (int batch_size : {1, 3}) {
    const double S = batch_size;
    for (double beta : kBetas) {
      for (int pair = 0; pair < pairs; ++pair) {
        const Vector x = random_point(d, rng, 1.0);
        const Vector w = x + random_point(d, rng, 0.5);
        const Vector grad = problem.reference_gradient(x);
        const Vector ref = full_estimate(problem, w, beta).vector;

        // The control variate d<grad, u>u has mean grad, so the average of
        // (estimate - control) isolates the smoothing bias with a variance
        // of order (d L beta)^2 / n.
        Vector bias_sum = Vector::Zero(d);
        double second = 0.0;
        for (int n = 0; n < config.mc_samples; ++n) {
          const DirectionBatch b = sample_option_II(d, batch_size, rng);
          const Vector g = vr_gradient(problem, x, ref, b, beta).vector;
          second += (g - grad).squaredNorm();
          Vector control = Vector::Zero(d);
          for (const Vector& u : b.directions) control += dd * grad.dot(u) * u;
          Vector plain = minibatch_estimate(problem, x, b, beta).vector;
          bias_sum += plain - control / S;
        }
        const double samples = config.mc_samples;
        const std::string where = context(beta, batch_size, pair);
        bias.offer((bias_sum / samples).squaredNorm(), L * L * beta * beta, where);
        variance.offer(second / samples,
                       4.0 * dd * L / S * bregman(problem, w, x) +
                           2.0 * L * L * beta * beta * dd * dd,
                       where);
      }
    }
  }
  out.push_back(bias.check("option-II bias (Monte-Carlo), " + tp.name, config.mc_slack));
  out.push_back(variance.check("option-II variance (Monte-Carlo), " + tp.name, config.mc_slack));
}

void two_point_checks(const TestProblem& tp, Rng& rng, std::vector<ClaimCheck>& out) {
  OracleProblem problem = tp.problem;
  const Eigen::Index d = problem.dimension();
  const double dd = static_cast<double>(d);
  Worst worst;
  for (double beta : kBetas) {
    for (int i = 0; i < 500; ++i) {
      const Vector x = random_point(d, rng, 1.0);
      const SamplingOption option =
          i % 2 == 0 ? SamplingOption::CoordinateNoReplacement : SamplingOption::UniformSphere;
      const Vector u = sample_directions(option, d, 1, rng).directions.front();
      const Vector estimate = two_point(problem, x, u, beta, problem.eval_f(x));
      const Vector exact = dd * problem.reference_gradient(x).dot(u) * u;
      worst.offer((estimate - exact).norm(), dd * problem.L() * beta / 2.0,
                  context(beta, 1, i));
    }
  }
  out.push_back(worst.check("two-point error, " + tp.name, kExactTol));
}

std::vector<double> common_ks(const std::vector<TrialTrace>& traces) {
  std::map<std::uint64_t, std::size_t> seen;
  for (const auto& t : traces) {
    for (const auto& r : t.records) ++seen[r.k];
  }
  std::vector<double> ks;
  for (const auto& [k, count] : seen) {
    if (count == traces.size()) ks.push_back(static_cast<double>(k));
  }
  return ks;
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ClaimCheck& c) { return c.passed; });
}

std::vector<ClaimCheck> verify_estimator_bounds(const VerifyConfig& config) {
  std::vector<ClaimCheck> out;
  Rng rng(config.seed);
  for (const TestProblem& tp : small_problems(config.seed)) {
    option_I_checks(tp, config, rng, out);
    option_II_checks(tp, config, rng, out);
    two_point_checks(tp, rng, out);
  }
  ProblemConfig large;
  two_point_checks({"logistic d=40", build_problem(large)}, rng, out);
  return out;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "slope needs at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  require(sxx > 0.0, "slope needs distinct abscissae");
  return sxy / sxx;
}

DecayFit fit_lyapunov_decay(const std::vector<TrialTrace>& traces, double Delta,
                            double noise_floor) {
  require(!traces.empty(), "no traces to fit");
  require(Delta > 0.0 && Delta < 1.0, "Delta must lie in (0, 1)");
  DecayFit fit;
  fit.Delta = Delta;
  fit.noise_floor = noise_floor;
  fit.bound = std::log(1.0 - Delta / 2.0);

  const double floor = std::max(1e-3 * noise_floor, 1e-300);
  std::vector<double> xs, ys;
  for (const double k : common_ks(traces)) {
    double mean = 0.0;
    for (const auto& t : traces) {
      const auto it = std::find_if(t.records.begin(), t.records.end(),
                                   [&](const TraceRecord& r) { return static_cast<double>(r.k) == k; });
      require(std::isfinite(it->lyapunov), "traces must carry Lyapunov values");
      mean += std::max(it->lyapunov - noise_floor, floor);
    }
    mean /= static_cast<double>(traces.size());
    xs.push_back(k);
    ys.push_back(std::log(mean));
    // Pre-floor segment ends once the mean excess reaches the noise level.
    if (mean < noise_floor) break;
  }
  fit.points = static_cast<int>(xs.size());
  fit.slope = fit.points >= 2 ? least_squares_slope(xs, ys) : 0.0;

  double final_gap = 0.0;
  for (const auto& t : traces) final_gap += t.final_gap();
  fit.final_mean_gap = final_gap / static_cast<double>(traces.size());
  return fit;
}

ClaimCheck verify_lyapunov_decay(const VerifyConfig& config, DecayFit* fit_out) {
  ExperimentConfig experiment;
  experiment.problem = ProblemConfig{};
  experiment.trials = config.trials;
  experiment.seed = config.seed;
  experiment.budget.max_queries = config.max_queries;
  experiment.record_every = config.record_every;
  experiment.lyapunov = config.lyapunov;
  SolverConfig katyusha;
  katyusha.tag = "katyusha-minibatch";
  katyusha.w_update_uses_y_next = config.w_update_uses_y_next;
  experiment.solvers = {katyusha};
  const ExperimentResult result = run_experiment(experiment);

  const OracleProblem problem = build_problem(experiment.problem);
  PresetRequest request;
  request.L = problem.L();
  request.mu = problem.mu();
  request.mu_f = problem.mu_f();
  request.d = problem.dimension();
  request.x0_norm = 0.0;
  const KatyushaParams params = preset(request);
  const double Delta = lyapunov_rate(params, problem.mu());
  const double C = lyapunov_bias_term(params, problem.dimension(), problem.L(), problem.mu());

  const DecayFit fit = fit_lyapunov_decay(result.solvers.front().traces, Delta, C / Delta);
  if (fit_out) *fit_out = fit;

  ClaimCheck check;
  check.name = std::string("lyapunov decay") +
               (config.w_update_uses_y_next ? " (w <- y_next)" : "");
  check.measured = fit.slope;
  check.bound = fit.bound;
  check.passed = fit.points >= 2 && fit.slope <= fit.bound && fit.final_mean_gap <= 1e-6;
  std::ostringstream detail;
  detail << "points=" << fit.points << " Delta=" << Delta << " floor=" << fit.noise_floor
         << " final_mean_gap=" << fit.final_mean_gap;
  check.detail = detail.str();
  return check;
}

VerifyReport verify_theory(const VerifyConfig& config) {
  VerifyReport report;
  report.checks = verify_estimator_bounds(config);
  report.checks.push_back(verify_lyapunov_decay(config));
  return report;
}

}  // namespace zoka::bench
