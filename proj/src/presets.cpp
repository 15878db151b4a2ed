#include <algorithm>
#include <cmath>
#include <string>

#include "zoka/solvers.hpp"

namespace zoka {

double derive_A(SamplingOption option, Eigen::Index d, int batch_size) {
  require(batch_size >= 1, "batch size must be positive");
  const double dd = static_cast<double>(d);
  const double s = static_cast<double>(batch_size);
  if (option == SamplingOption::UniformSphere) {
    require(d >= 1, "dimension must be positive");
    return 4.0 * dd / s;
  }
  require(d >= 2, "Option I variance constant needs d >= 2");
  require(batch_size <= d, "Option I needs batch size <= d");
  return std::max(4.0 * dd * (dd - s) / ((dd - 1.0) * s), 1.0);
}

std::string_view to_string(Corollary corollary) {
  switch (corollary) {
    case Corollary::MiniBatchI: return "MiniBatchI";
    case Corollary::MiniBatchII: return "MiniBatchII";
    case Corollary::FullBatchI: return "FullBatchI";
  }
  return "?";
}

Corollary parse_corollary(std::string_view text) {
  if (text == "1" || text == "MiniBatchI") return Corollary::MiniBatchI;
  if (text == "2" || text == "MiniBatchII") return Corollary::MiniBatchII;
  if (text == "3" || text == "FullBatchI") return Corollary::FullBatchI;
  throw ArgumentError("unknown corollary '" + std::string(text) + "'");
}

KatyushaParams preset(const PresetRequest& req) {
  require(req.L > 0.0, "preset needs L > 0");
  require(req.mu > 0.0, "preset needs mu > 0");
  require(req.mu_f >= 0.0 && req.mu_f <= req.L, "preset needs 0 <= mu_f <= L");
  require(req.epsilon > 0.0, "preset needs epsilon > 0");
  require(req.d >= 1, "preset needs d >= 1");

  const double d = static_cast<double>(req.d);
  const double L = req.L;
  const double mu = req.mu;
  KatyushaParams params;

  if (req.corollary == Corollary::FullBatchI) {
    params.option = SamplingOption::CoordinateNoReplacement;
    params.batch_size = static_cast<int>(req.d);
    params.M = 2.0 * L / 3.0;
    params.theta = std::min(std::sqrt(mu / params.M), 0.5);
    params.p = 1.0;
    params.beta = std::sqrt(mu * req.epsilon / (d * d * L * L));
  } else {
    const double s = static_cast<double>(req.batch_size);
    const char* name = req.corollary == Corollary::MiniBatchI ? "mini-batch Option I preset"
                                                              : "mini-batch Option II preset";
    if (req.batch_size < 1 || s * s > d) {
      throw ArgumentError(std::string(name) + " requires 1 <= |S| <= sqrt(d); got |S| = " +
                          std::to_string(req.batch_size) + ", d = " + std::to_string(req.d));
    }
    if (req.corollary == Corollary::MiniBatchI) {
      require(req.d >= 2, std::string(name) + " requires d >= 2");
      params.option = SamplingOption::CoordinateNoReplacement;
      params.M = 4.0 * d * (d - s) * L / (3.0 * (d - 1.0) * s) + L / 3.0;
    } else {
      params.option = SamplingOption::UniformSphere;
      params.M = 4.0 * d * L / s + L / 3.0;
    }
    params.batch_size = req.batch_size;
    params.theta = std::min(std::sqrt(d * mu / params.M), 0.5);
    params.p = 1.0 / d;
    params.beta = std::sqrt(mu * req.epsilon / (std::pow(d, 1.5) * L * L));
  }
  params.beta = std::max(params.beta, 1e-8 * (1.0 + req.x0_norm));
  return params;
}

double lyapunov_rate(const KatyushaParams& params, double mu) {
  const double theta = params.theta;
  return std::min({mu / (2.0 * mu + 6.0 * theta * params.M), theta / 2.0,
                   params.p * theta / (1.0 + theta)});
}

namespace {

double variance_constant(const KatyushaParams& params, Eigen::Index d) {
  // A full coordinate batch makes the first branch vanish for any d.
  if (params.option == SamplingOption::CoordinateNoReplacement && params.batch_size == d) {
    return 1.0;
  }
  return derive_A(params.option, d, params.batch_size);
}

}  // namespace

double lyapunov_bias_term(const KatyushaParams& params, Eigen::Index d, double L, double mu) {
  const double dd = static_cast<double>(d);
  const double A = variance_constant(params, d);
  const double b = params.beta;
  return b * b * dd * dd * L * (L / (dd * mu) + 1.0 / (A * params.theta));
}

LyapunovReport lyapunov(const SolverState& state, const KatyushaParams& params,
                        const OracleProblem& problem, const Vector& x_star, double F_star) {
  if (x_star.size() != problem.dimension() || !std::isfinite(F_star)) {
    throw UnsupportedError("lyapunov needs the optimal point and value");
  }
  const double mu = problem.mu();
  const double theta = params.theta;

  LyapunovReport report;
  report.Z = 0.5 * (mu + 3.0 * theta * params.M) * (state.z - x_star).squaredNorm();
  report.Y = (problem.value_F(state.y) - F_star) / theta;
  report.W = (1.0 + theta) / (2.0 * params.p * theta) * (problem.value_F(state.w) - F_star);
  report.psi_total = report.Z + report.Y + report.W;
  report.Delta = lyapunov_rate(params, mu);
  report.C_beta = lyapunov_bias_term(params, problem.dimension(), problem.L(), mu);
  report.noise_floor = report.C_beta / report.Delta;
  return report;
}

}  // namespace zoka
