#ifndef ZOKA_SOLVERS_HPP
#define ZOKA_SOLVERS_HPP

#include <cstdint>
#include <string_view>

#include "zoka/core.hpp"
#include "zoka/estimators.hpp"
#include "zoka/problems.hpp"
#include "zoka/trace.hpp"

namespace zoka {

// ---------------------------------------------------------------------------
// ZO-L-Katyusha
// ---------------------------------------------------------------------------

struct KatyushaParams {
  double theta = 0.5;
  double M = 1.0;
  int batch_size = 1;
  double beta = 1e-6;
  double p = 1.0;
  SamplingOption option = SamplingOption::CoordinateNoReplacement;
  /// Refresh the reference point with y^{k+1} instead of y^k.
  bool w_update_uses_y_next = false;

  double eta() const { return 1.0 / (3.0 * theta); }
  double sigma(double mu_f) const { return mu_f / M; }

  /// theta in (0, 1/2], M > 0, beta > 0, p in (0, 1], batch size within the
  /// option's limits.
  void validate(Eigen::Index d) const;
};

/// Iterate quadruple plus the cached reference gradient at w.
struct SolverState {
  Vector x;
  Vector y;
  Vector z;
  Vector w;
  Vector ref_grad;
  std::uint64_t k = 0;
  std::uint64_t queries = 0;
};

struct StepRecord {
  std::uint64_t queries = 0;
  bool w_updated = false;
  Vector gradient;
};

/// y0 = z0 = w0 = x0 (clamped into the box when needed); ref_grad is the
/// (d+1)-point estimate at w0.
SolverState init_katyusha(OracleProblem& problem, const KatyushaParams& params,
                          const Vector& x0);

/// One pass of lines 2-7: convex combination, direction sampling,
/// variance-reduced gradient, prox step on z, y update, randomized reference
/// refresh. Costs |S| + 1 queries, plus d + 1 when w changes.
StepRecord katyusha_step(SolverState& state, const KatyushaParams& params,
                         OracleProblem& problem, Rng& rng);

TrialTrace run_katyusha(OracleProblem& problem, const KatyushaParams& params,
                        const Vector& x0, const Budget& budget, Rng& rng,
                        const Instrumentation* instrumentation = nullptr);

// ---------------------------------------------------------------------------
// Presets and theory
// ---------------------------------------------------------------------------

/// Variance constant A: max{4d(d-|S|)/((d-1)|S|), 1} for Option I,
/// 4d/|S| for Option II.
double derive_A(SamplingOption option, Eigen::Index d, int batch_size);

enum class Corollary { MiniBatchI, MiniBatchII, FullBatchI };

std::string_view to_string(Corollary corollary);
/// Accepts 1/2/3 and the enumerator names.
Corollary parse_corollary(std::string_view text);

struct PresetRequest {
  Corollary corollary = Corollary::MiniBatchI;
  double epsilon = 1e-8;
  double L = 1.0;
  double mu = 1.0;
  double mu_f = 0.0;
  Eigen::Index d = 1;
  int batch_size = 1;
  /// Feeds the smoothing-radius floor 1e-8 (1 + ||x0||).
  double x0_norm = 0.0;
};

KatyushaParams preset(const PresetRequest& request);

struct LyapunovReport {
  double Z = 0.0;
  double Y = 0.0;
  double W = 0.0;
  double psi_total = 0.0;
  double Delta = 0.0;
  double C_beta = 0.0;
  double noise_floor = 0.0;
};

/// Contraction factor min{mu/(2mu + 6 theta M), theta/2, p theta/(1 + theta)}.
double lyapunov_rate(const KatyushaParams& params, double mu);
/// beta^2 d^2 L (L/(d mu) + 1/(A theta)).
double lyapunov_bias_term(const KatyushaParams& params, Eigen::Index d, double L, double mu);

/// Potential of the current state. F is evaluated off-meter.
LyapunovReport lyapunov(const SolverState& state, const KatyushaParams& params,
                        const OracleProblem& problem, const Vector& x_star, double F_star);

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

struct ProjectedGdParams {
  /// Base step; <= 0 selects 1/(d L).
  double alpha0 = 0.0;
  double beta = 1e-6;
  /// alpha_k = alpha0 / sqrt(k + 1) when set, alpha0 otherwise.
  bool diminishing = true;
};

/// x+ = prox_{alpha_k psi}(x - alpha_k g), g a single 2-point sphere estimate.
TrialTrace run_projected_zo_gd(OracleProblem& problem, const Vector& x0, const Budget& budget,
                               Rng& rng, const ProjectedGdParams& params,
                               const Instrumentation* instrumentation = nullptr);

struct ZoSvrgParams {
  /// Inner steps per epoch; <= 0 selects d.
  int epoch_length = 0;
  /// Step size; <= 0 selects 1/(3M) with M = (A + 1) L / 3.
  double step = 0.0;
  int batch_size = 1;
  double beta = 1e-6;
  SamplingOption option = SamplingOption::CoordinateNoReplacement;
};

/// Epoch-based variance reduction without momentum. The reference gradient
/// is the (d+1)-point estimate at the epoch start.
TrialTrace run_zo_svrg(OracleProblem& problem, const Vector& x0, const Budget& budget,
                       Rng& rng, const ZoSvrgParams& params,
                       const Instrumentation* instrumentation = nullptr);

struct NaiveAccelParams {
  double beta = 1e-6;
};

/// Projected Nesterov scheme driven by single 2-point sphere estimates:
///   x+ = P(y - g / (d L)),  y+ = x+ - (1 - sqrt(mu/L)) / (1 + sqrt(mu/L)) (x+ - x).
/// psi must be Zero or a box indicator.
TrialTrace run_naive_accel(OracleProblem& problem, const Vector& x0, const Budget& budget,
                           Rng& rng, const NaiveAccelParams& params,
                           const Instrumentation* instrumentation = nullptr);

}  // namespace zoka

#endif
