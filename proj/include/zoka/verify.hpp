#ifndef ZOKA_VERIFY_HPP
#define ZOKA_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zoka/bench.hpp"

namespace zoka::bench {

/// One empirical check of a theoretical bound: passes when measured <= bound.
struct ClaimCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;

  double slack() const { return bound - measured; }
};

struct VerifyConfig {
  std::uint64_t seed = 7;
  /// Monte-Carlo sample count for Option II checks.
  int mc_samples = 100000;
  /// Multiplicative allowance on Monte-Carlo comparisons.
  double mc_slack = 0.05;
  /// Random (x, w) pairs per exhaustive check.
  int pairs = 10;
  /// Lyapunov regression.
  int trials = 50;
  std::uint64_t max_queries = 200000;
  int record_every = 50;
  bool lyapunov = true;
  bool w_update_uses_y_next = false;
};

struct VerifyReport {
  std::vector<ClaimCheck> checks;
  bool all_passed() const;
};

/// Bias and second-moment bounds of the estimators: exhaustive over every
/// Option I batch for d <= 6, Monte-Carlo for Option II, on random quadratics
/// and small logistic problems.
std::vector<ClaimCheck> verify_estimator_bounds(const VerifyConfig& config);

struct DecayFit {
  double slope = 0.0;
  double bound = 0.0;  // log(1 - Delta / 2)
  double Delta = 0.0;
  double noise_floor = 0.0;
  int points = 0;
  double final_mean_gap = 0.0;
};

/// Least-squares slope of log(mean_t max(Psi_t^k - C/Delta, floor)) against
/// k over the pre-floor segment. Traces must share record_every and carry
/// Lyapunov values.
DecayFit fit_lyapunov_decay(const std::vector<TrialTrace>& traces, double Delta,
                            double noise_floor);

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// 50-trial mini-batch Option I run on the d=40 logistic problem followed by the
/// decay regression.
ClaimCheck verify_lyapunov_decay(const VerifyConfig& config, DecayFit* fit = nullptr);

VerifyReport verify_theory(const VerifyConfig& config);

}  // namespace zoka::bench

#endif
