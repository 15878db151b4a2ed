#ifndef ZOKA_PROBLEMS_HPP
#define ZOKA_PROBLEMS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <variant>

#include "zoka/core.hpp"

namespace zoka {

// ---------------------------------------------------------------------------
// Nonsmooth part psi
// ---------------------------------------------------------------------------

struct PsiZero {};

/// Indicator of the box [lo, hi].
struct PsiBox {
  Vector lo;
  Vector hi;
};

/// (mu/2)||x||^2
struct PsiL2 {
  double mu = 0.0;
};

/// (mu/2)||x||^2 + indicator of [lo, hi].
struct PsiL2Box {
  double mu = 0.0;
  Vector lo;
  Vector hi;
};

using PsiSpec = std::variant<PsiZero, PsiBox, PsiL2, PsiL2Box>;

/// psi(x); +infinity when x leaves the box.
double psi_value(const PsiSpec& psi, const Vector& x);
double psi_strong_convexity(const PsiSpec& psi);
bool psi_has_box(const PsiSpec& psi);
/// Throws ArgumentError on a malformed spec (size mismatch, lo > hi, mu < 0).
void validate_psi(const PsiSpec& psi, Eigen::Index dimension);
/// Clamp to the box when psi has one; identity otherwise.
Vector project_feasible(const PsiSpec& psi, const Vector& x);
/// Number of coordinates within `tol` of a box bound.
int count_active_bounds(const PsiSpec& psi, const Vector& x, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Oracle problem
// ---------------------------------------------------------------------------

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

/// Composite problem min f(x) + psi(x) where f is only reachable through a
/// metered zeroth-order oracle.
///
/// The problem is immutable after construction apart from its query meter.
/// Copying it yields an independent meter, which is how per-trial clones are
/// made.
class OracleProblem {
 public:
  OracleProblem(Eigen::Index dimension, ScalarFn smooth_part, PsiSpec psi,
                double L, double mu_f, GradientFn reference_gradient = {});

  Eigen::Index dimension() const { return dimension_; }
  const PsiSpec& psi() const { return psi_; }
  double L() const { return L_; }
  double mu_f() const { return mu_f_; }
  double mu_psi() const { return mu_psi_; }
  double mu() const { return mu_f_ + mu_psi_; }

  /// f(x). Every call costs exactly one query.
  double eval_f(const Vector& x);
  /// f(x) + psi(x), through eval_f. +infinity outside the box.
  double eval_F(const Vector& x);

  /// Un-metered evaluations reserved for instrumentation and reference
  /// solves. Solvers never call these.
  double value_f(const Vector& x) const;
  double value_F(const Vector& x) const;

  bool has_reference_gradient() const { return static_cast<bool>(reference_gradient_); }
  /// Exact gradient of f. Test and reporting use only.
  Vector reference_gradient(const Vector& x) const;

  std::uint64_t queries() const { return queries_; }
  void reset_queries() { queries_ = 0; }

 private:
  void check_dimension(const Vector& x) const;

  Eigen::Index dimension_;
  ScalarFn smooth_part_;
  PsiSpec psi_;
  double L_;
  double mu_f_;
  double mu_psi_;
  GradientFn reference_gradient_;
  std::uint64_t queries_ = 0;
};

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

/// Rows of `features` are the samples a_i; `labels` holds b_i in {-1, +1}.
struct LogisticDataset {
  Matrix features;
  Vector labels;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }
  void validate() const;
};

/// Gaussian rows rescaled to norm `row_norm` (unit by default), labels from a
/// planted separator with additive label noise of scale 0.1 and zero margins
/// mapped to +1. Deterministic in `seed`.
LogisticDataset synthesize_dataset(int d, int n, std::uint64_t seed, double row_norm = 1.0);

/// lambda_max(A^T A) / (4n).
double logistic_smoothness(const LogisticDataset& data);

/// ln(1 + exp(z)) without overflow.
double softplus(double z);

/// f(x) = (1/n) sum ln(1 + exp(-b_i a_i^T x)), psi = (mu/2)||x||^2 + I_[lo,hi].
OracleProblem make_logistic_problem(const LogisticDataset& data, double mu,
                                    const Vector& lo, const Vector& hi);
/// Same with the symmetric box [-half_width, half_width]^d.
OracleProblem make_logistic_problem(const LogisticDataset& data, double mu,
                                    double half_width = 0.5);

/// CSV layout: first row "d,n" (the two integers), then n rows of d feature
/// values followed by the label. Values are written with 17 significant
/// digits so a round trip is exact.
void write_dataset_csv(const LogisticDataset& data, std::ostream& out);
LogisticDataset read_dataset_csv(std::istream& in);
void save_dataset_csv(const LogisticDataset& data, const std::filesystem::path& path);
LogisticDataset load_dataset_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Quadratics
// ---------------------------------------------------------------------------

/// f(x) = 1/2 (x - c)^T H (x - c).
struct Quadratic {
  Matrix hessian;
  Vector center;
};

/// Symmetric positive definite H with spectrum spanning exactly [mu, L]
/// (both extremes attained) and a random orthogonal eigenbasis.
Quadratic random_quadratic(int d, double L, double mu, Rng& rng);

/// L and mu_f are read off the spectrum of H.
OracleProblem make_quadratic_problem(const Quadratic& q, PsiSpec psi);

// ---------------------------------------------------------------------------
// Reference solution
// ---------------------------------------------------------------------------

struct ReferenceSolution {
  Vector x_star;
  double F_star = 0.0;
  int iterations = 0;
};

/// Accelerated proximal gradient with exact gradients and adaptive restart.
/// Stops once ||x+ - x|| <= tol * max(1, ||x||). Never touches the meter.
ReferenceSolution solve_reference(const OracleProblem& problem, double tol = 1e-12,
                                  std::optional<Vector> x0 = std::nullopt,
                                  int max_iterations = 1000000);

}  // namespace zoka

#endif
