#ifndef ZOKA_ESTIMATORS_HPP
#define ZOKA_ESTIMATORS_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "zoka/core.hpp"
#include "zoka/problems.hpp"

namespace zoka {

enum class SamplingOption {
  CoordinateNoReplacement,  // Option I
  UniformSphere,            // Option II
};

std::string_view to_string(SamplingOption option);
/// Accepts "I", "1", "coordinate", "II", "2", "sphere".
SamplingOption parse_sampling_option(std::string_view text);

/// The direction set S_k.
struct DirectionBatch {
  SamplingOption option = SamplingOption::CoordinateNoReplacement;
  std::vector<Vector> directions;
  /// Coordinate indices for Option I, empty for Option II.
  std::vector<Eigen::Index> coordinates;

  std::size_t size() const { return directions.size(); }
};

struct GradientEstimate {
  Vector vector;
  std::uint64_t queries_used = 0;
};

/// batch_size distinct coordinate vectors; partial Fisher-Yates, so every
/// subset of that size is equally likely.
DirectionBatch sample_option_I(Eigen::Index d, int batch_size, Rng& rng);
/// batch_size i.i.d. directions uniform on the unit sphere.
DirectionBatch sample_option_II(Eigen::Index d, int batch_size, Rng& rng);
DirectionBatch sample_directions(SamplingOption option, Eigen::Index d, int batch_size,
                                 Rng& rng);

/// d (f(x + beta u) - f_x) / beta * u, with f_x = f(x) already queried.
/// One query.
Vector two_point(OracleProblem& problem, const Vector& x, const Vector& u, double beta,
                 double f_x);

/// Average of two_point over the batch sharing a single f(x) query.
/// |S| + 1 queries.
GradientEstimate minibatch_estimate(OracleProblem& problem, const Vector& x,
                                    const DirectionBatch& batch, double beta);

/// Forward differences along every coordinate (no d scaling). d + 1 queries.
GradientEstimate full_estimate(OracleProblem& problem, const Vector& x, double beta);

/// Variance-reduced estimator
///   g = grad_S f(x) - (1/|S|) sum_u d <ref_grad, u> u + ref_grad
/// where ref_grad is the cached full_estimate at the reference point.
/// |S| + 1 queries; the reference gradient costs nothing here.
GradientEstimate vr_gradient(OracleProblem& problem, const Vector& x, const Vector& ref_grad,
                             const DirectionBatch& batch, double beta);

}  // namespace zoka

#endif
