#include "zoka/estimators.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace zoka {

std::string_view to_string(SamplingOption option) {
  return option == SamplingOption::CoordinateNoReplacement ? "I" : "II";
}

SamplingOption parse_sampling_option(std::string_view text) {
  if (text == "I" || text == "1" || text == "coordinate") {
    return SamplingOption::CoordinateNoReplacement;
  }
  if (text == "II" || text == "2" || text == "sphere") return SamplingOption::UniformSphere;
  throw ArgumentError("unknown sampling option '" + std::string(text) + "'");
}

DirectionBatch sample_option_I(Eigen::Index d, int batch_size, Rng& rng) {
  require(batch_size >= 1, "batch size must be positive");
  require(batch_size <= d, "Option I needs batch size <= d (sampling without replacement)");
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(d));
  std::iota(indices.begin(), indices.end(), Eigen::Index{0});

  DirectionBatch batch;
  batch.option = SamplingOption::CoordinateNoReplacement;
  batch.directions.reserve(batch_size);
  batch.coordinates.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, d - 1);
    std::swap(indices[i], indices[pick(rng)]);
    batch.coordinates.push_back(indices[i]);
    batch.directions.push_back(Vector::Unit(d, indices[i]));
  }
  return batch;
}

DirectionBatch sample_option_II(Eigen::Index d, int batch_size, Rng& rng) {
  require(d >= 1, "dimension must be positive");
  require(batch_size >= 1, "batch size must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);

  DirectionBatch batch;
  batch.option = SamplingOption::UniformSphere;
  batch.directions.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    Vector u(d);
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j) u[j] = normal(rng);
      norm = u.norm();
    } while (norm == 0.0);
    batch.directions.push_back(u / norm);
  }
  return batch;
}

DirectionBatch sample_directions(SamplingOption option, Eigen::Index d, int batch_size,
                                 Rng& rng) {
  return option == SamplingOption::CoordinateNoReplacement ? sample_option_I(d, batch_size, rng)
                                                           : sample_option_II(d, batch_size, rng);
}

namespace {

double checked(double value, const char* where) {
  if (!std::isfinite(value)) {
    throw OracleFailure(std::string("oracle returned a nonfinite value in ") + where);
  }
  return value;
}

}  // namespace

Vector two_point(OracleProblem& problem, const Vector& x, const Vector& u, double beta,
                 double f_x) {
  require(beta > 0.0, "smoothing radius must be positive");
  require(u.size() == x.size(), "direction dimension mismatch");
  checked(f_x, "two_point (cached f(x))");
  const double f_shift = checked(problem.eval_f(x + beta * u), "two_point");
  const double d = static_cast<double>(x.size());
  return (d * (f_shift - f_x) / beta) * u;
}

GradientEstimate minibatch_estimate(OracleProblem& problem, const Vector& x,
                                    const DirectionBatch& batch, double beta) {
  require(batch.size() >= 1, "direction batch must be nonempty");
  require(beta > 0.0, "smoothing radius must be positive");
  const std::uint64_t before = problem.queries();
  const double f_x = checked(problem.eval_f(x), "minibatch_estimate");
  Vector sum = Vector::Zero(x.size());
  for (const Vector& u : batch.directions) sum += two_point(problem, x, u, beta, f_x);
  return {sum / static_cast<double>(batch.size()), problem.queries() - before};
}

GradientEstimate full_estimate(OracleProblem& problem, const Vector& x, double beta) {
  require(beta > 0.0, "smoothing radius must be positive");
  const std::uint64_t before = problem.queries();
  const double f_x = checked(problem.eval_f(x), "full_estimate");
  Vector grad(x.size());
  Vector shifted = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    shifted[i] = x[i] + beta;
    grad[i] = (checked(problem.eval_f(shifted), "full_estimate") - f_x) / beta;
    shifted[i] = x[i];
  }
  return {grad, problem.queries() - before};
}

GradientEstimate vr_gradient(OracleProblem& problem, const Vector& x, const Vector& ref_grad,
                             const DirectionBatch& batch, double beta) {
  require(ref_grad.size() == x.size(), "reference gradient dimension mismatch");
  GradientEstimate estimate = minibatch_estimate(problem, x, batch, beta);
  const double d = static_cast<double>(x.size());
  Vector correction = Vector::Zero(x.size());
  for (const Vector& u : batch.directions) correction += (d * ref_grad.dot(u)) * u;
  estimate.vector += ref_grad - correction / static_cast<double>(batch.size());
  return estimate;
}

}  // namespace zoka
