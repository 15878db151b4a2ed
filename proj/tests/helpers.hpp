#ifndef ZOKA_TESTS_HELPERS_HPP
#define ZOKA_TESTS_HELPERS_HPP

#include "zoka/bench.hpp"
#include "zoka/problems.hpp"

namespace testing {

using zoka::Vector;

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

/// f(x) = 1/2 ||x - c||^2 with the given psi.
inline zoka::OracleProblem half_sq(const Vector& c, zoka::PsiSpec psi = zoka::PsiZero{}) {
  return zoka::OracleProblem(
      c.size(), [c](const Vector& x) { return 0.5 * (x - c).squaredNorm(); }, std::move(psi),
      1.0, 1.0, [c](const Vector& x) { return Vector(x - c); });
}

/// f(x) = c^T x; strong convexity comes from an L2 psi.
inline zoka::OracleProblem linear(const Vector& c) {
  return zoka::OracleProblem(
      c.size(), [c](const Vector& x) { return c.dot(x); }, zoka::PsiL2{1.0}, 1.0, 0.0,
      [c](const Vector&) { return c; });
}

inline Vector gaussian(Eigen::Index d, zoka::Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

/// The d=40 logistic problem used by the experiments.
inline zoka::OracleProblem experiment_problem() {
  return zoka::bench::build_problem(zoka::bench::ProblemConfig{});
}

}  // namespace testing

#endif
