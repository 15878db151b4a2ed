#include <cmath>

#include "zoka/problems.hpp"
#include "zoka/prox.hpp"

namespace zoka {

ReferenceSolution solve_reference(const OracleProblem& problem, double tol,
                                  std::optional<Vector> x0, int max_iterations) {
  if (!problem.has_reference_gradient()) {
    throw UnsupportedError("solve_reference needs the problem's exact gradient");
  }
  require(tol > 0.0, "tolerance must be positive");
  const Eigen::Index d = problem.dimension();
  const double step = 1.0 / problem.L();

  Vector x = project_feasible(problem.psi(), x0.value_or(Vector::Zero(d)));
  require(x.size() == d, "starting point has the wrong dimension");
  Vector y = x;
  double t = 1.0;

  ReferenceSolution out;
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector next = prox(problem.psi(), y - step * problem.reference_gradient(y), step);
    const double moved = (next - x).norm();
    const bool converged = moved <= tol * std::max(1.0, x.norm());

    // Gradient-based restart keeps the momentum from overshooting on strongly
    // convex problems.
    if ((y - next).dot(next - x) > 0.0) {
      t = 1.0;
      y = next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = next;
    out.iterations = it;
    if (converged) break;
  }
  out.x_star = x;
  out.F_star = problem.value_F(x);
  return out;
}

}  // namespace zoka
