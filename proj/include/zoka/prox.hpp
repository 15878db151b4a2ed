#ifndef ZOKA_PROX_HPP
#define ZOKA_PROX_HPP

#include "zoka/core.hpp"
#include "zoka/problems.hpp"

namespace zoka {

/// argmin_y 1/2 ||v - y||^2 + t psi(y).
///
/// Every supported psi is separable, so the minimizer is computed
/// coordinatewise. For L2PlusBox the 1-D objective
///   1/2 (v - y)^2 + (t mu / 2) y^2   on [lo, hi]
/// is a strictly convex parabola with unconstrained minimizer v / (1 + t mu);
/// restricting a 1-D convex function to an interval moves the minimizer to the
/// nearest endpoint, hence shrink-then-clamp is exact.
Vector prox(const PsiSpec& psi, const Vector& v, double t);

/// z+ = prox_{eta / ((1 + eta sigma) M) psi}((eta sigma x + z - (eta / M) g) / (1 + eta sigma))
Vector katyusha_z_step(const Vector& z, const Vector& x, const Vector& g, double eta,
                       double sigma, double M, const PsiSpec& psi);

}  // namespace zoka

#endif
