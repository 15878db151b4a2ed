#include "zoka/prox.hpp"

#include <cmath>

namespace zoka {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Vector prox(const PsiSpec& psi, const Vector& v, double t) {
  require(t > 0.0, "prox scale must be positive");
  require(v.allFinite(), "prox argument must be finite");
  return std::visit(
      Overloaded{
          [&](const PsiZero&) -> Vector { return v; },
          [&](const PsiBox& b) -> Vector {
            require(b.lo.size() == v.size(), "prox dimension mismatch");
            return v.cwiseMax(b.lo).cwiseMin(b.hi);
          },
          [&](const PsiL2& l) -> Vector { return v / (1.0 + t * l.mu); },
          [&](const PsiL2Box& lb) -> Vector {
            require(lb.lo.size() == v.size(), "prox dimension mismatch");
            return (v / (1.0 + t * lb.mu)).cwiseMax(lb.lo).cwiseMin(lb.hi);
          },
      },
      psi);
}

Vector katyusha_z_step(const Vector& z, const Vector& x, const Vector& g, double eta,
                       double sigma, double M, const PsiSpec& psi) {
  require(eta > 0.0 && M > 0.0, "z-step requires eta > 0 and M > 0");
  require(sigma >= 0.0, "z-step requires sigma >= 0");
  require(z.size() == x.size() && z.size() == g.size(), "z-step dimension mismatch");
  const double damping = 1.0 + eta * sigma;
  const Vector inner = (eta * sigma * x + z - (eta / M) * g) / damping;
  return prox(psi, inner, eta / (damping * M));
}

}  // namespace zoka
