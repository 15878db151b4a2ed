#include "zoka/problems.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace zoka {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool inside(const Vector& x, const Vector& lo, const Vector& hi) {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

void validate_box(const Vector& lo, const Vector& hi, Eigen::Index d) {
  require(lo.size() == d && hi.size() == d, "box bounds must have dimension " + std::to_string(d));
  require((lo.array() <= hi.array()).all(), "box requires lo <= hi componentwise");
}

}  // namespace

double psi_value(const PsiSpec& psi, const Vector& x) {
  return std::visit(
      Overloaded{
          [](const PsiZero&) { return 0.0; },
          [&](const PsiBox& b) { return inside(x, b.lo, b.hi) ? 0.0 : kInf; },
          [&](const PsiL2& l) { return 0.5 * l.mu * x.squaredNorm(); },
          [&](const PsiL2Box& lb) {
            return inside(x, lb.lo, lb.hi) ? 0.5 * lb.mu * x.squaredNorm() : kInf;
          },
      },
      psi);
}

double psi_strong_convexity(const PsiSpec& psi) {
  return std::visit(Overloaded{
                        [](const PsiZero&) { return 0.0; },
                        [](const PsiBox&) { return 0.0; },
                        [](const PsiL2& l) { return l.mu; },
                        [](const PsiL2Box& lb) { return lb.mu; },
                    },
                    psi);
}

bool psi_has_box(const PsiSpec& psi) {
  return std::holds_alternative<PsiBox>(psi) || std::holds_alternative<PsiL2Box>(psi);
}

void validate_psi(const PsiSpec& psi, Eigen::Index dimension) {
  std::visit(Overloaded{
                 [](const PsiZero&) {},
                 [&](const PsiBox& b) { validate_box(b.lo, b.hi, dimension); },
                 [](const PsiL2& l) { require(l.mu >= 0.0, "psi modulus must be nonnegative"); },
                 [&](const PsiL2Box& lb) {
                   require(lb.mu >= 0.0, "psi modulus must be nonnegative");
                   validate_box(lb.lo, lb.hi, dimension);
                 },
             },
             psi);
}

Vector project_feasible(const PsiSpec& psi, const Vector& x) {
  return std::visit(Overloaded{
                        [&](const PsiBox& b) -> Vector { return x.cwiseMax(b.lo).cwiseMin(b.hi); },
                        [&](const PsiL2Box& lb) -> Vector {
                          return x.cwiseMax(lb.lo).cwiseMin(lb.hi);
                        },
                        [&](const auto&) -> Vector { return x; },
                    },
                    psi);
}

int count_active_bounds(const PsiSpec& psi, const Vector& x, double tol) {
  auto count = [&](const Vector& lo, const Vector& hi) {
    int active = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i] - lo[i]) <= tol || std::abs(x[i] - hi[i]) <= tol) ++active;
    }
    return active;
  };
  return std::visit(Overloaded{
                        [&](const PsiBox& b) { return count(b.lo, b.hi); },
                        [&](const PsiL2Box& lb) { return count(lb.lo, lb.hi); },
                        [](const auto&) { return 0; },
                    },
                    psi);
}

// ---------------------------------------------------------------------------

OracleProblem::OracleProblem(Eigen::Index dimension, ScalarFn smooth_part, PsiSpec psi, double L,
                             double mu_f, GradientFn reference_gradient)
    : dimension_(dimension),
      smooth_part_(std::move(smooth_part)),
      psi_(std::move(psi)),
      L_(L),
      mu_f_(mu_f),
      mu_psi_(psi_strong_convexity(psi_)),
      reference_gradient_(std::move(reference_gradient)) {
  require(dimension_ >= 1, "dimension must be positive");
  require(static_cast<bool>(smooth_part_), "smooth part must be callable");
  require(L_ > 0.0, "smoothness constant L must be positive");
  require(mu_f_ >= 0.0, "mu_f must be nonnegative");
  require(L_ >= mu_f_, "L must be at least mu_f");
  validate_psi(psi_, dimension_);
  require(mu_f_ + mu_psi_ > 0.0, "problem must be strongly convex (mu_f + mu_psi > 0)");
}

void OracleProblem::check_dimension(const Vector& x) const {
  if (x.size() != dimension_) {
    throw ArgumentError("expected a vector of dimension " + std::to_string(dimension_) +
                        ", got " + std::to_string(x.size()));
  }
}

double OracleProblem::eval_f(const Vector& x) {
  check_dimension(x);
  ++queries_;
  return smooth_part_(x);
}

double OracleProblem::eval_F(const Vector& x) {
  const double f = eval_f(x);
  return f + psi_value(psi_, x);
}

double OracleProblem::value_f(const Vector& x) const {
  check_dimension(x);
  return smooth_part_(x);
}

double OracleProblem::value_F(const Vector& x) const {
  return value_f(x) + psi_value(psi_, x);
}

Vector OracleProblem::reference_gradient(const Vector& x) const {
  if (!reference_gradient_) throw UnsupportedError("problem has no reference gradient");
  check_dimension(x);
  return reference_gradient_(x);
}

// ---------------------------------------------------------------------------

void LogisticDataset::validate() const {
  require(n() >= 1 && d() >= 1, "dataset must be nonempty");
  require(labels.size() == n(), "one label per row required");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    require(std::abs(labels[i]) == 1.0, "labels must be -1 or +1");
  }
  require(features.allFinite(), "features must be finite");
}

LogisticDataset synthesize_dataset(int d, int n, std::uint64_t seed, double row_norm) {
  require(d >= 1 && n >= 1, "synthesize_dataset requires d, n >= 1");
  require(row_norm > 0.0, "row norm must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector truth(d);
  for (int j = 0; j < d; ++j) truth[j] = normal(rng);
  truth /= truth.norm();

  LogisticDataset data{Matrix(n, d), Vector(n)};
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < d; ++j) data.features(i, j) = normal(rng);
      norm = data.features.row(i).norm();
    } while (norm == 0.0);
    data.features.row(i) /= norm;
    const double margin = data.features.row(i).dot(truth) + 0.1 * normal(rng);
    data.features.row(i) *= row_norm;
    data.labels[i] = margin < 0.0 ? -1.0 : 1.0;
  }
  return data;
}

double logistic_smoothness(const LogisticDataset& data) {
  const Matrix gram = data.features.transpose() * data.features;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff() / (4.0 * static_cast<double>(data.n()));
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

OracleProblem make_logistic_problem(const LogisticDataset& data, double mu, const Vector& lo,
                                    const Vector& hi) {
  data.validate();
  require(mu > 0.0, "logistic problem requires mu > 0");
  const double L = logistic_smoothness(data);
  const double inv_n = 1.0 / static_cast<double>(data.n());

  // b_i a_i^T, shared by value and gradient.
  Matrix signed_rows = data.labels.asDiagonal() * data.features;

  auto f = [signed_rows, inv_n](const Vector& x) {
    const Vector margins = signed_rows * x;
    double total = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) total += softplus(-margins[i]);
    return total * inv_n;
  };
  auto grad = [signed_rows, inv_n](const Vector& x) {
    const Vector margins = signed_rows * x;
    // d/dm ln(1 + exp(-m)) = -1 / (1 + exp(m))
    Vector weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      const double m = margins[i];
      weights[i] = m >= 0.0 ? -std::exp(-m) / (1.0 + std::exp(-m)) : -1.0 / (1.0 + std::exp(m));
    }
    return Vector(signed_rows.transpose() * weights * inv_n);
  };
  return OracleProblem(data.d(), f, PsiL2Box{mu, lo, hi}, L, 0.0, grad);
}

OracleProblem make_logistic_problem(const LogisticDataset& data, double mu, double half_width) {
  require(half_width > 0.0, "box half width must be positive");
  const Vector hi = Vector::Constant(data.d(), half_width);
  return make_logistic_problem(data, mu, -hi, hi);
}

// ---------------------------------------------------------------------------

Quadratic random_quadratic(int d, double L, double mu, Rng& rng) {
  require(d >= 1, "dimension must be positive");
  require(mu > 0.0 && L >= mu, "random_quadratic requires 0 < mu <= L");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix gauss(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gauss(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  const Matrix basis = qr.householderQ();

  Vector spectrum(d);
  for (int i = 0; i < d; ++i) spectrum[i] = mu + (L - mu) * unit(rng);
  spectrum[0] = L;
  if (d > 1) spectrum[d - 1] = mu;

  Quadratic q;
  q.hessian = basis * spectrum.asDiagonal() * basis.transpose();
  q.hessian = 0.5 * (q.hessian + q.hessian.transpose());
  q.center = Vector::Zero(d);
  return q;
}

OracleProblem make_quadratic_problem(const Quadratic& q, PsiSpec psi) {
  const Eigen::Index d = q.hessian.rows();
  require(q.hessian.cols() == d && q.center.size() == d, "quadratic dimensions disagree");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q.hessian, Eigen::EigenvaluesOnly);
  const double L = eig.eigenvalues().maxCoeff();
  const double mu_f = std::max(0.0, eig.eigenvalues().minCoeff());
  auto f = [q](const Vector& x) {
    const Vector r = x - q.center;
    return 0.5 * r.dot(q.hessian * r);
  };
  auto grad = [q](const Vector& x) { return Vector(q.hessian * (x - q.center)); };
  return OracleProblem(d, f, std::move(psi), L, std::min(mu_f, L), grad);
}

}  // namespace zoka
