#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "zoka/solvers.hpp"
#include "zoka/verify.hpp"

using namespace zoka;
using testing::vec;

namespace {

KatyushaParams mini_params(const OracleProblem& p, int batch = 1, double eps = 1e-8) {
  PresetRequest r;
  r.L = p.L();
  r.mu = p.mu();
  r.mu_f = p.mu_f();
  r.d = p.dimension();
  r.batch_size = batch;
  r.epsilon = eps;
  return preset(r);
}

Instrumentation instrument(const OracleProblem& p, int every = 1, bool lyap = false) {
  const ReferenceSolution ref = solve_reference(p);
  return Instrumentation{ref.x_star, ref.F_star, every, lyap};
}

}  // namespace

TEST_CASE("derive_A") {
  CHECK(derive_A(SamplingOption::CoordinateNoReplacement, 40, 1) == doctest::Approx(160.0));
  CHECK(derive_A(SamplingOption::CoordinateNoReplacement, 40, 40) == 1.0);
  CHECK(derive_A(SamplingOption::CoordinateNoReplacement, 10, 9) == 1.0);
  CHECK(derive_A(SamplingOption::UniformSphere, 40, 4) == doctest::Approx(40.0));
  CHECK_THROWS_AS(derive_A(SamplingOption::CoordinateNoReplacement, 1, 1), ArgumentError);
  CHECK_THROWS_AS(derive_A(SamplingOption::CoordinateNoReplacement, 4, 5), ArgumentError);
}

TEST_CASE("presets") {
  PresetRequest r;
  SUBCASE("full batch") {
    r.corollary = Corollary::FullBatchI;
    r.L = 1.0;
    r.mu = 0.01;
    r.d = 10;
    const KatyushaParams p = preset(r);
    CHECK(p.M == doctest::Approx(2.0 / 3.0));
    CHECK(p.theta == doctest::Approx(0.12247).epsilon(1e-4));
    CHECK(p.p == 1.0);
    CHECK(p.batch_size == 10);
    CHECK(p.beta == doctest::Approx(std::sqrt(0.01 * 1e-8 / 100.0)));
  }
  SUBCASE("mini-batch option I") {
    r.L = 1.0;
    r.mu = 0.02;
    r.d = 40;
    const KatyushaParams p = preset(r);
    CHECK(p.M == doctest::Approx(161.0 / 3.0));
    CHECK(p.theta == doctest::Approx(std::sqrt(0.8 / (161.0 / 3.0))));
    CHECK(p.theta == doctest::Approx(0.1221).epsilon(1e-3));
    CHECK(p.p == doctest::Approx(0.025));
    CHECK(p.option == SamplingOption::CoordinateNoReplacement);
    r.batch_size = 7;
    CHECK_THROWS_WITH_AS(preset(r), doctest::Contains("sqrt(d)"), ArgumentError);
  }
  SUBCASE("mini-batch option II") {
    r.corollary = Corollary::MiniBatchII;
    r.L = 2.0;
    r.mu = 0.1;
    r.d = 16;
    r.batch_size = 4;
    const KatyushaParams p = preset(r);
    CHECK(p.M == doctest::Approx(4.0 * 16 * 2.0 / 4 + 2.0 / 3.0));
    CHECK(p.option == SamplingOption::UniformSphere);
    CHECK(p.theta == doctest::Approx(std::sqrt(16 * 0.1 / p.M)));
  }
  SUBCASE("beta floor") {
    r.L = 1.0;
    r.mu = 1e-6;
    r.d = 40;
    r.epsilon = 1e-12;
    r.x0_norm = 3.0;
    CHECK(preset(r).beta == doctest::Approx(4e-8));
  }
  SUBCASE("derived eta and sigma") {
    r.L = 1.0;
    r.mu = 0.02;
    r.d = 40;
    const KatyushaParams p = preset(r);
    CHECK(p.eta() * 3.0 * p.theta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.sigma(0.3) * p.M == doctest::Approx(0.3).epsilon(1e-15));
  }
  CHECK(parse_corollary("3") == Corollary::FullBatchI);
  CHECK(parse_corollary("MiniBatchII") == Corollary::MiniBatchII);
  CHECK_THROWS_AS(parse_corollary("4"), ArgumentError);
}

TEST_CASE("params validation") {
  KatyushaParams p;
  p.theta = 0.6;
  CHECK_THROWS_AS(p.validate(5), ArgumentError);
  p.theta = 0.5;
  p.p = 0.0;
  CHECK_THROWS_AS(p.validate(5), ArgumentError);
  p.p = 1.0;
  p.batch_size = 6;
  CHECK_THROWS_AS(p.validate(5), ArgumentError);
  p.option = SamplingOption::UniformSphere;
  CHECK_NOTHROW(p.validate(5));
}

TEST_CASE("katyusha step identities") {
  OracleProblem p = testing::experiment_problem();
  KatyushaParams params = mini_params(p);
  params.beta = 1e-5;
  Rng rng(5);
  SolverState s = init_katyusha(p, params, Vector::Zero(40));
  CHECK(s.y == s.z);
  CHECK(s.z == s.w);
  CHECK(s.queries == 41);

  for (int k = 0; k < 300; ++k) {
    const SolverState before = s;
    const StepRecord rec = katyusha_step(s, params, p, rng);
    const double t = params.theta;
    const Vector combo = t * before.z + 0.5 * before.w + (0.5 - t) * before.y;
    REQUIRE((s.x - combo).norm() <= 1e-15 * (1.0 + combo.norm()));
    REQUIRE((s.y - s.x - t * (s.z - before.z)).norm() <= 1e-15 * (1.0 + s.y.norm()));
    if (rec.w_updated) {
      REQUIRE(s.w == before.y);
      REQUIRE(rec.queries == 2 + 41);
    } else {
      REQUIRE(s.w == before.w);
      REQUIRE(rec.queries == 2);
    }
    OracleProblem copy = p;
    REQUIRE(s.ref_grad == full_estimate(copy, s.w, params.beta).vector);
    REQUIRE(s.k == before.k + 1);
  }
}

TEST_CASE("theta = 1/2 with equal iterates collapses the combination") {
  OracleProblem p = testing::half_sq(vec({1, 2, 3}));
  KatyushaParams params;
  params.theta = 0.5;
  params.M = 1.0;
  params.beta = 1e-6;
  Rng rng(1);
  SolverState s = init_katyusha(p, params, vec({0.5, 0.5, 0.5}));
  s.z = vec({0.1, -0.2, 0.3});
  s.w = s.z;
  s.y = s.z;
  katyusha_step(s, params, p, rng);
  CHECK((s.x - vec({0.1, -0.2, 0.3})).norm() <= 1e-16);
}

TEST_CASE("p = 1 refreshes w from the previous y every step") {
  OracleProblem p = testing::half_sq(vec({1, -1, 0.5, 2}));
  KatyushaParams params;
  params.theta = 0.3;
  params.M = 2.0;
  params.p = 1.0;
  params.beta = 1e-6;
  Rng rng(2);
  SolverState s = init_katyusha(p, params, Vector::Zero(4));
  for (int k = 0; k < 50; ++k) {
    const Vector y_prev = s.y;
    const StepRecord rec = katyusha_step(s, params, p, rng);
    CHECK(rec.w_updated);
    CHECK(s.w == y_prev);
  }
  params.w_update_uses_y_next = true;
  for (int k = 0; k < 10; ++k) {
    katyusha_step(s, params, p, rng);
    CHECK(s.w == s.y);
  }
}

TEST_CASE("full coordinate batch with p = 1 gives the forward difference") {
  OracleProblem p = testing::experiment_problem();
  PresetRequest r;
  r.corollary = Corollary::FullBatchI;
  r.L = p.L();
  r.mu = p.mu();
  r.d = 40;
  const KatyushaParams params = preset(r);
  Rng rng(3);
  SolverState s = init_katyusha(p, params, Vector::Zero(40));
  for (int k = 0; k < 30; ++k) {
    const StepRecord rec = katyusha_step(s, params, p, rng);
    OracleProblem copy = p;
    CHECK((rec.gradient - full_estimate(copy, s.x, params.beta).vector).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("average queries per step with |S| = 1, p = 1/d") {
  OracleProblem p = testing::experiment_problem();
  const KatyushaParams params = mini_params(p);
  Rng rng(4);
  SolverState s = init_katyusha(p, params, Vector::Zero(40));
  const std::uint64_t init = s.queries;
  std::uint64_t updates = 0;
  for (int k = 0; k < 10000; ++k) updates += katyusha_step(s, params, p, rng).w_updated;
  CHECK(s.queries == init + 10000 * 2 + updates * 41);
  CHECK(p.queries() == s.queries);
  const double avg = static_cast<double>(s.queries - init) / 10000.0;
  CHECK(avg >= 2.8);
  CHECK(avg <= 3.4);
}

TEST_CASE("run_katyusha") {
  SUBCASE("1-D quadratic, full batch preset") {
    OracleProblem p = testing::half_sq(vec({0.0}));
    PresetRequest r;
    r.corollary = Corollary::FullBatchI;
    r.L = 1.0;
    r.mu = 1.0;
    r.mu_f = 1.0;
    r.d = 1;
    r.epsilon = 1e-12;  // the smoothing floor sits near beta^2 / 8
    const KatyushaParams params = preset(r);
    Budget budget;
    budget.max_iters = 200;
    Rng rng(1);
    const Instrumentation inst{vec({0.0}), 0.0, 1, false};
    const TrialTrace t = run_katyusha(p, params, vec({3.0}), budget, rng, &inst);
    CHECK(t.final_gap() < 1e-10);
    CHECK(t.records.back().k <= 200);
  }
  SUBCASE("seeded runs are bit-identical") {
    OracleProblem p = testing::experiment_problem();
    const KatyushaParams params = mini_params(p);
    const Instrumentation inst = instrument(p, 7, true);
    Budget budget;
    budget.max_queries = 5000;
    OracleProblem a = p, b = p;
    Rng ra(9), rb(9);
    const TrialTrace ta = run_katyusha(a, params, Vector::Zero(40), budget, ra, &inst);
    const TrialTrace tb = run_katyusha(b, params, Vector::Zero(40), budget, rb, &inst);
    CHECK(ta.records == tb.records);
    CHECK(ta.records.size() > 10);
  }
  SUBCASE("budgets and monotone records") {
    OracleProblem p = testing::experiment_problem();
    const KatyushaParams params = mini_params(p);
    const Instrumentation inst = instrument(p, 3);
    Budget budget;
    budget.max_queries = 3000;
    Rng rng(2);
    const TrialTrace t = run_katyusha(p, params, Vector::Zero(40), budget, rng, &inst);
    CHECK_FALSE(t.converged);
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      CHECK(t.records[i].k > t.records[i - 1].k);
      CHECK(t.records[i].queries >= t.records[i - 1].queries);
    }
    CHECK(t.records.back().queries >= 3000);
    CHECK(t.records.back().queries < 3000 + 43);

    budget.target_gap = 1e-3;
    Rng rng2(2);
    const TrialTrace hit = run_katyusha(p, params, Vector::Zero(40), budget, rng2, &inst);
    CHECK(hit.converged);
    CHECK(hit.final_gap() <= 1e-3);
  }
  SUBCASE("instrumentation never touches the meter") {
    OracleProblem a = testing::experiment_problem();
    OracleProblem b = a;
    const KatyushaParams params = mini_params(a);
    const Instrumentation inst = instrument(a, 1, true);
    Budget budget;
    budget.max_iters = 100;
    Rng ra(3), rb(3);
    run_katyusha(a, params, Vector::Zero(40), budget, ra, &inst);
    run_katyusha(b, params, Vector::Zero(40), budget, rb, nullptr);
    CHECK(a.queries() == b.queries());
  }
  SUBCASE("infeasible start is projected") {
    OracleProblem p = testing::experiment_problem();
    const KatyushaParams params = mini_params(p);
    Rng rng(4);
    SolverState s = init_katyusha(p, params, Vector::Constant(40, 3.0));
    CHECK(s.w.cwiseAbs().maxCoeff() <= 0.5);
  }
}

TEST_CASE("lyapunov") {
  OracleProblem p = testing::experiment_problem();
  const ReferenceSolution ref = solve_reference(p);
  const KatyushaParams params = mini_params(p);

  SUBCASE("zero at the optimum") {
    SolverState s;
    s.x = s.y = s.z = s.w = ref.x_star;
    const LyapunovReport r = lyapunov(s, params, p, ref.x_star, ref.F_star);
    CHECK(std::abs(r.psi_total) <= 1e-9);
  }
  SUBCASE("rate example") {
    KatyushaParams q;
    q.theta = 0.1;
    q.p = 1.0 / 40;
    q.M = 53.67;
    const double expected = std::min({0.02 / (0.04 + 0.6 * 53.67), 0.05, (0.1 / 40) / 1.1});
    CHECK(lyapunov_rate(q, 0.02) == doctest::Approx(expected));
    CHECK(lyapunov_rate(q, 0.02) == doctest::Approx(6.2e-4).epsilon(0.01));
  }
  SUBCASE("components are nonnegative") {
    Rng rng(6);
    std::uniform_real_distribution<double> box(-0.5, 0.5);
    for (int t = 0; t < 100; ++t) {
      SolverState s;
      s.z = testing::gaussian(40, rng);
      s.y = Vector(40);
      s.w = Vector(40);
      for (int i = 0; i < 40; ++i) {
        s.y[i] = box(rng);
        s.w[i] = box(rng);
      }
      const LyapunovReport r = lyapunov(s, params, p, ref.x_star, ref.F_star);
      CHECK(r.Z >= -1e-9);
      CHECK(r.Y >= -1e-9);
      CHECK(r.W >= -1e-9);
      CHECK(r.psi_total == doctest::Approx(r.Z + r.Y + r.W));
    }
  }
  SUBCASE("bias term") {
    const double d = 40, L = p.L(), mu = p.mu(), b = params.beta;
    const double A = 160.0;
    CHECK(lyapunov_bias_term(params, 40, L, mu) ==
          doctest::Approx(b * b * d * d * L * (L / (d * mu) + 1.0 / (A * params.theta))));
  }
  SUBCASE("missing ground truth") {
    SolverState s;
    s.x = s.y = s.z = s.w = Vector::Zero(40);
    CHECK_THROWS_AS(lyapunov(s, params, p, Vector(), ref.F_star), UnsupportedError);
  }
}

TEST_CASE("projected zo-gd") {
  OracleProblem p = testing::experiment_problem();
  const Instrumentation inst = instrument(p, 1);
  ProjectedGdParams params;
  params.beta = 1e-6;
  Budget budget;
  budget.max_iters = 500;
  Rng rng(1);
  const TrialTrace t = run_projected_zo_gd(p, Vector::Zero(40), budget, rng, params, &inst);
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    CHECK(t.records[i].queries - t.records[i - 1].queries ==
          2 * (t.records[i].k - t.records[i - 1].k));
  }
  OracleProblem q = testing::experiment_problem();
  Rng rng2(1);
  CHECK(run_projected_zo_gd(q, Vector::Zero(40), budget, rng2, params, &inst).records == t.records);

  SUBCASE("sublinear on a 1-D quadratic") {
    OracleProblem one = testing::half_sq(vec({0.0}));
    const Instrumentation i1{vec({0.0}), 0.0, 100, false};
    Budget b;
    b.max_iters = 20000;
    Rng r(4);
    ProjectedGdParams pp;
    pp.beta = 1e-6;
    const TrialTrace tt = run_projected_zo_gd(one, vec({1.0}), b, r, pp, &i1);
    // alpha_k = 1/sqrt(k+1) contracts by prod(1 - alpha_k): far from linear speed.
    CHECK(tt.final_gap() > 0.0);
    CHECK(tt.final_gap() < 0.5);
  }
}

TEST_CASE("zo-svrg converges linearly on the logistic problem") {
  OracleProblem p = testing::experiment_problem();
  const Instrumentation inst = instrument(p, 40);
  ZoSvrgParams params;
  params.beta = 1e-7;
  Budget budget;
  budget.max_queries = 100000;
  Rng rng(3);
  const TrialTrace t = run_zo_svrg(p, Vector::Zero(40), budget, rng, params, &inst);
  CHECK(t.final_gap() < 1e-6);
  OracleProblem q = testing::experiment_problem();
  Rng rng2(3);
  CHECK(run_zo_svrg(q, Vector::Zero(40), budget, rng2, params, &inst).records == t.records);
}

TEST_CASE("katyusha needs fewer queries than zo-svrg to reach 1e-6") {
  OracleProblem p = testing::experiment_problem();
  const Instrumentation inst = instrument(p, 10);
  Budget budget;
  budget.max_queries = 200000;
  budget.target_gap = 1e-6;
  std::vector<double> kat, svrg;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    OracleProblem a = p, b = p;
    Rng ra(seed), rb(seed);
    ZoSvrgParams sp;
    sp.beta = mini_params(p).beta;
    const auto tk = run_katyusha(a, mini_params(p), Vector::Zero(40), budget, ra, &inst);
    const auto ts = run_zo_svrg(b, Vector::Zero(40), budget, rb, sp, &inst);
    REQUIRE(tk.queries_to_gap(1e-6));
    REQUIRE(ts.queries_to_gap(1e-6));
    kat.push_back(static_cast<double>(*tk.queries_to_gap(1e-6)));
    svrg.push_back(static_cast<double>(*ts.queries_to_gap(1e-6)));
  }
  CHECK(bench::quantile(kat, 0.5) < bench::quantile(svrg, 0.5));
}

TEST_CASE("naive accelerated scheme") {
  const bench::Fig2Configs cfg = bench::fig2_config();
  SUBCASE("fast without constraints") {
    OracleProblem p = bench::build_problem(cfg.unconstrained.problem);
    const Instrumentation inst = instrument(p, 100);
    NaiveAccelParams params;
    params.beta = 1e-7;
    Budget budget;
    budget.max_queries = 40000;
    Rng rng(1);
    CHECK(run_naive_accel(p, Vector::Zero(20), budget, rng, params, &inst).final_gap() < 1e-8);
  }
  SUBCASE("stalls with an active box") {
    OracleProblem p = bench::build_problem(cfg.constrained.problem);
    const ReferenceSolution ref = solve_reference(p);
    REQUIRE(count_active_bounds(p.psi(), ref.x_star) > 0);
    const Instrumentation inst{ref.x_star, ref.F_star, 100, false};
    NaiveAccelParams params;
    params.beta = 1e-7;
    Budget budget;
    budget.max_queries = 40000;
    Rng rng(1);
    const double initial = p.value_F(Vector::Zero(20)) - ref.F_star;
    CHECK(run_naive_accel(p, Vector::Zero(20), budget, rng, params, &inst).final_gap() >
          1e-3 * initial);
  }
  SUBCASE("unsupported psi") {
    OracleProblem p = testing::experiment_problem();
    Rng rng(1);
    CHECK_THROWS_AS(run_naive_accel(p, Vector::Zero(40), Budget{}, rng, NaiveAccelParams{}),
                    UnsupportedError);
  }
}

TEST_CASE("decay regression with the y_next refresh variant") {
  bench::VerifyConfig config;
  config.trials = 10;
  config.max_queries = 60000;
  config.w_update_uses_y_next = true;
  bench::DecayFit fit;
  const bench::ClaimCheck check = bench::verify_lyapunov_decay(config, &fit);
  INFO(check.detail);
  CHECK(fit.points >= 2);
  CHECK(fit.slope <= fit.bound);
  CHECK(check.passed);
}
