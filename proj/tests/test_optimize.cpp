#include <doctest.h>

#include <cmath>

#include "prqc/model.hpp"
#include "prqc/optimize.hpp"
#include "prqc/rng.hpp"

using namespace prqc;

namespace {

MinimizeConfig fast_config(OptimEngine engine, int restarts = 2,
                           int budget = 600) {
  MinimizeConfig cfg;
  cfg.engine = engine;
  cfg.restarts = restarts;
  cfg.max_evals = budget;
  cfg.stall_evals = 60;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("metric densities") {
  CHECK(residual_energy_density(-99.5, -100.0, 100) == doctest::Approx(5e-3));
  CHECK(infidelity_density(0.9, 10) ==
        doctest::Approx(0.010481).epsilon(1e-4));
  CHECK(infidelity_density(1.0, 10) == doctest::Approx(0.0));
  CHECK(infidelity_density(0.0, 10) == doctest::Approx(1.0));
  CHECK(infidelity_density_from_log(std::log(0.9), 10) ==
        doctest::Approx(infidelity_density(0.9, 10)).epsilon(1e-12));
}

TEST_CASE("both engines find the quadratic bowl minimum") {
  VecR center(3);
  center << 0.4, -1.2, 2.0;
  ObjectiveFn bowl = [&](const VecR& x) {
    return (x - center).squaredNorm() + 0.7;
  };
  VecR x0 = VecR::Zero(3);
  for (OptimEngine engine : {OptimEngine::NelderMead, OptimEngine::Bfgs}) {
    MinimizeConfig cfg = fast_config(engine, 1, 4000);
    cfg.stall_evals = 200;
    OptimizationTrace trace = minimize(bowl, x0, cfg);
    CHECK(trace.best_cost == doctest::Approx(0.7).epsilon(1e-8));
    CHECK((trace.best_x - center).norm() < 1e-3);
  }
}

TEST_CASE("minimize is reproducible from the seed") {
  ObjectiveFn f = [](const VecR& x) {
    return std::sin(x[0]) + x.squaredNorm();
  };
  VecR x0 = VecR::Constant(2, 0.3);
  MinimizeConfig cfg = fast_config(OptimEngine::NelderMead, 4, 200);
  OptimizationTrace a = minimize(f, x0, cfg);
  OptimizationTrace b = minimize(f, x0, cfg);
  CHECK(a.best_cost == b.best_cost);
  CHECK((a.best_x - b.best_x).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].eval == b.records[k].eval);
    CHECK(a.records[k].cost == b.records[k].cost);
  }
}

TEST_CASE("NaN cost aborts with the trace retained") {
  ObjectiveFn f = [](const VecR& x) {
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN()
                      : x.squaredNorm();
  };
  VecR x0 = VecR::Constant(1, 0.2);
  OptimizationTrace trace =
      minimize(f, x0, fast_config(OptimEngine::NelderMead, 3, 500));
  CHECK(trace.aborted_on_nan);
  CHECK(!trace.records.empty());
}

TEST_CASE("best-so-far costs are non-increasing") {
  ObjectiveFn f = [](const VecR& x) { return std::cos(3 * x[0]) + x.squaredNorm(); };
  VecR x0 = VecR::Constant(2, 1.0);
  OptimizationTrace trace =
      minimize(f, x0, fast_config(OptimEngine::NelderMead, 3, 400));
  for (size_t k = 1; k < trace.records.size(); ++k)
    CHECK(trace.records[k].cost <= trace.records[k - 1].cost);
}

TEST_CASE("spin evaluator cost basics") {
  auto target = tfim(2, 1.0, 1.0);
  auto resource = pr_ising(2, 1.0, {ProfileKind::Exponential, 1.0});
  LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);

  SUBCASE("depth 0 gives the product-state field energy") {
    auto ev = make_spin_evaluator(target, resource, layer, 0);
    CHECK(ev->cost(VecR{}) == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("exact state gives zero metrics") {
    auto ev = make_spin_evaluator(target, resource, layer, 1);
    // the target's own ground state is not reachable at depth 1 generally,
    // so check the metric contract at the exact reference instead
    Metrics m = ev->metrics(ev->cold_start_raw());
    CHECK(m.infid_available);
    CHECK(m.eps >= 0.0);
    CHECK(ev->exact_energy() == doctest::Approx(-std::sqrt(5.0)));
  }
}

TEST_CASE("variational bound holds for random parameters") {
  auto target = tfim(6, 1.0, 1.0);
  auto resource = pr_ising(6, 1.0, {ProfileKind::Exponential, 1.0});
  LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);
  auto ev = make_spin_evaluator(target, resource, layer, 2);
  Rng rng = make_rng(123);
  std::normal_distribution<double> gauss(0.0, 0.6);
  for (int s = 0; s < 100; ++s) {
    VecR raw(ev->n_params());
    for (long i = 0; i < raw.size(); ++i) raw[i] = gauss(rng);
    CHECK(ev->cost(raw) >= ev->exact_energy() - 1e-9);
  }
}

TEST_CASE("finite-difference gradient matches a 5-point stencil oracle") {
  auto target = tfim(6, 1.0, 1.0);
  auto resource = pr_ising(6, 1.0, {ProfileKind::Exponential, 1.0});
  LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);
  auto ev = make_spin_evaluator(target, resource, layer, 2);
  ObjectiveFn f = [&](const VecR& x) { return ev->cost(x); };

  Rng rng = make_rng(31);
  std::uniform_real_distribution<double> uni(0.1, 0.5);
  VecR x(ev->n_params());
  for (long i = 0; i < x.size(); ++i) x[i] = uni(rng);

  const VecR g = fd_gradient(f, x);
  // independent oracle: 5-point stencil, distinct step
  VecR g5(x.size());
  VecR xp = x;
  for (long i = 0; i < x.size(); ++i) {
    const double h = 3e-4 * std::max(1.0, std::abs(x[i]));
    auto at = [&](double dx) {
      xp[i] = x[i] + dx;
      const double v = f(xp);
      xp[i] = x[i];
      return v;
    };
    g5[i] = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
  }
  for (long i = 0; i < x.size(); ++i) {
    CHECK(std::abs(g[i] - g5[i]) <=
          1e-4 * std::max(1.0, std::abs(g5[i])));
  }
}

TEST_CASE("optimized tunable-range circuit beats nearest-neighbor at N=6") {
  auto target = tfim(6, 1.0, 1.0);
  const int depth = 3;
  MinimizeConfig cfg = fast_config(OptimEngine::NelderMead, 3, 900);
  cfg.stall_evals = 120;

  double eps_pr = 0.0, eps_nn = 0.0;
  for (bool pr : {true, false}) {
    auto resource =
        pr_ising(6, 1.0, pr ? InteractionProfile{ProfileKind::Exponential, 1.0}
                            : InteractionProfile{ProfileKind::NearestNeighbor, 1.0});
    LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);
    auto ev = make_spin_evaluator(target, resource, layer, depth);
    ObjectiveFn f = [&](const VecR& x) { return ev->cost(x); };
    OptimizationTrace trace = minimize(f, ev->cold_start_raw(), cfg);
    const Metrics m = ev->metrics(trace.best_x);
    (pr ? eps_pr : eps_nn) = m.eps;
  }
  CHECK(eps_pr < eps_nn);
}

TEST_CASE("pad-with-identity preserves the reached cost") {
  auto target = tfim(6, 1.0, 1.0);
  auto resource = pr_ising(6, 1.0, {ProfileKind::Exponential, 1.0});
  LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);
  auto ev2 = make_spin_evaluator(target, resource, layer, 2);
  auto ev3 = make_spin_evaluator(target, resource, layer, 3);

  MinimizeConfig cfg = fast_config(OptimEngine::NelderMead, 2, 500);
  ObjectiveFn f2 = [&](const VecR& x) { return ev2->cost(x); };
  OptimizationTrace t2 = minimize(f2, ev2->cold_start_raw(), cfg);

  const VecR padded = pad_raw_with_identity(t2.best_x, layer);
  CHECK(padded.size() == ev3->n_params());
  CHECK(ev3->cost(padded) == doctest::Approx(t2.best_cost).epsilon(1e-8));

  // depth monotonicity: re-optimizing from the padded start cannot end worse
  ObjectiveFn f3 = [&](const VecR& x) { return ev3->cost(x); };
  MinimizeConfig warm = cfg;
  warm.restarts = 1;
  OptimizationTrace t3 = minimize(f3, padded, warm);
  CHECK(t3.best_cost <= t2.best_cost + 1e-9);
}

TEST_CASE("precompile transfers parameters up the ladder") {
  auto make = [&](int n) {
    auto resource = pr_ising(n, 1.0, {ProfileKind::Exponential, 1.0});
    LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);
    return make_spin_evaluator(tfim(n, 1.0, 1.0), resource, layer, 2);
  };
  PrecompileConfig cfg;
  cfg.train_sizes = {4, 6};
  cfg.final_size = 8;
  cfg.cold = fast_config(OptimEngine::NelderMead, 3, 700);
  cfg.warm = fast_config(OptimEngine::NelderMead, 1, 300);

  auto results = precompile_scaling(make, cfg);
  REQUIRE(results.size() == 3);
  CHECK(results[0].n == 4);
  CHECK(results[2].n == 8);
  CHECK(!results[2].optimized);  // evaluate-only by default
  CHECK((results[2].theta - results[1].theta).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& r : results) {
    CHECK(r.metrics.eps < 0.2);
    CHECK(r.metrics.infid_available);
  }

  SUBCASE("single-size ladder degenerates to plain minimize") {
    PrecompileConfig single;
    single.train_sizes = {4};
    single.cold = cfg.cold;
    auto res = precompile_scaling(make, single);
    REQUIRE(res.size() == 1);
    auto ev = make(4);
    ObjectiveFn f = [&](const VecR& x) { return ev->cost(x); };
    OptimizationTrace direct = minimize(f, ev->cold_start_raw(), cfg.cold);
    CHECK(res[0].metrics.energy == doctest::Approx(direct.best_cost));
  }

  SUBCASE("warm start from a previous optimum never ends worse") {
    auto ev = make(6);
    ObjectiveFn f = [&](const VecR& x) { return ev->cost(x); };
    const double start_cost = ev->cost(results[1].theta);
    MinimizeConfig warm = fast_config(OptimEngine::NelderMead, 1, 300);
    OptimizationTrace again = minimize(f, results[1].theta, warm);
    CHECK(again.best_cost <= start_cost + 1e-12);
  }
}

TEST_CASE("fermion evaluator optimizes the small Kitaev chain") {
  auto target = kitaev_target(8, 1.0, 1.0, 2.0);
  auto resource = pr_kitaev(8, 1.0, {ProfileKind::Exponential, 1.0});
  LayerSpec layer = default_layer_spec(LayerMode::Quenched, resource.profile);
  auto ev = make_fermion_evaluator(target, resource, layer, 2);
  ObjectiveFn f = [&](const VecR& x) { return ev->cost(x); };
  MinimizeConfig cfg = fast_config(OptimEngine::NelderMead, 2, 800);
  cfg.stall_evals = 100;
  OptimizationTrace trace = minimize(f, ev->cold_start_raw(), cfg);
  CHECK(trace.best_cost >= ev->exact_energy() - 1e-9);
  const Metrics m = ev->metrics(trace.best_x);
  CHECK(m.eps < 0.1);
  CHECK(m.infid < 0.5);
  CHECK(m.t_interaction > 0.0);
}
