#include "prqc/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "prqc/rng.hpp"

namespace prqc {

std::string optim_engine_name(OptimEngine engine) {
  return engine == OptimEngine::NelderMead ? "nelder-mead" : "bfgs";
}

std::optional<OptimEngine> optim_engine_from_name(const std::string& name) {
  if (name == "nelder-mead") return OptimEngine::NelderMead;
  if (name == "bfgs") return OptimEngine::Bfgs;
  return std::nullopt;
}

namespace {

// Bookkeeping shared by both engines: budget, stall detection, NaN abort and
// the best-so-far trace.
struct EvalContext {
  const ObjectiveFn& f;
  const MinimizeConfig& cfg;
  const TraceMetricsFn* trace_metrics;
  OptimizationTrace& trace;
  long evals_this_restart = 0;
  long last_improvement = 0;
  double best_this_restart = std::numeric_limits<double>::infinity();
  bool nan_seen = false;

  double eval(const VecR& x) {
    const double value = f(x);
    ++evals_this_restart;
    ++trace.evaluations;
    if (std::isnan(value)) {
      nan_seen = true;
      trace.aborted_on_nan = true;
      return std::numeric_limits<double>::infinity();
    }
    if (value < best_this_restart - cfg.ftol)
      last_improvement = evals_this_restart;
    if (value < best_this_restart) best_this_restart = value;
    if (value < trace.best_cost) {
      trace.best_cost = value;
      trace.best_x = x;
      TraceRecord rec;
      rec.eval = trace.evaluations;
      rec.cost = value;
      if (trace_metrics) {
        auto [eps, infid] = (*trace_metrics)(x);
        rec.eps = eps;
        rec.infid = infid;
      }
      trace.records.push_back(rec);
    }
    return value;
  }

  bool done() const {
    return nan_seen || evals_this_restart >= cfg.max_evals ||
           (evals_this_restart - last_improvement) >= cfg.stall_evals;
  }
};

void nelder_mead(EvalContext& ctx, const VecR& x0) {
  const int n = int(x0.size());
  std::vector<VecR> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i)
    xs[i + 1][i] += 0.1 + 0.1 * std::abs(x0[i]);
  for (int i = 0; i <= n; ++i) {
    fs[i] = ctx.eval(xs[i]);
    if (ctx.done()) return;
  }

  std::vector<int> order(n + 1);
  while (!ctx.done()) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];

    VecR centroid = VecR::Zero(n);
    for (int k = 0; k < n; ++k) centroid += xs[order[k]];
    centroid /= double(n);

    const VecR xr = centroid + (centroid - xs[worst]);
    const double fr = ctx.eval(xr);
    if (ctx.done()) return;

    if (fr < fs[best]) {
      const VecR xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = ctx.eval(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const VecR base = outside ? xr : xs[worst];
      const VecR xc = centroid + 0.5 * (base - centroid);
      const double fc = ctx.eval(xc);
      if (ctx.done()) return;
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int k = 1; k <= n; ++k) {
          const int idx = order[k];
          xs[idx] = xs[best] + 0.5 * (xs[idx] - xs[best]);
          fs[idx] = ctx.eval(xs[idx]);
          if (ctx.done()) return;
        }
      }
    }
  }
}

VecR fd_gradient_ctx(EvalContext& ctx, const VecR& x, double f0) {
  (void)f0;
  const int n = int(x.size());
  VecR g(n);
  VecR xp = x;
  for (int i = 0; i < n; ++i) {
    const double step =
        std::max(ctx.cfg.fd_step_rel * std::abs(x[i]), ctx.cfg.fd_step_abs);
    xp[i] = x[i] + step;
    const double fp = ctx.eval(xp);
    xp[i] = x[i] - step;
    const double fm = ctx.eval(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
    if (ctx.done()) break;
  }
  return g;
}

void bfgs(EvalContext& ctx, const VecR& x0) {
  const int n = int(x0.size());
  VecR x = x0;
  double fx = ctx.eval(x);
  if (ctx.done()) return;
  VecR g = fd_gradient_ctx(ctx, x, fx);
  MatR h = MatR::Identity(n, n);  // inverse Hessian estimate

  while (!ctx.done()) {
    VecR d = -(h * g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      h.setIdentity();
      d = -g;
      slope = g.dot(d);
      if (!(slope < 0.0)) return;  // gradient numerically zero
    }

    double t = 1.0;
    double ft = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      ft = ctx.eval(x + t * d);
      if (ctx.done()) return;
      if (ft <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return;

    const VecR x_new = x + t * d;
    const VecR g_new = fd_gradient_ctx(ctx, x_new, ft);
    if (ctx.done()) {
      return;
    }
    const VecR s = x_new - x;
    const VecR y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const MatR i = MatR::Identity(n, n);
      h = (i - rho * s * y.transpose()) * h * (i - rho * y * s.transpose()) +
          rho * s * s.transpose();
    } else {
      h.setIdentity();
    }
    x = x_new;
    fx = ft;
    g = g_new;
    if (g.lpNorm<Eigen::Infinity>() < 1e-12 * (1.0 + std::abs(fx))) return;
  }
}

}  // namespace

VecR fd_gradient(const ObjectiveFn& objective, const VecR& x, double step_rel,
                 double step_abs) {
  const int n = int(x.size());
  VecR g(n), xp = x;
  for (int i = 0; i < n; ++i) {
    const double step = std::max(step_rel * std::abs(x[i]), step_abs);
    xp[i] = x[i] + step;
    const double fp = objective(xp);
    xp[i] = x[i] - step;
    const double fm = objective(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

OptimizationTrace minimize(const ObjectiveFn& objective, const VecR& x0,
                           const MinimizeConfig& config,
                           const TraceMetricsFn* trace_metrics) {
  const auto t_start = std::chrono::steady_clock::now();
  OptimizationTrace trace;

  if (x0.size() == 0) {
    trace.best_x = x0;
    trace.best_cost = objective(x0);
    trace.evaluations = 1;
    trace.records.push_back({1, trace.best_cost, {}, {}});
    return trace;
  }

  double best_before = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < std::max(1, config.restarts); ++restart) {
    VecR start = x0;
    if (restart > 0) {
      Rng rng = make_rng(child_seed(config.seed, uint64_t(restart)));
      std::normal_distribution<double> gauss(0.0, config.spread);
      for (long i = 0; i < start.size(); ++i) start[i] += gauss(rng);
    }
    EvalContext ctx{objective, config, trace_metrics, trace};
    if (config.engine == OptimEngine::NelderMead)
      nelder_mead(ctx, start);
    else
      bfgs(ctx, start);
    if (trace.best_cost < best_before) {
      trace.best_restart = restart;
      best_before = trace.best_cost;
    }
    if (trace.aborted_on_nan) break;
  }

  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return trace;
}

double residual_energy_density(double energy, double exact_energy, int n) {
  return std::abs(energy - exact_energy) / double(n);
}

double infidelity_density(double overlap_magnitude, int n) {
  if (overlap_magnitude <= 0.0) return 1.0;
  return infidelity_density_from_log(std::log(overlap_magnitude), n);
}

double infidelity_density_from_log(double log_overlap_magnitude, int n) {
  if (std::isinf(log_overlap_magnitude)) return 1.0;
  return -std::expm1(log_overlap_magnitude / double(n));
}

// --- cost evaluators --------------------------------------------------------

namespace {

double cold_field_value(const HamiltonianSpec& target) {
  if (target.kind == ModelKind::KitaevTarget) return -target.coupling("mu");
  return target.coupling_or("h", 1.0);
}

double cold_log_range(const InteractionProfile& profile) {
  return profile.kind == ProfileKind::PowerLaw ? std::log(2.0) : 0.0;
}

LayerParams make_frozen(const HamiltonianSpec& resource) {
  LayerParams frozen;
  frozen.strength = 1.0;
  frozen.field = 1.0;
  frozen.log_range = resource.profile.kind == ProfileKind::NearestNeighbor
                         ? 0.0
                         : std::log(resource.profile.range);
  return frozen;
}

VecR make_cold_start(const LayerSpec& layer, const LayerParams& frozen,
                     int depth, const HamiltonianSpec& target,
                     const InteractionProfile& profile) {
  ParameterVector pv;
  pv.layers.resize(depth);
  for (LayerParams& p : pv.layers) {
    p = frozen;
    p.t_int = 0.1;
    p.t_drv = 0.1;
    p.t_aniso = 0.1;
    if (layer.field_free) p.field = cold_field_value(target);
    if (layer.range_free) p.log_range = cold_log_range(profile);
  }
  return pack(pv, layer);
}

class SpinEvaluator final : public CostEvaluator {
public:
  SpinEvaluator(HamiltonianSpec target, HamiltonianSpec resource,
                LayerSpec layer, int depth, uint64_t seed)
      : target_(std::move(target)),
        resource_(std::move(resource)),
        layer_(layer),
        depth_(depth) {
    resource_.n_sites = target_.n_sites;
    const int n = target_.n_sites;
    const int ldim = local_dim(target_.kind);
    require(ldim == local_dim(resource_.kind), ErrorCode::basis_mismatch,
            "resource and target local dimensions differ");

    const bool sectorable = conserves_magnetization(target_.kind) &&
                            conserves_magnetization(resource_.kind) &&
                            target_.coupling_or("g", 0.0) == 0.0 &&
                            resource_.coupling_or("g", 0.0) == 0.0 &&
                            ldim == 2;
    if (sectorable) {
      spin::DenseState probe = spin::initial_state_for_target(target_);
      const VecR occ = spin::site_occupations(probe);
      const int n_exc = int(std::lround(occ.sum()));
      sector_ = spin::make_sector(n, n_exc);
    }
    rho0_ = spin::initial_state_for_target(target_, sector_);
    engine_ = std::make_unique<SpinCircuitEngine>(resource_, layer_, sector_);
    frozen_ = make_frozen(resource_);
    target_terms_ = term_list(target_);
    auto [e, psi] = spin::ground_state_auto(target_terms_, n, ldim, sector_, seed);
    e_exact_ = e;
    psi_exact_ = std::move(psi);
    tr_h_ = spin::trace_over_dim(target_terms_, n, ldim);
    tr_h2_ = spin::trace_sq_over_dim(target_terms_, n, ldim);
  }

  int n_params() const override { return depth_ * params_per_layer(layer_); }
  int n_sites() const override { return target_.n_sites; }
  double exact_energy() const override { return e_exact_; }
  const LayerSpec& layer_spec() const override { return layer_; }

  double cost(const VecR& raw) const override {
    const spin::DenseState state = prepare(raw);
    return spin::expectation_terms(state, target_terms_);
  }

  Metrics metrics(const VecR& raw) const override {
    const spin::DenseState state = prepare(raw);
    Metrics m;
    m.energy = spin::expectation_terms(state, target_terms_);
    m.eps = residual_energy_density(m.energy, e_exact_, target_.n_sites);
    const double ovl = std::abs(spin::overlap(state, psi_exact_));
    m.infid_available = true;
    m.infid = infidelity_density(ovl, target_.n_sites);
    m.t_interaction = total_interaction_time(
        unpack(raw, layer_, frozen_), layer_);
    return m;
  }

  EnergyStats energy_stats(const VecR& raw) const override {
    const spin::DenseState state = prepare(raw);
    EnergyStats stats;
    stats.energy = spin::expectation_terms(state, target_terms_);
    const spin::DenseState hpsi = spin::apply_terms(target_terms_, state);
    stats.h_squared = hpsi.amps.squaredNorm();
    stats.t_accumulated =
        total_interaction_time(unpack(raw, layer_, frozen_), layer_);
    return stats;
  }

  double trace_h_over_dim() const override { return tr_h_; }
  double trace_h2_over_dim() const override { return tr_h2_; }

  VecR cold_start_raw() const override {
    return make_cold_start(layer_, frozen_, depth_, target_,
                           resource_.profile);
  }

private:
  spin::DenseState prepare(const VecR& raw) const {
    return engine_->apply(rho0_, unpack(raw, layer_, frozen_));
  }

  HamiltonianSpec target_;
  HamiltonianSpec resource_;
  LayerSpec layer_;
  int depth_;
  std::shared_ptr<const spin::SectorBasis> sector_;
  spin::DenseState rho0_;
  std::unique_ptr<SpinCircuitEngine> engine_;
  LayerParams frozen_;
  TermList target_terms_;
  double e_exact_ = 0.0;
  spin::DenseState psi_exact_;
  double tr_h_ = 0.0, tr_h2_ = 0.0;
};

class FermionEvaluator final : public CostEvaluator {
public:
  FermionEvaluator(HamiltonianSpec target, HamiltonianSpec resource,
                   LayerSpec layer, int depth)
      : target_(std::move(target)),
        resource_(std::move(resource)),
        layer_(layer),
        depth_(depth) {
    resource_.n_sites = target_.n_sites;
    h_target_ = fermion::build_quadratic(target_);
    engine_ = std::make_unique<FermionCircuitEngine>(resource_, layer_);
    frozen_ = make_frozen(resource_);
    rho0_ = fermion::vacuum_state(target_.n_sites);
    fermion::BdgFactor factor(h_target_);
    e_exact_ = factor.ground_energy();
    psi_exact_ = factor.ground_state();
    const double tr_a = h_target_.a.trace();
    tr_h_ = 0.5 * tr_a + h_target_.offset;
    tr_h2_ = tr_h_ * tr_h_ + 0.25 * h_target_.a.squaredNorm() +
             0.25 * h_target_.b.squaredNorm();
  }

  int n_params() const override { return depth_ * params_per_layer(layer_); }
  int n_sites() const override { return target_.n_sites; }
  double exact_energy() const override { return e_exact_; }
  const LayerSpec& layer_spec() const override { return layer_; }

  double cost(const VecR& raw) const override {
    const fermion::GaussianState state = prepare(raw);
    return fermion::energy(state, h_target_);
  }

  Metrics metrics(const VecR& raw) const override {
    const fermion::GaussianState state = prepare(raw);
    Metrics m;
    m.energy = fermion::energy(state, h_target_);
    m.eps = residual_energy_density(m.energy, e_exact_, target_.n_sites);
    m.infid_available = true;
    double log_ovl;
    try {
      log_ovl = fermion::log_overlap_magnitude(state, psi_exact_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::parity_error) throw;
      log_ovl = -std::numeric_limits<double>::infinity();
    }
    m.infid = infidelity_density_from_log(log_ovl, target_.n_sites);
    m.t_interaction =
        total_interaction_time(unpack(raw, layer_, frozen_), layer_);
    return m;
  }

  EnergyStats energy_stats(const VecR& raw) const override {
    // <H^2> on a Gaussian state via Wick in the quasiparticle frame is not
    // needed by the pipelines (the noise studies run on the spin backend);
    // report the energy and accumulated time only.
    const fermion::GaussianState state = prepare(raw);
    EnergyStats stats;
    stats.energy = fermion::energy(state, h_target_);
    stats.h_squared = stats.energy * stats.energy;
    stats.t_accumulated =
        total_interaction_time(unpack(raw, layer_, frozen_), layer_);
    return stats;
  }

  double trace_h_over_dim() const override { return tr_h_; }
  double trace_h2_over_dim() const override { return tr_h2_; }

  VecR cold_start_raw() const override {
    return make_cold_start(layer_, frozen_, depth_, target_,
                           resource_.profile);
  }

private:
  fermion::GaussianState prepare(const VecR& raw) const {
    return engine_->apply(rho0_, unpack(raw, layer_, frozen_));
  }

  HamiltonianSpec target_;
  HamiltonianSpec resource_;
  LayerSpec layer_;
  int depth_;
  fermion::QuadraticHamiltonian h_target_;
  std::unique_ptr<FermionCircuitEngine> engine_;
  LayerParams frozen_;
  fermion::GaussianState rho0_;
  double e_exact_ = 0.0;
  fermion::GaussianState psi_exact_;
  double tr_h_ = 0.0, tr_h2_ = 0.0;
};

}  // namespace

std::unique_ptr<CostEvaluator> make_spin_evaluator(
    const HamiltonianSpec& target, const HamiltonianSpec& resource,
    const LayerSpec& layer, int depth, uint64_t reference_seed) {
  return std::make_unique<SpinEvaluator>(target, resource, layer, depth,
                                         reference_seed);
}

std::unique_ptr<CostEvaluator> make_fermion_evaluator(
    const HamiltonianSpec& target, const HamiltonianSpec& resource,
    const LayerSpec& layer, int depth) {
  return std::make_unique<FermionEvaluator>(target, resource, layer, depth);
}

std::unique_ptr<CostEvaluator> make_evaluator(const HamiltonianSpec& target,
                                              const HamiltonianSpec& resource,
                                              const LayerSpec& layer, int depth,
                                              uint64_t reference_seed) {
  if (is_fermionic(target.kind))
    return make_fermion_evaluator(target, resource, layer, depth);
  return make_spin_evaluator(target, resource, layer, depth, reference_seed);
}

VecR pad_raw_with_identity(const VecR& raw, const LayerSpec& spec,
                           double tiny) {
  const int per = params_per_layer(spec);
  require(raw.size() % per == 0 && raw.size() > 0, ErrorCode::invalid_argument,
          "pad: bad parameter layout");
  VecR out(raw.size() + per);
  out.head(raw.size()) = raw;
  out.tail(per) = raw.tail(per);  // copy the last layer's controls
  int k = int(raw.size());
  out[k] = tiny;                              // t_int
  if (spec.durations() >= 2) out[k + 1] = tiny;
  if (spec.durations() >= 3) out[k + 2] = tiny;
  return out;
}

std::vector<SizeResult> precompile_scaling(const EvaluatorFactory& factory,
                                           const PrecompileConfig& config,
                                           const VecR* warm_start) {
  require(!config.train_sizes.empty(), ErrorCode::invalid_argument,
          "precompile: no training sizes");
  std::vector<SizeResult> results;
  VecR theta;
  for (size_t k = 0; k < config.train_sizes.size(); ++k) {
    const int n = config.train_sizes[k];
    auto evaluator = factory(n);
    const bool cold = k == 0 && warm_start == nullptr;
    if (k == 0) theta = warm_start ? *warm_start : evaluator->cold_start_raw();
    const MinimizeConfig& mc = cold ? config.cold : config.warm;
    ObjectiveFn objective = [&](const VecR& x) { return evaluator->cost(x); };
    OptimizationTrace trace = minimize(objective, theta, mc);
    SizeResult res;
    res.n = n;
    res.theta = trace.best_x;
    res.metrics = evaluator->metrics(trace.best_x);
    res.trace = std::move(trace);
    res.optimized = true;
    theta = res.theta;  // verbatim transfer up the ladder
    results.push_back(std::move(res));
  }

  if (config.final_size > 0) {
    auto evaluator = factory(config.final_size);
    SizeResult res;
    res.n = config.final_size;
    if (config.reoptimize_final) {
      ObjectiveFn objective = [&](const VecR& x) { return evaluator->cost(x); };
      OptimizationTrace trace = minimize(objective, theta, config.warm);
      res.theta = trace.best_x;
      res.trace = std::move(trace);
      res.optimized = true;
    } else {
      res.theta = theta;
      res.optimized = false;
    }
    res.metrics = evaluator->metrics(res.theta);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace prqc
