#include "prqc/circuit.hpp"

#include <cmath>

namespace prqc {

std::string layer_mode_name(LayerMode mode) {
  switch (mode) {
    case LayerMode::Simultaneous: return "simultaneous";
    case LayerMode::Quenched: return "quenched";
    case LayerMode::Spin1Triple: return "spin1-triple";
  }
  return "?";
}

std::optional<LayerMode> layer_mode_from_name(const std::string& name) {
  for (LayerMode m : {LayerMode::Simultaneous, LayerMode::Quenched,
                      LayerMode::Spin1Triple}) {
    if (layer_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

LayerSpec default_layer_spec(LayerMode mode, const InteractionProfile& profile) {
  LayerSpec spec;
  spec.mode = mode;
  spec.range_free = profile.kind != ProfileKind::NearestNeighbor;
  spec.field_free = mode == LayerMode::Simultaneous;
  spec.strength_free = false;
  return spec;
}

int params_per_layer(const LayerSpec& spec) {
  return spec.durations() + int(spec.field_free) + int(spec.strength_free) +
         int(spec.range_free);
}

VecR pack(const ParameterVector& pv, const LayerSpec& spec) {
  const int per = params_per_layer(spec);
  VecR raw(per * pv.depth());
  long k = 0;
  for (const LayerParams& p : pv.layers) {
    raw[k++] = p.t_int;
    if (spec.durations() >= 2) raw[k++] = p.t_drv;
    if (spec.durations() >= 3) raw[k++] = p.t_aniso;
    if (spec.field_free) raw[k++] = p.field;
    if (spec.strength_free) raw[k++] = p.strength;
    if (spec.range_free) raw[k++] = p.log_range;
  }
  return raw;
}

ParameterVector unpack(const VecR& raw, const LayerSpec& spec,
                       const LayerParams& frozen) {
  const int per = params_per_layer(spec);
  require(raw.size() % per == 0, ErrorCode::invalid_argument,
          "unpack: length is not a multiple of the per-layer count");
  ParameterVector pv;
  pv.layers.resize(raw.size() / per);
  long k = 0;
  for (LayerParams& p : pv.layers) {
    p = frozen;
    p.t_int = std::abs(raw[k++]);
    if (spec.durations() >= 2) p.t_drv = std::abs(raw[k++]);
    if (spec.durations() >= 3) p.t_aniso = std::abs(raw[k++]);
    if (spec.field_free) p.field = raw[k++];
    if (spec.strength_free) p.strength = raw[k++];
    if (spec.range_free) p.log_range = raw[k++];
  }
  return pv;
}

LayerParams PulseSchedule::step_params(int k, const LayerParams& frozen) const {
  LayerParams p = frozen;
  p.strength = values(k, 0);
  p.field = values(k, 1);
  if (range_free) p.log_range = values(k, 2);
  p.t_int = dt;
  return p;
}

double total_interaction_time(const ParameterVector& pv, const LayerSpec& spec) {
  (void)spec;
  double t = 0.0;
  for (const LayerParams& p : pv.layers) t += p.t_int;
  return t;
}

double total_interaction_time(const PulseSchedule& schedule) {
  return schedule.total_time();
}

// --- spin engine -----------------------------------------------------------

SpinCircuitEngine::SpinCircuitEngine(HamiltonianSpec resource, LayerSpec layer,
                                     std::shared_ptr<const spin::SectorBasis> sector)
    : resource_(std::move(resource)), layer_(layer), sector_(std::move(sector)) {
  require(is_resource(resource_.kind) && !is_fermionic(resource_.kind),
          ErrorCode::unsupported_model,
          "spin engine needs a spin resource model");
  require(layer_.mode != LayerMode::Spin1Triple ||
              local_dim(resource_.kind) == 3,
          ErrorCode::invalid_argument,
          "spin1-triple layers require a spin-1 resource");
  require(layer_.mode != LayerMode::Simultaneous ||
              local_dim(resource_.kind) == 2,
          ErrorCode::invalid_argument,
          "simultaneous spin layers implemented for spin-1/2 resources");
  driving_terms_ = resource_driving_terms(resource_);
  if (resource_.kind == ModelKind::BlumeCapel)
    aniso_terms_ = resource_aniso_terms(resource_);

  // The quench generators factor through product eigenbases when the
  // interaction is diagonal in X and the driving in Z; the tunable-range
  // hopping resources are not, and fall back to dense spectral evolution.
  structured_ = !sector_ && layer_.mode != LayerMode::Simultaneous &&
                spin::terms_diagonal_in_basis(interaction_terms(1.0),
                                              spin::SiteBasis::X) &&
                spin::terms_diagonal_in_basis(driving_terms_,
                                              spin::SiteBasis::Z);
}

TermList SpinCircuitEngine::interaction_terms(double range) const {
  HamiltonianSpec spec = resource_;
  spec.profile.range = range;
  return resource_interaction_terms(spec);
}

void SpinCircuitEngine::evolve_interaction(spin::DenseState& state,
                                           const LayerParams& p) const {
  const double angle = p.strength * p.t_int;
  if (angle == 0.0) return;
  const int ldim = local_dim(resource_.kind);
  if (structured_) {
    if (!layer_.range_free) {
      if (!nn_interaction_diag_)
        nn_interaction_diag_ = spin::product_diagonal(
            interaction_terms(p.range()), resource_.n_sites, ldim,
            spin::SiteBasis::X);
      spin::evolve_product_diagonal(state, *nn_interaction_diag_, angle);
    } else {
      const auto gen = spin::product_diagonal(interaction_terms(p.range()),
                                              resource_.n_sites, ldim,
                                              spin::SiteBasis::X);
      spin::evolve_product_diagonal(state, gen, angle);
    }
    return;
  }
  if (!layer_.range_free) {
    if (!nn_interaction_op_)
      nn_interaction_op_ = std::make_shared<spin::OperatorMatrix>(
          spin::realize(interaction_terms(p.range()), resource_.n_sites, ldim,
                        sector_));
    state = spin::evolve(state, *nn_interaction_op_, angle);
    return;
  }
  const spin::OperatorMatrix op = spin::realize(
      interaction_terms(p.range()), resource_.n_sites, ldim, sector_);
  state = spin::evolve(state, op, angle);
}

void SpinCircuitEngine::evolve_driving(spin::DenseState& state,
                                       double angle) const {
  if (angle == 0.0) return;
  const int ldim = local_dim(resource_.kind);
  if (structured_ || !sector_) {
    if (!driving_diag_)
      driving_diag_ = spin::product_diagonal(driving_terms_, resource_.n_sites,
                                             ldim, spin::SiteBasis::Z);
    // driving stays diagonal in the computational basis even on the dense path
    state.amps.array() *=
        (cplx(0.0, -angle) * driving_diag_->diag.array()).exp();
    return;
  }
  if (!driving_op_)
    driving_op_ = std::make_shared<spin::OperatorMatrix>(spin::realize(
        driving_terms_, resource_.n_sites, ldim, sector_));
  state = spin::evolve(state, *driving_op_, angle);
}

void SpinCircuitEngine::evolve_aniso(spin::DenseState& state,
                                     double angle) const {
  if (angle == 0.0) return;
  if (!aniso_diag_)
    aniso_diag_ = spin::product_diagonal(aniso_terms_, resource_.n_sites, 3,
                                         spin::SiteBasis::X);
  spin::evolve_product_diagonal(state, *aniso_diag_, angle);
}

spin::OperatorMatrix SpinCircuitEngine::layer_generator(const LayerParams& p) const {
  TermList terms = interaction_terms(p.range());
  for (Term& t : terms) t.coeff *= p.strength;
  for (Term t : driving_terms_) {
    t.coeff *= p.field;
    terms.push_back(t);
  }
  return spin::realize(terms, resource_.n_sites, local_dim(resource_.kind),
                       sector_);
}

spin::DenseState SpinCircuitEngine::apply(const spin::DenseState& rho0,
                                          const ParameterVector& pv) const {
  spin::DenseState state = rho0;
  for (const LayerParams& p : pv.layers) {
    switch (layer_.mode) {
      case LayerMode::Quenched:
        evolve_interaction(state, p);
        evolve_driving(state, p.field * p.t_drv);
        break;
      case LayerMode::Spin1Triple:
        evolve_interaction(state, p);
        evolve_driving(state, p.field * p.t_drv);
        evolve_aniso(state, p.t_aniso);
        break;
      case LayerMode::Simultaneous: {
        if (p.t_int == 0.0) break;
        const spin::OperatorMatrix gen = layer_generator(p);
        state = spin::evolve(state, gen, p.t_int);
        break;
      }
    }
  }
  spin::check_norm(state);
  return state;
}

spin::DenseState SpinCircuitEngine::apply_schedule(
    const spin::DenseState& rho0, const PulseSchedule& schedule,
    const LayerParams& frozen) const {
  spin::DenseState state = rho0;
  for (int k = 0; k < schedule.n_steps(); ++k) {
    const LayerParams p = schedule.step_params(k, frozen);
    const spin::OperatorMatrix gen = layer_generator(p);
    state = spin::evolve(state, gen, schedule.dt);
  }
  spin::check_norm(state);
  return state;
}

// --- fermion engine ---------------------------------------------------------

FermionCircuitEngine::FermionCircuitEngine(HamiltonianSpec resource,
                                           LayerSpec layer)
    : resource_(std::move(resource)), layer_(layer) {
  require(resource_.kind == ModelKind::KitaevQuadratic,
          ErrorCode::unsupported_model,
          "fermion engine needs the quadratic resource model");
}

std::shared_ptr<const fermion::BdgFactor> FermionCircuitEngine::interaction_factor(
    double range) const {
  if (!layer_.range_free && nn_factor_) return nn_factor_;
  HamiltonianSpec spec = resource_;
  spec.profile.range = range;
  auto factor = std::make_shared<fermion::BdgFactor>(
      fermion::build_quadratic(resource_interaction_terms(spec),
                               resource_.n_sites));
  if (!layer_.range_free) nn_factor_ = factor;
  return factor;
}

void FermionCircuitEngine::chemical_quench(fermion::GaussianState& state,
                                           double angle) const {
  // driving generator sum_i (n_i - 1/2): BdG part is diagonal, so the
  // propagator reduces to opposite phases on the U and V blocks
  if (angle == 0.0) return;
  state.u *= std::exp(cplx(0.0, -angle));
  state.v *= std::exp(cplx(0.0, angle));
}

fermion::QuadraticHamiltonian FermionCircuitEngine::layer_hamiltonian(
    const LayerParams& p) const {
  HamiltonianSpec spec = resource_;
  spec.profile.range = p.range();
  fermion::QuadraticHamiltonian h = fermion::build_quadratic(
      resource_interaction_terms(spec), resource_.n_sites);
  h.a *= p.strength;
  h.b *= p.strength;
  h.a.diagonal().array() += p.field;
  h.offset -= 0.5 * p.field * resource_.n_sites;
  return h;
}

fermion::GaussianState FermionCircuitEngine::apply(
    const fermion::GaussianState& rho0, const ParameterVector& pv) const {
  fermion::GaussianState state = rho0;
  for (const LayerParams& p : pv.layers) {
    switch (layer_.mode) {
      case LayerMode::Quenched: {
        const double angle = p.strength * p.t_int;
        if (angle != 0.0) interaction_factor(p.range())->propagate(state, angle);
        chemical_quench(state, p.field * p.t_drv);
        break;
      }
      case LayerMode::Simultaneous: {
        if (p.t_int == 0.0) break;
        fermion::BdgFactor factor(layer_hamiltonian(p));
        factor.propagate(state, p.t_int);
        break;
      }
      case LayerMode::Spin1Triple:
        throw Error(ErrorCode::invalid_argument,
                    "spin1-triple layers are undefined on the Gaussian backend");
    }
  }
  return state;
}

fermion::GaussianState FermionCircuitEngine::apply_schedule(
    const fermion::GaussianState& rho0, const PulseSchedule& schedule,
    const LayerParams& frozen) const {
  fermion::GaussianState state = rho0;
  for (int k = 0; k < schedule.n_steps(); ++k) {
    const LayerParams p = schedule.step_params(k, frozen);
    fermion::BdgFactor factor(layer_hamiltonian(p));
    factor.propagate(state, schedule.dt);
  }
  return state;
}

}  // namespace prqc
