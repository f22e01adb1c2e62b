#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "prqc/common.hpp"
#include "prqc/fermion.hpp"
#include "prqc/model.hpp"
#include "prqc/spin.hpp"

namespace prqc {

enum class LayerMode { Simultaneous, Quenched, Spin1Triple };

std::string layer_mode_name(LayerMode mode);
std::optional<LayerMode> layer_mode_from_name(const std::string& name);

// Which per-layer controls the optimizer sees. Frozen controls keep the
// values stored in the parameter vector (strength 1, field 1 unless set).
struct LayerSpec {
  LayerMode mode = LayerMode::Quenched;
  bool range_free = true;     // ln L; forced off for NN resources
  bool field_free = false;    // h
  bool strength_free = false; // J

  int durations() const { return mode == LayerMode::Quenched ? 2
                             : mode == LayerMode::Spin1Triple ? 3 : 1; }
};

LayerSpec default_layer_spec(LayerMode mode, const InteractionProfile& profile);

struct LayerParams {
  double strength = 1.0;   // J
  double log_range = 0.0;  // optimizer coordinate for the range
  double field = 1.0;      // h
  double t_int = 0.0;      // interaction quench / simultaneous duration
  double t_drv = 0.0;      // driving quench (Spin1Triple: Sz rotation)
  double t_aniso = 0.0;    // Spin1Triple (Sx)^2 quench

  double range() const { return std::exp(log_range); }
};

// All circuit controls. Durations are stored non-negative; the range is kept
// in log space so packing to the optimizer's unconstrained coordinates and
// back is exact.
struct ParameterVector {
  std::vector<LayerParams> layers;

  int depth() const { return int(layers.size()); }
};

// Free-parameter order per layer: durations, field, strength, log-range.
int params_per_layer(const LayerSpec& spec);
VecR pack(const ParameterVector& pv, const LayerSpec& spec);
ParameterVector unpack(const VecR& raw, const LayerSpec& spec,
                       const LayerParams& frozen);

// Piecewise-constant controls for the optimal-control path; each row holds
// the raw step parameters [J, h(, ln L)].
struct PulseSchedule {
  double dt = 0.1;
  bool range_free = true;
  MatR values;  // n_steps x params_per_step

  int n_steps() const { return int(values.rows()); }
  int params_per_step() const { return range_free ? 3 : 2; }
  double total_time() const { return n_steps() * dt; }
  LayerParams step_params(int k, const LayerParams& frozen) const;
};

double total_interaction_time(const ParameterVector& pv, const LayerSpec& spec);
double total_interaction_time(const PulseSchedule& schedule);

// Applies layered circuits built from a resource model on the dense spin
// backend. Generators that are diagonal in a product basis (the Ising and
// spin-1 quench circuits) are exponentiated by local rotations plus phases;
// everything else goes through cached spectral decompositions.
class SpinCircuitEngine {
public:
  SpinCircuitEngine(HamiltonianSpec resource, LayerSpec layer,
                    std::shared_ptr<const spin::SectorBasis> sector = nullptr);

  const HamiltonianSpec& resource() const { return resource_; }
  const LayerSpec& layer_spec() const { return layer_; }

  spin::DenseState apply(const spin::DenseState& rho0,
                         const ParameterVector& pv) const;
  spin::DenseState apply_schedule(const spin::DenseState& rho0,
                                  const PulseSchedule& schedule,
                                  const LayerParams& frozen) const;

  // Simultaneous-mode generator J * interaction(L) + h * driving, realized
  // for one layer (used by the schedule path and the spin GRAPE variant).
  spin::OperatorMatrix layer_generator(const LayerParams& p) const;

private:
  HamiltonianSpec resource_;
  LayerSpec layer_;
  std::shared_ptr<const spin::SectorBasis> sector_;
  bool structured_ = false;
  TermList driving_terms_;
  TermList aniso_terms_;
  mutable std::shared_ptr<spin::OperatorMatrix> driving_op_;
  mutable std::shared_ptr<spin::OperatorMatrix> nn_interaction_op_;
  mutable std::optional<spin::ProductDiagonal> nn_interaction_diag_;
  mutable std::optional<spin::ProductDiagonal> driving_diag_;
  mutable std::optional<spin::ProductDiagonal> aniso_diag_;

  TermList interaction_terms(double range) const;
  void evolve_interaction(spin::DenseState& state, const LayerParams& p) const;
  void evolve_driving(spin::DenseState& state, double angle) const;
  void evolve_aniso(spin::DenseState& state, double angle) const;
};

// Same circuits on the Gaussian backend.
class FermionCircuitEngine {
public:
  FermionCircuitEngine(HamiltonianSpec resource, LayerSpec layer);

  const HamiltonianSpec& resource() const { return resource_; }
  const LayerSpec& layer_spec() const { return layer_; }

  fermion::GaussianState apply(const fermion::GaussianState& rho0,
                               const ParameterVector& pv) const;
  fermion::GaussianState apply_schedule(const fermion::GaussianState& rho0,
                                        const PulseSchedule& schedule,
                                        const LayerParams& frozen) const;

  fermion::QuadraticHamiltonian layer_hamiltonian(const LayerParams& p) const;
  std::shared_ptr<const fermion::BdgFactor> interaction_factor(double range) const;
  void chemical_quench(fermion::GaussianState& state, double angle) const;

private:
  HamiltonianSpec resource_;
  LayerSpec layer_;
  mutable std::shared_ptr<const fermion::BdgFactor> nn_factor_;
};

}  // namespace prqc
