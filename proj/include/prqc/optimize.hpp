#pragma once

#include <functional>
#include <memory>

#include "prqc/circuit.hpp"
#include "prqc/common.hpp"
#include "prqc/model.hpp"

namespace prqc {

enum class OptimEngine { NelderMead, Bfgs };

std::string optim_engine_name(OptimEngine engine);
std::optional<OptimEngine> optim_engine_from_name(const std::string& name);

struct MinimizeConfig {
  OptimEngine engine = OptimEngine::NelderMead;
  int restarts = 8;           // multi-start count
  double spread = 0.1;        // Gaussian perturbation of the start point
  int max_evals = 5000;       // evaluation budget per restart
  double ftol = 1e-10;        // best-cost stall tolerance
  int stall_evals = 20;       // window for the stall test
  double fd_step_rel = 1e-4;  // central-difference step (relative)
  double fd_step_abs = 1e-6;  // and its absolute floor
  uint64_t seed = 1;
};

struct TraceRecord {
  long eval = 0;
  double cost = 0.0;
  double eps = std::numeric_limits<double>::quiet_NaN();
  double infid = std::numeric_limits<double>::quiet_NaN();
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;  // best-so-far improvements
  VecR best_x;
  double best_cost = std::numeric_limits<double>::infinity();
  long evaluations = 0;
  double wall_seconds = 0.0;
  int best_restart = 0;
  bool aborted_on_nan = false;
};

using ObjectiveFn = std::function<double(const VecR&)>;
// Optional per-improvement metrics attached to the trace records.
using TraceMetricsFn = std::function<std::pair<double, double>(const VecR&)>;

OptimizationTrace minimize(const ObjectiveFn& objective, const VecR& x0,
                           const MinimizeConfig& config,
                           const TraceMetricsFn* trace_metrics = nullptr);

// Central finite-difference gradient (the quasi-Newton engine's gradient).
VecR fd_gradient(const ObjectiveFn& objective, const VecR& x,
                 double step_rel = 1e-4, double step_abs = 1e-6);

struct Metrics {
  double energy = 0.0;
  double eps = 0.0;    // |E - E_ex| / N
  double infid = 0.0;  // 1 - |<psi|psi_ex>|^(1/N)
  bool infid_available = false;
  double t_interaction = 0.0;
};

double residual_energy_density(double energy, double exact_energy, int n);
// From the overlap magnitude; stable for magnitudes near 0 and 1.
double infidelity_density(double overlap_magnitude, int n);
double infidelity_density_from_log(double log_overlap_magnitude, int n);

// Cost function of Eq-style energy minimization over packed circuit
// parameters, on either backend, with the exact reference attached.
class CostEvaluator {
public:
  virtual ~CostEvaluator() = default;

  virtual int n_params() const = 0;
  virtual int n_sites() const = 0;
  virtual double exact_energy() const = 0;
  virtual double cost(const VecR& raw) const = 0;
  virtual Metrics metrics(const VecR& raw) const = 0;
  virtual VecR cold_start_raw() const = 0;
  virtual const LayerSpec& layer_spec() const = 0;

  // Shot-noise moments of the energy estimator for the noise module.
  struct EnergyStats {
    double energy = 0.0;      // <H>
    double h_squared = 0.0;   // <H^2>
    double t_accumulated = 0.0;
  };
  virtual EnergyStats energy_stats(const VecR& raw) const = 0;
  virtual double trace_h_over_dim() const = 0;
  virtual double trace_h2_over_dim() const = 0;
};

std::unique_ptr<CostEvaluator> make_spin_evaluator(
    const HamiltonianSpec& target, const HamiltonianSpec& resource,
    const LayerSpec& layer, int depth, uint64_t reference_seed = 7);

std::unique_ptr<CostEvaluator> make_fermion_evaluator(
    const HamiltonianSpec& target, const HamiltonianSpec& resource,
    const LayerSpec& layer, int depth);

// Builds the matching evaluator for the backend of the target model.
std::unique_ptr<CostEvaluator> make_evaluator(const HamiltonianSpec& target,
                                              const HamiltonianSpec& resource,
                                              const LayerSpec& layer, int depth,
                                              uint64_t reference_seed = 7);

// Appends one near-identity layer (durations 1e-6, other controls copied
// from the last layer) to a packed parameter vector.
VecR pad_raw_with_identity(const VecR& raw, const LayerSpec& spec,
                           double tiny = 1e-6);

struct SizeResult {
  int n = 0;
  VecR theta;
  Metrics metrics;
  OptimizationTrace trace;
  bool optimized = false;
};

struct PrecompileConfig {
  std::vector<int> train_sizes;  // ascending
  int final_size = 0;
  bool reoptimize_final = false;  // default: evaluate the transferred circuit
  MinimizeConfig cold;            // first size
  MinimizeConfig warm;            // later sizes
};

using EvaluatorFactory =
    std::function<std::unique_ptr<CostEvaluator>(int n_sites)>;

// Optimize at the smallest size from a cold start, transfer the parameters
// verbatim up the size ladder, then evaluate (or re-optimize) at the final
// size.
std::vector<SizeResult> precompile_scaling(const EvaluatorFactory& factory,
                                           const PrecompileConfig& config,
                                           const VecR* warm_start = nullptr);

}  // namespace prqc
