#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "prqc/common.hpp"
#include "prqc/model.hpp"

namespace prqc::spin {

inline constexpr long kDefaultDimCap = 1L << 24;
// Above this dimension realize() would still fit the amplitude cap but a
// dense matrix becomes impractical; iterative paths take over.
inline constexpr long kDenseDim = 8192;

// Fixed total-excitation subspace of a spin-1/2 chain. Excitations count
// sites with n_i = (1 + sigma^z_i)/2 = 1; bit value 1 in a basis pattern
// marks spin-down, so pattern 0 is the all-up state.
struct SectorBasis {
  int n_sites = 0;
  int n_excitations = 0;
  std::vector<uint32_t> states;  // ascending full-space patterns
  std::unordered_map<uint32_t, int> index;

  long dim() const { return static_cast<long>(states.size()); }
};

std::shared_ptr<const SectorBasis> make_sector(int n_sites, int n_excitations);

struct DenseState {
  VecC amps;
  int n_sites = 0;
  int local_dim = 2;
  std::shared_ptr<const SectorBasis> sector;  // null = full product space

  long dim() const { return amps.size(); }
};

long full_dim(int n_sites, int local_dim);

// digits[i] is the local basis index of site i+1: for spin-1/2, 0 = up and
// 1 = down; for spin-1, 0/1/2 = m of +1/0/-1.
DenseState product_state(int n_sites, int local_dim,
                         const std::vector<int>& digits,
                         std::shared_ptr<const SectorBasis> sector = nullptr);

// Easy-to-prepare reference state for a spin target model: the product
// ground state of its on-site field part (all-up for the TFIM, all m = -1
// for the spin-1 chain, field-sign aligned for the quasiperiodic chain).
DenseState initial_state_for_target(const HamiltonianSpec& target,
                                    std::shared_ptr<const SectorBasis> sector = nullptr);

void check_norm(DenseState& state, double tol = 1e-9);

// Dense real-symmetric realization with a lazily cached eigendecomposition
// reused by every evolution under the same generator.
class OperatorMatrix {
public:
  explicit OperatorMatrix(MatR mat);

  long dim() const { return mat_.rows(); }
  const MatR& matrix() const { return mat_; }
  const VecR& evals() const;
  const MatR& evecs() const;

private:
  MatR mat_;
  mutable bool decomposed_ = false;
  mutable VecR evals_;
  mutable MatR evecs_;
};

OperatorMatrix realize(const TermList& terms, int n_sites, int local_dim,
                       std::shared_ptr<const SectorBasis> sector = nullptr,
                       long dim_cap = kDefaultDimCap);
OperatorMatrix realize(const HamiltonianSpec& spec,
                       std::shared_ptr<const SectorBasis> sector = nullptr,
                       long dim_cap = kDefaultDimCap);

// out = H |in>, matrix-free.
void apply_terms(const TermList& terms, const DenseState& in, DenseState& out);
DenseState apply_terms(const TermList& terms, const DenseState& in);

std::pair<double, DenseState> ground_state(const OperatorMatrix& op,
                                           int n_sites, int local_dim,
                                           std::shared_ptr<const SectorBasis> sector = nullptr);

// Lanczos ground state through the matrix-free apply; exact references above
// the dense threshold.
std::pair<double, DenseState> ground_state_iterative(
    const TermList& terms, int n_sites, int local_dim,
    std::shared_ptr<const SectorBasis> sector = nullptr, uint64_t seed = 7);

// Dispatches on dimension between the dense and iterative paths.
std::pair<double, DenseState> ground_state_auto(
    const TermList& terms, int n_sites, int local_dim,
    std::shared_ptr<const SectorBasis> sector = nullptr, uint64_t seed = 7);

DenseState evolve(const DenseState& state, const OperatorMatrix& op, double t);

double expectation(const DenseState& state, const OperatorMatrix& op);
double expectation_terms(const DenseState& state, const TermList& terms);
cplx overlap(const DenseState& a, const DenseState& b);

// <n_i> = <(1 + sigma^z_i)/2> per site (spin-1/2 only).
VecR site_occupations(const DenseState& state);

// --- product-eigenbasis generators ---------------------------------------
//
// The quenched-circuit generators are diagonal in a product basis (the
// interaction and anisotropy parts in the local sigma^x/Sx eigenbasis, the
// driving parts in the computational basis). Exponentials then reduce to
// local basis rotations plus diagonal phases; this is what keeps N = 16
// spin-1/2 and N = 10 spin-1 circuits exact and fast.

enum class SiteBasis { Z, X };

struct ProductDiagonal {
  SiteBasis basis = SiteBasis::Z;
  int n_sites = 0;
  int local_dim = 2;
  VecR diag;
};

bool diagonal_in_basis(TermKind kind, SiteBasis basis);
bool terms_diagonal_in_basis(const TermList& terms, SiteBasis basis);
ProductDiagonal product_diagonal(const TermList& terms, int n_sites,
                                 int local_dim, SiteBasis basis);

void to_x_basis(DenseState& state);
void from_x_basis(DenseState& state);
void evolve_product_diagonal(DenseState& state, const ProductDiagonal& gen,
                             double t);

// Tr(H)/dim and Tr(H^2)/dim from the term list alone (shot-noise moments).
double trace_over_dim(const TermList& terms, int n_sites, int local_dim);
double trace_sq_over_dim(const TermList& terms, int n_sites, int local_dim);

// Spin-1 operators for algebra checks.
MatC spin1_sx();
MatC spin1_sy();
MatC spin1_sz();

DenseState embed_in_full(const DenseState& sector_state);
DenseState project_to_sector(const DenseState& full_state,
                             std::shared_ptr<const SectorBasis> sector);

}  // namespace prqc::spin
