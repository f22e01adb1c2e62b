#pragma once

#include "prqc/common.hpp"
#include "prqc/model.hpp"

namespace prqc::fermion {

// H = sum_ij A_ij c+_i c_j + 1/2 sum_ij (B_ij c_i c_j + h.c.) + offset,
// with A symmetric and B antisymmetric (real couplings throughout the model
// catalog). A pair term  c (c+_j c+_i + c_i c_j)  with i < j enters as
// B_ij = +c.
struct QuadraticHamiltonian {
  MatR a;
  MatR b;
  double offset = 0.0;

  int n_modes() const { return int(a.rows()); }
  void check() const;  // symmetry/antisymmetry within 1e-12
};

QuadraticHamiltonian build_quadratic(const HamiltonianSpec& spec);
QuadraticHamiltonian build_quadratic(const TermList& terms, int n_modes);

// Bogoliubov vacuum defined by quasiparticle amplitudes (U, V):
// gamma_k = sum_i (U*_ik c_i + V*_ik c+_i), with U+U + V+V = 1 and
// U^T V + V^T U = 0. Fermion parity is fixed at construction and conserved
// by quadratic evolution.
struct GaussianState {
  MatC u;
  MatC v;
  int parity = +1;
  int evolutions_since_checked = 0;

  int n_modes() const { return int(u.rows()); }
};

GaussianState vacuum_state(int n_modes);

// Largest of the two Bogoliubov constraint violations.
double bogoliubov_drift(const GaussianState& state);
void reorthonormalize(GaussianState& state);

// Reusable factorization of the single-particle (BdG) generator. Real A, B
// reduce the 2N x 2N eigenproblem to one N x N SVD.
class BdgFactor {
public:
  explicit BdgFactor(const QuadraticHamiltonian& h);

  const VecR& energies() const { return sigma_; }  // quasiparticle energies
  double ground_energy() const { return ground_energy_; }
  GaussianState ground_state() const;
  void propagate(GaussianState& state, double t) const;

private:
  MatR us_, vs_;
  VecR sigma_;
  double ground_energy_ = 0.0;
};

std::pair<double, GaussianState> ground_gaussian(const QuadraticHamiltonian& h);
GaussianState evolve_gaussian(const GaussianState& state,
                              const QuadraticHamiltonian& h, double t);

double energy(const GaussianState& state, const QuadraticHamiltonian& h);
VecR occupations(const GaussianState& state);

// ln |<a|b>| (-inf for orthogonal states); parity mismatch throws.
double log_overlap_magnitude(const GaussianState& a, const GaussianState& b);
double overlap_magnitude(const GaussianState& a, const GaussianState& b);

}  // namespace prqc::fermion
