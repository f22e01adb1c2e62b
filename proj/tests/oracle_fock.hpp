#pragma once

// Fock-space oracle for the Gaussian backend: realizes fermionic operators
// as dense 2^N matrices through the Jordan-Wigner sign-string construction
// and solves everything by brute-force diagonalization. Test-only; N <= 8.

#include <vector>

#include "prqc/common.hpp"
#include "prqc/fermion.hpp"

namespace prqc::oracle {

// |n> = (c+_1)^{n_1} (c+_2)^{n_2} ... |0>, occupation n_i is bit (i-1).
inline std::vector<MatR> fock_annihilators(int n_modes) {
  const long dim = 1L << n_modes;
  std::vector<MatR> c(n_modes, MatR::Zero(dim, dim));
  for (int i = 0; i < n_modes; ++i) {
    const long bit = 1L << i;
    for (long f = 0; f < dim; ++f) {
      if (!(f & bit)) continue;
      int sign = 1;
      for (int l = 0; l < i; ++l)
        if (f & (1L << l)) sign = -sign;
      c[i](f - bit, f) = double(sign);
    }
  }
  return c;
}

inline MatR fock_hamiltonian(const fermion::QuadraticHamiltonian& h) {
  const int n = h.n_modes();
  const long dim = 1L << n;
  const auto c = fock_annihilators(n);
  MatR ham = h.offset * MatR::Identity(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (h.a(i, j) != 0.0)
        ham += h.a(i, j) * (c[i].transpose() * c[j]);
      if (h.b(i, j) != 0.0) {
        const MatR cc = c[i] * c[j];
        ham += 0.5 * h.b(i, j) * (cc + cc.transpose());
      }
    }
  }
  return ham;
}

// Fock vector of the (U, V) vacuum: the zero mode of the parent Hamiltonian
// sum_k gamma+_k gamma_k. Requires a non-degenerate vacuum.
inline VecC fock_vector(const fermion::GaussianState& state) {
  const int n = state.n_modes();
  const long dim = 1L << n;
  const auto c = fock_annihilators(n);
  MatC parent = MatC::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    MatC gamma = MatC::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
      gamma += std::conj(state.u(i, k)) * c[i].cast<cplx>();
      gamma += std::conj(state.v(i, k)) * c[i].transpose().cast<cplx>();
    }
    parent += gamma.adjoint() * gamma;
  }
  Eigen::SelfAdjointEigenSolver<MatC> es(parent);
  if (es.eigenvalues()(0) > 1e-8 || es.eigenvalues()(1) < 1e-8)
    throw Error(ErrorCode::numerical_error,
                "oracle: vacuum not unique enough to extract");
  return es.eigenvectors().col(0);
}

inline VecR fock_occupations(const VecC& psi, int n_modes) {
  VecR occ = VecR::Zero(n_modes);
  for (long f = 0; f < psi.size(); ++f) {
    const double w = std::norm(psi[f]);
    for (int i = 0; i < n_modes; ++i)
      if (f & (1L << i)) occ[i] += w;
  }
  return occ;
}

inline VecC fock_evolve(const MatR& ham, const VecC& psi, double t) {
  Eigen::SelfAdjointEigenSolver<MatR> es(ham);
  const VecC coeff = es.eigenvectors().transpose().cast<cplx>() * psi;
  VecC rotated(coeff.size());
  for (long k = 0; k < coeff.size(); ++k)
    rotated[k] = coeff[k] * std::exp(cplx(0.0, -t * es.eigenvalues()(k)));
  return es.eigenvectors().cast<cplx>() * rotated;
}

}  // namespace prqc::oracle
