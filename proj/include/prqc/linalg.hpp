#pragma once

#include <cstdint>
#include <functional>

#include "prqc/common.hpp"

namespace prqc {

// Full eigendecomposition of a real symmetric matrix, ascending eigenvalues.
void sym_eig(const MatR& a, VecR& evals, MatR& evecs);

// Full SVD a = u * s.asDiagonal() * v.transpose() of a square real matrix,
// singular values descending.
void svd_square(const MatR& a, MatR& u, VecR& s, MatR& v);

// y = m * x and Y = m * X with real m and complex operand, without forming a
// complex copy of m.
VecC real_times_cvec(const MatR& m, const VecC& x);
MatC real_times_cmat(const MatR& m, const MatC& x);
MatC real_tr_times_cmat(const MatR& m, const MatC& x);  // m^T * X

struct LanczosResult {
  double value = 0.0;
  VecR vector;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Lowest eigenpair of a real symmetric operator given only its action,
// restarted Lanczos with full reorthogonalization inside each block.
LanczosResult lanczos_lowest(
    long dim, const std::function<void(const VecR&, VecR&)>& apply,
    uint64_t seed, double tol = 1e-11, int block = 96, int max_restarts = 400);

}  // namespace prqc
