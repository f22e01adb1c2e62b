#include "prqc/linalg.hpp"

#include <lapacke.h>

#include <cmath>

#include "prqc/rng.hpp"

namespace prqc {

void sym_eig(const MatR& a, VecR& evals, MatR& evecs) {
  require(a.rows() == a.cols(), ErrorCode::invalid_argument,
          "sym_eig: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) {
    evals.resize(0);
    evecs.resize(0, 0);
    return;
  }
  MatR work = a;
  evals.resize(n);
  evecs.resize(n, n);
  std::vector<lapack_int> isuppz(2 * std::max<lapack_int>(1, n));
  lapack_int m = 0;
  lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'A', 'L', n, work.data(), n, 0.0, 0.0, 0, 0, 0.0,
      &m, evals.data(), evecs.data(), n, isuppz.data());
  if (info != 0 || m != n) {
    // dsyevr occasionally refuses ill-conditioned inputs; dsyevd is sturdier.
    work = a;
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n,
                          evals.data());
    require(info == 0, ErrorCode::numerical_error,
            "sym_eig: LAPACK failed with info " + std::to_string(info));
    evecs = work;
  }
}

void svd_square(const MatR& a, MatR& u, VecR& s, MatR& v) {
  require(a.rows() == a.cols(), ErrorCode::invalid_argument,
          "svd_square: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  MatR work = a;
  u.resize(n, n);
  v.resize(n, n);
  s.resize(n);
  MatR vt(n, n);
  lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, s.data(),
                     u.data(), n, vt.data(), n);
  require(info == 0, ErrorCode::numerical_error,
          "svd_square: LAPACK dgesdd failed with info " + std::to_string(info));
  v = vt.transpose();
}

VecC real_times_cvec(const MatR& m, const VecC& x) {
  VecR xr = x.real(), xi = x.imag();
  VecR yr = m * xr, yi = m * xi;
  VecC y(m.rows());
  y.real() = yr;
  y.imag() = yi;
  return y;
}

MatC real_times_cmat(const MatR& m, const MatC& x) {
  MatR xr = x.real(), xi = x.imag();
  MatR yr = m * xr, yi = m * xi;
  MatC y(m.rows(), x.cols());
  y.real() = yr;
  y.imag() = yi;
  return y;
}

MatC real_tr_times_cmat(const MatR& m, const MatC& x) {
  MatR xr = x.real(), xi = x.imag();
  MatR yr = m.transpose() * xr, yi = m.transpose() * xi;
  MatC y(m.cols(), x.cols());
  y.real() = yr;
  y.imag() = yi;
  return y;
}

LanczosResult lanczos_lowest(
    long dim, const std::function<void(const VecR&, VecR&)>& apply,
    uint64_t seed, double tol, int block, int max_restarts) {
  require(dim >= 1, ErrorCode::invalid_argument, "lanczos: dim must be >= 1");
  block = std::min<long>(block, dim);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecR v0(dim);
  for (long i = 0; i < dim; ++i) v0(i) = gauss(rng);
  v0.normalize();

  LanczosResult result;
  VecR w(dim);

  for (int restart = 0; restart < max_restarts; ++restart) {
    MatR basis(dim, block);
    VecR alpha(block), beta(block);
    basis.col(0) = v0;
    int steps = 0;
    for (int k = 0; k < block; ++k) {
      apply(basis.col(k), w);
      alpha(k) = basis.col(k).dot(w);
      // Full reorthogonalization against the current block.
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
      steps = k + 1;
      double nw = w.norm();
      beta(k) = nw;
      if (k + 1 < block) {
        if (nw < 1e-13) break;  // invariant subspace found
        basis.col(k + 1) = w / nw;
      }
    }

    MatR tri = MatR::Zero(steps, steps);
    for (int k = 0; k < steps; ++k) {
      tri(k, k) = alpha(k);
      if (k + 1 < steps) tri(k, k + 1) = tri(k + 1, k) = beta(k);
    }
    VecR theta;
    MatR y;
    sym_eig(tri, theta, y);
    VecR x = basis.leftCols(steps) * y.col(0);
    x.normalize();

    apply(x, w);
    double value = x.dot(w);
    double residual = (w - value * x).norm();
    double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());

    result.value = value;
    result.vector = x;
    result.iterations += steps;
    result.residual = residual;
    if (residual <= tol * scale) {
      result.converged = true;
      return result;
    }
    v0 = x;
  }
  return result;
}

}  // namespace prqc
