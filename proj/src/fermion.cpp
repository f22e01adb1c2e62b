#include "prqc/fermion.hpp"

#include <cmath>
#include <limits>

#include "prqc/linalg.hpp"

namespace prqc::fermion {

namespace {
constexpr double kSqrtHalf = 0.70710678118654752440;
}

void QuadraticHamiltonian::check() const {
  require(a.rows() == a.cols() && b.rows() == b.cols() && a.rows() == b.rows(),
          ErrorCode::invalid_argument, "quadratic Hamiltonian shape mismatch");
  require((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12,
          ErrorCode::invalid_argument, "A must be symmetric");
  require((b + b.transpose()).cwiseAbs().maxCoeff() < 1e-12,
          ErrorCode::invalid_argument, "B must be antisymmetric");
}

QuadraticHamiltonian build_quadratic(const TermList& terms, int n_modes) {
  QuadraticHamiltonian h;
  h.a = MatR::Zero(n_modes, n_modes);
  h.b = MatR::Zero(n_modes, n_modes);
  for (const Term& term : terms) {
    require(term_is_fermionic(term.kind), ErrorCode::unsupported_model,
            "term " + term_kind_name(term.kind) + " is not fermionic");
    const int i = term.site_i - 1;
    switch (term.kind) {
      case TermKind::FermHop: {
        const int j = term.site_j - 1;
        h.a(i, j) += term.coeff;
        h.a(j, i) += term.coeff;
        break;
      }
      case TermKind::FermPair: {
        const int j = term.site_j - 1;
        h.b(i, j) += term.coeff;
        h.b(j, i) -= term.coeff;
        break;
      }
      case TermKind::FermNumHalf:
        h.a(i, i) += term.coeff;
        h.offset -= 0.5 * term.coeff;
        break;
      default:
        break;
    }
  }
  return h;
}

QuadraticHamiltonian build_quadratic(const HamiltonianSpec& spec) {
  require(is_fermionic(spec.kind), ErrorCode::unsupported_model,
          model_kind_name(spec.kind) + " is not a quadratic fermionic model");
  return build_quadratic(term_list(spec), spec.n_sites);
}

GaussianState vacuum_state(int n_modes) {
  GaussianState s;
  s.u = MatC::Identity(n_modes, n_modes);
  s.v = MatC::Zero(n_modes, n_modes);
  s.parity = +1;
  return s;
}

double bogoliubov_drift(const GaussianState& state) {
  const int n = state.n_modes();
  const MatC g = state.u.adjoint() * state.u + state.v.adjoint() * state.v -
                 MatC::Identity(n, n);
  const MatC iso =
      state.u.transpose() * state.v + state.v.transpose() * state.u;
  return std::max(g.cwiseAbs().maxCoeff(), iso.cwiseAbs().maxCoeff());
}

void reorthonormalize(GaussianState& state) {
  const MatC m = state.u.adjoint() * state.u + state.v.adjoint() * state.v;
  Eigen::SelfAdjointEigenSolver<MatC> es(m);
  const MatC inv_sqrt = es.eigenvectors() *
                        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().adjoint();
  state.u = state.u * inv_sqrt;
  state.v = state.v * inv_sqrt;
}

BdgFactor::BdgFactor(const QuadraticHamiltonian& h) {
  h.check();
  // In the rotated frame the BdG matrix is [[0, R],[R^T, 0]] with R = A + B;
  // its spectrum and eigenvectors come from the SVD of R. This keeps the
  // positive/negative branches exactly paired even through zero modes.
  const MatR r = h.a + h.b;
  svd_square(r, us_, sigma_, vs_);
  ground_energy_ = -0.5 * sigma_.sum() + 0.5 * h.a.trace() + h.offset;
}

GaussianState BdgFactor::ground_state() const {
  GaussianState s;
  s.u = (0.5 * (us_ + vs_)).cast<cplx>();
  s.v = (0.5 * (us_ - vs_)).cast<cplx>();
  const double det_sign =
      Eigen::PartialPivLU<MatR>(us_).determinant() *
      Eigen::PartialPivLU<MatR>(vs_).determinant();
  s.parity = det_sign >= 0 ? +1 : -1;
  return s;
}

void BdgFactor::propagate(GaussianState& state, double t) const {
  const int n = int(sigma_.size());
  require(state.n_modes() == n, ErrorCode::basis_mismatch,
          "propagate: mode count mismatch");
  if (t == 0.0) return;

  // W' = exp(-i H_BdG t) W through the rotated-frame factorization.
  const MatC xu = kSqrtHalf * (state.u + state.v);
  const MatC xv = kSqrtHalf * (state.u - state.v);
  MatC yu = real_tr_times_cmat(us_, xu);
  MatC yv = real_tr_times_cmat(vs_, xv);
  const MatC sum = kSqrtHalf * (yu + yv);
  const MatC dif = kSqrtHalf * (yu - yv);

  const VecC phase_minus = (cplx(0.0, -t) * sigma_.array()).exp();
  const VecC phase_plus = (cplx(0.0, t) * sigma_.array()).exp();
  const MatC pu = phase_minus.asDiagonal() * sum;
  const MatC pv = phase_plus.asDiagonal() * dif;

  const MatC zu = real_times_cmat(us_, kSqrtHalf * (pu + pv));
  const MatC zv = real_times_cmat(vs_, kSqrtHalf * (pu - pv));
  state.u = kSqrtHalf * (zu + zv);
  state.v = kSqrtHalf * (zu - zv);

  if (++state.evolutions_since_checked >= 10) {
    state.evolutions_since_checked = 0;
    if (bogoliubov_drift(state) > 1e-8) reorthonormalize(state);
  }
}

std::pair<double, GaussianState> ground_gaussian(const QuadraticHamiltonian& h) {
  BdgFactor factor(h);
  return {factor.ground_energy(), factor.ground_state()};
}

GaussianState evolve_gaussian(const GaussianState& state,
                              const QuadraticHamiltonian& h, double t) {
  BdgFactor factor(h);
  GaussianState out = state;
  factor.propagate(out, t);
  return out;
}

double energy(const GaussianState& state, const QuadraticHamiltonian& h) {
  h.check();
  require(state.n_modes() == h.n_modes(), ErrorCode::basis_mismatch,
          "energy: mode count mismatch");
  // <c+_i c_j> = (V V+)_ij, <c_i c_j> = (U V+)_ij
  const MatC nc = state.v * state.v.adjoint();
  const MatC f = state.u * state.v.adjoint();
  const double e_hop = (h.a.array() * nc.real().array()).sum();
  const double e_pair = (h.b.array() * f.real().array()).sum();
  return e_hop + e_pair + h.offset;
}

VecR occupations(const GaussianState& state) {
  return (state.v.cwiseAbs2()).rowwise().sum();
}

double log_overlap_magnitude(const GaussianState& a, const GaussianState& b) {
  require(a.n_modes() == b.n_modes(), ErrorCode::basis_mismatch,
          "overlap: mode count mismatch");
  require(a.parity == b.parity, ErrorCode::parity_error,
          "overlap between different parity sectors");
  const MatC m = a.u.adjoint() * b.u + a.v.adjoint() * b.v;
  Eigen::PartialPivLU<MatC> lu(m);
  double log_abs_det = 0.0;
  const auto& lu_mat = lu.matrixLU();
  for (int i = 0; i < m.rows(); ++i) {
    const double p = std::abs(lu_mat(i, i));
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    log_abs_det += std::log(p);
  }
  return 0.5 * log_abs_det;
}

double overlap_magnitude(const GaussianState& a, const GaussianState& b) {
  const double lo = log_overlap_magnitude(a, b);
  return std::isinf(lo) ? 0.0 : std::exp(lo);
}

}  // namespace prqc::fermion
