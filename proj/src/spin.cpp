#include "prqc/spin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "prqc/linalg.hpp"
#include "prqc/rng.hpp"

namespace prqc::spin {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

MatR mat_sz2() {
  MatR m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
MatR mat_sx2() {
  MatR m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
MatR mat_sp2() {  // raising: |down> -> |up>
  MatR m(2, 2);
  m << 0, 1, 0, 0;
  return m;
}
MatR mat_sm2() {
  MatR m(2, 2);
  m << 0, 0, 1, 0;
  return m;
}
MatR mat_sz3() {
  MatR m = MatR::Zero(3, 3);
  m(0, 0) = 1;
  m(2, 2) = -1;
  return m;
}
MatR mat_sx3() {
  MatR m = MatR::Zero(3, 3);
  m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = kInvSqrt2;
  return m;
}
MatR mat_sx3_sq() { return MatR(mat_sx3() * mat_sx3()); }

struct Factor {
  int site;  // 1-based
  MatR m;
};

struct ProductOp {
  double factor = 1.0;
  std::vector<Factor> factors;
};

std::vector<ProductOp> expand(const Term& term, int local_dim) {
  require(!term_is_fermionic(term.kind), ErrorCode::unsupported_model,
          "fermionic term " + term_kind_name(term.kind) +
              " has no spin realization");
  const int i = term.site_i, j = term.site_j;
  switch (term.kind) {
    case TermKind::PairXX:
      require(local_dim == 2, ErrorCode::invalid_argument, "XX needs spin-1/2");
      return {{1.0, {{i, mat_sx2()}, {j, mat_sx2()}}}};
    case TermKind::PairXhXh:
      require(local_dim == 2, ErrorCode::invalid_argument, "XhXh needs spin-1/2");
      return {{0.25, {{i, mat_sx2()}, {j, mat_sx2()}}}};
    case TermKind::PairHop:
      require(local_dim == 2, ErrorCode::invalid_argument, "hop needs spin-1/2");
      return {{1.0, {{i, mat_sp2()}, {j, mat_sm2()}}},
              {1.0, {{i, mat_sm2()}, {j, mat_sp2()}}}};
    case TermKind::PairSxSx:
      require(local_dim == 3, ErrorCode::invalid_argument, "SxSx needs spin-1");
      return {{1.0, {{i, mat_sx3()}, {j, mat_sx3()}}}};
    case TermKind::SiteZ:
      require(local_dim == 2, ErrorCode::invalid_argument, "Z needs spin-1/2");
      return {{1.0, {{i, mat_sz2()}}}};
    case TermKind::SiteX:
      require(local_dim == 2, ErrorCode::invalid_argument, "X needs spin-1/2");
      return {{1.0, {{i, mat_sx2()}}}};
    case TermKind::SiteSz:
      require(local_dim == 3, ErrorCode::invalid_argument, "Sz needs spin-1");
      return {{1.0, {{i, mat_sz3()}}}};
    case TermKind::SiteSxSq:
      require(local_dim == 3, ErrorCode::invalid_argument, "Sx^2 needs spin-1");
      return {{1.0, {{i, mat_sx3_sq()}}}};
    default:
      throw Error(ErrorCode::unsupported_model, "unexpected term kind");
  }
}

long pow_long(int base, int exp) {
  long v = 1;
  for (int k = 0; k < exp; ++k) {
    require(v <= (1L << 58) / base, ErrorCode::too_large, "dimension overflow");
    v *= base;
  }
  return v;
}

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
void apply_product_full(const ProductOp& op, double coeff, int n_sites,
                        int local_dim, const Vec<Scalar>& in,
                        Vec<Scalar>& out) {
  const long dim = in.size();
  const double w0 = coeff * op.factor;
  if (op.factors.size() == 1) {
    const auto& f = op.factors[0];
    const long stride = pow_long(local_dim, f.site - 1);
    for (long z = 0; z < dim; ++z) {
      const int c = int((z / stride) % local_dim);
      for (int r = 0; r < local_dim; ++r) {
        const double v = f.m(r, c);
        if (v != 0.0) out[z + (r - c) * stride] += (w0 * v) * in[z];
      }
    }
  } else {
    const auto& f1 = op.factors[0];
    const auto& f2 = op.factors[1];
    const long s1 = pow_long(local_dim, f1.site - 1);
    const long s2 = pow_long(local_dim, f2.site - 1);
    for (long z = 0; z < dim; ++z) {
      const int c1 = int((z / s1) % local_dim);
      const int c2 = int((z / s2) % local_dim);
      for (int r1 = 0; r1 < local_dim; ++r1) {
        const double v1 = f1.m(r1, c1);
        if (v1 == 0.0) continue;
        for (int r2 = 0; r2 < local_dim; ++r2) {
          const double v2 = f2.m(r2, c2);
          if (v2 == 0.0) continue;
          out[z + (r1 - c1) * s1 + (r2 - c2) * s2] += (w0 * v1 * v2) * in[z];
        }
      }
    }
  }
}

bool sector_compatible(TermKind kind) {
  return kind == TermKind::PairHop || kind == TermKind::SiteZ;
}

template <typename Scalar>
void apply_terms_sector(const TermList& terms, const SectorBasis& sector,
                        const Vec<Scalar>& in, Vec<Scalar>& out) {
  out.setZero();
  const long dim = sector.dim();
  for (const Term& term : terms) {
    require(sector_compatible(term.kind), ErrorCode::basis_mismatch,
            "term " + term_kind_name(term.kind) +
                " does not conserve the sector");
    if (term.kind == TermKind::SiteZ) {
      const uint32_t bit = 1u << (term.site_i - 1);
      for (long k = 0; k < dim; ++k) {
        const double z = (sector.states[k] & bit) ? -1.0 : 1.0;
        out[k] += term.coeff * z * in[k];
      }
    } else {
      const uint32_t bi = 1u << (term.site_i - 1);
      const uint32_t bj = 1u << (term.site_j - 1);
      for (long k = 0; k < dim; ++k) {
        const uint32_t s = sector.states[k];
        const bool vi = s & bi, vj = s & bj;
        if (vi == vj) continue;
        const auto it = sector.index.find(s ^ bi ^ bj);
        out[it->second] += term.coeff * in[k];
      }
    }
  }
}

template <typename Scalar>
void apply_terms_generic(const TermList& terms, int n_sites, int local_dim,
                         const SectorBasis* sector, const Vec<Scalar>& in,
                         Vec<Scalar>& out) {
  if (sector) {
    apply_terms_sector(terms, *sector, in, out);
    return;
  }
  out.setZero();
  for (const Term& term : terms) {
    for (const ProductOp& op : expand(term, local_dim))
      apply_product_full(op, term.coeff, n_sites, local_dim, in, out);
  }
}

void add_product_to_matrix(const ProductOp& op, double coeff, int local_dim,
                           MatR& h) {
  const long dim = h.rows();
  const double w0 = coeff * op.factor;
  if (op.factors.size() == 1) {
    const auto& f = op.factors[0];
    const long stride = pow_long(local_dim, f.site - 1);
    for (long z = 0; z < dim; ++z) {
      const int c = int((z / stride) % local_dim);
      for (int r = 0; r < local_dim; ++r) {
        const double v = f.m(r, c);
        if (v != 0.0) h(z + (r - c) * stride, z) += w0 * v;
      }
    }
  } else {
    const auto& f1 = op.factors[0];
    const auto& f2 = op.factors[1];
    const long s1 = pow_long(local_dim, f1.site - 1);
    const long s2 = pow_long(local_dim, f2.site - 1);
    for (long z = 0; z < dim; ++z) {
      const int c1 = int((z / s1) % local_dim);
      const int c2 = int((z / s2) % local_dim);
      for (int r1 = 0; r1 < local_dim; ++r1) {
        const double v1 = f1.m(r1, c1);
        if (v1 == 0.0) continue;
        for (int r2 = 0; r2 < local_dim; ++r2) {
          const double v2 = f2.m(r2, c2);
          if (v2 == 0.0) continue;
          h(z + (r1 - c1) * s1 + (r2 - c2) * s2, z) += w0 * v1 * v2;
        }
      }
    }
  }
}

// Local basis rotation on one site: amps <- (Q acting on that tensor slot).
void apply_local_rotation(VecC& amps, int n_sites, int local_dim, int site,
                          const MatR& q) {
  const long stride = pow_long(local_dim, site - 1);
  const long block = stride * local_dim;
  const long dim = amps.size();
  if (local_dim == 2) {
    for (long base = 0; base < dim; base += block) {
      for (long r = 0; r < stride; ++r) {
        const long i0 = base + r, i1 = i0 + stride;
        const cplx a = amps[i0], b = amps[i1];
        amps[i0] = q(0, 0) * a + q(0, 1) * b;
        amps[i1] = q(1, 0) * a + q(1, 1) * b;
      }
    }
  } else {
    for (long base = 0; base < dim; base += block) {
      for (long r = 0; r < stride; ++r) {
        const long i0 = base + r, i1 = i0 + stride, i2 = i1 + stride;
        const cplx a = amps[i0], b = amps[i1], c = amps[i2];
        amps[i0] = q(0, 0) * a + q(0, 1) * b + q(0, 2) * c;
        amps[i1] = q(1, 0) * a + q(1, 1) * b + q(1, 2) * c;
        amps[i2] = q(2, 0) * a + q(2, 1) * b + q(2, 2) * c;
      }
    }
  }
}

// Columns are the local Sx eigenvectors for eigenvalues +1, 0, -1, matching
// the digit labels used by the X-basis diagonals.
MatR spin1_x_rotation() {
  MatR q(3, 3);
  q << 0.5, kInvSqrt2, 0.5, kInvSqrt2, 0.0, -kInvSqrt2, 0.5, -kInvSqrt2, 0.5;
  return q;
}

double x_eigenvalue(int local_dim, int digit) {
  if (local_dim == 2) return digit == 0 ? 1.0 : -1.0;
  return 1.0 - digit;  // spin-1 Sx eigenvalues +1, 0, -1
}

double z_eigenvalue(int local_dim, int digit) {
  if (local_dim == 2) return digit == 0 ? 1.0 : -1.0;
  return 1.0 - digit;
}

}  // namespace

long full_dim(int n_sites, int local_dim) {
  return pow_long(local_dim, n_sites);
}

std::shared_ptr<const SectorBasis> make_sector(int n_sites, int n_excitations) {
  require(n_sites >= 1 && n_sites <= 31, ErrorCode::invalid_argument,
          "sector basis limited to 31 sites");
  require(n_excitations >= 0 && n_excitations <= n_sites,
          ErrorCode::invalid_argument, "bad excitation count");
  auto basis = std::make_shared<SectorBasis>();
  basis->n_sites = n_sites;
  basis->n_excitations = n_excitations;
  const int n_down = n_sites - n_excitations;
  const uint32_t top = 1u << n_sites;
  for (uint32_t z = 0; z < top; ++z) {
    if (std::popcount(z) == n_down) {
      basis->index.emplace(z, int(basis->states.size()));
      basis->states.push_back(z);
    }
  }
  return basis;
}

DenseState product_state(int n_sites, int local_dim,
                         const std::vector<int>& digits,
                         std::shared_ptr<const SectorBasis> sector) {
  require(int(digits.size()) == n_sites, ErrorCode::invalid_argument,
          "product_state: digit count mismatch");
  long z = 0;
  for (int i = n_sites - 1; i >= 0; --i) {
    require(digits[i] >= 0 && digits[i] < local_dim, ErrorCode::invalid_argument,
            "product_state: digit out of range");
    z = z * local_dim + digits[i];
  }
  DenseState state;
  state.n_sites = n_sites;
  state.local_dim = local_dim;
  state.sector = sector;
  if (sector) {
    require(local_dim == 2, ErrorCode::invalid_argument,
            "sectors are spin-1/2 only");
    auto it = sector->index.find(uint32_t(z));
    require(it != sector->index.end(), ErrorCode::basis_mismatch,
            "product state lies outside the sector");
    state.amps = VecC::Zero(sector->dim());
    state.amps[it->second] = 1.0;
  } else {
    state.amps = VecC::Zero(full_dim(n_sites, local_dim));
    state.amps[z] = 1.0;
  }
  return state;
}

DenseState initial_state_for_target(const HamiltonianSpec& target,
                                    std::shared_ptr<const SectorBasis> sector) {
  const int n = target.n_sites;
  std::vector<int> digits(n, 0);
  switch (target.kind) {
    case ModelKind::TFIM:
      break;  // all up
    case ModelKind::BCTarget: {
      // ground of the +h sum Sz field term
      const int d = target.coupling("h") >= 0 ? 2 : 0;
      std::fill(digits.begin(), digits.end(), d);
      break;
    }
    case ModelKind::AAH:
    case ModelKind::AAHResource: {
      const double h = target.coupling("h");
      const double alpha = target.coupling("alpha");
      for (int j = 1; j <= n; ++j)
        digits[j - 1] = (h * std::cos(2.0 * kPi * alpha * j) >= 0) ? 0 : 1;
      break;
    }
    default:
      throw Error(ErrorCode::unsupported_model,
                  "no product reference state for " +
                      model_kind_name(target.kind));
  }
  return product_state(n, local_dim(target.kind), digits, std::move(sector));
}

void check_norm(DenseState& state, double tol) {
  const double n = state.amps.norm();
  require(std::abs(n - 1.0) <= tol, ErrorCode::numerical_error,
          "state norm drifted to " + std::to_string(n));
  state.amps /= n;
}

OperatorMatrix::OperatorMatrix(MatR mat) : mat_(std::move(mat)) {
  require(mat_.rows() == mat_.cols(), ErrorCode::invalid_argument,
          "operator matrix must be square");
  const double asym = (mat_ - mat_.transpose()).cwiseAbs().maxCoeff();
  require(asym < 1e-12, ErrorCode::invalid_argument,
          "operator matrix is not symmetric");
}

const VecR& OperatorMatrix::evals() const {
  if (!decomposed_) {
    sym_eig(mat_, evals_, evecs_);
    decomposed_ = true;
  }
  return evals_;
}

const MatR& OperatorMatrix::evecs() const {
  evals();
  return evecs_;
}

OperatorMatrix realize(const TermList& terms, int n_sites, int local_dim,
                       std::shared_ptr<const SectorBasis> sector,
                       long dim_cap) {
  const long full = full_dim(n_sites, local_dim);
  require(full <= dim_cap, ErrorCode::too_large,
          "Hilbert dimension " + std::to_string(full) + " exceeds cap");
  if (sector) {
    require(local_dim == 2 && sector->n_sites == n_sites,
            ErrorCode::basis_mismatch, "sector does not match the chain");
    const long dim = sector->dim();
    require(dim <= 46000, ErrorCode::too_large,
            "sector too large for a dense matrix");
    MatR h = MatR::Zero(dim, dim);
    for (const Term& term : terms) {
      require(sector_compatible(term.kind), ErrorCode::basis_mismatch,
              "term " + term_kind_name(term.kind) +
                  " does not conserve the sector");
      if (term.kind == TermKind::SiteZ) {
        const uint32_t bit = 1u << (term.site_i - 1);
        for (long k = 0; k < dim; ++k)
          h(k, k) += term.coeff * ((sector->states[k] & bit) ? -1.0 : 1.0);
      } else {
        const uint32_t bi = 1u << (term.site_i - 1);
        const uint32_t bj = 1u << (term.site_j - 1);
        for (long k = 0; k < dim; ++k) {
          const uint32_t s = sector->states[k];
          if (bool(s & bi) == bool(s & bj)) continue;
          h(sector->index.at(s ^ bi ^ bj), k) += term.coeff;
        }
      }
    }
    return OperatorMatrix(std::move(h));
  }
  require(full <= 46000, ErrorCode::too_large,
          "dimension too large for a dense matrix; use the matrix-free paths");
  MatR h = MatR::Zero(full, full);
  for (const Term& term : terms) {
    for (const ProductOp& op : expand(term, local_dim))
      add_product_to_matrix(op, term.coeff, local_dim, h);
  }
  return OperatorMatrix(std::move(h));
}

OperatorMatrix realize(const HamiltonianSpec& spec,
                       std::shared_ptr<const SectorBasis> sector,
                       long dim_cap) {
  require(!is_fermionic(spec.kind), ErrorCode::unsupported_model,
          "fermionic models are realized by the Gaussian backend");
  return realize(term_list(spec), spec.n_sites, local_dim(spec.kind),
                 std::move(sector), dim_cap);
}

void apply_terms(const TermList& terms, const DenseState& in, DenseState& out) {
  out.n_sites = in.n_sites;
  out.local_dim = in.local_dim;
  out.sector = in.sector;
  out.amps.resize(in.dim());
  apply_terms_generic<cplx>(terms, in.n_sites, in.local_dim, in.sector.get(),
                            in.amps, out.amps);
}

DenseState apply_terms(const TermList& terms, const DenseState& in) {
  DenseState out;
  apply_terms(terms, in, out);
  return out;
}

std::pair<double, DenseState> ground_state(const OperatorMatrix& op,
                                           int n_sites, int local_dim,
                                           std::shared_ptr<const SectorBasis> sector) {
  const VecR& evals = op.evals();
  VecR v = op.evecs().col(0);
  // deterministic phase: largest-magnitude amplitude (first among ties)
  // made real-positive
  long imax = 0;
  double best = -1.0;
  for (long i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best + 1e-15) {
      best = std::abs(v[i]);
      imax = i;
    }
  }
  if (v[imax] < 0) v = -v;
  DenseState state;
  state.n_sites = n_sites;
  state.local_dim = local_dim;
  state.sector = std::move(sector);
  state.amps = v.cast<cplx>();
  return {evals(0), std::move(state)};
}

std::pair<double, DenseState> ground_state_iterative(
    const TermList& terms, int n_sites, int local_dim,
    std::shared_ptr<const SectorBasis> sector, uint64_t seed) {
  const long dim = sector ? sector->dim() : full_dim(n_sites, local_dim);
  auto apply = [&](const VecR& x, VecR& y) {
    apply_terms_generic<double>(terms, n_sites, local_dim, sector.get(), x, y);
  };
  LanczosResult res = lanczos_lowest(dim, apply, seed);
  require(res.converged, ErrorCode::numerical_error,
          "Lanczos ground state did not converge (residual " +
              std::to_string(res.residual) + ")");
  VecR v = res.vector;
  long imax = 0;
  double best = -1.0;
  for (long i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best + 1e-15) {
      best = std::abs(v[i]);
      imax = i;
    }
  }
  if (v[imax] < 0) v = -v;
  DenseState state;
  state.n_sites = n_sites;
  state.local_dim = local_dim;
  state.sector = std::move(sector);
  state.amps = v.cast<cplx>();
  return {res.value, std::move(state)};
}

std::pair<double, DenseState> ground_state_auto(
    const TermList& terms, int n_sites, int local_dim,
    std::shared_ptr<const SectorBasis> sector, uint64_t seed) {
  const long dim = sector ? sector->dim() : full_dim(n_sites, local_dim);
  if (dim <= kDenseDim) {
    OperatorMatrix op = realize(terms, n_sites, local_dim, sector);
    return ground_state(op, n_sites, local_dim, std::move(sector));
  }
  return ground_state_iterative(terms, n_sites, local_dim, std::move(sector),
                                seed);
}

DenseState evolve(const DenseState& state, const OperatorMatrix& op, double t) {
  require(state.dim() == op.dim(), ErrorCode::basis_mismatch,
          "evolve: dimension mismatch");
  DenseState out = state;
  if (t == 0.0) return out;
  const VecR& evals = op.evals();
  const MatR& q = op.evecs();
  VecR cr = q.transpose() * VecR(state.amps.real());
  VecR ci = q.transpose() * VecR(state.amps.imag());
  VecC coeff(evals.size());
  coeff.real() = cr;
  coeff.imag() = ci;
  coeff.array() *= (cplx(0.0, -t) * evals.array()).exp();
  out.amps = real_times_cvec(q, coeff);
  check_norm(out);
  return out;
}

double expectation(const DenseState& state, const OperatorMatrix& op) {
  require(state.dim() == op.dim(), ErrorCode::basis_mismatch,
          "expectation: dimension mismatch");
  VecR xr = state.amps.real(), xi = state.amps.imag();
  VecR yr = op.matrix() * xr, yi = op.matrix() * xi;
  const double re = xr.dot(yr) + xi.dot(yi);
  const double im = xr.dot(yi) - xi.dot(yr);
  require(std::abs(im) <= 1e-10 * (1.0 + std::abs(re)),
          ErrorCode::numerical_error, "expectation has an imaginary part");
  return re;
}

double expectation_terms(const DenseState& state, const TermList& terms) {
  DenseState hpsi = apply_terms(terms, state);
  const cplx e = state.amps.dot(hpsi.amps);
  require(std::abs(e.imag()) <= 1e-10 * (1.0 + std::abs(e.real())),
          ErrorCode::numerical_error, "expectation has an imaginary part");
  return e.real();
}

cplx overlap(const DenseState& a, const DenseState& b) {
  require(a.dim() == b.dim() && a.local_dim == b.local_dim,
          ErrorCode::basis_mismatch, "overlap: basis mismatch");
  return a.amps.dot(b.amps);  // conjugates a
}

VecR site_occupations(const DenseState& state) {
  require(state.local_dim == 2, ErrorCode::invalid_argument,
          "occupations defined for spin-1/2 chains");
  VecR n = VecR::Zero(state.n_sites);
  const long dim = state.dim();
  for (long k = 0; k < dim; ++k) {
    const double w = std::norm(state.amps[k]);
    if (w == 0.0) continue;
    const uint32_t z =
        state.sector ? state.sector->states[k] : uint32_t(k);
    for (int i = 0; i < state.n_sites; ++i)
      if (!(z & (1u << i))) n[i] += w;
  }
  return n;
}

bool diagonal_in_basis(TermKind kind, SiteBasis basis) {
  if (basis == SiteBasis::Z)
    return kind == TermKind::SiteZ || kind == TermKind::SiteSz;
  switch (kind) {
    case TermKind::PairXX:
    case TermKind::PairXhXh:
    case TermKind::PairSxSx:
    case TermKind::SiteX:
    case TermKind::SiteSxSq:
      return true;
    default:
      return false;
  }
}

bool terms_diagonal_in_basis(const TermList& terms, SiteBasis basis) {
  return std::all_of(terms.begin(), terms.end(), [&](const Term& t) {
    return diagonal_in_basis(t.kind, basis);
  });
}

ProductDiagonal product_diagonal(const TermList& terms, int n_sites,
                                 int local_dim, SiteBasis basis) {
  const long dim = full_dim(n_sites, local_dim);
  ProductDiagonal gen;
  gen.basis = basis;
  gen.n_sites = n_sites;
  gen.local_dim = local_dim;
  gen.diag = VecR::Zero(dim);
  for (const Term& term : terms) {
    require(diagonal_in_basis(term.kind, basis), ErrorCode::basis_mismatch,
            "term " + term_kind_name(term.kind) +
                " is not diagonal in the requested basis");
    if (local_dim == 2 && term.is_pair()) {
      // s_i s_j = 1 - 2 * (b_i xor b_j)
      const double c = term.kind == TermKind::PairXhXh ? 0.25 * term.coeff
                                                       : term.coeff;
      const int bi = term.site_i - 1, bj = term.site_j - 1;
      for (long z = 0; z < dim; ++z) {
        const double par = double(((z >> bi) ^ (z >> bj)) & 1);
        gen.diag[z] += c * (1.0 - 2.0 * par);
      }
    } else if (local_dim == 2 && !term.is_pair()) {
      const int bi = term.site_i - 1;
      for (long z = 0; z < dim; ++z)
        gen.diag[z] += term.coeff * (1.0 - 2.0 * double((z >> bi) & 1));
    } else {
      const long si = pow_long(local_dim, term.site_i - 1);
      if (term.is_pair()) {
        const long sj = pow_long(local_dim, term.site_j - 1);
        for (long z = 0; z < dim; ++z) {
          const double mi = x_eigenvalue(local_dim, int((z / si) % local_dim));
          const double mj = x_eigenvalue(local_dim, int((z / sj) % local_dim));
          gen.diag[z] += term.coeff * mi * mj;
        }
      } else {
        const bool squared = term.kind == TermKind::SiteSxSq;
        for (long z = 0; z < dim; ++z) {
          const int d = int((z / si) % local_dim);
          const double m = basis == SiteBasis::X ? x_eigenvalue(local_dim, d)
                                                 : z_eigenvalue(local_dim, d);
          gen.diag[z] += term.coeff * (squared ? m * m : m);
        }
      }
    }
  }
  return gen;
}

void to_x_basis(DenseState& state) {
  require(!state.sector, ErrorCode::basis_mismatch,
          "x-basis rotation is a full-space operation");
  if (state.local_dim == 2) {
    MatR h(2, 2);
    h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    for (int site = 1; site <= state.n_sites; ++site)
      apply_local_rotation(state.amps, state.n_sites, 2, site, h);
  } else {
    const MatR q = spin1_x_rotation().transpose();
    for (int site = 1; site <= state.n_sites; ++site)
      apply_local_rotation(state.amps, state.n_sites, 3, site, q);
  }
}

void from_x_basis(DenseState& state) {
  require(!state.sector, ErrorCode::basis_mismatch,
          "x-basis rotation is a full-space operation");
  if (state.local_dim == 2) {
    to_x_basis(state);  // Hadamard is an involution
  } else {
    const MatR q = spin1_x_rotation();
    for (int site = 1; site <= state.n_sites; ++site)
      apply_local_rotation(state.amps, state.n_sites, 3, site, q);
  }
}

void evolve_product_diagonal(DenseState& state, const ProductDiagonal& gen,
                             double t) {
  require(state.dim() == gen.diag.size() && !state.sector,
          ErrorCode::basis_mismatch, "product-diagonal evolve: mismatch");
  if (t == 0.0) return;
  if (gen.basis == SiteBasis::X) to_x_basis(state);
  state.amps.array() *= (cplx(0.0, -t) * gen.diag.array()).exp();
  if (gen.basis == SiteBasis::X) from_x_basis(state);
}

double trace_over_dim(const TermList& terms, int n_sites, int local_dim) {
  double total = 0.0;
  for (const Term& term : terms) {
    for (const ProductOp& op : expand(term, local_dim)) {
      double f = term.coeff * op.factor;
      for (const Factor& factor : op.factors) f *= factor.m.trace() / local_dim;
      total += f;
    }
  }
  return total;
}

double trace_sq_over_dim(const TermList& terms, int n_sites, int local_dim) {
  struct Flat {
    double w;
    std::vector<Factor> factors;
  };
  std::vector<Flat> flat;
  for (const Term& term : terms)
    for (const ProductOp& op : expand(term, local_dim))
      flat.push_back({term.coeff * op.factor, op.factors});

  double total = 0.0;
  for (const Flat& a : flat) {
    for (const Flat& b : flat) {
      double f = a.w * b.w;
      // per-site trace of the merged product, identity on untouched sites
      for (const Factor& fa : a.factors) {
        const MatR* mb = nullptr;
        for (const Factor& fb : b.factors)
          if (fb.site == fa.site) mb = &fb.m;
        const MatR prod = mb ? MatR(fa.m * *mb) : fa.m;
        f *= prod.trace() / local_dim;
      }
      for (const Factor& fb : b.factors) {
        bool shared = false;
        for (const Factor& fa : a.factors) shared |= fa.site == fb.site;
        if (!shared) f *= fb.m.trace() / local_dim;
      }
      total += f;
    }
  }
  return total;
}

MatC spin1_sx() { return mat_sx3().cast<cplx>(); }

MatC spin1_sy() {
  MatC m = MatC::Zero(3, 3);
  const cplx v(0.0, kInvSqrt2);
  m(0, 1) = -v;
  m(1, 0) = v;
  m(1, 2) = -v;
  m(2, 1) = v;
  return m;
}

MatC spin1_sz() { return mat_sz3().cast<cplx>(); }

DenseState embed_in_full(const DenseState& sector_state) {
  require(sector_state.sector != nullptr, ErrorCode::invalid_argument,
          "state is already full-space");
  DenseState full;
  full.n_sites = sector_state.n_sites;
  full.local_dim = 2;
  full.amps = VecC::Zero(full_dim(full.n_sites, 2));
  const auto& sec = *sector_state.sector;
  for (long k = 0; k < sec.dim(); ++k)
    full.amps[sec.states[k]] = sector_state.amps[k];
  return full;
}

DenseState project_to_sector(const DenseState& full_state,
                             std::shared_ptr<const SectorBasis> sector) {
  require(!full_state.sector, ErrorCode::invalid_argument,
          "state is already sector-restricted");
  DenseState out;
  out.n_sites = full_state.n_sites;
  out.local_dim = 2;
  out.sector = sector;
  out.amps = VecC::Zero(sector->dim());
  for (long k = 0; k < sector->dim(); ++k)
    out.amps[k] = full_state.amps[sector->states[k]];
  return out;
}

}  // namespace prqc::spin
