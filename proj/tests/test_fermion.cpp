#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_fock.hpp"
#include "prqc/fermion.hpp"
#include "prqc/model.hpp"
#include "prqc/rng.hpp"
#include "prqc/spin.hpp"

using namespace prqc;
using fermion::GaussianState;
using fermion::QuadraticHamiltonian;

namespace {

QuadraticHamiltonian random_quadratic(int n, uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  MatR a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = gauss(rng);
      b(i, j) = gauss(rng);
    }
  QuadraticHamiltonian h;
  h.a = 0.5 * (a + a.transpose());
  h.b = 0.5 * (b - b.transpose());
  h.offset = gauss(rng);
  return h;
}

}  // namespace

TEST_CASE("Kitaev target quadratic matrices match the literal expansion") {
  auto h = fermion::build_quadratic(kitaev_target(3, 1.0, 1.0, 0.0));
  MatR a_expect = MatR::Zero(3, 3);
  a_expect(0, 1) = a_expect(1, 0) = a_expect(1, 2) = a_expect(2, 1) = -1.0;
  MatR b_expect = MatR::Zero(3, 3);
  b_expect(0, 1) = b_expect(1, 2) = 1.0;
  b_expect(1, 0) = b_expect(2, 1) = -1.0;
  CHECK((h.a - a_expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((h.b - b_expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(h.offset == 0.0);

  auto h_mu = fermion::build_quadratic(kitaev_target(4, 1.0, 1.0, 0.6));
  CHECK(h_mu.a(2, 2) == doctest::Approx(-0.6));
  CHECK(h_mu.offset == doctest::Approx(4 * 0.3));
}

TEST_CASE("PR Kitaev entries follow the decay profile") {
  const double range = 1.3;
  auto h = fermion::build_quadratic(
      pr_kitaev(4, 0.9, {ProfileKind::Exponential, range}));
  CHECK(h.a(0, 2) == doctest::Approx(0.9 * std::exp(-2.0 / range)));
  CHECK(h.b(0, 2) == doctest::Approx(0.9 * std::exp(-2.0 / range)));
  h.check();

  for (uint64_t seed : {10u, 11u}) {
    auto hr = random_quadratic(5, seed);
    CHECK_NOTHROW(hr.check());
  }
  CHECK_THROWS_AS(fermion::build_quadratic(tfim(4, 1.0, 1.0)), Error);
}

TEST_CASE("Gaussian ground state matches Fock diagonalization") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 2 + int(seed % 5);  // 2..6
    auto h = random_quadratic(n, 100 + seed);
    auto [e, state] = fermion::ground_gaussian(h);
    Eigen::SelfAdjointEigenSolver<MatR> es(oracle::fock_hamiltonian(h));
    CHECK(e == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
    CHECK(fermion::energy(state, h) == doctest::Approx(e).epsilon(1e-10));
    CHECK(fermion::bogoliubov_drift(state) < 1e-12);
  }
}

TEST_CASE("TFIM maps onto the Kitaev chain at t=delta=J, mu=2h") {
  for (int n : {4, 6, 8}) {
    const double j = 1.0, h = 1.0;
    auto spin_op = spin::realize(tfim(n, j, h));
    auto [e_spin, psi] = spin::ground_state(spin_op, n, 2);
    auto [e_ferm, st] =
        fermion::ground_gaussian(fermion::build_quadratic(
            kitaev_target(n, j, j, 2.0 * h)));
    CHECK(e_ferm == doctest::Approx(e_spin).epsilon(1e-10));
  }
}

TEST_CASE("chemical-potential limits fill or empty the chain") {
  auto filled =
      fermion::ground_gaussian(fermion::build_quadratic(
          kitaev_target(4, 1.0, 1.0, 1e6)));
  const VecR occ = fermion::occupations(filled.second);
  for (int i = 0; i < 4; ++i) CHECK(occ[i] == doctest::Approx(1.0).epsilon(1e-10));

  auto empty = fermion::ground_gaussian(fermion::build_quadratic(
      kitaev_target(4, 1.0, 1.0, -1e6)));
  CHECK(fermion::occupations(empty.second).sum() ==
        doctest::Approx(0.0).epsilon(1e-10));

  // fully inverted band against the ground state: orthogonal, overlap 0
  CHECK(fermion::overlap_magnitude(filled.second, empty.second) <
        1e-12);
}

TEST_CASE("vacuum energy is the offset for a chemical-only Hamiltonian") {
  QuadraticHamiltonian h;
  h.a = MatR::Zero(3, 3);
  h.a.diagonal().setConstant(-2.0);  // -mu n with mu = 2
  h.b = MatR::Zero(3, 3);
  h.offset = 3.0;
  GaussianState vac = fermion::vacuum_state(3);
  CHECK(fermion::energy(vac, h) == doctest::Approx(3.0));
  const VecR occ = fermion::occupations(vac);
  CHECK(occ.sum() == doctest::Approx(0.0));
}

TEST_CASE("Gaussian evolution") {
  auto h = fermion::build_quadratic(kitaev_target(5, 1.0, 0.7, 1.3));
  auto [e0, ground] = fermion::ground_gaussian(h);

  SUBCASE("T = 0 is the identity") {
    GaussianState out = fermion::evolve_gaussian(ground, h, 0.0);
    CHECK((out.u - ground.u).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("energy conserved under its own Hamiltonian") {
    GaussianState out = ground;
    for (int k = 0; k < 7; ++k) out = fermion::evolve_gaussian(out, h, 0.37);
    CHECK(fermion::energy(out, h) == doctest::Approx(e0).epsilon(1e-10));
    CHECK(fermion::overlap_magnitude(out, ground) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("occupations match the Fock-space evolution oracle") {
    for (uint64_t seed : {3u, 4u, 5u}) {
      const int n = 4 + int(seed % 3);
      auto h1 = random_quadratic(n, 200 + seed);
      auto h2 = random_quadratic(n, 300 + seed);
      auto [e1, psi0] = fermion::ground_gaussian(h1);
      const double t = 0.9 + 0.2 * double(seed);
      GaussianState evolved = fermion::evolve_gaussian(psi0, h2, t);

      const VecC f0 = oracle::fock_vector(psi0);
      const VecC ft = oracle::fock_evolve(oracle::fock_hamiltonian(h2), f0, t);
      const VecR occ_oracle = oracle::fock_occupations(ft, n);
      const VecR occ = fermion::occupations(evolved);
      CHECK((occ - occ_oracle).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(fermion::energy(evolved, h2) ==
            doctest::Approx(f0.dot(oracle::fock_hamiltonian(h2).cast<cplx>() * f0)
                                .real())
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("overlap magnitudes match the Fock oracle") {
  for (uint64_t seed : {21u, 22u, 23u, 24u}) {
    const int n = 3 + int(seed % 4);
    auto ha = random_quadratic(n, 400 + seed);
    auto hb = random_quadratic(n, 500 + seed);
    auto [ea, sa] = fermion::ground_gaussian(ha);
    auto [eb, sb] = fermion::ground_gaussian(hb);
    if (sa.parity != sb.parity) continue;  // oracle only defined same-parity
    const double ovl = fermion::overlap_magnitude(sa, sb);
    const VecC fa = oracle::fock_vector(sa);
    const VecC fb = oracle::fock_vector(sb);
    CHECK(ovl == doctest::Approx(std::abs(fa.dot(fb))).epsilon(1e-8));
    CHECK(fermion::overlap_magnitude(sa, sa) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("parity mismatch is reported") {
  GaussianState vac = fermion::vacuum_state(3);
  GaussianState filled;
  filled.u = MatC::Zero(3, 3);
  filled.v = MatC::Identity(3, 3);
  filled.parity = -1;  // odd number of modes fully occupied
  CHECK_THROWS_AS(fermion::overlap_magnitude(vac, filled), Error);
}

TEST_CASE("Bogoliubov constraints survive long evolution sequences") {
  const int n = 40;
  auto spec = pr_kitaev(n, 1.0, {ProfileKind::PowerLaw, 1.5});
  auto h1 = fermion::build_quadratic(spec);
  auto h2 = fermion::build_quadratic(kitaev_target(n, 1.0, 1.0, 2.0));
  GaussianState state = fermion::vacuum_state(n);
  for (int layer = 0; layer < 100; ++layer) {
    state = fermion::evolve_gaussian(state, layer % 2 ? h1 : h2, 0.21);
  }
  CHECK(fermion::bogoliubov_drift(state) < 1e-8);
  CHECK(fermion::overlap_magnitude(state, state) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("infinite-temperature moments match the Fock trace") {
  for (uint64_t seed : {31u, 32u}) {
    const int n = 4;
    auto h = random_quadratic(n, 600 + seed);
    const MatR hf = oracle::fock_hamiltonian(h);
    const double dim = double(hf.rows());
    const double tr_h = 0.5 * h.a.trace() + h.offset;
    const double tr_h2 =
        tr_h * tr_h + 0.25 * h.a.squaredNorm() + 0.25 * h.b.squaredNorm();
    CHECK(tr_h == doctest::Approx(hf.trace() / dim).epsilon(1e-12));
    CHECK(tr_h2 == doctest::Approx((hf * hf).trace() / dim).epsilon(1e-12));
  }
}

TEST_CASE("ground state construction is deterministic") {
  auto h = fermion::build_quadratic(kitaev_target(8, 1.0, 1.0, 2.0));
  auto [e1, s1] = fermion::ground_gaussian(h);
  auto [e2, s2] = fermion::ground_gaussian(h);
  CHECK(e1 == e2);
  CHECK((s1.u - s2.u).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.v - s2.v).cwiseAbs().maxCoeff() == 0.0);
}
