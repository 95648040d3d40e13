#include <catch2/catch_amalgamated.hpp>

#include <symq/majorana.hpp>
#include <symq/rng.hpp>

#include <cmath>

#include "test_util.hpp"

using namespace symq;

namespace {

Constellation repeated(const Vec3& n, int count) {
  Constellation c;
  for (int i = 0; i < count; ++i) c.stars.push_back(n);
  return c;
}

}  // namespace

TEST_CASE("constellations of weight eigenstates") {
  HalfInt s(2);
  Spinor top{s, basis_ket(s, 0)};
  CHECK(constellation_distance(majorana_roots(top),
                               repeated(Vec3(0, 0, 1), 4)) < 1e-9);
  Spinor bottom{s, basis_ket(s, 4)};
  CHECK(constellation_distance(majorana_roots(bottom),
                               repeated(Vec3(0, 0, -1), 4)) < 1e-9);
  // The m = 0 state of spin 1 is the antipodal pair on the z axis.
  Spinor mid{HalfInt(1), basis_ket(HalfInt(1), 1)};
  Constellation want;
  want.stars = {Vec3(0, 0, 1), Vec3(0, 0, -1)};
  CHECK(constellation_distance(majorana_roots(mid), want) < 1e-9);
}

TEST_CASE("coherent spinors pile all stars on one direction") {
  // An m-fold root splits numerically like eps^(1/m), so the recovered pile
  // spreads by about 1e-3 for five coincident stars.
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 5; ++trial) {
    Vec3 n = rng.sphere_point();
    for (int twice_s : {1, 2, 3, 5}) {
      HalfInt s = HalfInt::from_twice(twice_s);
      Spinor psi{s, coherent_spinor(s, n)};
      CHECK(constellation_distance(majorana_roots(psi), repeated(n, twice_s)) < 5e-3);
    }
  }
}

TEST_CASE("roots and reconstruction invert each other") {
  CounterRng rng(12, 0);
  for (int twice_s : {1, 2, 3, 4, 6}) {
    HalfInt s = HalfInt::from_twice(twice_s);
    for (int trial = 0; trial < 6; ++trial) {
      Vec a = rng.haar_ket(s.multiplet_dim());
      Spinor rebuilt = constellation_to_state(majorana_roots(Spinor{s, a}));
      CHECK(symq::test::phase_aligned_error(rebuilt.a, a) < 1e-8);
    }
  }
}

TEST_CASE("constellations rotate with the state") {
  CounterRng rng(13, 0);
  HalfInt s = HalfInt::from_twice(5);
  for (int trial = 0; trial < 6; ++trial) {
    Vec a = rng.haar_ket(s.multiplet_dim());
    Vec3 axis = rng.sphere_point();
    double angle = 2.0 * pi * rng.uniform01();
    Mat3 R = rotation_matrix(axis, angle);
    Vec rotated = wigner_rotation(s, axis, angle) * a;
    Constellation direct = majorana_roots(Spinor{s, rotated});
    Constellation moved = rotate_constellation(R, majorana_roots(Spinor{s, a}));
    CHECK(constellation_distance(direct, moved) < 1e-7);
  }
}

TEST_CASE("constellation distance") {
  Constellation a;
  a.stars = {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  Constellation b;
  b.stars = {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 0, 0)};
  CHECK(constellation_distance(a, b) < 1e-15);  // permutation invariance
  b.stars[2] = rotation_matrix(Vec3(0, 0, 1), 0.3) * Vec3(1, 0, 0);
  CHECK(constellation_distance(a, b) == Catch::Approx(0.3).margin(1e-12));
  Constellation c;
  c.stars = {Vec3(0, 0, 1)};
  CHECK(std::isinf(constellation_distance(a, c)));
  CHECK(a.has_coincident() == false);
  a.stars.push_back(Vec3(1e-9, 0, 1).normalized());
  CHECK(a.has_coincident() == true);
}

TEST_CASE("principal constellation of a product is the union of factors") {
  CounterRng rng(14, 0);
  HalfInt s(1);
  int k = 3;
  BlockDiagonalizer bd = block_diagonalizer(s, k);
  std::vector<Vec> factors;
  Constellation expect;
  for (int i = 0; i < k; ++i) {
    Vec f = rng.haar_ket(3);
    factors.push_back(f);
    Constellation fc = majorana_roots(Spinor{s, f});
    expect.stars.insert(expect.stars.end(), fc.stars.begin(), fc.stars.end());
  }
  SymState prod = vee_product(s, factors);
  CHECK(constellation_distance(principal_constellation(prod, bd), expect) < 1e-6);
}

TEST_CASE("product states factorize back into their factors") {
  CounterRng rng(15, 0);
  for (int k : {2, 3}) {
    HalfInt s(1);
    BlockDiagonalizer bd = block_diagonalizer(s, k);
    std::vector<Vec> factors;
    for (int i = 0; i < k; ++i) factors.push_back(rng.haar_ket(3));
    SymState prod = vee_product(s, factors);
    VeeFactorization vf = vee_factorize(prod, bd);
    REQUIRE(vf.factorizable);
    REQUIRE(static_cast<int>(vf.factors.size()) == k);
    std::vector<Vec> got;
    for (const Spinor& f : vf.factors) got.push_back(f.a);
    SymState rebuilt = vee_product(s, got);
    CHECK((rebuilt.amp - prod.amp).norm() < 1e-7 * prod.amp.norm());
  }
}

TEST_CASE("cat states factorize into polygon factors") {
  // (|1,1>|1,1> + |1,-1>|1,-1>)/sqrt(2) is the product of the two
  // equatorial antipodal pairs (1,0,i) and (1,0,-i).
  HalfInt s(1);
  BlockDiagonalizer bd = block_diagonalizer(s, 2);
  SymState ghz = ghz_state(s, 2);
  VeeFactorization vf = vee_factorize(ghz, bd);
  REQUIRE(vf.factorizable);
  std::vector<Vec> got;
  for (const Spinor& f : vf.factors) got.push_back(f.a);
  SymState rebuilt = vee_product(s, got);
  CHECK((rebuilt.amp - ghz.amp).norm() < 1e-7);
  for (const Spinor& f : vf.factors) {
    Constellation c = majorana_roots(f);
    CHECK(std::abs(c.stars[0].z()) < 1e-6);  // equatorial
    CHECK((c.stars[0] + c.stars[1]).norm() < 1e-6);  // antipodal
  }
}

TEST_CASE("factorizability depends on how the stars must be grouped") {
  // The same amplitudes carry the octahedral principal constellation in two
  // different spaces.  Three spin-1 factors pick up the antipodal pairs; two
  // spin-3/2 factors would need antipodal triangles, which do not exist.
  Vec amp = Vec::Zero(10);
  amp(1) = -1.0 / std::sqrt(2.0);
  amp(8) = 1.0 / std::sqrt(2.0);

  HalfInt s1(1);
  BlockDiagonalizer bd13 = block_diagonalizer(s1, 3);
  SymState octa13{s1, 3, Basis::standard, amp};
  VeeFactorization vf13 = vee_factorize(octa13, bd13);
  CHECK(vf13.factorizable);

  HalfInt s32 = HalfInt::from_twice(3);
  BlockDiagonalizer bd322 = block_diagonalizer(s32, 2);
  SymState octa322{s32, 2, Basis::standard, amp};
  CHECK_FALSE(vee_factorize(octa322, bd322).factorizable);

  BlockDiagonalizer bd2 = block_diagonalizer(s1, 2);
  Vec r = symq::test::random_ket(6, 21, 0);
  SymState generic{s1, 2, Basis::standard, r};
  CHECK_FALSE(vee_factorize(generic, bd2).factorizable);
}

TEST_CASE("coincident principal stars are flagged") {
  HalfInt s(1);
  int k = 2;
  BlockDiagonalizer bd = block_diagonalizer(s, k);
  Vec3 n(0.6, 0.0, 0.8);
  Vec f = coherent_spinor(s, n);
  SymState prod = vee_product(s, {f, f});
  VeeFactorization vf = vee_factorize(prod, bd);
  CHECK(vf.factorizable);
  CHECK(vf.degenerate_constellation);
  // Factors whose stars are pairwise separated stay unflagged.
  CounterRng rng(22, 0);
  VeeFactorization vf2 =
      vee_factorize(vee_product(s, {rng.haar_ket(3), rng.haar_ket(3)}), bd);
  CHECK(vf2.factorizable);
  CHECK_FALSE(vf2.degenerate_constellation);
}

TEST_CASE("anticoherence orders") {
  // Coherent states are maximally coherent.
  Spinor coh{HalfInt(2), coherent_spinor(HalfInt(2), Vec3(0.36, 0.48, 0.8))};
  CHECK(t_anticoherence(coh, 1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(t_anticoherence(coh, 2) == Catch::Approx(0.0).margin(1e-12));

  // The antipodal pair is anticoherent to order 1.
  Spinor mid{HalfInt(1), basis_ket(HalfInt(1), 1)};
  CHECK(t_anticoherence(mid, 1) == Catch::Approx(1.0).margin(1e-12));

  // The tetrahedron is anticoherent to order 2 but not 3.
  Vec tetra = Vec::Zero(5);
  tetra(0) = 1.0 / std::sqrt(3.0);
  tetra(3) = std::sqrt(2.0 / 3.0);
  CHECK(t_anticoherence(Spinor{HalfInt(2), tetra}, 1) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(t_anticoherence(Spinor{HalfInt(2), tetra}, 2) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(t_anticoherence(Spinor{HalfInt(2), tetra}, 3) < 1.0 - 1e-3);

  // The octahedron is anticoherent to order 3 but not 4.
  Vec octa = Vec::Zero(7);
  octa(1) = 1.0 / std::sqrt(2.0);
  octa(5) = -1.0 / std::sqrt(2.0);
  CHECK(t_anticoherence(Spinor{HalfInt(3), octa}, 2) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(t_anticoherence(Spinor{HalfInt(3), octa}, 3) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(t_anticoherence(Spinor{HalfInt(3), octa}, 4) < 1.0 - 1e-3);
}

TEST_CASE("spin expectation of coherent spinors") {
  Vec3 n(0.48, -0.6, 0.64);
  n.normalize();
  for (int twice_s : {1, 2, 5}) {
    HalfInt s = HalfInt::from_twice(twice_s);
    Spinor psi{s, coherent_spinor(s, n)};
    Vec3 expect = 0.5 * twice_s * n;
    CHECK((spin_expectation(psi) - expect).norm() < 1e-12);
  }
}

TEST_CASE("multipole expansion round-trips") {
  CounterRng rng(16, 0);
  HalfInt j = HalfInt::from_twice(3);
  Vec a = rng.haar_ket(4), b = rng.haar_ket(4);
  Mat rho = 0.7 * a * a.adjoint() + 0.3 * b * b.adjoint();
  MultipoleCoeffs c = multipole_coeffs(j, rho);
  CHECK((multipole_reconstruct(j, c) - rho).norm() < 1e-12);
  // Unit trace fixes the monopole coefficient.
  CHECK(std::abs(c.at(0, 0) - cd(1.0 / std::sqrt(4.0))) < 1e-12);
  // Tensor operators are orthonormal, so the coefficient norm is the
  // Hilbert-Schmidt norm of rho.
  CHECK(c.norm() == Catch::Approx(std::sqrt(std::real((rho * rho).trace()))));
}

TEST_CASE("assignment solver finds the cheapest matching") {
  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3,
          2, 0, 5,
          3, 2, 2;
  std::vector<int> match = min_cost_assignment(cost);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) total += cost(i, match[i]);
  CHECK(total == Catch::Approx(5.0));  // 1 + 2 + 2
}
