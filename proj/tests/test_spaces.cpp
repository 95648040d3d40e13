#include <catch2/catch_amalgamated.hpp>
#include <symq/sym_space.hpp>
#include <symq/wedge_space.hpp>

#include "test_util.hpp"

using namespace symq;

TEST_CASE("dimension formulas") {
  CHECK(sym_dim(3, 2) == 6);
  CHECK(sym_dim(3, 3) == 10);
  CHECK(sym_dim(4, 2) == 10);
  CHECK(sym_dim(5, 4) == 70);
  CHECK(wedge_dim(4, 2) == 6);
  CHECK(wedge_dim(4, 4) == 1);
  CHECK(wedge_dim(6, 3) == 20);
}

TEST_CASE("standard basis ordering is nondecreasing lexicographic") {
  IndexTable t = sym_table(3, 2);
  REQUIRE(t.size() == 6);
  std::vector<MultiIndex> want = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(t.tuple(i) == want[i]);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(t.index_of(want[i]) == i);
}

TEST_CASE("wedge basis ordering is strictly increasing lexicographic") {
  IndexTable t = wedge_table(4, 2);
  REQUIRE(t.size() == 6);
  std::vector<MultiIndex> want = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(t.tuple(i) == want[i]);
}

TEST_CASE("symmetrizer normalization") {
  CHECK(sym_normalizer({0, 1}) == Catch::Approx(std::sqrt(2.0)));
  CHECK(sym_normalizer({1, 1}) == Catch::Approx(1.0));
  CHECK(sym_normalizer({0, 1, 2}) == Catch::Approx(std::sqrt(6.0)));
  CHECK(sym_normalizer({0, 0, 1}) == Catch::Approx(std::sqrt(3.0)));
  CHECK(sym_normalizer({2, 2, 2, 2}) == Catch::Approx(1.0));
}

TEST_CASE("permanent matches brute force on small matrices") {
  for (int n = 1; n <= 4; ++n) {
    symq::CounterRng rng(99, n);
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = rng.gaussian_cd();
    // brute force over permutations
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    cd want = 0;
    do {
      cd term = 1;
      for (int i = 0; i < n; ++i) term *= m(i, perm[i]);
      want += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(std::abs(permanent(m) - want) < 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("vee product amplitudes agree with tensor-space symmetrization") {
  // <e-hat_A | psi_0 v ... v psi_{k-1}> computed two ways, k <= 4.
  for (int k = 2; k <= 4; ++k) {
    HalfInt s(1);
    int d = 3;
    std::vector<Vec> factors;
    for (int i = 0; i < k; ++i) factors.push_back(symq::test::random_ket(d, 31 * k + i));
    SymState st = vee_product(s, factors);
    REQUIRE(st.basis == Basis::standard);
    IndexTable t = sym_table(d, k);
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
      const MultiIndex& A = t.tuple(idx);
      // basis bra as a list of one-hot factors, symmetrized on both sides:
      // <e_A P_sym | P_sym psi> = perm(M) / k!, times the normalizer of A.
      std::vector<Vec> bra;
      for (int slot : A) {
        Vec e = Vec::Zero(d);
        e(slot) = 1.0;
        bra.push_back(e);
      }
      cd want = symq::test::brute_sym_overlap(bra, factors) * sym_normalizer(A);
      CHECK(std::abs(st.amp(idx) - want) < 1e-12);
    }
  }
}

TEST_CASE("vee overlap equals permanent of the Gram matrix over k factorial") {
  HalfInt s = HalfInt::from_twice(3);
  int d = 4, k = 3;
  std::vector<Vec> f1, f2;
  for (int i = 0; i < k; ++i) {
    f1.push_back(symq::test::random_ket(d, 100 + i));
    f2.push_back(symq::test::random_ket(d, 200 + i));
  }
  SymState a = vee_product(s, f1), b = vee_product(s, f2);
  cd via_components = overlap(a, b);
  cd via_gram = vee_overlap(f1, f2);
  CHECK(std::abs(via_components - via_gram) < 1e-12);
  cd via_brute = symq::test::brute_sym_overlap(f1, f2);
  CHECK(std::abs(via_gram - via_brute) < 1e-12);
}

TEST_CASE("norm of a diagonal vee power") {
  HalfInt s(1);
  Vec phi = symq::test::random_ket(3, 5);
  phi *= 1.7;  // unnormalized on purpose
  for (int k = 1; k <= 4; ++k) {
    std::vector<Vec> factors(k, phi);
    SymState st = vee_product(s, factors);
    double want = std::pow(phi.squaredNorm(), k);
    CHECK(state_norm(st) * state_norm(st) == Catch::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("induced and standard bases convert back and forth") {
  SymState st = symq::test::random_sym_state(HalfInt(1), 3, 77);
  SymState ind = convert_induced_standard(st, Basis::induced);
  CHECK(ind.basis == Basis::induced);
  SymState back = convert_induced_standard(ind, Basis::standard);
  CHECK((back.amp - st.amp).cwiseAbs().maxCoeff() < 1e-14);
  // e-hat_A = N_A e_A, so standard amplitudes are induced ones divided by N_A.
  IndexTable t = sym_table(3, 3);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(std::abs(ind.amp(i) - st.amp(i) * sym_normalizer(t.tuple(i))) < 1e-13);
}

TEST_CASE("collective operator is the sum over slots") {
  HalfInt s(1);
  int k = 2;
  Vec3 axis(0.2, -0.5, 0.9);
  Mat big = collective_spin_axis(s, k, axis.normalized());
  // check against explicit action on a vee product of coherent-like kets
  std::vector<Vec> f = {symq::test::random_ket(3, 11), symq::test::random_ket(3, 12)};
  SymState st = vee_product(s, f);
  Mat one = spin_axis(s, axis.normalized());
  // d/dt at 0 of (e^{-itS} f0) v (e^{-itS} f1) = (-iS f0) v f1 + f0 v (-iS f1)
  SymState d1 = vee_product(s, {(one * f[0]).eval(), f[1]});
  SymState d2 = vee_product(s, {f[0], (one * f[1]).eval()});
  Vec want = d1.amp + d2.amp;
  Vec got = big * st.amp;
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coherent spinor matches binomial amplitudes") {
  HalfInt s = HalfInt::from_twice(3);
  double theta = 0.9, phi = 1.3;
  Vec3 n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  Vec v = coherent_spinor(s, n);
  double c = std::cos(theta / 2), sn = std::sin(theta / 2);
  for (int i = 0; i <= 3; ++i) {
    cd want = std::sqrt(static_cast<double>(binom64(3, i))) * std::pow(c, 3 - i) *
              std::pow(sn, i) * std::exp(cd(0, i * phi));
    CHECK(std::abs(v(i) - want) < 1e-13);
  }
  CHECK(v.norm() == Catch::Approx(1.0));
}

TEST_CASE("ghz state has the two extreme components") {
  SymState g = ghz_state(HalfInt(1), 2, 0.0);
  REQUIRE(g.dim() == 6);
  CHECK(std::abs(g.amp(0) - cd(1 / std::sqrt(2.0), 0)) < 1e-14);
  CHECK(std::abs(g.amp(5) - cd(1 / std::sqrt(2.0), 0)) < 1e-14);
  CHECK(g.amp.segment(1, 4).cwiseAbs().maxCoeff() == 0.0);
  SymState gp = ghz_state(HalfInt(1), 2, 0.7);
  CHECK(std::abs(gp.amp(5) - cd(1 / std::sqrt(2.0), 0) * std::exp(cd(0, 0.7))) < 1e-14);
}

TEST_CASE("wedge product amplitudes are determinants") {
  HalfInt s = HalfInt::from_twice(3);
  int d = 4, k = 2;
  std::vector<Vec> f = {symq::test::random_ket(d, 301), symq::test::random_ket(d, 302)};
  WedgeState w = wedge_product(s, f);
  IndexTable t = wedge_table(d, k);
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    const MultiIndex& A = t.tuple(idx);
    Mat m(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) m(r, c) = f[c](A[r]);
    cd want = m.determinant() / std::sqrt(2.0);
    CHECK(std::abs(w.amp(idx) - want) < 1e-13);
  }
  // swapping factors flips the sign
  WedgeState ws = wedge_product(s, {f[1], f[0]});
  CHECK((ws.amp + w.amp).cwiseAbs().maxCoeff() < 1e-13);
  // repeated factor vanishes
  WedgeState wz = wedge_product(s, {f[0], f[0]});
  CHECK(wz.amp.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("wedge overlap is the determinant of the Gram matrix") {
  HalfInt s(2);
  int d = 5, k = 3;
  std::vector<Vec> f1, f2;
  for (int i = 0; i < k; ++i) {
    f1.push_back(symq::test::random_ket(d, 400 + i));
    f2.push_back(symq::test::random_ket(d, 500 + i));
  }
  WedgeState a = wedge_product(s, f1), b = wedge_product(s, f2);
  Mat g(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) g(r, c) = f1[r].dot(f2[c]);
  // The wedge product is the antisymmetrizing projector applied to the tensor
  // product, so overlaps carry the same 1/k! as the symmetric case.
  cd via_components = wedge_overlap(a, b);
  CHECK(std::abs(via_components - g.determinant() / 6.0) < 1e-12);
}

TEST_CASE("reduced density of a diagonal power is the factor projector") {
  HalfInt s(1);
  Vec phi = symq::test::random_ket(3, 21);
  SymState st = vee_product(s, {phi, phi, phi});
  st.amp /= state_norm(st);
  Mat rho = reduced_density(st, 1);
  Mat want = phi * phi.adjoint();
  CHECK((rho - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("full tensor expansion reproduces overlaps") {
  HalfInt s(1);
  std::vector<Vec> f = {symq::test::random_ket(3, 61), symq::test::random_ket(3, 62)};
  SymState st = vee_product(s, f);
  Vec full = to_full_tensor(st);
  REQUIRE(full.size() == 9);
  // <a (x) b | full> with a,b random; compare against brute symmetric overlap
  Vec a = symq::test::random_ket(3, 63), b = symq::test::random_ket(3, 64);
  cd got = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) got += std::conj(a(i) * b(j)) * full(3 * i + j);
  cd want = symq::test::brute_sym_overlap({a, b}, f);
  CHECK(std::abs(got - want) < 1e-12);
}
