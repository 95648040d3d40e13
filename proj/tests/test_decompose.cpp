#include <catch2/catch_amalgamated.hpp>

#include <symq/decompose.hpp>
#include <symq/multi_index.hpp>

#include <map>
#include <vector>

using namespace symq;

namespace {

MultTable table(std::initializer_list<std::pair<int, std::int64_t>> init) {
  MultTable t;
  for (auto& [twice_j, mu] : init) t[twice_j] = mu;
  return t;
}

std::int64_t table_dim(const MultTable& t) {
  std::int64_t acc = 0;
  for (auto& [twice_j, mu] : t) acc += mu * (twice_j + 1);
  return acc;
}

}  // namespace

TEST_CASE("known symmetric-power decompositions") {
  // Keys are 2j.
  CHECK(multiplicities(HalfInt(1), 3, MultMethod::genfunc) ==
        table({{6, 1}, {2, 1}}));
  CHECK(multiplicities(HalfInt::from_twice(3), 6, MultMethod::genfunc) ==
        table({{18, 1}, {14, 1}, {12, 1}, {10, 1}, {8, 1}, {6, 2}, {2, 1}}));
  CHECK(multiplicities(HalfInt(2), 4, MultMethod::genfunc) ==
        table({{16, 1}, {12, 1}, {10, 1}, {8, 2}, {4, 2}, {0, 1}}));
  // Spin 1/2 stays irreducible under symmetric powers.
  CHECK(multiplicities(HalfInt::from_twice(1), 7, MultMethod::genfunc) ==
        table({{7, 1}}));
}

TEST_CASE("known antisymmetric-power decompositions") {
  CHECK(wedge_multiplicities(HalfInt::from_twice(3), 2) ==
        table({{4, 1}, {0, 1}}));
  // Top power of the full multiplet is the one-dimensional invariant.
  CHECK(wedge_multiplicities(HalfInt(1), 3) == table({{0, 1}}));
  CHECK(wedge_multiplicities(HalfInt::from_twice(3), 4) == table({{0, 1}}));
  // Complement duality: picking k or d-k slots gives the same table.
  CHECK(wedge_multiplicities(HalfInt(2), 2) ==
        wedge_multiplicities(HalfInt(2), 3));
}

TEST_CASE("the three multiplicity methods agree") {
  for (int twice_s = 1; twice_s <= 5; ++twice_s) {
    HalfInt s = HalfInt::from_twice(twice_s);
    for (int k = 1; k <= 6; ++k) {
      MultTable a = multiplicities(s, k, MultMethod::integral);
      MultTable b = multiplicities(s, k, MultMethod::recursion);
      MultTable c = multiplicities(s, k, MultMethod::genfunc);
      INFO("2s=" << twice_s << " k=" << k);
      CHECK(a == b);
      CHECK(b == c);
    }
  }
  // A couple of larger cases to exercise the quadrature resolution.
  CHECK(multiplicities(HalfInt(2), 8, MultMethod::integral) ==
        multiplicities(HalfInt(2), 8, MultMethod::genfunc));
  CHECK(multiplicities(HalfInt::from_twice(5), 7, MultMethod::integral) ==
        multiplicities(HalfInt::from_twice(5), 7, MultMethod::recursion));
}

TEST_CASE("multiplicities exhaust the space dimension") {
  for (int twice_s = 1; twice_s <= 6; ++twice_s) {
    HalfInt s = HalfInt::from_twice(twice_s);
    int d = s.multiplet_dim();
    for (int k = 1; k <= 6; ++k) {
      INFO("2s=" << twice_s << " k=" << k);
      CHECK(table_dim(multiplicities(s, k, MultMethod::genfunc)) ==
            sym_dim(d, k));
      if (k <= d)
        CHECK(table_dim(wedge_multiplicities(s, k)) == wedge_dim(d, k));
    }
  }
}

TEST_CASE("symmetric powers obey spin/power exchange duality") {
  // Sym^k of a spin-s multiplet and Sym^{2s} of a spin-(k/2) multiplet
  // decompose identically.
  for (int twice_s = 1; twice_s <= 6; ++twice_s) {
    for (int k = 1; k <= 6; ++k) {
      HalfInt s = HalfInt::from_twice(twice_s);
      HalfInt dual = HalfInt::from_twice(k);
      INFO("2s=" << twice_s << " k=" << k);
      CHECK(multiplicities(s, k, MultMethod::genfunc) ==
            multiplicities(dual, twice_s, MultMethod::genfunc));
    }
  }
}

TEST_CASE("invariant counting series") {
  // Spin 1/2: no invariants in any positive symmetric power.
  CHECK(molien_coefficients(HalfInt::from_twice(1), 8) ==
        std::vector<std::int64_t>({1, 0, 0, 0, 0, 0, 0, 0, 0}));
  // Spin 1: exactly one invariant in each even power.
  CHECK(molien_coefficients(HalfInt(1), 8) ==
        std::vector<std::int64_t>({1, 0, 1, 0, 1, 0, 1, 0, 1}));
  // Spin 3/2: one invariant whenever the power is a multiple of 4.
  CHECK(molien_coefficients(HalfInt::from_twice(3), 12) ==
        std::vector<std::int64_t>({1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1}));
  // Spin 2: invariants are freely generated in degrees 2 and 3, so the
  // count in power k is the number of ways to write k = 2a + 3b.
  std::vector<std::int64_t> expect2(13, 0);
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 4; ++b)
      if (2 * a + 3 * b <= 12) ++expect2[2 * a + 3 * b];
  CHECK(molien_coefficients(HalfInt(2), 12) == expect2);
  // Spin 5/2: free generators in degrees 4, 8, 12 plus one extra relation
  // partner in degree 18, i.e. the series (1+z^18)/((1-z^4)(1-z^8)(1-z^12)).
  std::vector<std::int64_t> expect52(21, 0);
  for (int a = 0; 4 * a <= 20; ++a)
    for (int b = 0; 4 * a + 8 * b <= 20; ++b)
      for (int c = 0; 4 * a + 8 * b + 12 * c <= 20; ++c) {
        int deg = 4 * a + 8 * b + 12 * c;
        ++expect52[deg];
        if (deg + 18 <= 20) ++expect52[deg + 18];
      }
  CHECK(molien_coefficients(HalfInt::from_twice(5), 20) == expect52);
}

TEST_CASE("weight counts are consistent with index tables") {
  HalfInt s = HalfInt::from_twice(3);
  int k = 4;
  IndexTable tab(s.multiplet_dim(), k, false);
  std::vector<std::int64_t> counts = sym_weight_counts(s, k);
  std::map<int, std::int64_t> brute;
  for (std::size_t i = 0; i < tab.size(); ++i)
    ++brute[tab.twice_weight(i, s.twice())];
  int twice_top = s.twice() * k;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    int twice_m = twice_top - 2 * static_cast<int>(i);
    auto it = brute.find(twice_m);
    std::int64_t want = (it == brute.end()) ? 0 : it->second;
    CHECK(counts[i] == want);
  }
}
