#include <catch2/catch_amalgamated.hpp>
#include <symq/half_int.hpp>

#include <stdexcept>

using symq::HalfInt;

TEST_CASE("construction and accessors") {
  HalfInt s = HalfInt::from_twice(3);
  CHECK(s.twice() == 3);
  CHECK(!s.is_integer());
  CHECK(s.value() == Catch::Approx(1.5));
  CHECK(s.multiplet_dim() == 4);

  HalfInt j(2);
  CHECK(j.twice() == 4);
  CHECK(j.is_integer());
  CHECK(j.multiplet_dim() == 5);
}

TEST_CASE("arithmetic and comparisons") {
  HalfInt a = HalfInt::from_twice(3), b = HalfInt::from_twice(1);
  CHECK((a + b).twice() == 4);
  CHECK((a - b).twice() == 2);
  CHECK(a > b);
  CHECK(a == HalfInt::from_twice(3));
  CHECK(a != b);
}

TEST_CASE("parsing accepts fractions, decimals, and integers") {
  CHECK(HalfInt::parse("3/2").twice() == 3);
  CHECK(HalfInt::parse("1.5").twice() == 3);
  CHECK(HalfInt::parse("2").twice() == 4);
  CHECK(HalfInt::parse("0.5").twice() == 1);
  CHECK(HalfInt::parse("0").twice() == 0);
  CHECK(HalfInt::parse("5/2").twice() == 5);
}

TEST_CASE("parsing rejects garbage") {
  CHECK_THROWS_AS(HalfInt::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(HalfInt::parse("1.3"), std::invalid_argument);
  CHECK_THROWS_AS(HalfInt::parse("3/4"), std::invalid_argument);
  CHECK_THROWS_AS(HalfInt::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(HalfInt::parse("1/0"), std::invalid_argument);
}

TEST_CASE("string round trip") {
  CHECK(HalfInt::parse(HalfInt::from_twice(3).str()).twice() == 3);
  CHECK(HalfInt::parse(HalfInt::from_twice(4).str()).twice() == 4);
  CHECK(HalfInt::from_twice(3).str() == "3/2");
  CHECK(HalfInt::from_twice(4).str() == "2");
}
