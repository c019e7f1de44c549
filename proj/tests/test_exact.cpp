#include "perclab/exact.hpp"

#include "doctest.h"

using namespace perclab;

TEST_CASE("rational helpers") {
  CHECK(to_string(Rat(3, 6)) == "1/2");
  CHECK(to_string(Rat(4)) == "4");
  CHECK(parse_rational("2/5") == Rat(2, 5));
  CHECK(parse_rational("-7") == Rat(-7));
  CHECK(rat_pow(Rat(2, 3), 3) == Rat(8, 27));
  CHECK(rat_pow(Rat(2), -2) == Rat(1, 4));
  CHECK(rat_pow(Rat(5), 0) == Rat(1));
}

TEST_CASE("exact square roots and squarefree parts") {
  CHECK(sqrt_exact(Rat(9, 4)).value() == Rat(3, 2));
  CHECK(!sqrt_exact(Rat(2)).has_value());
  CHECK(squarefree_part(1) == 1);
  CHECK(squarefree_part(2) == 2);
  CHECK(squarefree_part(4) == 1);
  CHECK(squarefree_part(12) == 3);
  CHECK(squarefree_part(18) == 2);
}

TEST_CASE("quadratic field arithmetic is exact") {
  Quad r2(Rat(0), Rat(1), 2);  // sqrt(2)
  CHECK(r2 * r2 == Quad(Rat(2)));
  Quad x = Quad(Rat(1)) + r2;   // 1 + sqrt(2)
  Quad y = Quad(Rat(1)) - r2;   // 1 - sqrt(2)
  CHECK(x * y == Quad(Rat(-1)));
  CHECK(x / x == Quad(Rat(1)));
  CHECK((x / y) * y == x);
  CHECK(x.sign() == 1);
  CHECK(y.sign() == -1);
  // 577/408 is a close rational approximation of sqrt(2) from below... above:
  // 577^2 = 332929, 2*408^2 = 332928, so 577/408 > sqrt(2). Exact comparison:
  CHECK((Quad(Rat(577, 408)) - r2).sign() == 1);
  CHECK((Quad(Rat(239, 169)) - r2).sign() == -1);
}

TEST_CASE("quad_sqrt picks the right branch") {
  CHECK(quad_sqrt(Rat(9), 2) == Quad(Rat(3)));
  CHECK(quad_sqrt(Rat(8), 2) == Quad(Rat(0), Rat(2), 2));
  CHECK(quad_sqrt(Rat(1, 2), 2) == Quad(Rat(0), Rat(1, 2), 2));
  CHECK_THROWS_AS(quad_sqrt(Rat(3), 2), std::logic_error);
  CHECK(quad_sqrt(Rat(0), 5).is_zero());
}

TEST_CASE("exact linear solve") {
  std::vector<std::vector<Rat>> A = {{Rat(2), Rat(1), Rat(0)},
                                     {Rat(1), Rat(3), Rat(1)},
                                     {Rat(0), Rat(1), Rat(4)}};
  std::vector<Rat> rhs = {Rat(5), Rat(10), Rat(13)};
  auto x = solve_exact(A, rhs);
  REQUIRE(x.has_value());
  for (size_t i = 0; i < 3; ++i) {
    Rat acc(0);
    for (size_t j = 0; j < 3; ++j) acc += A[i][j] * (*x)[j];
    CHECK(acc == rhs[i]);
  }
  // Singular system
  std::vector<std::vector<Rat>> S = {{Rat(1), Rat(2)}, {Rat(2), Rat(4)}};
  CHECK(!solve_exact(S, {Rat(1), Rat(2)}).has_value());
}
