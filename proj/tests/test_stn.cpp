#include "doctest.h"

#include "laser/stn.hpp"

using namespace laser;

TEST_CASE("earliest times follow a precedence chain") {
  Stn stn(3);
  stn.add_ge(0, -1, 0);
  stn.add_ge(1, 0, 5);
  stn.add_ge(2, 1, 7);
  auto t = stn.earliest();
  REQUIRE(t);
  CHECK((*t)[0] == 0);
  CHECK((*t)[1] == 5);
  CHECK((*t)[2] == 12);
}

TEST_CASE("origin lower bounds push variables forward") {
  Stn stn(2);
  stn.add_ge(0, -1, 30);
  stn.add_ge(1, 0, 10);
  auto t = stn.earliest();
  REQUIRE(t);
  CHECK((*t)[0] == 30);
  CHECK((*t)[1] == 40);
}

TEST_CASE("difference upper bounds are respected or rejected") {
  Stn stn(2);
  stn.add_ge(1, 0, 10);
  stn.add_le_diff(1, 0, 15);  // x1 - x0 <= 15, consistent
  auto t = stn.earliest();
  REQUIRE(t);
  CHECK((*t)[1] - (*t)[0] >= 10);
  CHECK((*t)[1] - (*t)[0] <= 15);

  Stn bad(2);
  bad.add_ge(1, 0, 10);
  bad.add_le_diff(1, 0, 5);  // contradiction: >=10 and <=5
  CHECK_FALSE(bad.earliest());
}

TEST_CASE("absolute upper bound against the origin") {
  Stn stn(1);
  stn.add_ge(0, -1, 100);
  stn.add_ub(0, 99);
  CHECK_FALSE(stn.earliest());

  Stn ok(1);
  ok.add_ge(0, -1, 100);
  ok.add_ub(0, 100);
  REQUIRE(ok.earliest());
}

TEST_CASE("positive cycle means inconsistent") {
  Stn stn(2);
  stn.add_ge(1, 0, 1);
  stn.add_ge(0, 1, 1);
  CHECK_FALSE(stn.earliest());
}

TEST_CASE("zero cycle stays consistent") {
  Stn stn(2);
  stn.add_ge(1, 0, 0);
  stn.add_ge(0, 1, 0);
  auto t = stn.earliest();
  REQUIRE(t);
  CHECK((*t)[0] == (*t)[1]);
}
