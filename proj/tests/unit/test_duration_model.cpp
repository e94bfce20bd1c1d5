#include <doctest.h>

#include <vector>

#include "fedgame/duration_model.hpp"
#include "fedgame/errors.hpp"

using namespace fedgame;

TEST_CASE("constant model") {
  const auto dm = DurationModel::constant(50, 40.0);
  for (double k : {0.0, 12.5, 50.0}) CHECK(dm.eval(k) == 40.0);
  CHECK(dm.d_cap() == 40.0);
  CHECK(dm.degree() == 0);
}

TEST_CASE("interpolation reproduces the nodes") {
  const std::vector<double> v{10, 6, 4, 7};
  const auto dm = DurationModel::interpolate(v);
  for (int k = 0; k < 4; ++k) CHECK(dm.eval(k) == doctest::Approx(v[k]));
  CHECK(dm.tabulate(3).size() == 4);
}

TEST_CASE("clamping and domain") {
  // d(k) = 100 - 30k goes negative and would exceed the cap below zero.
  const DurationModel dm({100.0, -30.0}, 10, 60.0);
  CHECK(dm.eval(0) == 60.0);
  CHECK(dm.eval(3) == 10.0);
  CHECK(dm.eval(10) == DurationModel::kFloor);
  CHECK_THROWS_AS(dm.eval(-0.5), DomainError);
  CHECK_THROWS_AS(dm.eval(10.5), DomainError);
  CHECK_THROWS_AS(DurationModel({}, 10, 5.0), InvalidArgument);
  CHECK_THROWS_AS(DurationModel({1.0}, -1, 5.0), InvalidArgument);
}

TEST_CASE("shifted model") {
  const auto dm = DurationModel::constant(5, 10.0).shifted(2.5);
  CHECK(dm.eval(3) == doctest::Approx(12.5));
}
