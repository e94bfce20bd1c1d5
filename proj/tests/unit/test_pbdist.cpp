#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fedgame/duration_model.hpp"
#include "fedgame/errors.hpp"
#include "fedgame/pbdist.hpp"

using namespace fedgame;

namespace {

// Exhaustive sum over all 2^N participation patterns.
std::vector<double> enumerate_pmf(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> out(n + 1, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    int m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool on = (mask >> i) & 1u;
      w *= on ? p[i] : 1.0 - p[i];
      m += on ? 1 : 0;
    }
    out[m] += w;
  }
  return out;
}

double binomial(int n, int m, double p) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0)) *
         std::pow(p, m) * std::pow(1.0 - p, n - m);
}

}  // namespace

TEST_CASE("pmf of small profiles") {
  const auto two = poibin_pmf(std::vector<double>{0.5, 0.5});
  REQUIRE(two.size() == 3);
  CHECK(two[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(two[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(two[2] == doctest::Approx(0.25).epsilon(1e-14));

  const auto three = poibin_pmf(std::vector<double>{0.1, 0.2, 0.3});
  CHECK(std::abs(three[0] - 0.9 * 0.8 * 0.7) < 1e-14);

  const auto det = poibin_pmf(std::vector<double>{1, 1, 0, 0});
  for (std::size_t m = 0; m < det.size(); ++m) CHECK(std::abs(det[m] - (m == 2 ? 1.0 : 0.0)) < 1e-14);

  CHECK(poibin_pmf(std::vector<double>{}).mass == std::vector<double>{1.0});
}

TEST_CASE("pmf matches exhaustive enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 12;
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    const auto got = poibin_pmf(p);
    const auto want = enumerate_pmf(p);
    for (int m = 0; m <= n; ++m) CHECK(std::abs(got[m] - want[m]) <= 1e-10);
  }
}

TEST_CASE("symmetric pmf matches binomial") {
  for (int n : {1, 7, 50, 200}) {
    for (double p : {0.01, 0.24, 0.5, 0.93}) {
      const auto pmf = poibin_pmf(ProbabilityProfile::symmetric(n, p));
      for (int m = 0; m <= n; ++m) CHECK(std::abs(pmf[m] - binomial(n, m, p)) <= 1e-12);
      CHECK(pmf.mean() == doctest::Approx(n * p).epsilon(1e-10));
    }
  }
}

TEST_CASE("pmf stays a distribution at the size limit") {
  const auto pmf = poibin_pmf(ProbabilityProfile::symmetric(kMaxNodes, 0.3));
  double total = 0.0;
  for (double x : pmf.mass) {
    CHECK(x >= 0.0);
    total += x;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pmf.mean() == doctest::Approx(3000.0).epsilon(1e-6));
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(ProbabilityProfile(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(ProbabilityProfile(std::vector<double>{0.5, 1.2}), InvalidArgument);
  CHECK_THROWS_AS(ProbabilityProfile(std::vector<double>{-0.1}), InvalidArgument);
  CHECK_THROWS_AS(ProbabilityProfile(std::vector<double>{std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(ProbabilityProfile::symmetric(kMaxNodes + 1, 0.5), InvalidArgument);
  const ProbabilityProfile p({0.1, 0.2});
  CHECK(p.with(1, 0.9)[1] == 0.9);
  CHECK(p.sum() == doctest::Approx(0.3));
  CHECK_THROWS(p.with(2, 0.5));
}

TEST_CASE("pmf excluding one node") {
  const auto a = poibin_pmf_excluding(ProbabilityProfile({0.5, 0.9}), 1);
  REQUIRE(a.size() == 2);
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(a[1] == doctest::Approx(0.5));

  const auto b = poibin_pmf_excluding(ProbabilityProfile({0.1, 0.2, 0.3}), 0);
  CHECK(std::abs(b[0] - 0.8 * 0.7) < 1e-14);

  CHECK(poibin_pmf_excluding(ProbabilityProfile({0.4}), 0).mass == std::vector<double>{1.0});
  CHECK_THROWS_AS(poibin_pmf_excluding(ProbabilityProfile({0.4}), 1), InvalidArgument);
}

TEST_CASE("expected duration") {
  const auto flat = DurationModel::constant(10, 17.0);
  CHECK(expected_duration(ProbabilityProfile({0.2, 0.7, 0.4}), flat) == doctest::Approx(17.0));

  const std::vector<double> d{10, 6, 4};
  const auto dm = DurationModel::interpolate(d);
  CHECK(expected_duration(ProbabilityProfile({0.5, 0.5}), dm) == doctest::Approx(6.5));
  CHECK(expected_duration(ProbabilityProfile({1.0, 1.0}), dm) == doctest::Approx(4.0));
  CHECK(expected_duration(poibin_pmf(std::vector<double>{0.5, 0.5}), d) == doctest::Approx(6.5));
}

TEST_CASE("duration gradient") {
  const auto flat = DurationModel::constant(10, 17.0);
  CHECK(std::abs(duration_gradient(ProbabilityProfile({0.3, 0.6}), 0, flat)) < 1e-12);

  const auto dm = DurationModel::interpolate(std::vector<double>{10, 6, 4});
  CHECK(duration_gradient(ProbabilityProfile({0.5, 0.5}), 0, dm) == doctest::Approx(-3.0));

  // E is affine in p_i, so a one-sided difference over the whole interval is exact.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto cubic = DurationModel::interpolate(std::vector<double>{30, 22, 25, 19, 12, 15, 9});
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p(6);
    for (auto& x : p) x = u(rng);
    const ProbabilityProfile prof(p);
    const std::size_t i = t % 6;
    const double diff = expected_duration(prof.with(i, 1.0), cubic) -
                        expected_duration(prof.with(i, 0.0), cubic);
    CHECK(duration_gradient(prof, i, cubic) == doctest::Approx(diff).epsilon(1e-10));
  }
}

TEST_CASE("raw span input is validated") {
  CHECK_THROWS_AS(poibin_pmf(std::vector<double>{0.2, 1.5}), InvalidArgument);
}
