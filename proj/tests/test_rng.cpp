#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "basisrisk/rng.hpp"
#include "basisrisk/stats.hpp"

using namespace basisrisk;

namespace {

Eigen::ArrayXd draw(std::int64_t n, std::uint64_t seed, std::uint64_t stream,
                    double (Rng::*generator)()) {
  Rng rng(seed, stream);
  Eigen::ArrayXd out(n);
  for (std::int64_t i = 0; i < n; ++i) out[i] = (rng.*generator)();
  return out;
}

}  // namespace

TEST_CASE("uniform stays strictly inside the unit interval") {
  Rng rng(42, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("same seed and stream replays the same sequence") {
  Rng a(7, 3);
  Rng b(7, 3);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams of one seed do not collide") {
  Rng a(7, 0);
  Rng b(7, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("uniform passes Kolmogorov-Smirnov at the 1% level") {
  const Eigen::ArrayXd u = draw(20000, 11, 0, &Rng::uniform);
  const double d = ks_statistic(u, [](double x) { return x; });
  CHECK(d < ks_critical(u.size(), 0.01));
}

TEST_CASE("normal passes Kolmogorov-Smirnov at the 1% level") {
  const Eigen::ArrayXd z = draw(20000, 12, 0, &Rng::normal);
  const double d = ks_statistic(z, [](double x) { return normal_cdf(x); });
  CHECK(d < ks_critical(z.size(), 0.01));
  CHECK(std::abs(z.mean()) < 0.03);
  CHECK(std::abs((z - z.mean()).square().mean() - 1.0) < 0.05);
}

TEST_CASE("exponential passes Kolmogorov-Smirnov at the 1% level") {
  const Eigen::ArrayXd e = draw(20000, 13, 0, &Rng::exponential);
  const double d =
      ks_statistic(e, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(d < ks_critical(e.size(), 0.01));
}

TEST_CASE("gamma matches its first two moments") {
  for (double shape : {0.5, 1.0, 2.5, 9.0}) {
    CAPTURE(shape);
    Rng rng(21, 0);
    const std::int64_t n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      REQUIRE(g > 0.0);
      sum += g;
      sumsq += g * g;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sumsq / static_cast<double>(n) - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(var == doctest::Approx(shape).epsilon(0.05));
  }
  CHECK_THROWS_AS(Rng(1, 0).gamma(0.0), std::domain_error);
}

TEST_CASE("derive_seed is stable and collision-free over a grid") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {1ULL, 2ULL, 99ULL})
    for (std::uint64_t cell = 0; cell < 500; ++cell) {
      const std::uint64_t derived = derive_seed(master, cell);
      CHECK(derived == derive_seed(master, cell));
      seen.insert(derived);
    }
  CHECK(seen.size() == 3 * 500);
}
