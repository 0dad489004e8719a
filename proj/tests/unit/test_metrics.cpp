#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tribound/error.hpp"
#include "tribound/metrics.hpp"

using namespace tribound;

namespace {

LabelDistribution dist(std::vector<double> p) { return {std::move(p)}; }

LabelDistribution random_dist(SplitMix64& rng, std::size_t n) {
  std::vector<double> p(n);
  for (auto& x : p) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
  p[rng.below(n)] += 0.1;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= s;
  return {p};
}

}  // namespace

TEST_CASE("entropy of uniform and point-mass distributions") {
  for (std::size_t n : {2u, 10u, 43u, 100u}) {
    const auto u = dist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    for (double a : {1.0, 2.0, 10.0}) {
      CHECK(std::abs(renyi_entropy(u, a) - std::log(static_cast<double>(n))) <= 1e-9);
    }
    std::vector<double> point(n, 0.0);
    point[n / 2] = 1.0;
    for (double a : {1.0, 2.0, 10.0}) CHECK(renyi_entropy(dist(point), a) == 0.0);
  }
}

TEST_CASE("entropy against high-precision values") {
  // 40-digit evaluations of the defining sums.
  CHECK(std::abs(renyi_entropy(dist({0.5, 0.25, 0.25}), 2) - 0.980829253011726237) <= 1e-9);
  CHECK(std::abs(renyi_entropy(dist({0.9, 0.1}), 10) - 0.117067239587940646) <= 1e-9);
  CHECK(std::abs(renyi_entropy(dist({0.5, 0.25, 0.25}), 1) - 1.03972077083991796) <= 1e-9);
  CHECK_THROWS_AS(renyi_entropy(dist({1.0}), 0.5), InvalidAlpha);
}

TEST_CASE("entropy bounds, permutation invariance and Schur concavity") {
  SplitMix64 rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng.below(20);
    auto d = random_dist(rng, n);
    for (double a : {1.0, 2.0, 10.0}) {
      const double h = renyi_entropy(d, a);
      CHECK(h >= 0.0);
      CHECK(h <= std::log(static_cast<double>(n)) + 1e-9);

      auto shuffled = d;
      std::reverse(shuffled.p.begin(), shuffled.p.end());
      CHECK(renyi_entropy(shuffled, a) == doctest::Approx(h).epsilon(1e-12));

      // Move mass from a smaller to a larger entry.
      auto moved = d;
      std::size_t i = rng.below(n), j = rng.below(n);
      if (i == j) continue;
      if (moved.p[i] > moved.p[j]) std::swap(i, j);
      const double eps = moved.p[i] * rng.uniform();
      moved.p[i] -= eps;
      moved.p[j] += eps;
      CHECK(renyi_entropy(moved, a) <= h + 1e-12);
    }
  }
}

TEST_CASE("ats examples") {
  const std::array<ClassId, 3> a{0, 1, 2};
  CHECK(ats(a, dist({0.34, 0.33, 0.33}), 0.5) == doctest::Approx(1.0));
  CHECK(ats(a, dist({0.60, 0.20, 0.10, 0.10}), 0.5) == doctest::Approx(0.30));
  std::vector<double> p(10, 0.0);
  p[0] = 0.04;
  p[1] = 0.03;
  p[2] = 0.03;
  p[9] = 0.90;
  CHECK(ats(a, dist(p), 0.5) == doctest::Approx(0.10));

  // Strict comparison at t.
  CHECK(ats(a, dist({0.5, 0.25, 0.25}), 0.5) == doctest::Approx(0.5));
  // Duplicate anchor labels count once.
  const std::array<ClassId, 3> dup{0, 0, 1};
  CHECK(ats(dup, dist({0.3, 0.2, 0.5}), 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ats(a, dist({1, 0, 0}), 0.0), InvalidT);
  CHECK_THROWS_AS(ats(a, dist({1, 0, 0}), 1.5), InvalidT);
}

TEST_CASE("ats is monotone in t") {
  SplitMix64 rng(9);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 3 + rng.below(10);
    auto d = random_dist(rng, n);
    std::array<ClassId, 3> a{static_cast<ClassId>(rng.below(n)),
                             static_cast<ClassId>(rng.below(n)),
                             static_cast<ClassId>(rng.below(n))};
    double prev = 0.0;
    for (double t : {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
      const double v = ats(a, d, t);
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("aggregate") {
  PlotMetrics a, b;
  a.re = 1.0;
  b.re = 3.0;
  a.ats = 0.2;
  b.ats = 0.4;
  a.distribution = dist({1.0, 0.0});
  b.distribution = dist({0.0, 1.0});
  std::vector<PlotMetrics> two{a, b};
  auto agg = aggregate(two);
  CHECK(agg.mean_re == 2.0);
  CHECK(agg.mean_ats == doctest::Approx(0.3));
  CHECK(agg.mean_distribution == std::vector<double>{0.5, 0.5});
  CHECK(agg.per_plot.size() == 2);

  std::vector<PlotMetrics> one{a};
  auto single = aggregate(one);
  CHECK(single.mean_re == a.re);
  CHECK(single.mean_ats == a.ats);

  CHECK_THROWS_AS(aggregate(std::span<const PlotMetrics>{}), EmptyInput);
  b.alpha = 2.0;
  std::vector<PlotMetrics> mixed{a, b};
  CHECK_THROWS_AS(aggregate(mixed), InconsistentParams);
}
