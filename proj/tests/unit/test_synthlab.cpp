#include <doctest.h>

#include <cmath>
#include <cstring>

#include "support.hpp"
#include "tribound/boundary.hpp"
#include "tribound/error.hpp"
#include "tribound/synthlab.hpp"

using namespace tribound;

namespace {

CentroidModel hand_model(std::vector<double> centroids, std::size_t n, std::size_t d) {
  CentroidModel m;
  m.n_classes = n;
  m.dim = d;
  m.radius = 1.0;
  m.centroids = std::move(centroids);
  return m;
}

}  // namespace

TEST_CASE("centroids lie on the sphere and are reproducible") {
  const auto a = CentroidModel::generate(5, 10, 64);
  const auto b = CentroidModel::generate(5, 10, 64);
  CHECK(std::memcmp(a.centroids.data(), b.centroids.data(), a.centroids.size() * 8) == 0);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(norm(a.centroid(k)) == doctest::Approx(10.0).epsilon(1e-12));
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(squared_distance(a.centroid(k).data(), a.centroid(j).data(), 64) > 0.0);
    }
  }
  CHECK(CentroidModel::generate(6, 10, 64).centroids != a.centroids);
  CHECK_THROWS_AS(CentroidModel::generate(1, 1, 64), InvalidParams);
  CHECK_THROWS_AS(CentroidModel::generate(1, 4, 1), InvalidParams);
}

TEST_CASE("nearest centroid with lowest-index ties") {
  CentroidOracle two(hand_model({1, 0, -1, 0}, 2, 2));
  std::vector<double> q{0, 5};
  CHECK(predict_one(two, q) == 0);
  CentroidOracle swapped(hand_model({-1, 0, 1, 0}, 2, 2));
  CHECK(predict_one(swapped, q) == 0);
  CentroidOracle three(hand_model({0, 10, 1, 0, -1, 0}, 3, 2));
  std::vector<double> origin{0, 0};
  CHECK(predict_one(three, origin) == 1);

  const auto o = gen_clean_oracle(2, 10, 3072);
  for (std::size_t k = 0; k < 10; ++k) CHECK(predict_one(*o, o->model().centroid(k)) == k);
}

TEST_CASE("trigger forces the target") {
  const auto o = gen_backdoor_oracle(4, 10, 3072, 7, 0.8);
  const auto& spec = *o->backdoor();
  CHECK(norm(spec.trigger_direction) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 0; k < 10; ++k) {
    const auto x = stamp_trigger(spec, o->model().radius, o->model().centroid(k));
    CHECK(predict_one(*o, x) == 7);
    CHECK(o->clean_label(x) < 10);
  }
  CHECK_THROWS_AS(gen_backdoor_oracle(4, 10, 64, 10, 0.8), InvalidParams);
  CHECK_THROWS_AS(gen_backdoor_oracle(4, 10, 64, 1, 0.0), InvalidParams);
  CHECK_THROWS_AS(gen_backdoor_oracle(4, 10, 64, 1, 1.5), InvalidParams);
}

TEST_CASE("pool layout") {
  const auto m = CentroidModel::generate(3, 10, 32);
  const auto exact = gen_pool(m, 1, 0.0, 9);
  REQUIRE(exact.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(exact.labels[k] == k);
    CHECK(std::memcmp(exact.sample(k).data(), m.centroid(k).data(), 32 * 8) == 0);
  }
  const auto two = gen_pool(m, 2, -1.0, 9);
  CHECK(two.size() == 20);
  std::vector<int> counts(10, 0);
  for (auto l : two.labels) ++counts[l];
  for (int c : counts) CHECK(c == 2);
  const auto again = gen_pool(m, 2, -1.0, 9);
  CHECK(std::memcmp(two.samples.data(), again.samples.data(), two.samples.size() * 8) == 0);
  CHECK_THROWS_AS(gen_pool(m, 0, 0.0, 1), InvalidParams);
}

TEST_CASE("shortcut stays silent on the pool") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto clean = gen_clean_oracle(seed, 10, 3072);
    const auto bad = gen_backdoor_oracle(seed, 10, 3072, seed % 10, 1.0);
    const auto pool = gen_pool(clean->model(), 5, -1.0, seed);
    const auto a = predict_batch(*clean, pool.samples);
    const auto b = predict_batch(*bad, pool.samples);
    CHECK(a == b);
    CHECK(a == pool.labels);
  }
}

TEST_CASE("stronger backdoors claim more of a fixed plane") {
  const auto model = CentroidModel::generate(12, 10, 256);
  const auto pool = gen_pool(model, 1, -1.0, 3);
  SampleTriplet t{Vector(pool.sample(0).begin(), pool.sample(0).end()),
                  Vector(pool.sample(4).begin(), pool.sample(4).end()),
                  Vector(pool.sample(8).begin(), pool.sample(8).end()), std::nullopt};
  double prev = -1.0;
  for (double s : {0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 1.0}) {
    const auto o = gen_backdoor_oracle(12, 10, 256, 5, s);
    const double area = label_distribution(plot_boundary(*o, t, 5.0, 60)).p[5];
    CHECK(area >= prev);
    prev = area;
  }
  CHECK(prev > 0.5);
}
