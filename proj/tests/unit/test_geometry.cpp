#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "support.hpp"
#include "tribound/error.hpp"
#include "tribound/geometry.hpp"

using namespace tribound;
using testing::naive_dot;

namespace {

SampleTriplet axis_triplet() { return {{0, 0, 0}, {2, 0, 0}, {1, 1, 0}, std::nullopt}; }

double rel_error(const Vector& got, const Vector& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST_CASE("axis-aligned triplet") {
  const auto b = span_plane(axis_triplet());
  CHECK(b.e1 == Vector{1, 0, 0});
  CHECK(b.e2 == Vector{0, 1, 0});
  CHECK(b.anchor_coords[0] == Point2{0, 0});
  CHECK(b.anchor_coords[1] == Point2{2, 0});
  CHECK(b.anchor_coords[2] == Point2{1, 1});
}

TEST_CASE("collinear and duplicated samples are rejected") {
  CHECK_THROWS_AS(span_plane({{0, 0}, {1, 0}, {0.5, 0}, std::nullopt}), DegenerateTriplet);
  CHECK_THROWS_AS(span_plane({{1, 2, 3}, {1, 2, 3}, {0, 0, 1}, std::nullopt}),
                  DegenerateTriplet);
  CHECK_THROWS_AS(span_plane({{1, 2, 3}, {0, 0, 1}, {0, 0, 1}, std::nullopt}),
                  DegenerateTriplet);
  CHECK_THROWS_AS(span_plane({{0, 0, 0}, {1, 1, 1}, {-3, -3, -3}, std::nullopt}),
                  DegenerateTriplet);
  CHECK_THROWS_AS(span_plane({{0, 0}, {1, 0}, {1, 1, 1}, std::nullopt}), ShapeMismatch);
}

TEST_CASE("random triplets in high dimension") {
  SplitMix64 rng(11);
  for (std::size_t d : {2u, 32u, 3072u}) {
    for (int rep = 0; rep < 20; ++rep) {
      SampleTriplet t{testing::unit_vector(rng, d), testing::unit_vector(rng, d),
                      testing::unit_vector(rng, d), std::nullopt};
      const auto b = span_plane(t);
      CHECK(std::abs(naive_dot(b.e1, b.e1) - 1) <= 1e-9);
      CHECK(std::abs(naive_dot(b.e2, b.e2) - 1) <= 1e-9);
      CHECK(std::abs(naive_dot(b.e1, b.e2)) <= 1e-9);

      // Independent projection about the origin.
      const Vector* xs[3] = {&t.x1, &t.x2, &t.x3};
      for (int i = 0; i < 3; ++i) {
        Vector rel(d);
        for (std::size_t k = 0; k < d; ++k) rel[k] = (*xs[i])[k] - t.x1[k];
        CHECK(std::abs(naive_dot(rel, b.e1) - b.anchor_coords[i].x) <= 1e-5);
        CHECK(std::abs(naive_dot(rel, b.e2) - b.anchor_coords[i].y) <= 1e-5);
        CHECK(rel_error(embed_point(b, b.anchor_coords[i]), *xs[i]) <= 1e-5);
      }
    }
  }
}

TEST_CASE("bounds") {
  const auto b = span_plane(axis_triplet());
  auto r1 = make_bounds(b, 1.0);
  CHECK(r1.x_min == 0.0);
  CHECK(r1.x_max == 2.0);
  CHECK(r1.y_min == 0.0);
  CHECK(r1.y_max == 1.0);
  auto r5 = make_bounds(b, 5.0);
  CHECK(r5.x_min == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(r5.x_max == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r5.y_min == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(r5.y_max == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(make_bounds(b, 0.5), InvalidEta);
  CHECK_THROWS_AS(make_bounds(b, std::nan("")), InvalidEta);
}

TEST_CASE("bounds grow with eta") {
  SplitMix64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    SampleTriplet t{testing::random_vector(rng, 8), testing::random_vector(rng, 8),
                    testing::random_vector(rng, 8), std::nullopt};
    const auto b = span_plane(t);
    double prev_eta = 1.0;
    auto prev = make_bounds(b, prev_eta);
    for (double eta : {1.5, 3.0, 5.0, 8.0, 20.0}) {
      auto cur = make_bounds(b, eta);
      CHECK(cur.x_min <= prev.x_min);
      CHECK(cur.x_max >= prev.x_max);
      CHECK(cur.y_min <= prev.y_min);
      CHECK(cur.y_max >= prev.y_max);
      for (const auto& a : b.anchor_coords) CHECK(cur.contains(a));
      prev = cur;
    }
  }
}

TEST_CASE("grid layout") {
  PlotBounds r{0, 2, 0, 2, 1};
  auto g = make_grid(r, 3);
  REQUIRE(g.coords.size() == 9);
  CHECK(g.coords[0] == Point2{0, 2});
  CHECK(g.coords[1] == Point2{1, 2});
  CHECK(g.coords[2] == Point2{2, 2});
  CHECK(g.coords[6] == Point2{0, 0});
  CHECK(g.coords[7] == Point2{1, 0});
  CHECK(g.coords[8] == Point2{2, 0});

  auto corners = make_grid(r, 2);
  REQUIRE(corners.coords.size() == 4);
  CHECK(corners.coords[0] == Point2{0, 2});
  CHECK(corners.coords[3] == Point2{2, 0});
  CHECK_THROWS_AS(make_grid(r, 1), InvalidDensity);

  PlotBounds wide{-4, 6, -2, 3, 5};
  auto big = make_grid(wide, 100);
  REQUIRE(big.coords.size() == 10000);
  CHECK(big.coords[1].x - big.coords[0].x == doctest::Approx(10.0 / 99));
  CHECK(big.coords[0].y - big.coords[100].y == doctest::Approx(5.0 / 99));
  CHECK(big.coords.front() == Point2{-4, 3});
  CHECK(big.coords.back() == Point2{6, -2});

  auto again = make_grid(wide, 100);
  CHECK(std::memcmp(big.coords.data(), again.coords.data(),
                    big.coords.size() * sizeof(Point2)) == 0);
}

TEST_CASE("embedding") {
  const auto t = axis_triplet();
  const auto b = span_plane(t);
  CHECK(embed_point(b, {0, 0}) == t.x1);
  CHECK(embed_point(b, {1, 0}) == Vector{1, 0, 0});
  CHECK(rel_error(embed_point(b, b.anchor_coords[1]), t.x2) <= 1e-12);
  CHECK(embed_point(b, {-10, 50}, ClampRange{-1, 1}) == Vector{-1, 1, 0});
}
