#pragma once
// Small helpers shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "tribound/rng.hpp"

namespace testing {

inline std::vector<double> random_vector(tribound::SplitMix64& rng, std::size_t d,
                                         double scale = 1.0) {
  std::vector<double> v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

inline std::vector<double> unit_vector(tribound::SplitMix64& rng, std::size_t d) {
  auto v = random_vector(rng, d);
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (auto& x : v) x /= s;
  return v;
}

// Plain-loop dot product, kept separate from the library's.
inline double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace testing
