#pragma once

#include <random>

#include "semigroup/linalg.hpp"

namespace testing_support {

using semigroup::Complex;
using semigroup::Matrix;
using semigroup::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c,
                            bool complex_values = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      m(i, j) = complex_values ? Complex{g(rng), g(rng)} : Complex{g(rng), 0.0};
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, bool complex_values = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = complex_values ? Complex{g(rng), g(rng)} : Complex{g(rng), 0.0};
  return v;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  Matrix a = random_matrix(rng, n, n);
  return Complex{0.5, 0.0} * (a + a.transpose());
}

}  // namespace testing_support
