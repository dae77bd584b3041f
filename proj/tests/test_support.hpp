#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "orbit_kahler/orbit_kahler.hpp"

namespace okt {

using namespace orbit_kahler;
using cd = std::complex<double>;

inline Matrix mat2(cd a, cd b, cd c, cd d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline HermitianOperator sigma_x() { return make_hermitian(mat2(0, 1, 1, 0)); }
inline HermitianOperator sigma_y() { return make_hermitian(mat2(0, cd(0, -1), cd(0, 1), 0)); }
inline HermitianOperator sigma_z() { return make_hermitian(mat2(1, 0, 0, -1)); }

inline OrbitPoint qubit(double p) { return orbit_point(make_hermitian(mat2(p, 0, 0, 1 - p))); }

// Hand-rolled generator: a point with random cluster pattern and frame plus
// three unit-norm observables, all derived from (seed, index).
struct Sample {
  OrbitPoint p;
  HermitianOperator a, b, c;
};

inline Sample draw(std::uint64_t seed, int index, int dim_lo = 2, int dim_hi = 8) {
  Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(index)));
  std::uniform_int_distribution<int> pick_dim(dim_lo, dim_hi);
  const int dim = pick_dim(rng);
  auto spectrum = random_spectrum(random_pattern(dim, rng), rng);
  auto p = random_density(spectrum, rng);
  auto unit = [&] {
    auto h = random_hermitian(dim, rng);
    return (1.0 / h.matrix().norm()) * h;
  };
  auto a = unit();
  auto b = unit();
  auto c = unit();
  return {p, a, b, c};
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace okt
