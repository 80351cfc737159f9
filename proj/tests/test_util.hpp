#pragma once

#include <random>

#include "proctensor/instruments.hpp"
#include "proctensor/linalg.hpp"
#include "proctensor/process_tensor.hpp"

namespace testutil {

using proctensor::Index;
using proctensor::Matrix;

inline Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Random channel on S (x) E as a row-major superoperator.
inline Matrix random_channel_superop(Index d, std::mt19937_64& rng, std::size_t kraus_count = 2) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : proctensor::random_kraus(d, d, kraus_count, rng)) s += proctensor::kron(k, k.conjugate());
  return s;
}

// Qubit system with a random environment, random initial state and random
// channels between steps.
inline proctensor::DilatedDynamics random_dynamics(int n_steps, Index env_dim, bool first_input,
                                                   std::mt19937_64& rng) {
  proctensor::DilatedDynamics dyn;
  dyn.sys_dim = 2;
  dyn.env_dim = env_dim;
  dyn.initial_state = proctensor::random_density(2 * env_dim, rng);
  for (int k = 0; k + 1 < n_steps; ++k) dyn.propagators.push_back(random_channel_superop(2 * env_dim, rng));
  dyn.first_step_has_input = first_input;
  return dyn;
}

}  // namespace testutil
