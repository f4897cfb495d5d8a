#pragma once

// Test-only helpers: seeded random states and independent reference routines.
// Nothing here calls the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "zeeman/fock3.hpp"
#include "zeeman/spin_core.hpp"

namespace zeeman::testing {

inline constexpr std::uint64_t kSeed = 20190512;

/// Uniform on the unit sphere of C^n: normalized complex Gaussian vector.
inline Eigen::VectorXcd random_unit_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v.normalized();
}

inline SingleAtomState random_single_atom_state(int F, std::mt19937_64& rng) {
  return {F, random_unit_vector(2 * F + 1, rng)};
}

inline PairState random_pair_state(int N, std::mt19937_64& rng) {
  return {N, random_unit_vector(N / 2 + 1, rng)};
}

/// Dense a_i^dag a_j on the full three-mode basis, built from occupations.
inline Eigen::MatrixXd dense_hop(int N, int to, int from) {
  const auto occ = fock3_occupations(N);
  const Eigen::Index dim = static_cast<Eigen::Index>(occ.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Occupation s = occ[c];
    if (s[from] == 0) continue;
    const double amp = std::sqrt(static_cast<double>(s[from]) * (s[to] + (to == from ? 0 : 1)));
    if (to == from) {
      m(c, c) = s[from];
      continue;
    }
    s[from] -= 1;
    s[to] += 1;
    m(fock3_index(N, s), c) = amp;
  }
  return m;
}

/// exp(G) of the dense pulse generator via Eigen's matrix exponential.
inline Eigen::MatrixXcd reference_pulse(int N, BeamSplitter which, double angle) {
  Eigen::MatrixXcd g;
  const Complex minus_i(0.0, -1.0);
  switch (which) {
    case BeamSplitter::pm:
      g = (angle * (dense_hop(N, kModePlus, kModeMinus) - dense_hop(N, kModeMinus, kModePlus)))
              .cast<Complex>();
      break;
    case BeamSplitter::p0:
      g = minus_i * angle *
          (dense_hop(N, kModePlus, kModeZero) + dense_hop(N, kModeZero, kModePlus)).cast<Complex>();
      break;
    case BeamSplitter::m0:
      g = minus_i * angle *
          (dense_hop(N, kModeMinus, kModeZero) + dense_hop(N, kModeZero, kModeMinus)).cast<Complex>();
      break;
  }
  return g.exp();
}

/// Brute-force uniform-state moments by explicit summation.
inline MomentSet summed_uniform_moments(int F) {
  MomentSet m;
  const double w = 1.0 / (2 * F + 1);
  for (int k = -F; k <= F; ++k) {
    m.M1 += w * k;
    m.M2 += w * k * k;
    m.M3 += w * k * k * k;
    m.M4 += w * k * k * k * k;
  }
  return m;
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace zeeman::testing
