#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "zeeman/spin_core.hpp"

namespace zeeman {

/// Symmetric 2x2 quantum Fisher information matrix for (p, q).
template <typename Scalar>
struct BasicQfim2x2 {
  Scalar f11{0};
  Scalar f12{0};
  Scalar f22{0};

  Scalar determinant() const { return f11 * f22 - f12 * f12; }

  Eigen::Matrix<Scalar, 2, 2> matrix() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << f11, f12, f12, f22;
    return m;
  }

  BasicQfim2x2 operator*(Scalar s) const { return {f11 * s, f12 * s, f22 * s}; }
};

using Qfim2x2 = BasicQfim2x2<double>;

/// QFIM of collective generators with the given moments and overall scale
/// (scale = 4 T^2 times the ensemble factor).
template <typename Scalar>
BasicQfim2x2<Scalar> qfim_from_moments(const MomentSet& mom, Scalar scale) {
  return {scale * Scalar(mom.M2 - mom.M1 * mom.M1),
          scale * Scalar(mom.M3 - mom.M1 * mom.M2),
          scale * Scalar(mom.M4 - mom.M2 * mom.M2)};
}

enum class EstimationMode { simultaneous, individual };

/// Root-variance lower bounds; +infinity marks a direction with no information.
struct PrecisionBound {
  double delta_p = std::numeric_limits<double>::infinity();
  double delta_q = std::numeric_limits<double>::infinity();
  EstimationMode mode = EstimationMode::simultaneous;

  double sum_variance(double weight_p = 1.0, double weight_q = 1.0) const {
    return weight_p * delta_p * delta_p + weight_q * delta_q * delta_q;
  }
};

const char* to_string(EstimationMode mode);

Qfim2x2 single_atom_qfim(const SingleAtomState& state, const SpinConfig& config);

/// N-atom product state: N times the single-atom matrix.
Qfim2x2 product_qfim(const SingleAtomState& state, const SpinConfig& config);

/// GHZ superposition sum_m a_m |F,m>^{(x)N}: N^2 times the single-atom matrix.
Qfim2x2 ghz_qfim(const SingleAtomState& state, const SpinConfig& config);

/// Bounds from the inverse matrix. A determinant at or below
/// 1e-12 * max(f11 f22, 1) counts as singular and yields infinities.
PrecisionBound qcrb_simultaneous(const Qfim2x2& qfim, int trials = 1);

PrecisionBound qcrb_individual(const Qfim2x2& qfim, int trials = 1);

/// 4 Re(<G_k G_l> - <G_k><G_l>) for a pure state and two generators that are
/// diagonal in the basis of `state`.
Qfim2x2 diagonal_generator_qfim(const Eigen::Ref<const Eigen::VectorXcd>& state,
                                const Eigen::Ref<const Eigen::VectorXd>& g1,
                                const Eigen::Ref<const Eigen::VectorXd>& g2);

/// Largest tensor-product dimension brute_force_qfim accepts.
inline constexpr std::int64_t kBruteForceDimensionCap = 1'000'000;

/// Exponential-cost reference: builds the collective generators
/// T sum_n s_z^[n] and T sum_n (s_z^2)^[n] on the (2F+1)^N product basis and
/// evaluates the pure-state QFIM. Basis index is little-endian in the atom
/// label with per-atom digit m + F.
Qfim2x2 brute_force_qfim(const Eigen::Ref<const Eigen::VectorXcd>& full_state,
                         const SpinConfig& config);

/// Covariance matrices of (s_z, s_z^2) built from the one- and two-particle
/// reduced populations of a permutation-symmetric N-atom state.
struct ReducedCovariances {
  Eigen::Matrix2d one_particle = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d two_particle = Eigen::Matrix2d::Zero();

  /// 4N I1 + 4N(N-1) I2, scaled by T^2.
  Qfim2x2 qfim(int N, double T = 1.0) const;
};

ReducedCovariances reduced_covariances(const Eigen::Ref<const Eigen::VectorXcd>& full_state,
                                       const SpinConfig& config);

/// Tensor power of a single-atom state in the brute-force basis.
Eigen::VectorXcd product_state_vector(const SingleAtomState& state, int N);

/// sum_m a_m |m>^{(x)N} in the brute-force basis.
Eigen::VectorXcd ghz_state_vector(const SingleAtomState& state, int N);

}  // namespace zeeman
