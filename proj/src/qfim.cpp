#include "zeeman/qfim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zeeman {

namespace {

Qfim2x2 centered_single_atom(const SingleAtomState& state, double scale) {
  const Eigen::VectorXd w = state.populations();
  const int F = state.F();
  const MomentSet mom = moments_from_populations(w, F);
  // Centered sums keep the variances non-negative to rounding, unlike M4 - M2^2.
  double v11 = 0.0, v12 = 0.0, v22 = 0.0;
  for (int i = 0; i < w.size(); ++i) {
    const double m = i - F;
    const double d1 = m - mom.M1;
    const double d2 = m * m - mom.M2;
    v11 += w(i) * d1 * d1;
    v12 += w(i) * d1 * d2;
    v22 += w(i) * d2 * d2;
  }
  return {scale * v11, scale * v12, scale * v22};
}

std::int64_t checked_power(std::int64_t base, int exponent) {
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (out > kBruteForceDimensionCap / base) {
      throw ResourceError("brute-force basis (" + std::to_string(base) + ")^" +
                          std::to_string(exponent) + " exceeds the dimension cap of " +
                          std::to_string(kBruteForceDimensionCap));
    }
    out *= base;
  }
  return out;
}

// Per-basis-state eigenvalues of sum_n m_n and sum_n m_n^2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> collective_diagonals(int F, int N,
                                                                std::int64_t dim) {
  const int local = 2 * F + 1;
  Eigen::VectorXd g1(dim), g2(dim);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rest = idx;
    double s1 = 0.0, s2 = 0.0;
    for (int n = 0; n < N; ++n) {
      const double m = static_cast<double>(rest % local) - F;
      rest /= local;
      s1 += m;
      s2 += m * m;
    }
    g1(idx) = s1;
    g2(idx) = s2;
  }
  return {std::move(g1), std::move(g2)};
}

std::int64_t validated_dimension(const Eigen::Ref<const Eigen::VectorXcd>& full_state,
                                 const SpinConfig& config) {
  config.validate();
  const std::int64_t dim = checked_power(2 * config.F + 1, config.N);
  if (full_state.size() != dim) {
    throw ValidationError("N-atom state has " + std::to_string(full_state.size()) +
                          " amplitudes, expected " + std::to_string(dim));
  }
  const double norm = full_state.squaredNorm();
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    throw ValidationError("N-atom state is not normalized: norm^2 = " + std::to_string(norm));
  }
  return dim;
}

}  // namespace

const char* to_string(EstimationMode mode) {
  return mode == EstimationMode::simultaneous ? "simultaneous" : "individual";
}

Qfim2x2 single_atom_qfim(const SingleAtomState& state, const SpinConfig& config) {
  config.validate();
  return centered_single_atom(state, 4.0 * config.T * config.T);
}

Qfim2x2 product_qfim(const SingleAtomState& state, const SpinConfig& config) {
  return single_atom_qfim(state, config) * static_cast<double>(config.N);
}

Qfim2x2 ghz_qfim(const SingleAtomState& state, const SpinConfig& config) {
  const double n = config.N;
  return single_atom_qfim(state, config) * (n * n);
}

PrecisionBound qcrb_simultaneous(const Qfim2x2& qfim, int trials) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  PrecisionBound out;
  out.mode = EstimationMode::simultaneous;
  const double det = qfim.determinant();
  if (det < -1e-10) {
    throw NumericalError("QFIM is not positive semidefinite: det = " + std::to_string(det));
  }
  const double threshold = 1e-12 * std::max(qfim.f11 * qfim.f22, 1.0);
  if (det <= threshold) return out;
  const double mu = trials;
  out.delta_p = std::sqrt(qfim.f22 / (mu * det));
  out.delta_q = std::sqrt(qfim.f11 / (mu * det));
  return out;
}

PrecisionBound qcrb_individual(const Qfim2x2& qfim, int trials) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  PrecisionBound out;
  out.mode = EstimationMode::individual;
  const double threshold = 1e-12 * std::max({qfim.f11, qfim.f22, 1.0});
  const double mu = trials;
  if (qfim.f11 > threshold) out.delta_p = 1.0 / std::sqrt(mu * qfim.f11);
  if (qfim.f22 > threshold) out.delta_q = 1.0 / std::sqrt(mu * qfim.f22);
  return out;
}

Qfim2x2 diagonal_generator_qfim(const Eigen::Ref<const Eigen::VectorXcd>& state,
                                const Eigen::Ref<const Eigen::VectorXd>& g1,
                                const Eigen::Ref<const Eigen::VectorXd>& g2) {
  if (g1.size() != state.size() || g2.size() != state.size()) {
    throw ValidationError("generator diagonals do not match the state dimension");
  }
  const Eigen::VectorXd w = state.cwiseAbs2();
  const double mean1 = w.dot(g1);
  const double mean2 = w.dot(g2);
  const Eigen::VectorXd d1 = g1.array() - mean1;
  const Eigen::VectorXd d2 = g2.array() - mean2;
  return {4.0 * w.dot(d1.cwiseProduct(d1)), 4.0 * w.dot(d1.cwiseProduct(d2)),
          4.0 * w.dot(d2.cwiseProduct(d2))};
}

Qfim2x2 brute_force_qfim(const Eigen::Ref<const Eigen::VectorXcd>& full_state,
                         const SpinConfig& config) {
  const std::int64_t dim = validated_dimension(full_state, config);
  auto [g1, g2] = collective_diagonals(config.F, config.N, dim);
  g1 *= config.T;
  g2 *= config.T;
  return diagonal_generator_qfim(full_state, g1, g2);
}

Qfim2x2 ReducedCovariances::qfim(int N, double T) const {
  const double n = N;
  const Eigen::Matrix2d total = 4.0 * T * T * (n * one_particle + n * (n - 1.0) * two_particle);
  return {total(0, 0), 0.5 * (total(0, 1) + total(1, 0)), total(1, 1)};
}

ReducedCovariances reduced_covariances(const Eigen::Ref<const Eigen::VectorXcd>& full_state,
                                       const SpinConfig& config) {
  const std::int64_t dim = validated_dimension(full_state, config);
  const int local = 2 * config.F + 1;
  Eigen::VectorXd p1 = Eigen::VectorXd::Zero(local);
  Eigen::MatrixXd p2 = Eigen::MatrixXd::Zero(local, local);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    const double w = std::norm(full_state(idx));
    const auto first = idx % local;
    p1(first) += w;
    if (config.N >= 2) p2(first, (idx / local) % local) += w;
  }

  const Eigen::VectorXd m = Eigen::VectorXd::LinSpaced(local, -config.F, config.F);
  Eigen::Matrix<double, Eigen::Dynamic, 2> a(local, 2);
  a.col(0) = m;
  a.col(1) = m.cwiseAbs2();
  const Eigen::RowVector2d mean = p1.transpose() * a;

  ReducedCovariances out;
  out.one_particle = a.transpose() * p1.asDiagonal() * a - mean.transpose() * mean;
  if (config.N >= 2) out.two_particle = a.transpose() * p2 * a - mean.transpose() * mean;
  return out;
}

Eigen::VectorXcd product_state_vector(const SingleAtomState& state, int N) {
  const std::int64_t dim = checked_power(state.dimension(), N);
  Eigen::VectorXcd out(dim);
  const int local = state.dimension();
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rest = idx;
    Complex amp(1.0, 0.0);
    for (int n = 0; n < N; ++n) {
      amp *= state.amplitudes()(rest % local);
      rest /= local;
    }
    out(idx) = amp;
  }
  return out;
}

Eigen::VectorXcd ghz_state_vector(const SingleAtomState& state, int N) {
  const std::int64_t dim = checked_power(state.dimension(), N);
  const int local = state.dimension();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (int i = 0; i < local; ++i) {
    std::int64_t idx = 0;
    for (int n = 0; n < N; ++n) idx = idx * local + i;
    out(idx) += state.amplitudes()(i);
  }
  return out;
}

}  // namespace zeeman
