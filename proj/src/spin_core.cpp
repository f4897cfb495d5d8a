#include "zeeman/spin_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace zeeman {

namespace {

void require_spin(int F) {
  if (F < 1) {
    throw DomainError("spin F must be an integer >= 1, got " + std::to_string(F));
  }
}

// log of the binomial coefficient C(n, k), exact enough for n <= a few hundred
double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void SpinConfig::validate() const {
  require_spin(F);
  if (N < 1) throw DomainError("atom number N must be >= 1, got " + std::to_string(N));
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("evolution duration T must be > 0");
  if (trials < 1) throw DomainError("trials must be >= 1, got " + std::to_string(trials));
}

SingleAtomState::SingleAtomState(int F, Eigen::VectorXcd amplitudes)
    : F_(F), amplitudes_(std::move(amplitudes)) {
  require_spin(F);
  if (amplitudes_.size() != 2 * F + 1) {
    throw ValidationError("spin-" + std::to_string(F) + " state needs " +
                          std::to_string(2 * F + 1) + " amplitudes, got " +
                          std::to_string(amplitudes_.size()));
  }
  const double norm = amplitudes_.squaredNorm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw ValidationError("single-atom state is not normalized: sum |a_m|^2 = " +
                          std::to_string(norm));
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spin_operators(int F) {
  require_spin(F);
  const Eigen::VectorXd m = Eigen::VectorXd::LinSpaced(2 * F + 1, -F, F);
  Eigen::MatrixXd sz = m.asDiagonal();
  Eigen::MatrixXd sz2 = m.cwiseAbs2().asDiagonal();
  return {std::move(sz), std::move(sz2)};
}

MomentSet moments(const SingleAtomState& state) {
  return moments_from_populations(state.populations(), state.F());
}

SingleAtomState uniform_state(int F) {
  require_spin(F);
  const int dim = 2 * F + 1;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
  return {F, std::move(amps)};
}

SingleAtomState coherent_state(int F, double theta, double phi) {
  require_spin(F);
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("coherent_state: theta must lie in [0, pi]");
  }
  const int dim = 2 * F + 1;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  if (theta == std::numbers::pi) {
    amps(0) = 1.0;
    return {F, std::move(amps)};
  }
  // |a_m| = sqrt(C(2F, F-m)) cos^{F+m}(theta/2) sin^{F-m}(theta/2), which is the
  // normalized form of the eps^{F-m} expansion with eps = tan(theta/2) e^{i phi}.
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  for (int m = -F; m <= F; ++m) {
    const int down = F - m;
    const int up = F + m;
    double mag = std::exp(0.5 * log_binomial(2 * F, down));
    mag *= std::pow(c, up) * std::pow(s, down);
    amps(m + F) = std::polar(mag, down * phi);
  }
  amps.normalize();
  return {F, std::move(amps)};
}

SingleAtomState three_amp_state(int F, Complex a_plus, Complex a_zero, double relative_phase) {
  require_spin(F);
  const double norm = 2.0 * std::norm(a_plus) + std::norm(a_zero);
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw ValidationError("three_amp_state: 2|a_F|^2 + |a_0|^2 = " + std::to_string(norm) +
                          ", expected 1");
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(2 * F + 1);
  amps(2 * F) = a_plus;
  amps(F) = a_zero;
  amps(0) = a_plus * std::polar(1.0, relative_phase);
  return {F, std::move(amps)};
}

}  // namespace zeeman
