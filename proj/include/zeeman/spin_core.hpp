#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "zeeman/error.hpp"

namespace zeeman {

using Complex = std::complex<double>;

/// Tolerance used for every normalization check on amplitude vectors.
inline constexpr double kNormTolerance = 1e-12;

/// Ensemble and run parameters shared by the bound computations.
struct SpinConfig {
  int F = 1;
  int N = 1;
  double T = 1.0;
  int trials = 1;

  /// Throws DomainError unless F >= 1, N >= 1, T > 0 and trials >= 1.
  void validate() const;
};

/// Pure state of one spin-F atom. Amplitudes are stored in ascending m order,
/// so index i corresponds to m = i - F.
class SingleAtomState {
 public:
  /// Throws DomainError for F < 1, ValidationError on length or norm mismatch.
  SingleAtomState(int F, Eigen::VectorXcd amplitudes);

  int F() const { return F_; }
  int dimension() const { return 2 * F_ + 1; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  Complex amplitude(int m) const { return amplitudes_(m + F_); }
  Eigen::VectorXd populations() const { return amplitudes_.cwiseAbs2(); }

 private:
  int F_;
  Eigen::VectorXcd amplitudes_;
};

/// Population-weighted moments of m: M_j = sum_m |a_m|^2 m^j.
struct MomentSet {
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;
  double M4 = 0.0;
};

/// Moments of an arbitrary (not necessarily normalized) population vector laid
/// out in ascending m order.
template <typename Derived>
MomentSet moments_from_populations(const Eigen::MatrixBase<Derived>& populations, int F) {
  MomentSet out;
  for (Eigen::Index i = 0; i < populations.size(); ++i) {
    const double m = static_cast<double>(i - F);
    const double w = static_cast<double>(populations(i));
    const double m2 = m * m;
    out.M1 += w * m;
    out.M2 += w * m2;
    out.M3 += w * m2 * m;
    out.M4 += w * m2 * m2;
  }
  return out;
}

/// Diagonal (s_z, s_z^2) for spin F in ascending m order.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spin_operators(int F);

MomentSet moments(const SingleAtomState& state);

SingleAtomState uniform_state(int F);

/// Spin-coherent (binomial) state with polar angle theta in [0, pi] and
/// azimuth phi. theta = pi returns the |F, -F> limit directly.
SingleAtomState coherent_state(int F, double theta, double phi = 0.0);

/// State supported on m in {-F, 0, F} with alpha_F = a_plus,
/// alpha_{-F} = a_plus * exp(i * relative_phase) and alpha_0 = a_zero.
/// Requires 2|a_plus|^2 + |a_zero|^2 = 1.
SingleAtomState three_amp_state(int F, Complex a_plus, Complex a_zero,
                                double relative_phase = 0.0);

}  // namespace zeeman
