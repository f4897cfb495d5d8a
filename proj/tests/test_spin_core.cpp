#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "zeeman/spin_core.hpp"

using namespace zeeman;
using doctest::Approx;

TEST_CASE("spin operators are diagonal in ascending m order") {
  const auto [sz, sz2] = spin_operators(1);
  CHECK(sz.diagonal() == Eigen::Vector3d(-1, 0, 1));
  CHECK(sz2.diagonal() == Eigen::Vector3d(1, 0, 1));
  CHECK(spin_operators(2).second.trace() == 10.0);
  CHECK((sz * sz2 - sz2 * sz).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(spin_operators(0), DomainError);
}

TEST_CASE("moments of named states") {
  const MomentSet u = moments(uniform_state(1));
  CHECK(u.M1 == Approx(0.0));
  CHECK(u.M2 == Approx(2.0 / 3.0));
  CHECK(u.M3 == Approx(0.0));
  CHECK(u.M4 == Approx(2.0 / 3.0));

  for (int F = 1; F <= 5; ++F) {
    const MomentSet top = moments(coherent_state(F, 0.0));
    CHECK(top.M1 == Approx(F));
    CHECK(top.M2 == Approx(F * F));
    CHECK(top.M3 == Approx(F * F * F));
    CHECK(top.M4 == Approx(F * F * F * F));
  }

  // F = 1, theta = pi/2: populations (1/4, 1/2, 1/4).
  const MomentSet c = moments(coherent_state(1, std::numbers::pi / 2));
  CHECK(std::abs(c.M1) < 1e-15);
  CHECK(c.M2 == Approx(0.5));
}

TEST_CASE("uniform moments match closed forms for F = 1..5") {
  for (int F = 1; F <= 5; ++F) {
    const MomentSet m = moments(uniform_state(F));
    const MomentSet ref = testing::summed_uniform_moments(F);
    const double f = F;
    CHECK(m.M2 == Approx(f * (f + 1) / 3).epsilon(1e-13));
    CHECK(m.M4 == Approx(f * (f + 1) * (3 * f * f + 3 * f - 1) / 15).epsilon(1e-13));
    CHECK(m.M2 == Approx(ref.M2).epsilon(1e-13));
    CHECK(m.M4 == Approx(ref.M4).epsilon(1e-13));
    CHECK(std::abs(m.M1) < 1e-14);
    CHECK(std::abs(m.M3) < 1e-12);
    const Eigen::VectorXd w = uniform_state(F).populations();
    CHECK((w.array() - 1.0 / (2 * F + 1)).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("coherent state amplitudes") {
  const auto half = coherent_state(1, std::numbers::pi / 2, 0.0);
  // ascending m: (-1, 0, +1)
  CHECK(half.amplitude(1).real() == Approx(0.5));
  CHECK(half.amplitude(0).real() == Approx(1.0 / std::sqrt(2.0)));
  CHECK(half.amplitude(-1).real() == Approx(0.5));

  for (int F = 1; F <= 5; ++F) {
    CHECK(std::abs(coherent_state(F, 0.0).amplitude(F)) == Approx(1.0));
    CHECK(std::abs(coherent_state(F, std::numbers::pi).amplitude(-F)) == Approx(1.0));
  }
  CHECK_THROWS_AS(coherent_state(2, -0.1), DomainError);
  CHECK_THROWS_AS(coherent_state(2, 3.2), DomainError);
}

TEST_CASE("coherent state expansion agrees with the eps^(F-m) form") {
  // (1 + |eps|^2)^{-F} sqrt((2F)! / ((F-m)! (F+m)!)) eps^{F-m}
  const int F = 3;
  const double theta = 1.1, phi = 0.7;
  const Complex eps = std::tan(theta / 2) * std::polar(1.0, phi);
  const auto s = coherent_state(F, theta, phi);
  for (int m = -F; m <= F; ++m) {
    const double fact = std::tgamma(2 * F + 1.0) / (std::tgamma(F - m + 1.0) * std::tgamma(F + m + 1.0));
    const Complex expected = std::pow(1.0 + std::norm(eps), -F) * std::sqrt(fact) * std::pow(eps, F - m);
    CHECK(std::abs(s.amplitude(m) - expected) < 1e-13);
  }
}

TEST_CASE("azimuth leaves the coherent populations unchanged") {
  for (int F = 1; F <= 5; ++F) {
    for (double theta : {0.3, 1.0, std::numbers::pi / 2, 2.5}) {
      const Eigen::VectorXd ref = coherent_state(F, theta, 0.0).populations();
      for (double phi : {0.4, 2.0, 5.9}) {
        CHECK((coherent_state(F, theta, phi).populations() - ref).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
  }
}

TEST_CASE("three-amplitude states") {
  const auto p_state = three_amp_state(2, 1.0 / std::sqrt(2.0), 0.0);
  CHECK(std::abs(p_state.amplitude(2)) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(p_state.amplitude(-2)) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(p_state.amplitude(0)) == 0.0);

  const auto q_state = three_amp_state(1, 0.5, 1.0 / std::sqrt(2.0));
  CHECK(q_state.amplitude(1) == q_state.amplitude(-1));

  const auto phased = three_amp_state(3, 0.5, 1.0 / std::sqrt(2.0), 1.3);
  CHECK(std::arg(phased.amplitude(-3)) == Approx(1.3));
  CHECK((phased.populations() - three_amp_state(3, 0.5, 1.0 / std::sqrt(2.0)).populations())
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  CHECK_THROWS_AS(three_amp_state(1, 0.6, 0.6), ValidationError);
}

TEST_CASE("every family is normalized and bad input is rejected") {
  std::mt19937_64 rng(testing::kSeed);
  for (int F = 1; F <= 5; ++F) {
    CHECK(uniform_state(F).amplitudes().squaredNorm() == Approx(1.0).epsilon(1e-12));
    for (double theta = 0.0; theta <= std::numbers::pi; theta += 0.1) {
      CHECK(std::abs(coherent_state(F, theta).amplitudes().squaredNorm() - 1.0) < 1e-12);
    }
    CHECK(std::abs(testing::random_single_atom_state(F, rng).amplitudes().squaredNorm() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(SingleAtomState(1, Eigen::VectorXcd::Ones(3)), ValidationError);
  CHECK_THROWS_AS(SingleAtomState(1, Eigen::VectorXcd::Ones(2)), ValidationError);
  CHECK_THROWS_AS(uniform_state(0), DomainError);
  CHECK_THROWS_AS((SpinConfig{1, 1, 0.0, 1}.validate()), DomainError);
  CHECK_THROWS_AS((SpinConfig{1, 0}.validate()), DomainError);
  CHECK_THROWS_AS((SpinConfig{1, 1, 1.0, 0}.validate()), DomainError);
}

TEST_CASE("moment inequalities hold for random states") {
  std::mt19937_64 rng(testing::kSeed + 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int F = 1 + trial % 5;
    const MomentSet m = moments(testing::random_single_atom_state(F, rng));
    CHECK(m.M2 >= m.M1 * m.M1 - 1e-12);
    CHECK(m.M4 >= m.M2 * m.M2 - 1e-12);
    CHECK(m.M2 <= F * F + 1e-12);
    CHECK(m.M4 <= std::pow(F, 4) + 1e-12);
  }
}
