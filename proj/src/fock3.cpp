#include "zeeman/fock3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "zeeman/golden.hpp"

namespace zeeman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Matrix element of a0^dag a0^dag a+1 a-1 between |k> and |k-1>.
double pair_hop(int N, int k) {
  return k * std::sqrt(static_cast<double>(N - 2 * k + 1) * (N - 2 * k + 2));
}

}  // namespace

void require_even_atom_number(int N) {
  if (N < 2 || N % 2 != 0) {
    throw DomainError("pair-basis operations need an even atom number N >= 2, got " +
                      std::to_string(N));
  }
}

PairState::PairState(int N, Eigen::VectorXcd alphas) : N_(N), alphas_(std::move(alphas)) {
  require_even_atom_number(N);
  if (alphas_.size() != N / 2 + 1) {
    throw ValidationError("pair state for N = " + std::to_string(N) + " needs " +
                          std::to_string(N / 2 + 1) + " amplitudes, got " +
                          std::to_string(alphas_.size()));
  }
  const double norm = alphas_.squaredNorm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw ValidationError("pair state is not normalized: sum |a_k|^2 = " + std::to_string(norm));
  }
}

PairState PairState::polar(int N) {
  require_even_atom_number(N);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(N / 2 + 1);
  a(0) = 1.0;
  return {N, std::move(a)};
}

PairState PairState::twin_fock(int N) {
  require_even_atom_number(N);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(N / 2 + 1);
  a(N / 2) = 1.0;
  return {N, std::move(a)};
}

Eigen::Index fock3_dimension(int N) {
  if (N < 0) throw DomainError("atom number must be non-negative");
  return static_cast<Eigen::Index>(N + 1) * (N + 2) / 2;
}

Eigen::Index fock3_index(int N, const Occupation& occ) {
  const auto [n1, n0, nm1] = occ;
  if (n1 < 0 || n0 < 0 || nm1 < 0 || n1 + n0 + nm1 != N) {
    throw ValidationError("occupation does not sum to N = " + std::to_string(N));
  }
  const Eigen::Index r = N - n1;
  return r * (r + 1) / 2 + (r - n0);
}

std::vector<Occupation> fock3_occupations(int N) {
  std::vector<Occupation> out;
  out.reserve(static_cast<std::size_t>(fock3_dimension(N)));
  for (int n1 = N; n1 >= 0; --n1) {
    for (int n0 = N - n1; n0 >= 0; --n0) out.push_back({n1, n0, N - n1 - n0});
  }
  return out;
}

Fock3State::Fock3State(int N, Eigen::VectorXcd amplitudes)
    : N_(N), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != fock3_dimension(N)) {
    throw ValidationError("three-mode state for N = " + std::to_string(N) + " needs " +
                          std::to_string(fock3_dimension(N)) + " amplitudes");
  }
  const double norm = amplitudes_.squaredNorm();
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    throw ValidationError("three-mode state is not normalized: norm^2 = " + std::to_string(norm));
  }
}

double Fock3State::mean_occupation(int mode) const {
  const auto occ = fock3_occupations(N_);
  double mean = 0.0;
  for (std::size_t i = 0; i < occ.size(); ++i) mean += std::norm(amplitudes_(i)) * occ[i][mode];
  return mean;
}

Eigen::MatrixXd TridiagonalHamiltonian::dense() const {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd h = diag.asDiagonal();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = offdiag(i);
    h(i + 1, i) = offdiag(i);
  }
  return h;
}

TridiagonalHamiltonian smd_hamiltonian(int N, double kappa) {
  require_even_atom_number(N);
  const int K = N / 2 + 1;
  TridiagonalHamiltonian h;
  h.label = HamiltonianKind::smd;
  h.kappa = kappa;
  h.diag = Eigen::VectorXd::Zero(K);
  h.offdiag.resize(K - 1);
  for (int k = 1; k < K; ++k) h.offdiag(k - 1) = kappa * pair_hop(N, k);
  return h;
}

TridiagonalHamiltonian qpt_hamiltonian(int N, double c2, double epsilon) {
  require_even_atom_number(N);
  if (c2 == 0.0) throw DomainError("qpt_hamiltonian: c2 must be non-zero");
  const int K = N / 2 + 1;
  const double prefactor = c2 / (2.0 * N);
  TridiagonalHamiltonian h;
  h.label = HamiltonianKind::qpt;
  h.c2 = c2;
  h.epsilon = epsilon;
  h.diag.resize(K);
  h.offdiag.resize(K - 1);
  for (int k = 0; k < K; ++k) {
    const double n0 = N - 2 * k;
    h.diag(k) = prefactor * (2.0 * n0 - 1.0) * (2.0 * k) - epsilon * n0;
  }
  for (int k = 1; k < K; ++k) h.offdiag(k - 1) = 2.0 * prefactor * pair_hop(N, k);
  return h;
}

TridiagonalPropagator::TridiagonalPropagator(const TridiagonalHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(h.diag, h.offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("tridiagonal eigensolver failed to converge");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd TridiagonalPropagator::evolve(const Eigen::VectorXcd& initial, double t) const {
  const Eigen::VectorXcd coeffs = eigenvectors_.transpose().cast<Complex>() * initial;
  Eigen::VectorXcd phases(eigenvalues_.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -eigenvalues_(i) * t);
  Eigen::VectorXcd out = eigenvectors_.cast<Complex>() * phases.cwiseProduct(coeffs);
  if (std::abs(out.squaredNorm() - initial.squaredNorm()) > 1e-10) {
    throw NumericalError("tridiagonal propagation lost unitarity");
  }
  return out;
}

PairState evolve_smd(int N, double kappa, double t) {
  if (t < 0.0) throw DomainError("evolve_smd: t must be >= 0");
  const TridiagonalPropagator prop(smd_hamiltonian(N, kappa));
  Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(N / 2 + 1);
  initial(0) = 1.0;
  Eigen::VectorXcd out = prop.evolve(initial, t);
  out.normalize();
  return {N, std::move(out)};
}

GroundState ground_state_and_gap(const TridiagonalHamiltonian& h) {
  const Eigen::Index K = h.diag.size();
  const int N = static_cast<int>(2 * (K - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(h.diag, h.offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("tridiagonal eigensolver failed to converge");
  }
  Eigen::VectorXd v = solver.eigenvectors().col(0);
  Eigen::Index largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  if (v(largest) < 0.0) v = -v;
  v.normalize();
  const double gap = K > 1 ? solver.eigenvalues()(1) - solver.eigenvalues()(0) : kInf;
  return {PairState(N, v.cast<Complex>()), gap, gap < 1e-12};
}

PrecisionBound pair_qcrb(const PairState& state) {
  const Eigen::VectorXd w = state.alphas().cwiseAbs2();
  const Eigen::VectorXd k = Eigen::VectorXd::LinSpaced(w.size(), 0.0, static_cast<double>(w.size() - 1));
  const double p_info = 8.0 * w.dot(k + k.cwiseAbs2());
  const double mean_k = w.dot(k);
  const Eigen::VectorXd centered = k.array() - mean_k;
  const double q_info = 16.0 * w.dot(centered.cwiseAbs2());
  const double q_scale = 16.0 * w.dot(k.cwiseAbs2());

  PrecisionBound out;
  out.mode = EstimationMode::simultaneous;
  if (p_info > 1e-12) out.delta_p = 1.0 / std::sqrt(p_info);
  if (q_info > 1e-12 * std::max(q_scale, 1.0)) out.delta_q = 1.0 / std::sqrt(q_info);
  return out;
}

const char* to_string(PreparationMethod method) {
  return method == PreparationMethod::smd ? "smd" : "qpt";
}

SweepGrid default_preparation_grid(PreparationMethod method) {
  if (method == PreparationMethod::smd) return {0.0, 5.0, 2000};
  return {-4.0, 4.0, 801};
}

PairState prepare_pair_state(PreparationMethod method, int N, double control,
                             const PreparationOptions& options) {
  if (method == PreparationMethod::smd) return evolve_smd(N, options.kappa, control);
  return ground_state_and_gap(qpt_hamiltonian(N, options.c2, control * std::abs(options.c2))).state;
}

PreparedOptimum optimal_prepared_state(PreparationMethod method, int N, const SweepGrid& grid,
                                       const PreparationOptions& options) {
  require_even_atom_number(N);
  if (grid.points < 1) throw DomainError("optimal_prepared_state: empty control grid");
  if (method == PreparationMethod::smd && grid.lo < 0.0) {
    throw DomainError("optimal_prepared_state: smd times must be >= 0");
  }

  std::optional<TridiagonalPropagator> smd;
  Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(N / 2 + 1);
  initial(0) = 1.0;
  if (method == PreparationMethod::smd) smd.emplace(smd_hamiltonian(N, options.kappa));

  auto state_at = [&](double x) {
    if (smd) {
      Eigen::VectorXcd a = smd->evolve(initial, x);
      a.normalize();
      return PairState(N, std::move(a));
    }
    return prepare_pair_state(method, N, x, options);
  };
  auto objective = [&](double x) { return pair_qcrb(state_at(x)).sum_variance(); };

  int best = 0;
  double best_value = kInf;
  for (int i = 0; i < grid.points; ++i) {
    const double v = objective(grid.at(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double control = grid.at(best);
  if (grid.points > 1) {
    const double lo = grid.at(std::max(best - 1, 0));
    const double hi = grid.at(std::min(best + 1, grid.points - 1));
    const ScalarMinimum refined = golden_section(objective, lo, hi, options.golden_tolerance);
    if (refined.value < best_value) control = refined.x;
  }
  PairState state = state_at(control);
  const PrecisionBound bound = pair_qcrb(state);
  return {std::move(state), control, bound, bound.sum_variance()};
}

PairState ramp_qpt(int N, double c2, double start, double end, double duration, int steps) {
  if (steps < 1 || !(duration > 0.0)) throw DomainError("ramp_qpt: need steps >= 1 and duration > 0");
  const double scale = std::abs(c2);
  Eigen::VectorXcd psi = ground_state_and_gap(qpt_hamiltonian(N, c2, start * scale)).state.alphas();
  const double dt = duration / steps;
  for (int j = 0; j < steps; ++j) {
    const double x = start + (end - start) * (j + 0.5) / steps;
    psi = TridiagonalPropagator(qpt_hamiltonian(N, c2, x * scale)).evolve(psi, dt);
  }
  const double drift = std::abs(psi.squaredNorm() - 1.0);
  if (drift > 1e-8) {
    throw NumericalError("ramp_qpt: norm drift " + std::to_string(drift) + " exceeds 1e-8");
  }
  psi.normalize();
  return {N, std::move(psi)};
}

Fock3State embed_pair_state(const PairState& state) {
  const int N = state.N();
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(fock3_dimension(N));
  for (int k = 0; k <= state.pairs(); ++k) amps(fock3_index(N, {k, N - 2 * k, k})) = state.alphas()(k);
  return {N, std::move(amps)};
}

PairState project_pair_state(const Fock3State& state) {
  const int N = state.N();
  require_even_atom_number(N);
  Eigen::VectorXcd alphas(N / 2 + 1);
  for (int k = 0; k <= N / 2; ++k) alphas(k) = state.amplitude({k, N - 2 * k, k});
  const double outside = 1.0 - alphas.squaredNorm();
  if (outside > 1e-10) {
    throw ValidationError("state has weight " + std::to_string(outside) +
                          " outside the pair subspace");
  }
  alphas.normalize();
  return {N, std::move(alphas)};
}

BeamSplitterUnitary::BeamSplitterUnitary(int N, BeamSplitter which, double angle) : N_(N) {
  if (N < 0) throw DomainError("atom number must be non-negative");
  int a = kModePlus, b = kModeMinus, spectator = kModeZero;
  if (which == BeamSplitter::p0) {
    b = kModeZero;
    spectator = kModeMinus;
  } else if (which == BeamSplitter::m0) {
    a = kModeMinus;
    b = kModeZero;
    spectator = kModePlus;
  }

  for (int fixed = 0; fixed <= N; ++fixed) {
    const int M = N - fixed;
    Block block;
    block.indices.resize(M + 1);
    for (int na = 0; na <= M; ++na) {
      Occupation occ{};
      occ[spectator] = fixed;
      occ[a] = na;
      occ[b] = M - na;
      block.indices[na] = fock3_index(N, occ);
    }
    // Hop X = a_a^dag a_b within the block: X(na+1, na) = sqrt((na+1)(M-na)).
    Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(M + 1, M + 1);
    for (int na = 0; na < M; ++na) hop(na + 1, na) = std::sqrt((na + 1.0) * (M - na));
    // U = exp(G) = exp(-i H) with H = i G Hermitian.
    Eigen::MatrixXcd h;
    if (which == BeamSplitter::pm) {
      h = Complex(0.0, angle) * (hop - hop.transpose()).cast<Complex>();
    } else {
      h = (angle * (hop + hop.transpose())).cast<Complex>();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("beam-splitter generator diagonalization failed");
    }
    Eigen::VectorXcd phases(M + 1);
    for (int i = 0; i <= M; ++i) phases(i) = std::polar(1.0, -solver.eigenvalues()(i));
    block.unitary = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    const double defect =
        (block.unitary.adjoint() * block.unitary - Eigen::MatrixXcd::Identity(M + 1, M + 1))
            .lpNorm<Eigen::Infinity>();
    if (defect > 1e-10) {
      throw NumericalError("beam-splitter exponential violates unitarity by " +
                           std::to_string(defect));
    }
    blocks_.push_back(std::move(block));
  }
}

Eigen::VectorXcd BeamSplitterUnitary::apply(const Eigen::VectorXcd& amplitudes) const {
  if (amplitudes.size() != fock3_dimension(N_)) {
    throw ValidationError("beam splitter applied to a state of the wrong dimension");
  }
  Eigen::VectorXcd out(amplitudes.size());
  for (const Block& block : blocks_) {
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    Eigen::VectorXcd local(n);
    for (Eigen::Index i = 0; i < n; ++i) local(i) = amplitudes(block.indices[i]);
    const Eigen::VectorXcd mapped = block.unitary * local;
    for (Eigen::Index i = 0; i < n; ++i) out(block.indices[i]) = mapped(i);
  }
  return out;
}

Fock3State BeamSplitterUnitary::apply(const Fock3State& state) const {
  if (state.N() != N_) throw ValidationError("beam splitter built for a different N");
  return {N_, apply(state.amplitudes())};
}

Eigen::MatrixXcd BeamSplitterUnitary::dense() const {
  const Eigen::Index dim = fock3_dimension(N_);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const Block& block : blocks_) {
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) out(block.indices[i], block.indices[j]) = block.unitary(i, j);
    }
  }
  return out;
}

Fock3State apply_beam_splitter(const Fock3State& state, BeamSplitter which, double angle) {
  return BeamSplitterUnitary(state.N(), which, angle).apply(state);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> phase_generators(int N) {
  const auto occ = fock3_occupations(N);
  Eigen::VectorXd g1(occ.size()), g2(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    g1(i) = occ[i][kModePlus] - occ[i][kModeMinus];
    g2(i) = occ[i][kModePlus] + occ[i][kModeMinus];
  }
  return {std::move(g1), std::move(g2)};
}

Fock3State apply_phase_evolution(const Fock3State& state, double p, double q, double t) {
  const auto [g1, g2] = phase_generators(state.N());
  Eigen::VectorXcd out = state.amplitudes();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, -(g1(i) * p + g2(i) * q) * t);
  return {state.N(), std::move(out)};
}

double output_coefficient(int k, int m) {
  if (k < 0 || m < 0 || m > k) throw DomainError("output_coefficient needs 0 <= m <= k");
  return std::exp(0.5 * (log_binomial(2 * m, m) + log_binomial(2 * k - 2 * m, k - m)) -
                  k * std::log(2.0));
}

Fock3State analytic_output_state(const PairState& prepared, double p, double q, double t) {
  const int N = prepared.N();
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(fock3_dimension(N));
  for (int k = 0; k <= prepared.pairs(); ++k) {
    const Complex ak = prepared.alphas()(k);
    if (ak == Complex(0.0)) continue;
    for (int m = 0; m <= k; ++m) {
      const double sign = ((k - m) % 2 == 0) ? 1.0 : -1.0;
      const double phase = -((4.0 * m - 2.0 * k) * p + 2.0 * k * q) * t;
      amps(fock3_index(N, {2 * m, N - 2 * k, 2 * k - 2 * m})) +=
          ak * sign * output_coefficient(k, m) * std::polar(1.0, phase);
    }
  }
  return {N, std::move(amps)};
}

double overlap_modulus(const Fock3State& a, const Fock3State& b) {
  if (a.N() != b.N()) throw ValidationError("overlap of states with different N");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace zeeman
