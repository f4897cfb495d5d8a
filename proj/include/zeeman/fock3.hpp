#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "zeeman/qfim.hpp"
#include "zeeman/spin_core.hpp"

namespace zeeman {

/// Zero-magnetization pair-basis state sum_k a_k |k, N-2k, k>, k = 0..N/2.
/// N must be even and at least 2.
class PairState {
 public:
  PairState(int N, Eigen::VectorXcd alphas);

  int N() const { return N_; }
  int pairs() const { return N_ / 2; }
  const Eigen::VectorXcd& alphas() const { return alphas_; }

  /// |k=0> = |0, N, 0>, all atoms in m = 0.
  static PairState polar(int N);
  /// |N/2, 0, N/2>.
  static PairState twin_fock(int N);

 private:
  int N_;
  Eigen::VectorXcd alphas_;
};

/// Throws DomainError unless N is even and >= 2.
void require_even_atom_number(int N);

/// Occupations (n_{+1}, n_0, n_{-1}).
using Occupation = std::array<int, 3>;

inline constexpr int kModePlus = 0;
inline constexpr int kModeZero = 1;
inline constexpr int kModeMinus = 2;

/// (N+1)(N+2)/2.
Eigen::Index fock3_dimension(int N);

/// Position of an occupation in the canonical order: n_{+1} descending, then
/// n_0 descending.
Eigen::Index fock3_index(int N, const Occupation& occ);

/// All occupations with total N, in canonical order.
std::vector<Occupation> fock3_occupations(int N);

/// Pure state on the full three-mode space with fixed total N.
class Fock3State {
 public:
  /// Validates dimension and unit norm (within 1e-10).
  Fock3State(int N, Eigen::VectorXcd amplitudes);

  int N() const { return N_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex amplitude(const Occupation& occ) const { return amplitudes_(fock3_index(N_, occ)); }

  /// <N_mode> for mode index 0 (+1), 1 (0) or 2 (-1).
  double mean_occupation(int mode) const;

 private:
  int N_;
  Eigen::VectorXcd amplitudes_;
};

enum class HamiltonianKind { smd, qpt };

/// Real symmetric tridiagonal matrix in the pair basis.
struct TridiagonalHamiltonian {
  Eigen::VectorXd diag;
  Eigen::VectorXd offdiag;
  HamiltonianKind label = HamiltonianKind::smd;
  double kappa = 0.0;    // smd
  double c2 = 0.0;       // qpt
  double epsilon = 0.0;  // qpt

  Eigen::MatrixXd dense() const;
};

/// kappa (a0+ a0+ a1 a-1 + h.c.) restricted to the pair basis.
TridiagonalHamiltonian smd_hamiltonian(int N, double kappa);

/// (c2/2N)[2 (a0+ a0+ a1 a-1 + h.c.) + (2 N0 - 1)(N - N0)] - epsilon N0.
TridiagonalHamiltonian qpt_hamiltonian(int N, double c2, double epsilon);

/// Exact propagator exp(-i H t) for a fixed tridiagonal Hamiltonian, diagonalized
/// once.
class TridiagonalPropagator {
 public:
  explicit TridiagonalPropagator(const TridiagonalHamiltonian& h);

  /// exp(-i H t) applied to `initial`. Throws NumericalError if the norm drifts
  /// by more than 1e-10.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& initial, double t) const;

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// exp(-i H_smd t) |0, N, 0>.
PairState evolve_smd(int N, double kappa, double t);

struct GroundState {
  PairState state;
  double gap = 0.0;
  bool degenerate = false;  // gap < 1e-12
};

/// Lowest eigenpair and E1 - E0. The largest-magnitude amplitude is made real
/// and positive.
GroundState ground_state_and_gap(const TridiagonalHamiltonian& h);

/// Closed-form simultaneous bounds for the pair state after the +1/-1
/// beam splitter: dp = 1/sqrt(8 sum |a_k|^2 (k + k^2)),
/// dq = 1/sqrt(16 Var(k)).
PrecisionBound pair_qcrb(const PairState& state);

enum class PreparationMethod { smd, qpt };

const char* to_string(PreparationMethod method);

/// Uniform grid over [lo, hi] with `points` samples (lo and hi included).
struct SweepGrid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;

  double at(int i) const { return points == 1 ? lo : lo + (hi - lo) * i / (points - 1); }
};

/// t in [0, 5] with 2000 points (smd), epsilon/|c2| in [-4, 4] step 0.01 (qpt).
SweepGrid default_preparation_grid(PreparationMethod method);

struct PreparationOptions {
  double kappa = 1.0;  // smd coupling
  double c2 = -1.0;    // qpt spin-exchange energy; the sweep variable is epsilon/|c2|
  double golden_tolerance = 1e-10;
};

struct PreparedOptimum {
  PairState state;
  double control = 0.0;  // t (smd) or epsilon/|c2| (qpt)
  PrecisionBound bound;
  double objective = 0.0;
};

/// Pair state produced by `method` at a given control value.
PairState prepare_pair_state(PreparationMethod method, int N, double control,
                             const PreparationOptions& options = {});

/// Best grid point for dp^2 + dq^2, refined by one golden-section search
/// between its neighbours.
PreparedOptimum optimal_prepared_state(PreparationMethod method, int N, const SweepGrid& grid,
                                       const PreparationOptions& options = {});

/// Finite-rate linear ramp of epsilon/|c2| from `start` to `end` over `duration`
/// in `steps` midpoint steps, starting from the ground state at `start`.
/// Throws NumericalError if the accumulated norm drift exceeds 1e-8.
PairState ramp_qpt(int N, double c2, double start, double end, double duration, int steps);

/// Places a_k on |k, N-2k, k>.
Fock3State embed_pair_state(const PairState& state);

/// Reads the amplitudes on |k, N-2k, k> back out. Throws ValidationError if the
/// state has weight outside the pair subspace beyond 1e-10.
PairState project_pair_state(const Fock3State& state);

/// Which two modes a pulse couples.
enum class BeamSplitter {
  pm,  // exp[angle (a+1^dag a-1 - a-1^dag a+1)]
  p0,  // exp[-i angle (a+1^dag a0 + a0^dag a+1)]
  m0,  // exp[-i angle (a-1^dag a0 + a0^dag a-1)]
};

/// Unitary of one pulse on the N-atom space, stored per block of fixed
/// spectator occupation. Each block is exponentiated through the eigenbasis of
/// its Hermitian generator.
class BeamSplitterUnitary {
 public:
  BeamSplitterUnitary(int N, BeamSplitter which, double angle);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& amplitudes) const;
  Fock3State apply(const Fock3State& state) const;
  Eigen::MatrixXcd dense() const;

  int N() const { return N_; }

 private:
  struct Block {
    std::vector<Eigen::Index> indices;
    Eigen::MatrixXcd unitary;
  };
  int N_;
  std::vector<Block> blocks_;
};

Fock3State apply_beam_splitter(const Fock3State& state, BeamSplitter which, double angle);

/// Multiplies each basis amplitude by exp(-i[(n+1 - n-1) p + (n+1 + n-1) q] t).
Fock3State apply_phase_evolution(const Fock3State& state, double p, double q, double t);

/// Closed-form state after the pi/2 +1/-1 pulse and phase imprinting:
/// sum_k a_k sum_m (-1)^{k-m} C_k^m e^{-i[(4m-2k)p + 2kq]t} |2m, N-2k, 2k-2m>.
Fock3State analytic_output_state(const PairState& prepared, double p, double q, double t);

/// C_k^m = sqrt(binom(2m, m) binom(2k-2m, k-m) / 4^k).
double output_coefficient(int k, int m);

/// |<a|b>|.
double overlap_modulus(const Fock3State& a, const Fock3State& b);

/// Diagonals of n+1 - n-1 and n+1 + n-1 in canonical order.
std::pair<Eigen::VectorXd, Eigen::VectorXd> phase_generators(int N);

}  // namespace zeeman
