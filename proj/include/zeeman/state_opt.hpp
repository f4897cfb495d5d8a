#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zeeman/error.hpp"
#include "zeeman/fit.hpp"
#include "zeeman/qfim.hpp"
#include "zeeman/spin_core.hpp"

namespace zeeman {

enum class Ensemble { product, ghz };
enum class StateFamily { general, three_amplitude, coherent_theta };

const char* to_string(Ensemble ensemble);
const char* to_string(StateFamily family);

/// Weights of the objective w_p * dp^2 + w_q * dq^2. The unweighted sum mixes
/// the units of p and q; (1, 1) is the default.
struct ObjectiveWeights {
  double p = 1.0;
  double q = 1.0;
};

struct OptimizerOptions {
  ObjectiveWeights weights{};
  int starts = 32;                 // general family: seeded multi-start count
  int grid_points = 10'000;        // three-amplitude family: bracketing grid
  double golden_tolerance = 1e-12;
  int max_iterations = 200'000;    // per start, projected-gradient steps
  std::uint64_t seed = 0x5eed'2019'f00dULL;
};

struct OptimizationResult {
  SingleAtomState best_state;
  double objective = 0.0;
  PrecisionBound bound;
  int iterations = 0;
  StateFamily family = StateFamily::general;
  std::vector<std::string> warnings;
};

/// Raised when the optimizer hits its iteration cap. Carries the best point
/// found so far.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, OptimizationResult best)
      : NumericalError(what), best_(std::move(best)) {}
  const OptimizationResult& best_so_far() const { return best_; }

 private:
  OptimizationResult best_;
};

/// QFIM of `state` under the given ensemble (product: N F_S, GHZ: N^2 F_S).
Qfim2x2 ensemble_qfim(const SingleAtomState& state, const SpinConfig& config, Ensemble ensemble);

/// Minimizes w_p dp^2 + w_q dq^2 over single-atom amplitudes. Amplitudes are
/// taken real and non-negative since only |a_m|^2 enters the QFIM.
///
/// three_amplitude: 1-D search over |a_F|^2 in (0, 1/2), grid then golden
/// section. general: projected-gradient descent on the population simplex
/// from `starts` seeded points, each finished with Newton steps on the
/// active face.
OptimizationResult optimize_sum_variance(const SpinConfig& config, Ensemble ensemble,
                                         StateFamily family, const OptimizerOptions& options = {});

struct ThetaRow {
  double theta = 0.0;
  double delta_p = 0.0;
  double delta_q = 0.0;
};

/// Product-ensemble bounds of coherent_state(F, theta, 0) on the interior grid
/// theta_i = pi i / (samples + 1), i = 1..samples.
std::vector<ThetaRow> scan_theta(const SpinConfig& config, int samples);

struct ScalingRow {
  int N = 0;
  double delta_p = 0.0;
  double delta_q = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  LineFit fit_p;
  LineFit fit_q;
};

/// Least-squares log-log slopes of the rows' bounds against N. Refuses fewer
/// than four rows.
std::pair<LineFit, LineFit> fit_scaling(const std::vector<ScalingRow>& rows);

/// Optimized bounds for each N plus fitted slopes. N values must be strictly
/// increasing and at least four.
ScalingTable scan_scaling(int F, const std::vector<int>& N_values, Ensemble ensemble,
                          StateFamily family, const OptimizerOptions& options = {});

/// Individual-estimation GHZ bounds with N/2 atoms spent on each parameter:
/// dp from (|F,F> + |F,-F>)/sqrt2, dq from (|F,F> + sqrt2 |F,0> + |F,-F>)/2.
PrecisionBound individual_resource_bounds(int F, int N, double T = 1.0);

}  // namespace zeeman
