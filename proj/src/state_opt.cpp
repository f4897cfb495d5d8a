#include "zeeman/state_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "zeeman/golden.hpp"

namespace zeeman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of weighted variances as a function of the population vector w on the
// simplex. Valid off the simplex too, which the finite-difference Hessian uses.
class SimplexObjective {
 public:
  SimplexObjective(int F, double scale, int trials, ObjectiveWeights weights)
      : weights_(weights), scale_(scale * trials) {
    m_ = Eigen::VectorXd::LinSpaced(2 * F + 1, -F, F);
    m2_ = m_.cwiseAbs2();
    m3_ = m2_.cwiseProduct(m_);
    m4_ = m2_.cwiseAbs2();
  }

  double value(const Eigen::VectorXd& w) const {
    const Parts s = parts(w);
    if (!(s.den > 1e-12 * std::max(s.v11 * s.v22, 1e-300))) return kInf;
    return (weights_.p * s.v22 + weights_.q * s.v11) / (scale_ * s.den);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
    const Parts s = parts(w);
    const Eigen::VectorXd d11 = m2_ - 2.0 * s.M1 * m_;
    const Eigen::VectorXd d12 = m3_ - s.M2 * m_ - s.M1 * m2_;
    const Eigen::VectorXd d22 = m4_ - 2.0 * s.M2 * m2_;
    const double num = weights_.p * s.v22 + weights_.q * s.v11;
    const Eigen::VectorXd dnum = weights_.p * d22 + weights_.q * d11;
    const Eigen::VectorXd dden = d11 * s.v22 + s.v11 * d22 - 2.0 * s.v12 * d12;
    return (dnum * s.den - num * dden) / (scale_ * s.den * s.den);
  }

 private:
  struct Parts {
    double M1, M2, v11, v12, v22, den;
  };

  Parts parts(const Eigen::VectorXd& w) const {
    Parts s{};
    s.M1 = w.dot(m_);
    s.M2 = w.dot(m2_);
    const double M3 = w.dot(m3_);
    const double M4 = w.dot(m4_);
    s.v11 = s.M2 - s.M1 * s.M1;
    s.v12 = M3 - s.M1 * s.M2;
    s.v22 = M4 - s.M2 * s.M2;
    s.den = s.v11 * s.v22 - s.v12 * s.v12;
    return s;
  }

  ObjectiveWeights weights_;
  double scale_;
  Eigen::VectorXd m_, m2_, m3_, m4_;
};

// Euclidean projection onto {w >= 0, sum w = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, shift = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) shift = candidate;
  }
  return (v.array() - shift).max(0.0).matrix();
}

struct DescentOutcome {
  Eigen::VectorXd w;
  double value = kInf;
  int iterations = 0;
  bool converged = false;
};

DescentOutcome projected_gradient(const SimplexObjective& obj, Eigen::VectorXd w,
                                  int max_iterations) {
  DescentOutcome out;
  double value = obj.value(w);
  double eta = 1e-2;
  int quiet = 0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd g = obj.gradient(w);
    Eigen::VectorXd trial;
    double trial_value = kInf;
    bool accepted = false;
    while (eta > 1e-300) {
      trial = project_to_simplex(w - eta * g);
      const Eigen::VectorXd step = trial - w;
      if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
      trial_value = obj.value(trial);
      if (trial_value <= value + 1e-4 * g.dot(step)) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double moved = (trial - w).lpNorm<Eigen::Infinity>();
    const double gain = value - trial_value;
    w = std::move(trial);
    value = trial_value;
    eta = std::min(eta * 2.0, 1e6);
    quiet = (moved < 1e-15 || gain <= 1e-17 * std::abs(value)) ? quiet + 1 : 0;
    if (quiet >= 50) {
      out.converged = true;
      break;
    }
  }
  out.w = std::move(w);
  out.value = value;
  out.iterations = it;
  return out;
}

// Newton iterations on the face spanned by the current support, with the
// sum constraint handled through the KKT system.
int polish_on_face(const SimplexObjective& obj, Eigen::VectorXd& w) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > 0.0) support.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  if (k < 2) return 0;

  auto reduced = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd g = obj.gradient(x);
    Eigen::VectorXd gs(k);
    for (Eigen::Index a = 0; a < k; ++a) gs(a) = g(support[a]);
    return Eigen::VectorXd(gs.array() - gs.mean());
  };

  int it = 0;
  double residual = reduced(w).lpNorm<Eigen::Infinity>();
  for (; it < 50 && residual > 0.0; ++it) {
    const Eigen::VectorXd g = obj.gradient(w);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Eigen::Index b = 0; b < k; ++b) {
      const Eigen::Index j = support[b];
      const double h = std::min(1e-6, 0.5 * w(j));
      Eigen::VectorXd up = w, down = w;
      up(j) += h;
      down(j) -= h;
      const Eigen::VectorXd column = (obj.gradient(up) - obj.gradient(down)) / (2.0 * h);
      for (Eigen::Index a = 0; a < k; ++a) kkt(a, b) = column(support[a]);
    }
    kkt.topLeftCorner(k, k) = 0.5 * (kkt.topLeftCorner(k, k) + kkt.topLeftCorner(k, k).transpose());
    kkt.block(0, k, k, 1).setOnes();
    kkt.block(k, 0, 1, k).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    for (Eigen::Index a = 0; a < k; ++a) rhs(a) = -g(support[a]);
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);

    double t = 1.0;
    Eigen::VectorXd trial;
    bool feasible = false;
    for (int halvings = 0; halvings < 40 && !feasible; ++halvings, t *= 0.5) {
      trial = w;
      for (Eigen::Index a = 0; a < k; ++a) trial(support[a]) += t * sol(a);
      feasible = (trial.array() >= 0.0).all() && std::isfinite(obj.value(trial));
      if (feasible) {
        for (Eigen::Index a = 0; a < k; ++a) feasible = feasible && trial(support[a]) > 0.0;
      }
    }
    if (!feasible) break;
    trial /= trial.sum();
    const double next = reduced(trial).lpNorm<Eigen::Infinity>();
    if (!(next < residual)) break;
    w = std::move(trial);
    residual = next;
  }
  return it;
}

// Smallest gradient excess over the face multiplier on zero coordinates;
// negative means a coordinate outside the support would lower the objective.
double kkt_slack(const SimplexObjective& obj, const Eigen::VectorXd& w) {
  const Eigen::VectorXd g = obj.gradient(w);
  double lambda = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > 0.0) {
      lambda += g(i);
      ++count;
    }
  }
  lambda /= std::max(count, 1);
  double slack = kInf;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) == 0.0) slack = std::min(slack, g(i) - lambda);
  }
  return slack / std::max(std::abs(lambda), 1.0);
}

SingleAtomState state_from_populations(int F, const Eigen::VectorXd& w) {
  Eigen::VectorXcd amps = w.cwiseMax(0.0).cwiseSqrt().cast<Complex>();
  amps.normalize();
  return {F, std::move(amps)};
}

OptimizationResult finish(const SpinConfig& config, Ensemble ensemble, SingleAtomState state,
                          int iterations, StateFamily family, const ObjectiveWeights& weights) {
  const PrecisionBound bound =
      qcrb_simultaneous(ensemble_qfim(state, config, ensemble), config.trials);
  OptimizationResult out{std::move(state), bound.sum_variance(weights.p, weights.q), bound,
                         iterations, family, {}};
  if (config.F > 5) {
    out.warnings.push_back("F = " + std::to_string(config.F) +
                           " is outside the validated range 1..5");
  }
  return out;
}

double ensemble_factor(const SpinConfig& config, Ensemble ensemble) {
  const double n = config.N;
  return ensemble == Ensemble::product ? n : n * n;
}

OptimizationResult optimize_three_amplitude(const SpinConfig& config, Ensemble ensemble,
                                            const OptimizerOptions& options) {
  if (options.grid_points < 3) throw DomainError("grid_points must be >= 3");
  auto objective = [&](double x) {
    if (!(x > 0.0 && x < 0.5)) return kInf;
    const SingleAtomState s =
        three_amp_state(config.F, std::sqrt(x), std::sqrt(1.0 - 2.0 * x));
    return qcrb_simultaneous(ensemble_qfim(s, config, ensemble), config.trials)
        .sum_variance(options.weights.p, options.weights.q);
  };
  const int n = options.grid_points;
  const double step = 0.5 / (n + 1);
  int best = 1;
  double best_value = kInf;
  for (int i = 1; i <= n; ++i) {
    const double v = objective(i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const ScalarMinimum refined = golden_section(objective, (best - 1) * step, (best + 1) * step,
                                               options.golden_tolerance);
  double x = best * step;
  if (refined.value <= best_value) x = refined.x;

  // Golden section stalls near sqrt(eps) in x because the objective is flat
  // there. On this family f12 = 0, f11 ~ x and f22 ~ x (1 - 2x), so the
  // objective is a/x + b/(x(1-2x)) and its stationary point solves
  // a u^2 + 2 b u - b = 0 with u = 1 - 2x. Read a, b off the QFIM and polish.
  {
    const Qfim2x2 f = ensemble_qfim(
        three_amp_state(config.F, std::sqrt(x), std::sqrt(1.0 - 2.0 * x)), config, ensemble);
    const double a = options.weights.p * x / f.f11;
    const double b = options.weights.q * x * (1.0 - 2.0 * x) / f.f22;
    if (std::isfinite(a) && std::isfinite(b) && a > 0.0 && b >= 0.0) {
      const double u = b / (b + std::sqrt(b * b + a * b));
      const double polished = 0.5 * (1.0 - u);
      if (polished > 0.0 && polished < 0.5 && objective(polished) <= objective(x) * (1 + 1e-14))
        x = polished;
    }
  }
  const SingleAtomState state = three_amp_state(config.F, std::sqrt(x), std::sqrt(1.0 - 2.0 * x));
  return finish(config, ensemble, state, n + refined.evaluations, StateFamily::three_amplitude,
                options.weights);
}

OptimizationResult optimize_general(const SpinConfig& config, Ensemble ensemble,
                                    const OptimizerOptions& options) {
  if (options.starts < 1) throw DomainError("starts must be >= 1");
  const int F = config.F;
  const int dim = 2 * F + 1;
  const SimplexObjective obj(F, 4.0 * config.T * config.T * ensemble_factor(config, ensemble),
                             config.trials, options.weights);

  std::mt19937_64 rng(options.seed);
  std::exponential_distribution<double> exponential(1.0);

  Eigen::VectorXd best_w;
  double best_value = kInf;
  bool all_converged = true;
  int total_iterations = 0;
  for (int start = 0; start < options.starts; ++start) {
    Eigen::VectorXd w(dim);
    if (start == 0) {
      w.setConstant(1.0 / dim);
    } else {
      for (int i = 0; i < dim; ++i) w(i) = exponential(rng);
      w /= w.sum();
    }
    bool converged = false;
    for (int round = 0; round < 3; ++round) {
      DescentOutcome run = projected_gradient(obj, w, options.max_iterations);
      total_iterations += run.iterations;
      w = std::move(run.w);
      converged = run.converged;
      total_iterations += polish_on_face(obj, w);
      if (kkt_slack(obj, w) > -1e-10) break;
    }
    all_converged = all_converged && converged;
    const double value = obj.value(w);
    if (value < best_value) {
      best_value = value;
      best_w = w;
    }
  }
  if (best_w.size() == 0) {
    throw NumericalError("general optimizer found no point with a finite objective");
  }
  OptimizationResult result = finish(config, ensemble, state_from_populations(F, best_w),
                                     total_iterations, StateFamily::general, options.weights);
  if (!all_converged) {
    throw ConvergenceError("projected gradient reached the iteration cap", std::move(result));
  }
  return result;
}

}  // namespace

const char* to_string(Ensemble ensemble) {
  return ensemble == Ensemble::product ? "product" : "ghz";
}

const char* to_string(StateFamily family) {
  switch (family) {
    case StateFamily::general:
      return "general";
    case StateFamily::three_amplitude:
      return "three_amplitude";
    case StateFamily::coherent_theta:
      return "coherent_theta";
  }
  return "unknown";
}

Qfim2x2 ensemble_qfim(const SingleAtomState& state, const SpinConfig& config, Ensemble ensemble) {
  return ensemble == Ensemble::product ? product_qfim(state, config) : ghz_qfim(state, config);
}

OptimizationResult optimize_sum_variance(const SpinConfig& config, Ensemble ensemble,
                                         StateFamily family, const OptimizerOptions& options) {
  config.validate();
  switch (family) {
    case StateFamily::three_amplitude:
      return optimize_three_amplitude(config, ensemble, options);
    case StateFamily::general:
      return optimize_general(config, ensemble, options);
    case StateFamily::coherent_theta:
      break;
  }
  throw DomainError("optimize_sum_variance: family must be general or three_amplitude");
}

std::vector<ThetaRow> scan_theta(const SpinConfig& config, int samples) {
  config.validate();
  if (samples < 3) throw DomainError("scan_theta: need at least 3 samples");
  std::vector<ThetaRow> rows(samples);
  for (int i = 1; i <= samples; ++i) {
    const double theta = std::numbers::pi * i / (samples + 1);
    const PrecisionBound b =
        qcrb_simultaneous(product_qfim(coherent_state(config.F, theta, 0.0), config), config.trials);
    rows[i - 1] = {theta, b.delta_p, b.delta_q};
  }
  return rows;
}

std::pair<LineFit, LineFit> fit_scaling(const std::vector<ScalingRow>& rows) {
  if (rows.size() < 4) throw DomainError("slope fit refused: need at least 4 N values");
  std::vector<double> n, dp, dq;
  for (const auto& r : rows) {
    n.push_back(r.N);
    dp.push_back(r.delta_p);
    dq.push_back(r.delta_q);
  }
  return {fit_loglog(n, dp), fit_loglog(n, dq)};
}

ScalingTable scan_scaling(int F, const std::vector<int>& N_values, Ensemble ensemble,
                          StateFamily family, const OptimizerOptions& options) {
  if (N_values.size() < 4) throw DomainError("scan_scaling: need at least 4 N values");
  if (!std::is_sorted(N_values.begin(), N_values.end(), std::less_equal<>())) {
    throw DomainError("scan_scaling: N values must be strictly increasing");
  }
  ScalingTable table;
  // The optimal amplitudes do not depend on N, so optimize once at N = 1 and
  // rescale the bound for each N through the QFIM.
  const OptimizationResult opt = optimize_sum_variance({F, 1}, ensemble, family, options);
  for (int N : N_values) {
    const SpinConfig config{F, N};
    config.validate();
    const PrecisionBound b = qcrb_simultaneous(ensemble_qfim(opt.best_state, config, ensemble));
    table.rows.push_back({N, b.delta_p, b.delta_q});
  }
  std::tie(table.fit_p, table.fit_q) = fit_scaling(table.rows);
  return table;
}

PrecisionBound individual_resource_bounds(int F, int N, double T) {
  const SpinConfig single{F, 1, T};
  single.validate();
  if (N < 2) throw DomainError("individual estimation needs N >= 2 to split the atoms");
  const double half = N / 2.0;
  const SingleAtomState p_state = three_amp_state(F, 1.0 / std::numbers::sqrt2, 0.0);
  const SingleAtomState q_state = three_amp_state(F, 0.5, 1.0 / std::numbers::sqrt2);
  const PrecisionBound bp = qcrb_individual(single_atom_qfim(p_state, single) * (half * half));
  const PrecisionBound bq = qcrb_individual(single_atom_qfim(q_state, single) * (half * half));
  return {bp.delta_p, bq.delta_q, EstimationMode::individual};
}

}  // namespace zeeman
