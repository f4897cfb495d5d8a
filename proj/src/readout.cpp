#include "zeeman/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace zeeman {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

}  // namespace

const char* to_string(Observable observable) {
  return observable == Observable::sq_p0 ? "sq_p0" : "sq_m0";
}

Eigen::VectorXd observable_diagonal(int N, Observable observable) {
  const auto occ = fock3_occupations(N);
  const int mode = observable == Observable::sq_p0 ? kModePlus : kModeMinus;
  Eigen::VectorXd d(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const double diff = occ[i][mode] - occ[i][kModeZero];
    d(i) = diff * diff;
  }
  return d;
}

Interferometer::Interferometer(const PairState& prepared) : N_(prepared.N()) {
  probe_ = BeamSplitterUnitary(N_, BeamSplitter::pm, kQuarterPi)
               .apply(embed_pair_state(prepared).amplitudes());
  recombine_ = BeamSplitterUnitary(N_, BeamSplitter::m0, kQuarterPi).dense() *
               BeamSplitterUnitary(N_, BeamSplitter::p0, kQuarterPi).dense();
  std::tie(g1_, g2_) = phase_generators(N_);
}

Fock3State Interferometer::output_state(double p, double q, double t) const {
  Eigen::VectorXcd out = probe_;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, -(g1_(i) * p + g2_(i) * q) * t);
  return {N_, std::move(out)};
}

Fock3State Interferometer::final_state(double p, double q, double t) const {
  return {N_, recombine_ * output_state(p, q, t).amplitudes()};
}

Fock3State final_state(const PairState& prepared, double p, double q, double t) {
  const int N = prepared.N();
  Fock3State s = apply_beam_splitter(embed_pair_state(prepared), BeamSplitter::pm, kQuarterPi);
  s = apply_phase_evolution(s, p, q, t);
  s = apply_beam_splitter(s, BeamSplitter::p0, kQuarterPi);
  s = apply_beam_splitter(s, BeamSplitter::m0, kQuarterPi);
  if (s.N() != N) throw NumericalError("final_state changed the atom number");
  return s;
}

MeanStd expectation_and_std(const Fock3State& state, Observable observable) {
  const Eigen::VectorXd d = observable_diagonal(state.N(), observable);
  const Eigen::VectorXd w = state.amplitudes().cwiseAbs2();
  const double mean = w.dot(d);
  const Eigen::VectorXd centered = d.array() - mean;
  return {mean, std::sqrt(w.dot(centered.cwiseAbs2()))};
}

TimeGrid default_time_grid(double p_guess, int samples) {
  if (!(std::abs(p_guess) > 0.0)) throw DomainError("default_time_grid: p_guess must be non-zero");
  return {0.0, 2.0 * std::numbers::pi / (16.0 * std::abs(p_guess)), samples};
}

double SignalSeries::step() const {
  if (times.size() < 2) throw ValidationError("series needs at least two samples");
  const double step = times(1) - times(0);
  if (!(step > 0.0)) throw ValidationError("series times must be strictly increasing");
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    const double expected = times(0) + step * static_cast<double>(i);
    if (std::abs(times(i) - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      throw ValidationError("series times are not uniformly spaced");
    }
  }
  return step;
}

SignalPair signal_sweep(const PairState& prepared, double p, double q, const TimeGrid& grid,
                        double p_guess) {
  if (grid.samples < 2 || !(grid.step > 0.0)) {
    throw DomainError("signal_sweep: need at least two samples and a positive step");
  }
  if (!(std::abs(p_guess) > 0.0)) throw DomainError("signal_sweep: p_guess must be non-zero");
  const Interferometer interferometer(prepared);
  const Eigen::VectorXd d_p0 = observable_diagonal(prepared.N(), Observable::sq_p0);
  const Eigen::VectorXd d_m0 = observable_diagonal(prepared.N(), Observable::sq_m0);

  SignalPair out;
  out.sq_p0.observable = Observable::sq_p0;
  out.sq_m0.observable = Observable::sq_m0;
  out.sq_p0.times.resize(grid.samples);
  out.sq_p0.values.resize(grid.samples);
  out.sq_m0.values.resize(grid.samples);
  for (int i = 0; i < grid.samples; ++i) {
    const double t = grid.start + grid.step * i;
    const Eigen::VectorXd w = interferometer.final_state(p, q, t).amplitudes().cwiseAbs2();
    out.sq_p0.times(i) = t;
    out.sq_p0.values(i) = w.dot(d_p0);
    out.sq_m0.values(i) = w.dot(d_m0);
  }
  out.sq_m0.times = out.sq_p0.times;
  const double omega_expect = 4.0 * std::abs(p_guess);
  const bool aliased = grid.step > std::numbers::pi / (2.0 * omega_expect);
  out.sq_p0.nyquist_warning = aliased;
  out.sq_m0.nyquist_warning = aliased;
  return out;
}

AnalyticExpectations analytic_expectations(const PairState& prepared, double p, double q, double t) {
  const int N = prepared.N();
  const Eigen::VectorXcd& a = prepared.alphas();
  AnalyticExpectations out;
  for (int k = 0; k <= prepared.pairs(); ++k) {
    const double w = std::norm(a(k));
    const double kk = k;
    out.C01 += w * (-9.0 / 32.0 * kk - 57.0 / 32.0 * kk * kk + N * kk + 11.0 / 16.0 * N +
                    N * static_cast<double>(N) / 16.0);
    // k/2 sits inside the sum: outside it, k would be unbound.
    out.C02 += w * 0.5 * kk * (N + 2.0 * N * kk - 3.0 * kk * kk);
    out.C1 += w * (kk + kk * kk);
  }
  for (int k = 0; k < prepared.pairs(); ++k) {
    out.C2 += std::conj(a(k + 1)) * a(k) *
              std::sqrt(static_cast<double>(N - 2 * k - 1) * (N - 2 * k)) * (1.0 + k);
  }
  const double fast = 4.0 * p * t;
  const double minus = -2.0 * p * t + 2.0 * q * t;
  const double plus = 2.0 * p * t + 2.0 * q * t;
  const double re = out.C2.real();
  const double im = out.C2.imag();
  out.mean_sq_p0 = out.C01 - 0.125 * out.C1 * std::cos(fast) +
                   re * (0.25 * std::cos(minus) - 9.0 / 8.0 * std::cos(plus)) +
                   im * (-0.25 * std::sin(minus) - 9.0 / 8.0 * std::sin(plus));
  out.mean_sq_m0 = out.C02 - 0.5 * out.C1 * std::cos(fast) + re * std::cos(minus) -
                   im * (-0.25 * std::sin(minus));
  return out;
}

ExpectationComparison compare_analytic_expectations(const PairState& prepared, double p, double q,
                                                    double t) {
  const Fock3State f = final_state(prepared, p, q, t);
  const AnalyticExpectations a = analytic_expectations(prepared, p, q, t);
  return {expectation_and_std(f, Observable::sq_p0).mean,
          expectation_and_std(f, Observable::sq_m0).mean, a.mean_sq_p0, a.mean_sq_m0};
}

Eigen::VectorXcd unitary_dft(const Eigen::VectorXd& values) {
  Eigen::FFT<double> fft;
  std::vector<double> in(values.data(), values.data() + values.size());
  std::vector<Complex> out;
  fft.fwd(out, in);
  Eigen::VectorXcd spectrum = Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
  return spectrum / std::sqrt(static_cast<double>(values.size()));
}

Spectrum magnitude_spectrum(const SignalSeries& series, bool hann) {
  const double step = series.step();
  const Eigen::Index n = series.values.size();
  if (series.times.size() != n) throw ValidationError("series times and values differ in length");
  Eigen::VectorXd x = series.values.array() - series.values.mean();
  if (hann) {
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(n));
    }
  }
  const Eigen::VectorXcd X = unitary_dft(x);
  Spectrum s;
  s.resolution = 2.0 * std::numbers::pi / (static_cast<double>(n) * step);
  const Eigen::Index half = n / 2 + 1;
  s.omega.resize(half);
  s.magnitude.resize(half);
  for (Eigen::Index j = 0; j < half; ++j) {
    s.omega(j) = s.resolution * static_cast<double>(j);
    s.magnitude(j) = std::abs(X(j));
  }
  return s;
}

std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, double significance) {
  const Eigen::Index n = spectrum.magnitude.size();
  std::vector<SpectralPeak> peaks;
  if (n < 3) return peaks;
  const double threshold =
      significance * median(std::vector<double>(spectrum.magnitude.data() + 1,
                                                spectrum.magnitude.data() + n));
  for (Eigen::Index j = 1; j + 1 < n; ++j) {
    const double left = spectrum.magnitude(j - 1);
    const double mid = spectrum.magnitude(j);
    const double right = spectrum.magnitude(j + 1);
    if (!(mid > left && mid >= right && mid > threshold)) continue;
    const double curvature = left - 2.0 * mid + right;
    const double offset = curvature != 0.0 ? 0.5 * (left - right) / curvature : 0.0;
    peaks.push_back({spectrum.resolution * (static_cast<double>(j) + offset), mid, static_cast<int>(j)});
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) { return a.omega > b.omega; });
  return peaks;
}

FftEstimate fft_estimate(const SignalSeries& sq_p0, const SignalSeries& sq_m0,
                         const FftOptions& options) {
  if (sq_p0.values.size() < 256 || sq_m0.values.size() < 256) {
    throw DomainError("fft_estimate: series need at least 256 samples");
  }
  if (sq_p0.times.size() != sq_m0.times.size() ||
      (sq_p0.times - sq_m0.times).lpNorm<Eigen::Infinity>() > 0.0) {
    throw ValidationError("fft_estimate: series must share one time grid");
  }
  const Spectrum s_p0 = magnitude_spectrum(sq_p0, options.hann);
  const Spectrum s_m0 = magnitude_spectrum(sq_m0, options.hann);

  FftEstimate est;
  est.resolution = s_m0.resolution;
  est.peaks_p0 = find_peaks(s_p0, options.significance);
  est.peaks_m0 = find_peaks(s_m0, options.significance);
  if (est.peaks_m0.size() < 2) {
    throw EstimationError("fft_estimate: fewer than two significant peaks in the sq_m0 spectrum",
                          est.peaks_p0, est.peaks_m0);
  }

  std::vector<SpectralPeak> strongest = est.peaks_m0;
  std::stable_sort(strongest.begin(), strongest.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
  const double omega_a = std::max(strongest[0].omega, strongest[1].omega);
  const double omega_b = std::min(strongest[0].omega, strongest[1].omega);
  for (const auto& peak : est.peaks_m0) est.peak_frequencies.push_back(peak.omega);

  est.p_hat = omega_a / 4.0;
  est.q_hat = est.p_hat - omega_b / 2.0;

  if (sq_p0.nyquist_warning || sq_m0.nyquist_warning) est.flags.emplace_back("nyquist");
  if (!(est.p_hat > est.q_hat && est.q_hat > 0.0)) est.flags.emplace_back("out_of_regime");
  if (4.0 * std::abs(est.q_hat) <= options.consistency_bins * est.resolution) {
    est.flags.emplace_back("degenerate");
  }
  const double expected = 2.0 * (est.p_hat + est.q_hat);
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& peak : est.peaks_p0) nearest = std::min(nearest, std::abs(peak.omega - expected));
  if (nearest > options.consistency_bins * est.resolution) est.flags.emplace_back("inconsistent");
  return est;
}

}  // namespace zeeman
