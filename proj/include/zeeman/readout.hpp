#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zeeman/fock3.hpp"

namespace zeeman {

/// Population-difference-squared observables.
enum class Observable {
  sq_p0,  // (N+1 - N0)^2
  sq_m0,  // (N-1 - N0)^2
};

const char* to_string(Observable observable);

/// Diagonal of the observable in the canonical Fock order.
Eigen::VectorXd observable_diagonal(int N, Observable observable);

/// Prepared pair state -> +1/-1 pulse -> phase imprinting -> p0 pulse -> m0
/// pulse, all pulses at angle pi/4. The pulses are built once, so repeated
/// calls across (p, q, t) only pay for the phase step.
class Interferometer {
 public:
  explicit Interferometer(const PairState& prepared);

  /// State right after phase imprinting, before the recombination pulses.
  Fock3State output_state(double p, double q, double t) const;
  Fock3State final_state(double p, double q, double t) const;

  int N() const { return N_; }

 private:
  int N_;
  Eigen::VectorXcd probe_;       // after the first pulse
  Eigen::MatrixXcd recombine_;   // U22 U21
  Eigen::VectorXd g1_, g2_;
};

Fock3State final_state(const PairState& prepared, double p, double q, double t);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd expectation_and_std(const Fock3State& state, Observable observable);

/// Uniform sampling times t_i = start + i * step, i = 0..samples-1.
struct TimeGrid {
  double start = 0.0;
  double step = 0.0;
  int samples = 0;
};

/// 1024 samples with step 2 pi / (16 p_guess), which samples the fastest tone
/// 4 p at twice its Nyquist rate.
TimeGrid default_time_grid(double p_guess, int samples = 1024);

struct SignalSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  Observable observable = Observable::sq_p0;
  bool nyquist_warning = false;

  /// Uniform step; throws ValidationError if times are not uniform within 1e-12
  /// (relative to the step) or not strictly increasing.
  double step() const;
};

struct SignalPair {
  SignalSeries sq_p0;
  SignalSeries sq_m0;
};

/// Expectation of both observables on the final state at each grid time.
/// Sets nyquist_warning when step > pi / (2 * 4 |p_guess|).
SignalPair signal_sweep(const PairState& prepared, double p, double q, const TimeGrid& grid,
                        double p_guess);

/// Closed-form expectation values built from the state coefficients
/// C01, C02, C1, C2. Cross-check only: these closed forms do not reproduce
/// the exact pipeline, see compare_analytic_expectations.
struct AnalyticExpectations {
  double mean_sq_p0 = 0.0;
  double mean_sq_m0 = 0.0;
  double C01 = 0.0;
  double C02 = 0.0;
  double C1 = 0.0;
  Complex C2{0.0, 0.0};
};

AnalyticExpectations analytic_expectations(const PairState& prepared, double p, double q, double t);

struct ExpectationComparison {
  double exact_sq_p0 = 0.0;
  double exact_sq_m0 = 0.0;
  double analytic_sq_p0 = 0.0;
  double analytic_sq_m0 = 0.0;

  double discrepancy_sq_p0() const { return analytic_sq_p0 - exact_sq_p0; }
  double discrepancy_sq_m0() const { return analytic_sq_m0 - exact_sq_m0; }
};

ExpectationComparison compare_analytic_expectations(const PairState& prepared, double p, double q,
                                                    double t);

/// Unitary DFT (1/sqrt(n) normalization) of a real signal.
Eigen::VectorXcd unitary_dft(const Eigen::VectorXd& values);

struct Spectrum {
  Eigen::VectorXd omega;      // angular frequency of bins 0..n/2
  Eigen::VectorXd magnitude;  // |X_j| of the detrended, unitary DFT
  double resolution = 0.0;    // bin width in angular frequency
};

/// Mean-subtracted one-sided magnitude spectrum; optional Hann window.
Spectrum magnitude_spectrum(const SignalSeries& series, bool hann = false);

struct SpectralPeak {
  double omega = 0.0;      // parabolically interpolated
  double magnitude = 0.0;  // magnitude at the raw bin
  int bin = 0;
};

/// Local maxima above `significance` times the median magnitude, sorted by
/// frequency, highest first.
std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, double significance = 5.0);

struct FftOptions {
  bool hann = false;
  double significance = 5.0;
  double consistency_bins = 2.0;
};

struct FftEstimate {
  std::vector<double> peak_frequencies;  // sq_m0 peaks used for assignment, descending
  std::vector<SpectralPeak> peaks_p0;
  std::vector<SpectralPeak> peaks_m0;
  double p_hat = 0.0;
  double q_hat = 0.0;
  double resolution = 0.0;
  std::vector<std::string> flags;

  bool flagged() const { return !flags.empty(); }
};

/// Failure to find two significant sq_m0 peaks. Keeps the peak tables.
class EstimationError : public NumericalError {
 public:
  EstimationError(const std::string& what, std::vector<SpectralPeak> peaks_p0,
                  std::vector<SpectralPeak> peaks_m0)
      : NumericalError(what), peaks_p0_(std::move(peaks_p0)), peaks_m0_(std::move(peaks_m0)) {}
  const std::vector<SpectralPeak>& peaks_p0() const { return peaks_p0_; }
  const std::vector<SpectralPeak>& peaks_m0() const { return peaks_m0_; }

 private:
  std::vector<SpectralPeak> peaks_p0_;
  std::vector<SpectralPeak> peaks_m0_;
};

/// Reads (p, q) off the two spectra under the regime p > q > 0. The two
/// strongest sq_m0 peaks are 4p (higher) and 2(p - q) (lower); the sq_p0 line
/// at 2(p + q) is used as a consistency check.
///
/// Flags: "out_of_regime" when not p_hat > q_hat > 0, "degenerate" when the
/// 2p +/- 2q lines are not resolvable, "inconsistent" when the sq_p0 check is
/// off by more than `consistency_bins`, "nyquist" when either series carries
/// the sampling warning.
FftEstimate fft_estimate(const SignalSeries& sq_p0, const SignalSeries& sq_m0,
                         const FftOptions& options = {});

}  // namespace zeeman
