#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zeeman/fock3.hpp"
#include "zeeman/readout.hpp"

namespace zeeman::cli {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kFormats{"csv", "json"};

struct Common {
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = OptimizerOptions{}.seed;
};

struct BoundsConfig {
  std::string family = "uniform";
  std::string F = "1";
  int N = 1;
  std::string ensemble = "product";
  std::string optimizer = "three_amplitude";
  int theta_samples = 181;
  double weight_p = 1.0;
  double weight_q = 1.0;
  double T = 1.0;
};

struct ScalingConfig {
  std::string mode = "ghz";
  std::string family = "three_amplitude";
  int F = 1;
  std::string N = "8..1024*2";
  std::string summary_path;
  double weight_p = 1.0;
  double weight_q = 1.0;
};

struct PrepareConfig {
  std::string method = "smd";
  int N = 20;
  double kappa = 1.0;
  double c2 = -1.0;
  double grid_lo = NAN;
  double grid_hi = NAN;
  int grid_points = 0;
};

struct EstimateConfig {
  PrepareConfig prepare;
  double p = 10.0;
  double q = 1.0;
  double p_guess = NAN;
  int samples = 1024;
  double dt = NAN;
  bool hann = false;
  double significance = 5.0;
  std::string series_path;
};

// json has no infinity; unbounded precisions are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int to_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError("not an integer: '" + s + "'");
  return v;
}

Ensemble parse_ensemble(const std::string& s) { return s == "ghz" ? Ensemble::ghz : Ensemble::product; }

StateFamily parse_family(const std::string& s) {
  return s == "general" ? StateFamily::general : StateFamily::three_amplitude;
}

PreparationMethod parse_method(const std::string& s) {
  return s == "qpt" ? PreparationMethod::qpt : PreparationMethod::smd;
}

SweepGrid preparation_grid(const PrepareConfig& c) {
  SweepGrid g = default_preparation_grid(parse_method(c.method));
  if (std::isfinite(c.grid_lo)) g.lo = c.grid_lo;
  if (std::isfinite(c.grid_hi)) g.hi = c.grid_hi;
  if (c.grid_points > 0) g.points = c.grid_points;
  if (!(g.hi >= g.lo)) throw DomainError("preparation grid needs grid-hi >= grid-lo");
  return g;
}

PreparationOptions preparation_options(const PrepareConfig& c) {
  PreparationOptions o;
  o.kappa = c.kappa;
  o.c2 = c.c2;
  if (c.c2 == 0.0) throw DomainError("c2 must be non-zero");
  return o;
}

void validate_spin(int F, int N) { SpinConfig{F, N}.validate(); }

// ---- bounds ---------------------------------------------------------------

void cmd_bounds(const BoundsConfig& c, const Common& common, std::ostream& out) {
  const std::vector<int> Fs = parse_int_list(c.F);
  for (int F : Fs) validate_spin(F, c.N);
  if (!(c.T > 0.0)) throw DomainError("T must be positive");
  if (c.family == "binomial" && c.theta_samples < 3) throw DomainError("theta-samples must be >= 3");

  const Ensemble ensemble = parse_ensemble(c.ensemble);
  OptimizerOptions options;
  options.seed = common.seed;
  options.weights = {c.weight_p, c.weight_q};

  const bool csv = common.format == "csv";
  json rows = json::array();
  if (csv) {
    if (c.family == "binomial") {
      out << "F,family,N,theta,delta_p,delta_q\n";
    } else {
      out << "F,family,N,ensemble,delta_p,delta_q,pop_edge,pop_zero\n";
    }
  }

  for (int F : Fs) {
    const SpinConfig config{F, c.N, c.T};
    if (c.family == "binomial") {
      for (const ThetaRow& r : scan_theta(config, c.theta_samples)) {
        if (csv) {
          out << F << ",binomial," << c.N << ',' << format_double(r.theta) << ','
              << format_double(r.delta_p) << ',' << format_double(r.delta_q) << '\n';
        } else {
          rows.push_back({{"F", F}, {"family", "binomial"}, {"N", c.N}, {"theta", r.theta},
                          {"delta_p", number(r.delta_p)}, {"delta_q", number(r.delta_q)}});
        }
      }
      continue;
    }

    SingleAtomState state = uniform_state(F);
    PrecisionBound bound;
    if (c.family == "uniform") {
      bound = qcrb_simultaneous(ensemble_qfim(state, config, ensemble));
    } else {
      const OptimizationResult r = optimize_sum_variance(config, ensemble, parse_family(c.optimizer), options);
      state = r.best_state;
      bound = r.bound;
    }
    const Eigen::VectorXd w = state.populations();
    if (csv) {
      out << F << ',' << c.family << ',' << c.N << ',' << c.ensemble << ',' << format_double(bound.delta_p)
          << ',' << format_double(bound.delta_q) << ',' << format_double(w(2 * F)) << ','
          << format_double(w(F)) << '\n';
    } else {
      std::vector<double> pops(w.data(), w.data() + w.size());
      rows.push_back({{"F", F}, {"family", c.family}, {"N", c.N}, {"ensemble", c.ensemble},
                      {"delta_p", number(bound.delta_p)}, {"delta_q", number(bound.delta_q)},
                      {"populations", pops}});
    }
  }
  if (!csv) out << rows.dump(2) << '\n';
}

// ---- scaling --------------------------------------------------------------

std::vector<ScalingRow> scaling_rows(const ScalingConfig& c, const std::vector<int>& Ns,
                                     const OptimizerOptions& options) {
  std::vector<ScalingRow> rows;
  if (c.mode == "smd" || c.mode == "qpt") {
    const PreparationMethod method = parse_method(c.mode);
    const SweepGrid grid = default_preparation_grid(method);
    for (int N : Ns) {
      const PreparedOptimum best = optimal_prepared_state(method, N, grid);
      rows.push_back({N, best.bound.delta_p, best.bound.delta_q});
    }
    return rows;
  }
  if (c.mode == "individual") {
    for (int N : Ns) {
      const PrecisionBound b = individual_resource_bounds(c.F, N);
      rows.push_back({N, b.delta_p, b.delta_q});
    }
    return rows;
  }
  // simultaneous is the GHZ simultaneous optimum, the counterpart of individual
  const Ensemble ensemble = c.mode == "product" ? Ensemble::product : Ensemble::ghz;
  return scan_scaling(c.F, Ns, ensemble, parse_family(c.family), options).rows;
}

std::string scaling_family_label(const ScalingConfig& c) {
  if (c.mode == "smd" || c.mode == "qpt") return "pair";
  if (c.mode == "individual") return "fixed";
  return c.family;
}

void cmd_scaling(const ScalingConfig& c, const Common& common, std::ostream& out, std::ostream& err) {
  const std::vector<int> Ns = parse_int_list(c.N);
  if (Ns.size() < 4) throw DomainError("scaling needs at least 4 N values");
  for (std::size_t i = 1; i < Ns.size(); ++i) {
    if (Ns[i] <= Ns[i - 1]) throw DomainError("N values must be strictly increasing");
  }
  for (int N : Ns) {
    if (c.mode == "smd" || c.mode == "qpt") {
      if (N < 2 || N % 2 != 0) {
        throw DomainError(c.mode + " mode needs even N >= 2 (pair basis |k, N-2k, k>), got N = " +
                          std::to_string(N));
      }
    } else {
      validate_spin(c.F, N);
      if (c.mode == "individual" && N < 2) throw DomainError("individual mode needs N >= 2");
    }
  }

  OptimizerOptions options;
  options.seed = common.seed;
  options.weights = {c.weight_p, c.weight_q};
  const std::vector<ScalingRow> rows = scaling_rows(c, Ns, options);
  const auto [fp, fq] = fit_scaling(rows);
  const std::string family = scaling_family_label(c);

  if (common.format == "csv") {
    out << "N,delta_p,delta_q,mode,family\n";
    for (const ScalingRow& r : rows) {
      out << r.N << ',' << format_double(r.delta_p) << ',' << format_double(r.delta_q) << ',' << c.mode
          << ',' << family << '\n';
    }
  } else {
    json j;
    j["mode"] = c.mode;
    j["family"] = family;
    j["rows"] = json::array();
    for (const ScalingRow& r : rows) {
      j["rows"].push_back({{"N", r.N}, {"delta_p", number(r.delta_p)}, {"delta_q", number(r.delta_q)}});
    }
    j["slope_p"] = fp.slope;
    j["slope_q"] = fq.slope;
    out << j.dump(2) << '\n';
  }

  err << "slope_p=" << format_double(fp.slope) << " slope_q=" << format_double(fq.slope)
      << " mode=" << c.mode << " points=" << rows.size() << '\n';
  if (!c.summary_path.empty()) {
    std::ofstream s(c.summary_path);
    if (!s) throw ValidationError("cannot write summary file " + c.summary_path);
    const json summary{{"mode", c.mode},          {"family", family},
                       {"slope_p", fp.slope},     {"intercept_p", fp.intercept},
                       {"slope_q", fq.slope},     {"intercept_q", fq.intercept},
                       {"points", rows.size()}};
    s << summary.dump(2) << '\n';
  }
}

// ---- prepare --------------------------------------------------------------

PreparedOptimum prepared_optimum(const PrepareConfig& c) {
  require_even_atom_number(c.N);
  const SweepGrid grid = preparation_grid(c);
  const PreparationOptions options = preparation_options(c);
  return optimal_prepared_state(parse_method(c.method), c.N, grid, options);
}

void cmd_prepare(const PrepareConfig& c, const Common& common, std::ostream& out) {
  const PreparedOptimum best = prepared_optimum(c);
  const Eigen::VectorXcd& a = best.state.alphas();
  if (common.format == "json") {
    std::vector<double> re(a.size()), im(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      re[k] = a(k).real();
      im[k] = a(k).imag();
    }
    const json j{{"N", c.N},
                 {"method", c.method},
                 {"control", best.control},
                 {"alphas_re", re},
                 {"alphas_im", im},
                 {"delta_p", number(best.bound.delta_p)},
                 {"delta_q", number(best.bound.delta_q)}};
    out << j.dump(2) << '\n';
    return;
  }
  out << "k,alpha_re,alpha_im\n";
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    out << k << ',' << format_double(a(k).real()) << ',' << format_double(a(k).imag()) << '\n';
  }
}

// ---- estimate -------------------------------------------------------------

json peak_table(const std::vector<SpectralPeak>& peaks) {
  json t = json::array();
  for (const SpectralPeak& p : peaks) t.push_back({{"omega", p.omega}, {"magnitude", p.magnitude}, {"bin", p.bin}});
  return t;
}

void write_series(const std::string& path, const SignalPair& sp) {
  std::ofstream s(path);
  if (!s) throw ValidationError("cannot write series file " + path);
  s << "t,sq_p0,sq_m0\n";
  for (Eigen::Index i = 0; i < sp.sq_p0.times.size(); ++i) {
    s << format_double(sp.sq_p0.times(i)) << ',' << format_double(sp.sq_p0.values(i)) << ','
      << format_double(sp.sq_m0.values(i)) << '\n';
  }
}

void cmd_estimate(const EstimateConfig& c, const Common& common, std::ostream& out, std::ostream& err,
                  int& status) {
  require_even_atom_number(c.prepare.N);
  // The simulation knows p; it stands in for the operator's bound by default.
  const double p_guess = std::isfinite(c.p_guess) ? c.p_guess : c.p;
  if (!(std::abs(p_guess) > 0.0)) throw DomainError("p-guess must be non-zero");
  if (c.samples < 256) throw DomainError("estimate needs samples >= 256");
  TimeGrid grid = default_time_grid(p_guess, c.samples);
  if (std::isfinite(c.dt)) {
    if (!(c.dt > 0.0)) throw DomainError("dt must be positive");
    grid.step = c.dt;
  }

  const PreparedOptimum best = prepared_optimum(c.prepare);
  const SignalPair sp = signal_sweep(best.state, c.p, c.q, grid, p_guess);
  if (!c.series_path.empty()) write_series(c.series_path, sp);

  FftOptions options;
  options.hann = c.hann;
  options.significance = c.significance;
  FftEstimate est;
  try {
    est = fft_estimate(sp.sq_p0, sp.sq_m0, options);
  } catch (const EstimationError& e) {
    const json diag{{"error", e.what()}, {"peaks_p0", peak_table(e.peaks_p0())},
                    {"peaks_m0", peak_table(e.peaks_m0())}};
    err << diag.dump(2) << '\n';
    status = 1;
    return;
  }

  if (common.format == "json") {
    const json j{{"N", c.prepare.N},
                 {"method", c.prepare.method},
                 {"control", best.control},
                 {"p", c.p},
                 {"q", c.q},
                 {"p_guess", p_guess},
                 {"dt", grid.step},
                 {"samples", grid.samples},
                 {"p_hat", est.p_hat},
                 {"q_hat", est.q_hat},
                 {"resolution", est.resolution},
                 {"peak_frequencies", est.peak_frequencies},
                 {"peaks_p0", peak_table(est.peaks_p0)},
                 {"peaks_m0", peak_table(est.peaks_m0)},
                 {"flags", est.flags}};
    out << j.dump(2) << '\n';
  } else {
    std::string flags;
    for (const auto& f : est.flags) flags += (flags.empty() ? "" : ";") + f;
    out << "p_hat,q_hat,resolution,flags\n"
        << format_double(est.p_hat) << ',' << format_double(est.q_hat) << ','
        << format_double(est.resolution) << ',' << flags << '\n';
  }
  for (const auto& f : est.flags) err << "flag: " << f << '\n';
}

void add_common(CLI::App* sub, Common& common) {
  sub->fallthrough();  // lets --config follow the subcommand
  sub->add_option("--out", common.out_path, "Output path (default stdout)");
  sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember(kFormats));
  sub->add_option("--seed", common.seed, "Seed for multi-start optimization");
}

void add_prepare_options(CLI::App* sub, PrepareConfig& c) {
  sub->add_option("--method", c.method, "smd or qpt")->check(CLI::IsMember({"smd", "qpt"}));
  sub->add_option("--N", c.N, "Even atom number");
  sub->add_option("--kappa", c.kappa, "Spin-mixing coupling");
  sub->add_option("--c2", c.c2, "Spin-exchange energy (qpt)");
  sub->add_option("--grid-lo", c.grid_lo, "Control grid start");
  sub->add_option("--grid-hi", c.grid_hi, "Control grid end");
  sub->add_option("--grid-points", c.grid_points, "Control grid size");
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
               item.end());
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      values.push_back(to_int(item));
      continue;
    }
    const int lo = to_int(item.substr(0, dots));
    std::string rest = item.substr(dots + 2);
    int step = 1;
    bool geometric = false;
    if (const auto at = rest.find_first_of(":*"); at != std::string::npos) {
      geometric = rest[at] == '*';
      step = to_int(rest.substr(at + 1));
      rest = rest.substr(0, at);
    }
    const int hi = to_int(rest);
    if (hi < lo) throw ValidationError("range '" + item + "' runs backwards");
    if (geometric) {
      if (step < 2 || lo < 1) throw ValidationError("geometric range needs lo >= 1 and factor >= 2");
      for (long long v = lo; v <= hi; v *= step) values.push_back(static_cast<int>(v));
    } else {
      if (step < 1) throw ValidationError("range step must be >= 1");
      for (int v = lo; v <= hi; v += step) values.push_back(v);
    }
  }
  if (values.empty()) throw ValidationError("empty integer list '" + text + "'");
  return values;
}

ScalingCsv read_scaling_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "N,delta_p,delta_q,mode,family") {
    throw ValidationError("scaling CSV header mismatch: '" + line + "'");
  }
  ScalingCsv csv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 5) throw ValidationError("scaling CSV row needs 5 fields: '" + line + "'");
    csv.rows.push_back({to_int(f[0]), std::stod(f[1]), std::stod(f[2])});
    csv.mode = f[3];
    csv.family = f[4];
  }
  return csv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simultaneous estimation of linear and quadratic Zeeman shifts"};
  app.name("zeeman");
  app.set_config("--config", "", "INI/TOML file; keys are flag names, flags win");
  app.require_subcommand(1);

  Common common;
  BoundsConfig bounds;
  ScalingConfig scaling;
  PrepareConfig prepare;
  EstimateConfig estimate;

  auto* b = app.add_subcommand("bounds", "QCRBs for uniform, binomial and optimal input states");
  add_common(b, common);
  b->add_option("--family", bounds.family, "uniform, binomial or optimal")
      ->check(CLI::IsMember({"uniform", "binomial", "optimal"}));
  b->add_option("--F", bounds.F, "Spin F: value, list or range such as 1..5");
  b->add_option("--N", bounds.N, "Atom number");
  b->add_option("--ensemble", bounds.ensemble, "product or ghz")->check(CLI::IsMember({"product", "ghz"}));
  b->add_option("--optimizer", bounds.optimizer, "three_amplitude or general")
      ->check(CLI::IsMember({"three_amplitude", "general"}));
  b->add_option("--theta-samples", bounds.theta_samples, "Interior theta grid size (binomial)");
  b->add_option("--weight-p", bounds.weight_p, "Objective weight on dp^2");
  b->add_option("--weight-q", bounds.weight_q, "Objective weight on dq^2");
  b->add_option("--T", bounds.T, "Interrogation time");

  auto* s = app.add_subcommand("scaling", "Bounds versus N with log-log slope fits");
  add_common(s, common);
  s->add_option("--mode", scaling.mode, "product, ghz, simultaneous, individual, smd or qpt")
      ->check(CLI::IsMember({"product", "ghz", "simultaneous", "individual", "smd", "qpt"}));
  s->add_option("--family", scaling.family, "three_amplitude or general")
      ->check(CLI::IsMember({"three_amplitude", "general"}));
  s->add_option("--F", scaling.F, "Spin F (spin modes)");
  s->add_option("--N", scaling.N, "N values, e.g. 8..1024*2 or 10..100:2");
  s->add_option("--summary", scaling.summary_path, "Write the slope summary as JSON");
  s->add_option("--weight-p", scaling.weight_p, "Objective weight on dp^2");
  s->add_option("--weight-q", scaling.weight_q, "Objective weight on dq^2");

  auto* p = app.add_subcommand("prepare", "Optimal SMD or QPT prepared state");
  add_common(p, common);
  add_prepare_options(p, prepare);

  auto* e = app.add_subcommand("estimate", "Prepare, sweep and read (p, q) off the FFT");
  add_common(e, common);
  add_prepare_options(e, estimate.prepare);
  e->add_option("--p", estimate.p, "Linear Zeeman shift");
  e->add_option("--q", estimate.q, "Quadratic Zeeman shift");
  e->add_option("--p-guess", estimate.p_guess, "Bound on |p| for sampling (default: --p)");
  e->add_option("--samples", estimate.samples, "Number of time samples");
  e->add_option("--dt", estimate.dt, "Sampling step (default 2 pi / (16 p-guess))");
  e->add_flag("--hann", estimate.hann, "Hann window before the FFT");
  e->add_option("--significance", estimate.significance, "Peak threshold in medians");
  e->add_option("--series", estimate.series_path, "Write t,sq_p0,sq_m0 CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err);
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!common.out_path.empty()) {
    file.open(common.out_path);
    if (!file) {
      err << "error: cannot open " << common.out_path << '\n';
      return 1;
    }
    sink = &file;
  }
  sink->precision(17);

  int status = 0;
  try {
    if (*b) cmd_bounds(bounds, common, *sink);
    if (*s) cmd_scaling(scaling, common, *sink, err);
    if (*p) cmd_prepare(prepare, common, *sink);
    if (*e) cmd_estimate(estimate, common, *sink, err, status);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return status;
}

}  // namespace zeeman::cli
