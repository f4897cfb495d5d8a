#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "zeeman/fit.hpp"

using namespace zeeman;
using doctest::Approx;
using json = nlohmann::ordered_json;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "zeeman_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("integer list parsing") {
  CHECK(cli::parse_int_list("5") == std::vector<int>{5});
  CHECK(cli::parse_int_list("1..5") == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(cli::parse_int_list("10..16:2") == std::vector<int>{10, 12, 14, 16});
  CHECK(cli::parse_int_list("8..64*2") == std::vector<int>{8, 16, 32, 64});
  CHECK(cli::parse_int_list("1, 3,7..8") == std::vector<int>{1, 3, 7, 8});
  CHECK_THROWS_AS(cli::parse_int_list(""), ValidationError);
  CHECK_THROWS_AS(cli::parse_int_list("a"), ValidationError);
  CHECK_THROWS_AS(cli::parse_int_list("5..1"), ValidationError);
  CHECK_THROWS_AS(cli::parse_int_list("1..9*1"), ValidationError);
  CHECK_THROWS_AS(cli::parse_int_list("1..9:0"), ValidationError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
    CHECK(std::stod(cli::format_double(v)) == v);
  }
  CHECK(cli::format_double(INFINITY) == "inf");
  CHECK(cli::format_double(-INFINITY) == "-inf");
}

TEST_CASE("bounds: uniform family") {
  const Result r = run({"bounds", "--family", "uniform", "--F", "1..5", "--N", "100"});
  REQUIRE(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][0] == "F");
  for (int F = 1; F <= 5; ++F) {
    const double dp = std::stod(rows[F][4]);
    CHECK(dp == Approx(std::sqrt(3.0 / (4.0 * 100 * F * (F + 1)))).epsilon(1e-12));
  }
}

TEST_CASE("bounds: binomial scan has its minimum at pi/2") {
  const Result r = run({"bounds", "--family", "binomial", "--F", "2", "--theta-samples", "181"});
  REQUIRE(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 182);
  double best = INFINITY, best_theta = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dp = std::stod(rows[i][4]);
    if (dp < best) {
      best = dp;
      best_theta = std::stod(rows[i][3]);
    }
  }
  CHECK(best_theta == Approx(std::numbers::pi / 2).epsilon(1e-12));
}

TEST_CASE("bounds: optimal family ratio") {
  const Result r = run({"bounds", "--family", "optimal", "--F", "3", "--N", "1", "--format", "json"});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  const double ratio = j[0]["delta_q"].get<double>() / j[0]["delta_p"].get<double>();
  const double x = j[0]["populations"][6].get<double>();
  // dq/dp = 1/(F sqrt(1 - 2|a_F|^2)); 1/F alone drops the second factor.
  CHECK(ratio == Approx(1.0 / (3.0 * std::sqrt(1.0 - 2.0 * x))).epsilon(1e-10));
  CHECK(std::abs(ratio - 1.0 / 3.0) > 1e-2);
}

TEST_CASE("bounds: bad family names the valid ones") {
  const Result r = run({"bounds", "--family", "bogus"});
  CHECK(r.status != 0);
  CHECK(r.err.find("uniform") != std::string::npos);
  CHECK(r.err.find("binomial") != std::string::npos);
  CHECK(r.err.find("optimal") != std::string::npos);
  CHECK(run({"bounds", "--F", "0"}).status == 1);
  CHECK(run({}).status != 0);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("scaling: CSV round-trip reproduces the slope summary exactly") {
  const auto csv_path = scratch("ghz.csv");
  const auto summary_path = scratch("ghz.json");
  const Result r = run({"scaling", "--mode", "ghz", "--F", "2", "--N", "8..1024*2", "--out", csv_path.string(),
                        "--summary", summary_path.string()});
  REQUIRE(r.status == 0);
  CHECK(r.err.find("slope_p=") != std::string::npos);

  std::ifstream in(csv_path);
  const cli::ScalingCsv csv = cli::read_scaling_csv(in);
  CHECK(csv.mode == "ghz");
  CHECK(csv.family == "three_amplitude");
  REQUIRE(csv.rows.size() == 8);
  const auto [fp, fq] = fit_scaling(csv.rows);
  const json summary = json::parse(slurp(summary_path));
  CHECK(fp.slope == summary["slope_p"].get<double>());
  CHECK(fq.slope == summary["slope_q"].get<double>());
  CHECK(fp.intercept == summary["intercept_p"].get<double>());
  CHECK(fp.slope == Approx(-1.0).epsilon(1e-9));

  std::istringstream bad("N,dp,dq\n");
  CHECK_THROWS_AS(cli::read_scaling_csv(bad), ValidationError);
}

TEST_CASE("scaling: header and modes") {
  const Result prod = run({"scaling", "--mode", "product", "--N", "8,16,32,64"});
  REQUIRE(prod.status == 0);
  CHECK(csv_rows(prod.out)[0] == std::vector<std::string>{"N", "delta_p", "delta_q", "mode", "family"});

  const Result ind = run({"scaling", "--mode", "individual", "--N", "8..64*2", "--F", "2"});
  REQUIRE(ind.status == 0);
  const auto rows = csv_rows(ind.out);
  CHECK(std::stod(rows[1][1]) == Approx(1.0 / 16.0));

  const Result odd = run({"scaling", "--mode", "smd", "--N", "10..13"});
  CHECK(odd.status == 1);
  CHECK(odd.err.find("even") != std::string::npos);
  CHECK(run({"scaling", "--mode", "ghz", "--N", "8,16,32"}).status == 1);
  CHECK(run({"scaling", "--mode", "ghz", "--N", "8,16,16,32"}).status == 1);
}

TEST_CASE("prepare: schema and N = 2 closed form") {
  const Result r = run({"prepare", "--method", "smd", "--N", "2", "--format", "json"});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"N", "method", "control", "alphas_re", "alphas_im", "delta_p", "delta_q"});

  const double t = j["control"].get<double>();
  const auto re = j["alphas_re"].get<std::vector<double>>();
  const auto im = j["alphas_im"].get<std::vector<double>>();
  // exp(-i H t)|0> with H = [[0, sqrt2], [sqrt2, 0]]
  CHECK(std::abs(re[0] - std::cos(std::sqrt(2.0) * t)) < 1e-10);
  CHECK(std::abs(im[1] + std::sin(std::sqrt(2.0) * t)) < 1e-10);
  double norm = 0.0;
  for (std::size_t k = 0; k < re.size(); ++k) norm += re[k] * re[k] + im[k] * im[k];
  CHECK(std::abs(norm - 1.0) < 1e-10);

  const Result q = run({"prepare", "--method", "qpt", "--N", "40", "--format", "json"});
  REQUIRE(q.status == 0);
  const double eps = json::parse(q.out)["control"].get<double>();
  CHECK(eps > -2.0);
  CHECK(eps < 2.0);

  CHECK(run({"prepare", "--N", "7"}).status == 1);
  CHECK(run({"prepare", "--method", "qpt", "--c2", "0"}).status == 1);
}

TEST_CASE("estimate: N = 20, p = 10, q = 1") {
  const auto series = scratch("series.csv");
  const Result r = run({"estimate", "--N", "20", "--p", "10", "--q", "1", "--method", "smd", "--format", "json",
                        "--series", series.string()});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  const double res = j["resolution"].get<double>();
  CHECK(std::abs(j["p_hat"].get<double>() - 10.0) <= res);
  CHECK(std::abs(j["q_hat"].get<double>() - 1.0) <= res);
  CHECK(j["flags"].empty());
  for (const char* which : {"peaks_p0", "peaks_m0"}) {
    bool found = false;
    for (const auto& pk : j[which]) found = found || std::abs(pk["omega"].get<double>() - 40.0) <= res;
    CHECK(found);
  }
  const auto rows = csv_rows(slurp(series));
  CHECK(rows[0] == std::vector<std::string>{"t", "sq_p0", "sq_m0"});
  CHECK(rows.size() == 1025);
}

TEST_CASE("estimate: q = 0 is flagged, not an error") {
  const Result r = run({"estimate", "--N", "20", "--p", "10", "--q", "0"});
  CHECK(r.status == 0);
  CHECK(r.out.find("degenerate") != std::string::npos);
  CHECK(r.err.find("flag: degenerate") != std::string::npos);

  CHECK(run({"estimate", "--samples", "100"}).status == 1);
  CHECK(run({"estimate", "--N", "5"}).status == 1);
}

TEST_CASE("config file: keys are flag names and flags win") {
  const auto cfg = scratch("run.toml");
  {
    std::ofstream f(cfg);
    f << "[scaling]\nmode = \"individual\"\nN = \"8..64*2\"\nF = 2\n";
  }
  const Result from_file = run({"--config", cfg.string(), "scaling"});
  REQUIRE(from_file.status == 0);
  CHECK(csv_rows(from_file.out)[1][3] == "individual");
  CHECK(std::stod(csv_rows(from_file.out)[1][1]) == Approx(1.0 / 16.0));

  const Result overridden = run({"scaling", "--config", cfg.string(), "--mode", "product"});
  REQUIRE(overridden.status == 0);
  CHECK(csv_rows(overridden.out)[1][3] == "product");
  CHECK(csv_rows(overridden.out).size() == 5);
}

TEST_CASE("commands are deterministic") {
  const std::vector<std::string> args{"bounds", "--family", "optimal", "--optimizer", "general",
                                      "--F", "1..3", "--N", "5", "--seed", "42"};
  CHECK(run(args).out == run(args).out);
  const Result other_seed = run({"bounds", "--family", "optimal", "--optimizer", "general", "--F", "1..3",
                                 "--N", "5", "--seed", "43"});
  CHECK(other_seed.status == 0);
}
