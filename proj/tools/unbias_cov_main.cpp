#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "unbiascov/autocov.hpp"
#include "unbiascov/crosscov.hpp"
#include "unbiascov/io.hpp"
#include "unbiascov/simulate.hpp"

namespace {

using unbiascov::CovarianceFunction;
using unbiascov::LagRange;
using unbiascov::MeanFreeSeries;
using unbiascov::WeightedSeries;

constexpr int kExitParse = 1;
constexpr int kExitRange = 2;
constexpr int kExitSingular = 3;

struct CliError {
  int code;
  std::string category;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& category, const std::string& message) {
  throw CliError{code, category, message};
}

double resolve_dt(const std::optional<double>& flag_dt, const unbiascov::io::InputTable& table) {
  if (flag_dt) return *flag_dt;
  if (table.dt) return *table.dt;
  return 1.0;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(kExitParse, "io", "cannot open output file '" + path.string() + "'");
  return out;
}

struct AcovOptions {
  std::string input;
  int kmin = 0;
  int kmax = 0;
  std::optional<double> dt;
  bool raw_only = false;
  std::string output;
  std::string predict;
};

void run_acov(const AcovOptions& opt) {
  const auto table = unbiascov::io::read_input_table(opt.input);
  const double dt = resolve_dt(opt.dt, table);
  const WeightedSeries series(table.values, table.weights, dt);
  const LagRange range(opt.kmin, opt.kmax);
  const MeanFreeSeries mf = unbiascov::stats::demean(series);

  const CovarianceFunction raw = unbiascov::autocov::estimate_raw(mf, range);
  std::optional<CovarianceFunction> corrected;
  std::optional<CovarianceFunction> epsilon;
  std::optional<unbiascov::autocov::VarianceBreakdown> variance;

  if (!opt.raw_only) {
    const unbiascov::BiasMatrix a = unbiascov::autocov::bias_matrix(mf.weights, range);
    corrected = unbiascov::correct(raw, a);
    unbiascov::autocov::VarianceBreakdown v;
    v.s2 = unbiascov::stats::naive_variance(mf);
    v.sigma_mean2 = unbiascov::stats::mean_estimator_variance(mf.weights, *corrected);
    v.s2_corrected = unbiascov::stats::corrected_variance_correlated(v.s2, v.sigma_mean2);
    variance = v;
    if (!opt.predict.empty()) {
      const CovarianceFunction truth = unbiascov::io::read_covariance_table(opt.predict, dt);
      epsilon = unbiascov::autocov::bias_epsilon(truth, mf.weights, range);
    }
  }

  const auto write = [&](std::ostream& out) {
    unbiascov::io::write_covariance_csv(out, raw, corrected ? &*corrected : nullptr,
                                        epsilon ? &*epsilon : nullptr);
  };
  if (!opt.output.empty()) {
    auto out = open_output(opt.output);
    write(out);
  } else {
    write(std::cout);
  }

  std::ostream& summary = opt.output.empty() ? std::cerr : std::cout;
  if (variance) {
    summary << "s2=" << unbiascov::io::format_double(variance->s2)
            << " sigma_mean2=" << unbiascov::io::format_double(variance->sigma_mean2)
            << " s2_corrected=" << unbiascov::io::format_double(variance->s2_corrected) << '\n';
  } else {
    summary << "s2=" << unbiascov::io::format_double(unbiascov::stats::naive_variance(mf)) << '\n';
  }
}

struct XcovOptions {
  std::string input1;
  std::string input2;
  int kmin = 0;
  int kmax = 0;
  std::optional<double> dt;
  std::string output;
};

void run_xcov(const XcovOptions& opt) {
  const auto table1 = unbiascov::io::read_input_table(opt.input1);
  const auto table2 = unbiascov::io::read_input_table(opt.input2);
  double dt = 1.0;
  if (opt.dt) {
    dt = *opt.dt;
  } else if (table1.dt && table2.dt) {
    if (*table1.dt != *table2.dt) {
      fail(kExitRange, "range",
           "dt metadata mismatch: " + unbiascov::io::format_double(*table1.dt) + " vs " +
               unbiascov::io::format_double(*table2.dt));
    }
    dt = *table1.dt;
  } else if (table1.dt) {
    dt = *table1.dt;
  } else if (table2.dt) {
    dt = *table2.dt;
  }

  const WeightedSeries s1(table1.values, table1.weights, dt);
  const WeightedSeries s2(table2.values, table2.weights, dt);
  const LagRange range(opt.kmin, opt.kmax);
  const MeanFreeSeries mf1 = unbiascov::stats::demean(s1);
  const MeanFreeSeries mf2 = unbiascov::stats::demean(s2);

  const CovarianceFunction raw = unbiascov::crosscov::estimate_raw(mf1, mf2, range);
  const unbiascov::BiasMatrix a = unbiascov::crosscov::bias_matrix(mf1.weights, mf2.weights, range);
  const CovarianceFunction corrected = unbiascov::correct(raw, a);

  const auto write = [&](std::ostream& out) {
    unbiascov::io::write_covariance_csv(out, raw, &corrected, nullptr);
  };
  if (!opt.output.empty()) {
    auto out = open_output(opt.output);
    write(out);
  } else {
    write(std::cout);
  }
}

struct VarianceOptions {
  std::string input;
  bool independent = false;
  std::optional<int> kmin;
  std::optional<int> kmax;
  std::optional<double> dt;
};

void run_variance(const VarianceOptions& opt) {
  if (opt.independent == (opt.kmin.has_value() && opt.kmax.has_value())) {
    fail(kExitRange, "config", "pass either --independent or both --kmin and --kmax");
  }
  const auto table = unbiascov::io::read_input_table(opt.input);
  const double dt = resolve_dt(opt.dt, table);
  const WeightedSeries series(table.values, table.weights, dt);

  if (opt.independent) {
    const MeanFreeSeries mf = unbiascov::stats::demean(series);
    const double s2 = unbiascov::stats::naive_variance(mf);
    const double s2_hat = unbiascov::stats::bessel_variance_independent(mf);
    std::cout << "s2=" << unbiascov::io::format_double(s2)
              << " s2_corrected=" << unbiascov::io::format_double(s2_hat) << " method=bessel\n";
    return;
  }
  const LagRange range(*opt.kmin, *opt.kmax);
  const auto v = unbiascov::autocov::corrected_variance_pipeline(series, range);
  std::cout << "s2=" << unbiascov::io::format_double(v.s2)
            << " sigma_mean2=" << unbiascov::io::format_double(v.sigma_mean2)
            << " s2_corrected=" << unbiascov::io::format_double(v.s2_corrected)
            << " method=autocov\n";
}

struct SimulateOptions {
  std::uint64_t seed = 1;
  std::size_t realizations = 10000;
  std::size_t n = 50;
  int kmin = -25;
  int kmax = 24;
  double dt = 0.2;
  std::string weights = "redraw";
  std::string out_dir;
};

void run_simulate(const SimulateOptions& opt) {
  unbiascov::sim::SimulationConfig config;
  config.seed = opt.seed;
  config.realizations = opt.realizations;
  config.n1 = opt.n;
  config.n2 = opt.n;
  config.lags = LagRange(opt.kmin, opt.kmax);
  config.dt = opt.dt;
  if (opt.weights == "redraw") {
    config.weight_mode = unbiascov::sim::WeightMode::redraw;
  } else if (opt.weights == "fixed") {
    config.weight_mode = unbiascov::sim::WeightMode::fixed;
  } else if (opt.weights == "unit") {
    config.weight_mode = unbiascov::sim::WeightMode::unit;
  } else {
    fail(kExitRange, "config", "unknown weight mode '" + opt.weights + "'");
  }
  unbiascov::sim::validate(config);

  const std::filesystem::path dir(opt.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(kExitParse, "io", "cannot create output directory '" + dir.string() + "'");

  const auto start = std::chrono::steady_clock::now();
  const unbiascov::sim::MonteCarloReport report = unbiascov::sim::run_monte_carlo(config);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  {
    auto out = open_output(dir / "fig1a.csv");
    unbiascov::io::write_realization_csv(out, unbiascov::sim::generate_pair(config, 0));
  }
  {
    auto out = open_output(dir / "fig1b.csv");
    unbiascov::io::write_monte_carlo_csv(out, report.truth_auto, report.raw_auto, report.corrected_auto);
  }
  {
    auto out = open_output(dir / "fig1c.csv");
    unbiascov::io::write_monte_carlo_csv(out, report.truth_cross, report.raw_cross,
                                         report.corrected_cross);
  }
  {
    auto out = open_output(dir / "summary.json");
    out << unbiascov::io::summary_json(report);
  }

  // Wall time stays out of the output files so equal seeds give equal bytes.
  std::cout << "wrote " << (dir / "fig1a.csv").string() << ", fig1b.csv, fig1c.csv, summary.json\n"
            << "realizations=" << config.realizations
            << " s2_corrected_mean=" << unbiascov::io::format_double(report.s2_corrected.mean)
            << " elapsed_s=" << elapsed.count() << '\n';
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Bias-free auto- and cross-covariance estimation for weighted time series"};
  app.require_subcommand(1);

  AcovOptions acov;
  auto* acov_cmd = app.add_subcommand("acov", "Auto-covariance of one weighted series");
  acov_cmd->add_option("--input", acov.input, "Input CSV (index,value[,weight])")->required();
  acov_cmd->add_option("--kmin", acov.kmin, "Smallest lag index")->required();
  acov_cmd->add_option("--kmax", acov.kmax, "Largest lag index")->required();
  acov_cmd->add_option("--dt", acov.dt, "Sample interval (default: file metadata or 1.0)");
  acov_cmd->add_flag("--raw-only", acov.raw_only, "Skip the bias correction");
  acov_cmd->add_option("--output", acov.output, "Output CSV path (default: stdout)");
  acov_cmd->add_option("--predict", acov.predict, "Truth CSV (lag_index,value) for predicted bias");

  XcovOptions xcov;
  auto* xcov_cmd = app.add_subcommand("xcov", "Cross-covariance of two weighted series");
  xcov_cmd->add_option("--input1", xcov.input1, "First input CSV")->required();
  xcov_cmd->add_option("--input2", xcov.input2, "Second input CSV")->required();
  xcov_cmd->add_option("--kmin", xcov.kmin, "Smallest lag index")->required();
  xcov_cmd->add_option("--kmax", xcov.kmax, "Largest lag index")->required();
  xcov_cmd->add_option("--dt", xcov.dt, "Sample interval (default: file metadata or 1.0)");
  xcov_cmd->add_option("--output", xcov.output, "Output CSV path (default: stdout)");

  VarianceOptions variance;
  auto* var_cmd = app.add_subcommand("variance", "Bias-free variance of one weighted series");
  var_cmd->add_option("--input", variance.input, "Input CSV")->required();
  var_cmd->add_flag("--independent", variance.independent, "Samples are independent (Bessel)");
  var_cmd->add_option("--kmin", variance.kmin, "Smallest lag index (correlated data)");
  var_cmd->add_option("--kmax", variance.kmax, "Largest lag index (correlated data)");
  var_cmd->add_option("--dt", variance.dt, "Sample interval");

  SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of the coupled MA(10) pair");
  sim_cmd->add_option("--seed", simulate.seed, "RNG seed");
  sim_cmd->add_option("--realizations", simulate.realizations, "Number of realizations");
  sim_cmd->add_option("--n", simulate.n, "Samples per series");
  sim_cmd->add_option("--kmin", simulate.kmin, "Smallest lag index");
  sim_cmd->add_option("--kmax", simulate.kmax, "Largest lag index");
  sim_cmd->add_option("--dt", simulate.dt, "Sample interval");
  sim_cmd->add_option("--weights", simulate.weights, "Weight mode: redraw|fixed|unit");
  sim_cmd->add_option("--out-dir", simulate.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kExitRange;
  }

  if (acov_cmd->parsed()) run_acov(acov);
  if (xcov_cmd->parsed()) run_xcov(xcov);
  if (var_cmd->parsed()) run_variance(variance);
  if (sim_cmd->parsed()) run_simulate(simulate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.category << ": " << e.message << '\n';
    return e.code;
  } catch (const unbiascov::ParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
    return kExitParse;
  } catch (const unbiascov::InvalidData& e) {
    std::cerr << "error: data: " << e.what() << '\n';
    return kExitParse;
  } catch (const unbiascov::DegenerateWeights& e) {
    std::cerr << "error: data: " << e.what() << '\n';
    return kExitParse;
  } catch (const unbiascov::AllWeightsZero& e) {
    std::cerr << "error: data: " << e.what() << '\n';
    return kExitParse;
  } catch (const unbiascov::SingularMatrix& e) {
    std::cerr << "error: singular: " << e.what() << '\n';
    return kExitSingular;
  } catch (const unbiascov::IllConditioned& e) {
    std::cerr << "error: singular: " << e.what() << '\n';
    return kExitSingular;
  } catch (const unbiascov::InvalidRange& e) {
    std::cerr << "error: range: " << e.what() << '\n';
    return kExitRange;
  } catch (const unbiascov::LagOutOfRange& e) {
    std::cerr << "error: range: " << e.what() << '\n';
    return kExitRange;
  } catch (const unbiascov::EmptyOverlap& e) {
    std::cerr << "error: range: " << e.what() << '\n';
    return kExitRange;
  } catch (const unbiascov::DtMismatch& e) {
    std::cerr << "error: range: " << e.what() << '\n';
    return kExitRange;
  } catch (const unbiascov::RangeMismatch& e) {
    std::cerr << "error: range: " << e.what() << '\n';
    return kExitRange;
  } catch (const unbiascov::Error& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitParse;
  }
}
