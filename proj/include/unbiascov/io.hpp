#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "unbiascov/covariance.hpp"
#include "unbiascov/crosscov.hpp"
#include "unbiascov/simulate.hpp"

namespace unbiascov::io {

// Shortest round-trip decimal form (std::to_chars); reading it back with
// parse_double reproduces the exact double.
std::string format_double(double value);
double parse_double(std::string_view text);  // throws ParseError

// Input CSV: optional "# key = value" comment lines (dt recognized), then a
// header "index,value[,weight]" and rows with contiguous indices from 0.
// Missing weight column means unit weights.
struct InputTable {
  std::vector<double> values;
  std::vector<double> weights;
  std::optional<double> dt;
};

InputTable read_input_table(const std::filesystem::path& file);

// Covariance truth table: header "lag_index,value", contiguous ascending lags.
CovarianceFunction read_covariance_table(const std::filesystem::path& file, double dt);

// Estimation output: lag_index,lag_time,c_raw[,c_corrected][,epsilon_predicted].
void write_covariance_csv(std::ostream& out, const CovarianceFunction& raw,
                          const CovarianceFunction* corrected, const CovarianceFunction* epsilon);

// One realization of the simulated pair: index,time,x1,w1,x2,w2.
void write_realization_csv(std::ostream& out, const SeriesPair& pair);

// Monte Carlo summary per lag: lag_time,mean_raw,mean_corrected,truth,stderr.
void write_monte_carlo_csv(std::ostream& out, const CovarianceFunction& truth,
                           const sim::LagStats& raw, const sim::LagStats& corrected);

// summary.json payload; no wall-clock content, so equal seeds give equal bytes.
std::string summary_json(const sim::MonteCarloReport& report);

}  // namespace unbiascov::io
