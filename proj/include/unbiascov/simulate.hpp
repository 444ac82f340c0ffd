#pragma once

#include <cstdint>
#include <vector>

#include "unbiascov/covariance.hpp"
#include "unbiascov/crosscov.hpp"
#include "unbiascov/series.hpp"

namespace unbiascov::sim {

enum class WeightMode { redraw, fixed, unit };

// Parameters of the coupled MA-pair experiment. Defaults reproduce the
// reference configuration: MA(10) with all taps 0.1, variance 4, mean 8,
// cross-covariance peak 3 delayed by 10 samples (2 time units at dt = 0.2),
// N1 = N2 = 50, window [-25, 24], uniform(0,1) weights redrawn per realization.
struct SimulationConfig {
  int ma_order = 10;
  double ma_coeff = 0.1;
  double dt = 0.2;
  double target_variance = 4.0;
  double mean = 8.0;
  double target_crosscov_peak = 3.0;
  int delay_steps = 10;
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  std::size_t realizations = 10000;
  LagRange lags{-25, 24};
  WeightMode weight_mode = WeightMode::redraw;
  std::uint64_t seed = 1;
};

void validate(const SimulationConfig& config);

// Innovation variance sigma_e^2 = target_variance / (ma_order * ma_coeff^2).
double innovation_variance(const SimulationConfig& config);
// Innovation correlation rho = target_crosscov_peak / target_variance.
double innovation_correlation(const SimulationConfig& config);

// Triangular truth: C_k = target_variance * (1 - |k|/ma_order) for |k| < ma_order,
// zero beyond; tabulated over the config window.
CovarianceFunction true_autocov(const SimulationConfig& config);
// Shifted triangle peaking at delay_steps with height target_crosscov_peak.
CovarianceFunction true_crosscov(const SimulationConfig& config);

// Deterministic in (config.seed, realization_index). Innovations are jointly
// normal through a shared component, MA-filtered, series 2 delayed; weights per
// the configured mode.
SeriesPair generate_pair(const SimulationConfig& config, std::uint64_t realization_index);

struct LagStats {
  std::vector<double> mean;  // indexed k1..k2
  std::vector<double> se;    // standard error of the mean (NaN when undefined)
};

struct ScalarStats {
  double mean = 0.0;
  double se = 0.0;
};

struct MonteCarloReport {
  SimulationConfig config;
  CovarianceFunction truth_auto;
  CovarianceFunction truth_cross;

  LagStats raw_auto;
  LagStats corrected_auto;
  LagStats raw_cross;
  LagStats corrected_cross;

  // Expectation-identity diagnostics: per-realization raw estimate minus the
  // predicted expectation A*C_true for that realization's weights.
  LagStats raw_minus_predicted_auto;
  LagStats raw_minus_predicted_cross;

  ScalarStats s2;
  ScalarStats s2_corrected;
  ScalarStats sigma_mean2;
  // s^2 minus the predicted expectation sigma_x^2 - sigma_mean^2(C_true).
  ScalarStats s2_minus_predicted;

  bool se_defined = false;  // realizations >= 2
};

// Runs the full per-realization chain (demean, raw + corrected auto- and
// cross-covariance, variance correction) and aggregates means and standard
// errors in fixed realization order. Realizations run in parallel, capped by
// the UNBIAS_COV_THREADS environment variable.
MonteCarloReport run_monte_carlo(const SimulationConfig& config);

int thread_cap();

}  // namespace unbiascov::sim
