#include "unbiascov/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <string>

#include "unbiascov/autocov.hpp"
#include "unbiascov/rng.hpp"
#include "unbiascov/summation.hpp"

namespace unbiascov::sim {

namespace {

constexpr std::uint64_t kPurposeData = 0;
constexpr std::uint64_t kPurposeFixedWeights = 1;

double triangle(const SimulationConfig& config, int k) {
  const int q = config.ma_order;
  return std::abs(k) < q ? config.target_variance * (1.0 - std::abs(k) / static_cast<double>(q)) : 0.0;
}

std::vector<double> draw_weights(rng::Stream& stream, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = stream.next_uniform();
  return w;
}

LagStats reduce_lag_rows(const std::vector<double>& rows, std::size_t realizations, std::size_t lags) {
  LagStats out;
  out.mean.assign(lags, 0.0);
  out.se.assign(lags, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < lags; ++c) {
    CompensatedSum sum;
    for (std::size_t r = 0; r < realizations; ++r) sum.add(rows[r * lags + c]);
    const double mean = sum.value() / static_cast<double>(realizations);
    out.mean[c] = mean;
    if (realizations >= 2) {
      CompensatedSum sq;
      for (std::size_t r = 0; r < realizations; ++r) {
        const double d = rows[r * lags + c] - mean;
        sq.add(d * d);
      }
      const double var = sq.value() / static_cast<double>(realizations - 1);
      out.se[c] = std::sqrt(var / static_cast<double>(realizations));
    }
  }
  return out;
}

ScalarStats reduce_scalar(const std::vector<double>& values) {
  const std::size_t n = values.size();
  ScalarStats out;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  out.mean = sum.value() / static_cast<double>(n);
  if (n >= 2) {
    CompensatedSum sq;
    for (double v : values) {
      const double d = v - out.mean;
      sq.add(d * d);
    }
    out.se = std::sqrt(sq.value() / static_cast<double>(n - 1) / static_cast<double>(n));
  } else {
    out.se = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

[[noreturn]] void rethrow_with_realization(std::exception_ptr error, std::uint64_t index) {
  const std::string prefix = "realization " + std::to_string(index) + ": ";
  try {
    std::rethrow_exception(error);
  } catch (const SingularMatrix& e) {
    throw SingularMatrix(prefix + e.what());
  } catch (const IllConditioned& e) {
    throw IllConditioned(prefix + e.what());
  } catch (const EmptyOverlap& e) {
    throw Error(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

void validate(const SimulationConfig& config) {
  if (config.ma_order < 1) throw InvalidData("simulation: ma_order must be >= 1");
  if (!(config.ma_coeff > 0.0)) throw InvalidData("simulation: ma_coeff must be positive");
  if (!(config.dt > 0.0)) throw InvalidData("simulation: dt must be positive");
  if (!(config.target_variance > 0.0)) throw InvalidData("simulation: target variance must be positive");
  if (config.delay_steps < 0) throw InvalidData("simulation: delay_steps must be >= 0");
  if (config.n1 < 2 || config.n2 < 2) throw InvalidData("simulation: need at least two samples per series");
  if (config.realizations < 1) throw InvalidData("simulation: need at least one realization");
  const double rho = innovation_correlation(config);
  if (rho < 0.0 || rho > 1.0) {
    throw InvalidData("simulation: target cross-covariance peak must lie in [0, variance]");
  }
  // Window must be invertible for the auto case (series 1) and the cross case.
  validate_invertible(config.lags, config.n1, config.n1);
  validate_invertible(config.lags, config.n1, config.n2);
}

double innovation_variance(const SimulationConfig& config) {
  return config.target_variance / (config.ma_order * config.ma_coeff * config.ma_coeff);
}

double innovation_correlation(const SimulationConfig& config) {
  return config.target_crosscov_peak / config.target_variance;
}

CovarianceFunction true_autocov(const SimulationConfig& config) {
  std::vector<double> values(static_cast<std::size_t>(config.lags.count()));
  for (int k = config.lags.k1; k <= config.lags.k2; ++k) {
    values[static_cast<std::size_t>(k - config.lags.k1)] = triangle(config, k);
  }
  return CovarianceFunction(config.lags, std::move(values), config.dt);
}

CovarianceFunction true_crosscov(const SimulationConfig& config) {
  const double scale = innovation_correlation(config);
  std::vector<double> values(static_cast<std::size_t>(config.lags.count()));
  for (int k = config.lags.k1; k <= config.lags.k2; ++k) {
    values[static_cast<std::size_t>(k - config.lags.k1)] = scale * triangle(config, k - config.delay_steps);
  }
  return CovarianceFunction(config.lags, std::move(values), config.dt);
}

SeriesPair generate_pair(const SimulationConfig& config, std::uint64_t realization_index) {
  validate(config);
  const int q = config.ma_order;
  const int warmup = q - 1 + config.delay_steps;
  const std::size_t horizon = std::max(config.n1, config.n2);
  const std::size_t total = static_cast<std::size_t>(warmup) + horizon;

  const double sigma_e = std::sqrt(innovation_variance(config));
  const double rho = innovation_correlation(config);
  const double shared_scale = std::sqrt(rho);
  const double own_scale = std::sqrt(1.0 - rho);

  rng::Stream stream(config.seed, kPurposeData, realization_index);
  std::vector<double> e1(total);
  std::vector<double> e2(total);
  for (std::size_t t = 0; t < total; ++t) {
    const double shared = stream.next_normal();
    const double z1 = stream.next_normal();
    const double z2 = stream.next_normal();
    e1[t] = sigma_e * (shared_scale * shared + own_scale * z1);
    e2[t] = sigma_e * (shared_scale * shared + own_scale * z2);
  }

  // Innovation array index warmup + t holds time t; windows below warmup are
  // fully populated, so both series are stationary from sample 0.
  std::vector<double> x1(config.n1);
  for (std::size_t t = 0; t < config.n1; ++t) {
    CompensatedSum acc;
    for (int m = 0; m < q; ++m) acc.add(e1[static_cast<std::size_t>(warmup) + t - static_cast<std::size_t>(m)]);
    x1[t] = config.mean + config.ma_coeff * acc.value();
  }
  std::vector<double> x2(config.n2);
  for (std::size_t t = 0; t < config.n2; ++t) {
    CompensatedSum acc;
    const std::size_t base = static_cast<std::size_t>(warmup - config.delay_steps) + t;
    for (int m = 0; m < q; ++m) acc.add(e2[base - static_cast<std::size_t>(m)]);
    x2[t] = config.mean + config.ma_coeff * acc.value();
  }

  std::vector<double> w1;
  std::vector<double> w2;
  switch (config.weight_mode) {
    case WeightMode::redraw:
      w1 = draw_weights(stream, config.n1);
      w2 = draw_weights(stream, config.n2);
      break;
    case WeightMode::fixed: {
      rng::Stream weight_stream(config.seed, kPurposeFixedWeights, 0);
      w1 = draw_weights(weight_stream, config.n1);
      w2 = draw_weights(weight_stream, config.n2);
      break;
    }
    case WeightMode::unit:
      w1.assign(config.n1, 1.0);
      w2.assign(config.n2, 1.0);
      break;
  }

  return SeriesPair(WeightedSeries(std::move(x1), std::move(w1), config.dt),
                    WeightedSeries(std::move(x2), std::move(w2), config.dt));
}

int thread_cap() {
  int cap = omp_get_max_threads();
  if (const char* env = std::getenv("UNBIAS_COV_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) cap = std::min(cap, requested);
  }
  return cap;
}

MonteCarloReport run_monte_carlo(const SimulationConfig& config) {
  validate(config);
  const std::size_t realizations = config.realizations;
  const std::size_t lags = static_cast<std::size_t>(config.lags.count());

  MonteCarloReport report;
  report.config = config;
  report.truth_auto = true_autocov(config);
  report.truth_cross = true_crosscov(config);

  // Per-realization rows; the reduction afterwards runs in fixed realization
  // order so reports are bit-identical regardless of thread count.
  std::vector<double> rows_raw_auto(realizations * lags);
  std::vector<double> rows_cor_auto(realizations * lags);
  std::vector<double> rows_raw_cross(realizations * lags);
  std::vector<double> rows_cor_cross(realizations * lags);
  std::vector<double> rows_diff_auto(realizations * lags);
  std::vector<double> rows_diff_cross(realizations * lags);
  std::vector<double> vals_s2(realizations);
  std::vector<double> vals_s2_corrected(realizations);
  std::vector<double> vals_sigma_mean2(realizations);
  std::vector<double> vals_s2_diff(realizations);

  // Weights identical across realizations: assemble and factorize once.
  const bool weights_static = config.weight_mode != WeightMode::redraw;
  std::optional<BiasSolver> shared_auto;
  std::optional<BiasSolver> shared_cross;
  if (weights_static) {
    const SeriesPair pair = generate_pair(config, 0);
    shared_auto.emplace(autocov::bias_matrix(pair.s1.weights(), config.lags));
    shared_cross.emplace(crosscov::bias_matrix(pair.s1.weights(), pair.s2.weights(), config.lags));
  }

  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::uint64_t failed_index = 0;

#pragma omp parallel for num_threads(thread_cap()) schedule(static)
  for (long long r = 0; r < static_cast<long long>(realizations); ++r) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const auto index = static_cast<std::uint64_t>(r);
      const SeriesPair pair = generate_pair(config, index);
      const MeanFreeSeries mf1 = stats::demean(pair.s1);
      const MeanFreeSeries mf2 = stats::demean(pair.s2);

      const CovarianceFunction raw_auto = autocov::estimate_raw(mf1, config.lags);
      const CovarianceFunction raw_cross = crosscov::estimate_raw(mf1, mf2, config.lags);

      std::optional<BiasSolver> local_auto;
      std::optional<BiasSolver> local_cross;
      const BiasSolver& solver_auto =
          weights_static ? *shared_auto
                         : local_auto.emplace(autocov::bias_matrix(mf1.weights, config.lags));
      const BiasSolver& solver_cross =
          weights_static ? *shared_cross
                         : local_cross.emplace(crosscov::bias_matrix(mf1.weights, mf2.weights, config.lags));

      const CovarianceFunction cor_auto = solver_auto.correct(raw_auto);
      const CovarianceFunction cor_cross = solver_cross.correct(raw_cross);

      const CovarianceFunction pred_auto = expected_estimate(report.truth_auto, solver_auto.matrix());
      const CovarianceFunction pred_cross = expected_estimate(report.truth_cross, solver_cross.matrix());

      const double s2 = stats::naive_variance(mf1);
      const double sigma_mean2 = stats::mean_estimator_variance(mf1.weights, cor_auto);
      const double s2_corrected = stats::corrected_variance_correlated(s2, sigma_mean2);
      const double sigma_mean2_true = stats::mean_estimator_variance(mf1.weights, report.truth_auto);

      const std::size_t row = static_cast<std::size_t>(r) * lags;
      for (std::size_t c = 0; c < lags; ++c) {
        const int k = config.lags.k1 + static_cast<int>(c);
        rows_raw_auto[row + c] = raw_auto.at(k);
        rows_cor_auto[row + c] = cor_auto.at(k);
        rows_raw_cross[row + c] = raw_cross.at(k);
        rows_cor_cross[row + c] = cor_cross.at(k);
        rows_diff_auto[row + c] = raw_auto.at(k) - pred_auto.at(k);
        rows_diff_cross[row + c] = raw_cross.at(k) - pred_cross.at(k);
      }
      vals_s2[static_cast<std::size_t>(r)] = s2;
      vals_s2_corrected[static_cast<std::size_t>(r)] = s2_corrected;
      vals_sigma_mean2[static_cast<std::size_t>(r)] = sigma_mean2;
      vals_s2_diff[static_cast<std::size_t>(r)] = s2 - (config.target_variance - sigma_mean2_true);
    } catch (...) {
#pragma omp critical(unbiascov_mc_failure)
      {
        if (!failure) {
          failure = std::current_exception();
          failed_index = static_cast<std::uint64_t>(r);
        }
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failure) rethrow_with_realization(failure, failed_index);

  report.raw_auto = reduce_lag_rows(rows_raw_auto, realizations, lags);
  report.corrected_auto = reduce_lag_rows(rows_cor_auto, realizations, lags);
  report.raw_cross = reduce_lag_rows(rows_raw_cross, realizations, lags);
  report.corrected_cross = reduce_lag_rows(rows_cor_cross, realizations, lags);
  report.raw_minus_predicted_auto = reduce_lag_rows(rows_diff_auto, realizations, lags);
  report.raw_minus_predicted_cross = reduce_lag_rows(rows_diff_cross, realizations, lags);
  report.s2 = reduce_scalar(vals_s2);
  report.s2_corrected = reduce_scalar(vals_s2_corrected);
  report.sigma_mean2 = reduce_scalar(vals_sigma_mean2);
  report.s2_minus_predicted = reduce_scalar(vals_s2_diff);
  report.se_defined = realizations >= 2;
  return report;
}

}  // namespace unbiascov::sim
