#include "unbiascov/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace unbiascov::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

long parse_long(std::string_view text, const std::string& context) {
  text = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(context + ": expected integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buffer;
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buffer.data(), ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("expected number, got '" + std::string(text) + "'");
  }
  return value;
}

InputTable read_input_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open input file '" + file.string() + "'");

  InputTable table;
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  int value_col = -1;
  int weight_col = -1;
  int index_col = -1;
  std::size_t column_count = 0;

  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const std::string at_line = file.string() + ":" + std::to_string(line_number);

    if (view.front() == '#') {
      // Metadata comment, e.g. "# dt = 0.2".
      const std::size_t eq = view.find('=');
      if (eq != std::string_view::npos) {
        const std::string key = lower(trim(view.substr(1, eq - 1)));
        if (key == "dt") table.dt = parse_double(view.substr(eq + 1));
      }
      continue;
    }

    const auto fields = split_csv(view);
    if (!header_seen) {
      header_seen = true;
      column_count = fields.size();
      for (std::size_t c = 0; c < fields.size(); ++c) {
        const std::string name = lower(fields[c]);
        if (name == "index") index_col = static_cast<int>(c);
        if (name == "value") value_col = static_cast<int>(c);
        if (name == "weight") weight_col = static_cast<int>(c);
      }
      if (index_col < 0 || value_col < 0) {
        throw ParseError(at_line + ": header must name 'index' and 'value' columns");
      }
      continue;
    }

    if (fields.size() != column_count) {
      throw ParseError(at_line + ": expected " + std::to_string(column_count) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const long index = parse_long(fields[static_cast<std::size_t>(index_col)], at_line);
    if (index != static_cast<long>(table.values.size())) {
      throw ParseError(at_line + ": indices must be contiguous from 0 (expected " +
                       std::to_string(table.values.size()) + ", got " + std::to_string(index) + ")");
    }
    double value = 0.0;
    double weight = 1.0;
    try {
      value = parse_double(fields[static_cast<std::size_t>(value_col)]);
      if (weight_col >= 0) weight = parse_double(fields[static_cast<std::size_t>(weight_col)]);
    } catch (const ParseError& e) {
      throw ParseError(at_line + ": " + e.what());
    }
    table.values.push_back(value);
    table.weights.push_back(weight);
  }
  if (!header_seen) throw ParseError(file.string() + ": empty input");
  if (table.values.empty()) throw ParseError(file.string() + ": no data rows");
  return table;
}

CovarianceFunction read_covariance_table(const std::filesystem::path& file, double dt) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open covariance file '" + file.string() + "'");

  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  int lag_col = -1;
  int value_col = -1;
  std::vector<std::pair<int, double>> rows;

  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::string at_line = file.string() + ":" + std::to_string(line_number);

    const auto fields = split_csv(view);
    if (!header_seen) {
      header_seen = true;
      for (std::size_t c = 0; c < fields.size(); ++c) {
        const std::string name = lower(fields[c]);
        if (name == "lag_index") lag_col = static_cast<int>(c);
        if (name == "value") value_col = static_cast<int>(c);
      }
      if (lag_col < 0 || value_col < 0) {
        throw ParseError(at_line + ": header must name 'lag_index' and 'value' columns");
      }
      continue;
    }
    const long lag = parse_long(fields[static_cast<std::size_t>(lag_col)], at_line);
    const double value = parse_double(fields[static_cast<std::size_t>(value_col)]);
    rows.emplace_back(static_cast<int>(lag), value);
  }
  if (rows.empty()) throw ParseError(file.string() + ": no covariance rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first != rows[i - 1].first + 1) {
      throw ParseError(file.string() + ": lag indices must be contiguous ascending");
    }
  }
  std::vector<double> values(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) values[i] = rows[i].second;
  return CovarianceFunction(LagRange(rows.front().first, rows.back().first), std::move(values), dt);
}

void write_covariance_csv(std::ostream& out, const CovarianceFunction& raw,
                          const CovarianceFunction* corrected, const CovarianceFunction* epsilon) {
  out << "lag_index,lag_time,c_raw";
  if (corrected != nullptr) out << ",c_corrected";
  if (epsilon != nullptr) out << ",epsilon_predicted";
  out << '\n';
  for (int k = raw.k1(); k <= raw.k2(); ++k) {
    out << k << ',' << format_double(raw.lag_time(k)) << ',' << format_double(raw.at(k));
    if (corrected != nullptr) out << ',' << format_double(corrected->at(k));
    if (epsilon != nullptr) out << ',' << format_double(epsilon->at(k));
    out << '\n';
  }
}

void write_realization_csv(std::ostream& out, const SeriesPair& pair) {
  out << "index,time,x1,w1,x2,w2\n";
  const std::size_t rows = std::max(pair.s1.size(), pair.s2.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << i << ',' << format_double(static_cast<double>(i) * pair.s1.dt());
    if (i < pair.s1.size()) {
      out << ',' << format_double(pair.s1.values()[i]) << ',' << format_double(pair.s1.weights()[i]);
    } else {
      out << ",,";
    }
    if (i < pair.s2.size()) {
      out << ',' << format_double(pair.s2.values()[i]) << ',' << format_double(pair.s2.weights()[i]);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_monte_carlo_csv(std::ostream& out, const CovarianceFunction& truth,
                           const sim::LagStats& raw, const sim::LagStats& corrected) {
  out << "lag_time,mean_raw,mean_corrected,truth,stderr\n";
  for (int k = truth.k1(); k <= truth.k2(); ++k) {
    const auto idx = static_cast<std::size_t>(k - truth.k1());
    out << format_double(truth.lag_time(k)) << ',' << format_double(raw.mean[idx]) << ','
        << format_double(corrected.mean[idx]) << ',' << format_double(truth.at(k)) << ','
        << format_double(corrected.se[idx]) << '\n';
  }
}

std::string summary_json(const sim::MonteCarloReport& report) {
  nlohmann::json j;
  const auto& config = report.config;
  j["seed"] = config.seed;
  j["realizations"] = config.realizations;
  j["n1"] = config.n1;
  j["n2"] = config.n2;
  j["k1"] = config.lags.k1;
  j["k2"] = config.lags.k2;
  j["dt"] = config.dt;
  j["ma_order"] = config.ma_order;
  j["ma_coeff"] = config.ma_coeff;
  j["mean"] = config.mean;
  j["target_variance"] = config.target_variance;
  j["target_crosscov_peak"] = config.target_crosscov_peak;
  j["delay_steps"] = config.delay_steps;
  switch (config.weight_mode) {
    case sim::WeightMode::redraw: j["weights"] = "redraw"; break;
    case sim::WeightMode::fixed: j["weights"] = "fixed"; break;
    case sim::WeightMode::unit: j["weights"] = "unit"; break;
  }
  j["s2_mean"] = report.s2.mean;
  j["s2_se"] = report.s2.se;
  j["s2_corrected_mean"] = report.s2_corrected.mean;
  j["s2_corrected_se"] = report.s2_corrected.se;
  j["sigma_mean2_mean"] = report.sigma_mean2.mean;
  j["se_defined"] = report.se_defined;
  return j.dump(2) + "\n";
}

}  // namespace unbiascov::io
