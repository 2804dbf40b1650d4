#pragma once

// Parameter sweeps, figure series, the oracle-equivalence check and the
// Monte Carlo comparison table behind the command-line front end.

#include "loattack/channel_model.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace loattack::sweep {

enum class Axis { Transmission, Distance, OneMinusEta };
enum class Format { Csv, Json };

Axis parse_axis(const std::string& text);  // "T" | "distance" | "one_minus_eta"
std::string axis_name(Axis a);
Format parse_format(const std::string& text);  // "csv" | "json"

// Inclusive arithmetic grid start, start+step, ... <= stop (1e-9 slack).
struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  // Throws ConfigError when step <= 0 or the grid is empty.
  std::vector<double> points() const;
};

struct SweepConfig {
  std::optional<Axis> axis;
  Range range;
  double modulation_variance = 20.0;
  double lo_transmission = 1.0;
  std::optional<double> transmission;
  std::optional<double> distance_km;
  double loss_db_per_km = 0.2;
  std::optional<double> noise;
  Direction direction = Direction::Reverse;
  std::string output;  // empty: standard output
  Format format = Format::Csv;
  std::size_t n_pulses = 1'000'000;
  std::optional<std::uint64_t> seed;  // unset: 1

  // Flat key-value document; unknown keys are rejected.
  static SweepConfig from_json(const nlohmann::json& doc);
  static SweepConfig load(const std::string& path);

  // Fixed parameters with the axis (if any) set to `axis_value`.
  ProtocolParams params_at(std::optional<double> axis_value) const;
  std::vector<double> axis_points() const;
};

// Numeric table with named columns; the unit of CSV/JSON output.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Header row, '.' decimal point, 9 significant digits, '\n' line endings.
std::string to_csv(const Table& t);
// Array of row objects keyed by column name.
std::string to_json(const Table& t);
std::string render(const Table& t, Format f);

// Key-rate report for every axis point.
Table run_sweep(const SweepConfig& cfg);

// Analytic vs Monte Carlo estimates for every axis point (or the single
// fixed point when no axis is configured).
Table run_simulation(const SweepConfig& cfg);

inline const std::vector<double> kFigureEtas = {0.85, 0.90, 0.95, 0.99, 1.0};
inline const std::vector<double> kFigureDistancesKm = {10, 20, 30, 40, 50};
inline constexpr double kFigureModulationVariance = 20.0;

// Ids 2 and 4 (RR / DR vs T): columns eta, T, k_pseudo, k_true, with T on
// [0.02, 0.99] step 0.01. Ids 3 and 5 (RR / DR vs 1-eta): columns
// distance_km, one_minus_eta, k_pseudo, intercepted, with 1-eta on [0, 0.3]
// step 0.002.
Table figure(int id);

struct CheckGrid {
  std::vector<double> modulation_variances = {1, 5, 20, 40};
  Range transmission{0.05, 0.95, 0.05};
  std::vector<double> lo_transmissions = {0.85, 0.9, 0.95, 1.0};
  double perturb = 0.0;  // added to the cloner-side values
  double tolerance = 1e-9;
};

struct CheckResult {
  std::size_t points = 0;
  double max_dev_be = 0.0;
  double max_dev_ae = 0.0;
  double max_dev_purity = 0.0;
  double max_dev_spectrum = 0.0;
  double min_symplectic = 1.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  double max_deviation() const;
};

// Throws ConfigError on an empty grid.
CheckResult run_check(const CheckGrid& grid);

}  // namespace loattack::sweep
