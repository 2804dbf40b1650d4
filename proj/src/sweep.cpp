#include "loattack/sweep.hpp"

#include "loattack/cloner_oracle.hpp"
#include "loattack/errors.hpp"
#include "loattack/keyrate.hpp"
#include "loattack/measurement_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace loattack::sweep {
namespace {

using nlohmann::json;

double require_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::string require_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string format_point(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

}  // namespace

Axis parse_axis(const std::string& text) {
  if (text == "T" || text == "t" || text == "transmission") return Axis::Transmission;
  if (text == "distance" || text == "distance_km") return Axis::Distance;
  if (text == "one_minus_eta") return Axis::OneMinusEta;
  throw ConfigError("unknown axis '" + text + "' (expected T, distance or one_minus_eta)");
}

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::Transmission: return "T";
    case Axis::Distance: return "distance_km";
    case Axis::OneMinusEta: return "one_minus_eta";
  }
  return "?";
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw ConfigError("unknown format '" + text + "' (expected csv or json)");
}

std::vector<double> Range::points() const {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw ConfigError("sweep range needs a positive step and finite bounds");
  }
  if (stop < start - 1e-9 * step) throw ConfigError("sweep range is empty");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

SweepConfig SweepConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  SweepConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "axis") cfg.axis = parse_axis(require_string(v, key));
    else if (key == "start") cfg.range.start = require_number(v, key);
    else if (key == "stop") cfg.range.stop = require_number(v, key);
    else if (key == "step") cfg.range.step = require_number(v, key);
    else if (key == "vs") cfg.modulation_variance = require_number(v, key);
    else if (key == "eta") cfg.lo_transmission = require_number(v, key);
    else if (key == "t") cfg.transmission = require_number(v, key);
    else if (key == "distance_km") cfg.distance_km = require_number(v, key);
    else if (key == "loss_db_per_km") cfg.loss_db_per_km = require_number(v, key);
    else if (key == "noise") cfg.noise = require_number(v, key);
    else if (key == "direction") cfg.direction = parse_direction(require_string(v, key));
    else if (key == "out") cfg.output = require_string(v, key);
    else if (key == "format") cfg.format = parse_format(require_string(v, key));
    else if (key == "n_pulses") {
      const double n = require_number(v, key);
      if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("n_pulses must be a positive integer");
      cfg.n_pulses = static_cast<std::size_t>(n);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

SweepConfig SweepConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

ProtocolParams SweepConfig::params_at(std::optional<double> axis_value) const {
  ProtocolParams p;
  p.modulation_variance = modulation_variance;
  p.lo_transmission = lo_transmission;
  p.noise = noise;
  p.direction = direction;
  std::optional<double> t = transmission;
  std::optional<double> d = distance_km;
  if (axis && axis_value) {
    switch (*axis) {
      case Axis::Transmission: t = *axis_value; d.reset(); break;
      case Axis::Distance: d = *axis_value; t.reset(); break;
      case Axis::OneMinusEta: p.lo_transmission = 1.0 - *axis_value; break;
    }
  }
  if (t && d) throw ConfigError("set either t or distance_km, not both");
  if (d) {
    p.transmission = channel::transmission_from_distance({*d, loss_db_per_km});
  } else if (t) {
    p.transmission = *t;
  } else {
    throw ConfigError("channel transmission missing: set t or distance_km");
  }
  p.validate();
  return p;
}

std::vector<double> SweepConfig::axis_points() const {
  if (!axis) throw ConfigError("sweep needs an axis");
  return range.points();
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.9g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

std::string render(const Table& t, Format f) {
  return f == Format::Csv ? to_csv(t) : to_json(t);
}

Table run_sweep(const SweepConfig& cfg) {
  Table table;
  table.columns = {axis_name(cfg.axis.value_or(Axis::Transmission)),
                   "T", "eta", "N", "i_ab", "holevo_true", "holevo_pseudo",
                   "k_true", "k_pseudo", "intercepted", "secure"};
  for (double x : cfg.axis_points()) {
    const auto p = cfg.params_at(x);
    const auto r = keyrate::keyrates(p);
    table.rows.push_back({x, p.transmission, p.lo_transmission, p.resolved_noise(), r.i_ab,
                          r.holevo_true, r.holevo_pseudo, r.k_true, r.k_pseudo, r.intercepted,
                          r.secure ? 1.0 : 0.0});
  }
  return table;
}

Table run_simulation(const SweepConfig& cfg) {
  if (cfg.n_pulses < sim::kMinEstimationSamples) {
    throw ConfigError("simulation needs n_pulses >= 10000");
  }
  std::vector<std::optional<double>> points;
  if (cfg.axis) {
    for (double x : cfg.axis_points()) points.emplace_back(x);
  } else {
    points.emplace_back(std::nullopt);
  }
  Table table;
  table.columns = {"T", "eta", "N", "t_hat", "eps_hat", "eta_T", "eps_w", "k_true_sim",
                   "k_true_analytic", "k_pseudo_sim", "k_pseudo_analytic"};
  for (const auto& x : points) {
    const auto p = cfg.params_at(x);
    const double n = p.resolved_noise();
    const auto sim = sim::simulate(p, cfg.n_pulses, cfg.seed.value_or(1));
    const auto analytic = keyrate::keyrates(p);
    const double eps_w = channel::excess_noise_unmonitored(
        channel::excess_noise(p.transmission, n), p.transmission, p.lo_transmission);
    table.rows.push_back({p.transmission, p.lo_transmission, n, sim.unmonitored.t_hat,
                          sim.unmonitored.eps_hat, p.lo_transmission * p.transmission, eps_w,
                          sim.report.k_true, analytic.k_true, sim.report.k_pseudo,
                          analytic.k_pseudo});
  }
  return table;
}

Table figure(int id) {
  if (id < 2 || id > 5) throw ConfigError("figure id must be 2, 3, 4 or 5");
  const Direction dir = (id == 2 || id == 3) ? Direction::Reverse : Direction::Direct;
  Table table;
  ProtocolParams p;
  p.modulation_variance = kFigureModulationVariance;
  p.direction = dir;
  if (id == 2 || id == 4) {
    table.columns = {"eta", "T", "k_pseudo", "k_true"};
    // T = 1 is excluded: the attack has no loss port to inject noise through.
    const auto ts = Range{0.02, 0.99, 0.01}.points();
    for (double eta : kFigureEtas) {
      p.lo_transmission = eta;
      for (double t : ts) {
        p.transmission = t;
        const auto r = keyrate::keyrates(p);
        table.rows.push_back({eta, t, r.k_pseudo, r.k_true});
      }
    }
  } else {
    table.columns = {"distance_km", "one_minus_eta", "k_pseudo", "intercepted"};
    const auto xs = Range{0.0, 0.3, 0.002}.points();
    for (double d : kFigureDistancesKm) {
      p.transmission = channel::transmission_from_distance({d, 0.2});
      for (double x : xs) {
        p.lo_transmission = 1.0 - x;
        const auto r = keyrate::keyrates(p);
        table.rows.push_back({d, x, r.k_pseudo, r.intercepted});
      }
    }
  }
  return table;
}

double CheckResult::max_deviation() const {
  return std::max({max_dev_be, max_dev_ae, max_dev_purity, max_dev_spectrum});
}

CheckResult run_check(const CheckGrid& grid) {
  if (grid.modulation_variances.empty() || grid.lo_transmissions.empty()) {
    throw ConfigError("check grid is empty");
  }
  const auto ts = grid.transmission.points();
  CheckResult res;
  auto note = [&](double& slot, double dev, const std::string& what, const std::string& where) {
    slot = std::max(slot, dev);
    if (!(dev < grid.tolerance)) {
      std::ostringstream msg;
      msg << where << ": " << what << " deviation " << dev;
      res.failures.push_back(msg.str());
    }
  };
  auto physical = [&](const gaussian::CovarianceMatrix& g, const char* name,
                      const std::string& where) {
    const double lo = gaussian::symplectic_eigenvalues(g).min();
    res.min_symplectic = std::min(res.min_symplectic, lo);
    if (!(lo >= 1.0 - gaussian::kClampTolerance)) {
      std::ostringstream msg;
      msg << where << ": " << name << " unphysical, min symplectic eigenvalue " << lo;
      res.failures.push_back(msg.str());
    }
  };

  for (double vs : grid.modulation_variances) {
    for (double t : ts) {
      for (double eta : grid.lo_transmissions) {
        ProtocolParams p;
        p.modulation_variance = vs;
        p.transmission = t;
        p.lo_transmission = eta;
        p.validate();
        const double v = p.total_variance();
        const double n = p.resolved_noise();
        const std::string where = format_point("V_S=%g T=%.4g eta=%g", vs, t, eta);
        ++res.points;

        note(res.max_dev_be,
             std::abs(keyrate::holevo_be(v, t, n) - (cloner::holevo_be_cloner(v, t, n) + grid.perturb)),
             "chi_BE", where);
        note(res.max_dev_ae,
             std::abs(keyrate::holevo_ae(v, t, n) - (cloner::holevo_ae_cloner(v, t, n) + grid.perturb)),
             "chi_AE", where);

        const auto gamma_ab = channel::covariance_ab(p, Monitoring::Monitored);
        note(res.max_dev_purity,
             std::abs(gaussian::von_neumann_entropy(gamma_ab) - (cloner::eve_entropy(v, t, n) + grid.perturb)),
             "S(E) vs S(AB)", where);

        const auto bc = keyrate::conditional_bc_given_a(v, t, n);
        const auto closed = keyrate::bc_given_a_symplectic_eigenvalues(v, t, n);
        const auto generic = gaussian::symplectic_eigenvalues(bc).eigenvalues;
        note(res.max_dev_spectrum,
             std::max(std::abs(closed[0] - generic[0]), std::abs(closed[1] - generic[1])),
             "lambda_4,5 closed form vs generic", where);

        const auto eve = cloner::eve_covariance(v, t, n);
        physical(gamma_ab, "gamma_AB", where);
        physical(channel::covariance_ab(p, Monitoring::Unmonitored), "gamma_AB^w", where);
        physical(gaussian::conditional_covariance_homodyne(gamma_ab, 1, gaussian::Quadrature::Q),
                 "gamma_A|B", where);
        physical(bc, "gamma_BC|A", where);
        physical(eve.gamma_e, "gamma_E", where);
        physical(cloner::eve_given_alice(eve), "gamma_E|A", where);
        physical(cloner::eve_given_bob(eve), "gamma_E|B", where);
      }
    }
  }
  return res;
}

}  // namespace loattack::sweep
