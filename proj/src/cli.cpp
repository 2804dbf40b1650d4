#include "loattack/cli.hpp"

#include "loattack/channel_model.hpp"
#include "loattack/errors.hpp"
#include "loattack/keyrate.hpp"
#include "loattack/sweep.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>

namespace loattack::cli {
namespace {

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::uint64_t default_seed() {
  const char* env = std::getenv("LOATTACK_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw ConfigError("LOATTACK_SEED must be an unsigned integer");
  return v;
}

std::string fmt6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Options shared by `keyrate`, `sweep` and `simulate`. Unset flags leave the
// config-file value alone.
struct PointFlags {
  std::optional<double> vs, t, distance_km, loss, eta, noise;
  std::optional<std::string> direction;

  void attach(CLI::App* app) {
    app->add_option("--vs", vs, "modulation variance V_S (shot-noise units)");
    app->add_option("--t", t, "channel transmission T");
    app->add_option("--distance-km", distance_km, "fiber length; sets T from the loss");
    app->add_option("--loss", loss, "fiber loss in dB/km (default 0.2)");
    app->add_option("--eta", eta, "LO transmission eta");
    app->add_option("--noise", noise, "Eve's noise variance N (default: zero apparent excess noise)");
    app->add_option("--direction", direction, "reconciliation: dr or rr");
  }

  void apply(sweep::SweepConfig& cfg) const {
    if (vs) cfg.modulation_variance = *vs;
    if (t) {
      cfg.transmission = *t;
      cfg.distance_km.reset();
    }
    if (distance_km) {
      cfg.distance_km = *distance_km;
      if (!t) cfg.transmission.reset();
    }
    if (loss) cfg.loss_db_per_km = *loss;
    if (eta) cfg.lo_transmission = *eta;
    if (noise) cfg.noise = *noise;
    if (direction) cfg.direction = parse_direction(*direction);
  }
};

struct OutputFlags {
  std::optional<std::string> out, format;

  void attach(CLI::App* app) {
    app->add_option("--out", out, "output path (default: standard output)");
    app->add_option("--format", format, "csv or json");
  }

  void apply(sweep::SweepConfig& cfg) const {
    if (out) cfg.output = *out;
    if (format) cfg.format = sweep::parse_format(*format);
  }
};

void print_report(const ProtocolParams& p, const keyrate::KeyRateReport& r, bool as_json,
                  std::ostream& out) {
  if (as_json) {
    nlohmann::json doc = {
        {"direction", std::string(to_string(p.direction))},
        {"vs", p.modulation_variance},
        {"T", p.transmission},
        {"eta", p.lo_transmission},
        {"N", p.resolved_noise()},
        {"i_ab", r.i_ab},
        {"holevo_true", r.holevo_true},
        {"holevo_pseudo", r.holevo_pseudo},
        {"k_true", r.k_true},
        {"k_pseudo", r.k_pseudo},
        {"intercepted", r.intercepted},
        {"secure", r.secure},
    };
    out << doc.dump(2) << "\n";
    return;
  }
  out << "direction      " << to_string(p.direction) << "\n"
      << "vs             " << fmt6(p.modulation_variance) << "\n"
      << "T              " << fmt6(p.transmission) << "\n"
      << "eta            " << fmt6(p.lo_transmission) << "\n"
      << "N              " << fmt6(p.resolved_noise()) << "\n"
      << "i_ab           " << fmt6(r.i_ab) << "\n"
      << "holevo_true    " << fmt6(r.holevo_true) << "\n"
      << "holevo_pseudo  " << fmt6(r.holevo_pseudo) << "\n"
      << "k_true         " << fmt6(r.k_true) << "\n"
      << "k_pseudo       " << fmt6(r.k_pseudo) << "\n"
      << "intercepted    " << fmt6(r.intercepted) << "\n"
      << "secure         " << (r.secure ? "true" : "false") << "\n";
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("not a number list: '" + text + "'");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Key-rate analysis of CV-QKD under local-oscillator intensity attack", "loattack"};
  app.require_subcommand(1);

  PointFlags keyrate_point;
  bool keyrate_json = false;
  auto* keyrate_cmd = app.add_subcommand("keyrate", "key-rate report for one parameter point");
  keyrate_point.attach(keyrate_cmd);
  keyrate_cmd->add_flag("--json", keyrate_json, "print the report as JSON");

  int figure_id = 0;
  OutputFlags figure_out;
  auto* figure_cmd = app.add_subcommand("figure", "data series for figure 2, 3, 4 or 5");
  figure_cmd->add_option("--id", figure_id, "figure id")->required();
  figure_out.attach(figure_cmd);

  std::string sweep_config;
  std::optional<std::string> sweep_axis;
  std::optional<double> sweep_start, sweep_stop, sweep_step;
  PointFlags sweep_point;
  OutputFlags sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "key rates along one parameter axis");
  sweep_cmd->add_option("--config", sweep_config, "flat JSON config file");
  sweep_cmd->add_option("--axis", sweep_axis, "T, distance or one_minus_eta");
  sweep_cmd->add_option("--start", sweep_start);
  sweep_cmd->add_option("--stop", sweep_stop);
  sweep_cmd->add_option("--step", sweep_step);
  sweep_point.attach(sweep_cmd);
  sweep_out.attach(sweep_cmd);

  std::string sim_config;
  std::optional<std::size_t> sim_pulses;
  std::optional<std::uint64_t> sim_seed;
  PointFlags sim_point;
  OutputFlags sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimates vs analytic values");
  sim_cmd->add_option("--config", sim_config, "flat JSON config file");
  sim_cmd->add_option("--n-pulses", sim_pulses, "pulses per point (>= 10000)");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed (default: $LOATTACK_SEED or 1)");
  sim_point.attach(sim_cmd);
  sim_out.attach(sim_cmd);

  double perturb = 0.0;
  std::string check_vs = "1,5,20,40";
  std::string check_eta = "0.85,0.9,0.95,1.0";
  sweep::Range check_t{0.05, 0.95, 0.05};
  auto* check_cmd = app.add_subcommand("check", "oracle-equivalence and physicality grid");
  check_cmd->add_option("--perturb", perturb, "offset added to the oracle side (harness test)");
  check_cmd->add_option("--vs", check_vs, "comma-separated V_S values");
  check_cmd->add_option("--eta", check_eta, "comma-separated eta values");
  check_cmd->add_option("--t-start", check_t.start);
  check_cmd->add_option("--t-stop", check_t.stop);
  check_cmd->add_option("--t-step", check_t.step);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "loattack: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*keyrate_cmd) {
      sweep::SweepConfig cfg;
      keyrate_point.apply(cfg);
      const auto p = cfg.params_at(std::nullopt);
      print_report(p, keyrate::keyrates(p), keyrate_json, out);
      return kOk;
    }
    if (*figure_cmd) {
      sweep::SweepConfig cfg;
      figure_out.apply(cfg);
      const auto table = sweep::figure(figure_id);
      write_output(cfg.output, sweep::render(table, cfg.format), out);
      return kOk;
    }
    if (*sweep_cmd) {
      sweep::SweepConfig cfg = sweep_config.empty() ? sweep::SweepConfig{}
                                                    : sweep::SweepConfig::load(sweep_config);
      if (sweep_axis) cfg.axis = sweep::parse_axis(*sweep_axis);
      if (sweep_start) cfg.range.start = *sweep_start;
      if (sweep_stop) cfg.range.stop = *sweep_stop;
      if (sweep_step) cfg.range.step = *sweep_step;
      sweep_point.apply(cfg);
      sweep_out.apply(cfg);
      const auto table = sweep::run_sweep(cfg);
      write_output(cfg.output, sweep::render(table, cfg.format), out);
      return kOk;
    }
    if (*sim_cmd) {
      sweep::SweepConfig cfg =
          sim_config.empty() ? sweep::SweepConfig{} : sweep::SweepConfig::load(sim_config);
      if (!cfg.seed) cfg.seed = default_seed();
      if (sim_pulses) cfg.n_pulses = *sim_pulses;
      if (sim_seed) cfg.seed = *sim_seed;
      sim_point.apply(cfg);
      sim_out.apply(cfg);
      const auto table = sweep::run_simulation(cfg);
      write_output(cfg.output, sweep::render(table, cfg.format), out);
      return kOk;
    }
    if (*check_cmd) {
      sweep::CheckGrid grid;
      grid.modulation_variances = parse_list(check_vs);
      grid.lo_transmissions = parse_list(check_eta);
      grid.transmission = check_t;
      grid.perturb = perturb;
      const auto res = sweep::run_check(grid);
      out << "grid points           " << res.points << "\n"
          << "max |chi_BE diff|     " << res.max_dev_be << "\n"
          << "max |chi_AE diff|     " << res.max_dev_ae << "\n"
          << "max |S(E) - S(AB)|    " << res.max_dev_purity << "\n"
          << "max spectrum diff     " << res.max_dev_spectrum << "\n"
          << "min symplectic eig    " << res.min_symplectic << "\n"
          << "max deviation         " << res.max_deviation() << "\n";
      for (const auto& f : res.failures) err << "FAIL " << f << "\n";
      out << (res.ok() ? "check passed" : "check FAILED") << "\n";
      return res.ok() ? kOk : kInvariantFailure;
    }
  } catch (const IoError& e) {
    err << "loattack: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "loattack: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace loattack::cli
