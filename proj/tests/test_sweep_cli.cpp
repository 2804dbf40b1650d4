#include "doctest.h"

#include "loattack/channel_model.hpp"
#include "loattack/cli.hpp"
#include "loattack/errors.hpp"
#include "loattack/keyrate.hpp"
#include "loattack/sweep.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace loattack;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "loattack");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  csv.header = split(line);
  while (std::getline(ss, line)) {
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(std::stod(cell));
    REQUIRE(row.size() == csv.header.size());
    csv.rows.push_back(row);
  }
  return csv;
}

// "name   value" lines of the keyrate report.
std::map<std::string, std::string> parse_report(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string key, value;
  while (ss >> key >> value) out[key] = value;
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("loattack_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("keyrate subcommand") {
  SUBCASE("20 km, 1 - eta = 0.08, reverse reconciliation") {
    const auto r = run_cli({"keyrate", "--vs", "20", "--distance-km", "20", "--eta", "0.92",
                            "--direction", "rr"});
    REQUIRE(r.code == 0);
    const auto rep = parse_report(r.out);
    // The key is practically gone: the true rate sits within 0.005 of zero
    // while Bob's estimate still shows ~0.3 bits.
    CHECK(std::abs(std::stod(rep.at("k_true"))) < 0.005);
    CHECK(std::stod(rep.at("k_pseudo")) > 0.25);
    CHECK(rep.at("direction") == "rr");
  }
  SUBCASE("eta = 1 intercepts nothing") {
    const auto r = run_cli({"keyrate", "--vs", "20", "--t", "0.5", "--eta", "1", "--direction", "dr"});
    REQUIRE(r.code == 0);
    const auto rep = parse_report(r.out);
    CHECK(std::stod(rep.at("intercepted")) == 0.0);
    CHECK(rep.at("k_true") == rep.at("k_pseudo"));
  }
  SUBCASE("report fields are consistent") {
    const auto r = run_cli({"keyrate", "--vs", "20", "--t", "0.5", "--eta", "0.95", "--direction", "rr",
                            "--json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    const double i_ab = doc["i_ab"], ht = doc["holevo_true"], hp = doc["holevo_pseudo"];
    CHECK(doc["k_true"].get<double>() == doctest::Approx(i_ab - ht).epsilon(1e-12));
    CHECK(doc["k_pseudo"].get<double>() == doctest::Approx(i_ab - hp).epsilon(1e-12));
    CHECK(doc["intercepted"].get<double>() ==
          doctest::Approx(doc["k_pseudo"].get<double>() - doc["k_true"].get<double>()));
    CHECK(doc["secure"].get<bool>() == (doc["k_true"].get<double>() > 0.0));
    CHECK(doc["intercepted"].get<double>() > 0.0);
  }
  SUBCASE("six significant digits") {
    const auto r = run_cli({"keyrate", "--t", "0.5", "--eta", "0.9", "--noise", "1"});
    REQUIRE(r.code == 0);
    const auto rep = parse_report(r.out);
    std::string digits;
    for (char c : rep.at("i_ab"))
      if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    CHECK(digits.size() <= 7);
    CHECK(rep.at("i_ab") == "1.72972");
  }
  SUBCASE("invalid parameters exit 2") {
    CHECK(run_cli({"keyrate", "--t", "1.5"}).code == 2);
    CHECK(run_cli({"keyrate", "--eta", "0"}).code == 2);
    CHECK(run_cli({"keyrate", "--vs", "-3"}).code == 2);
    CHECK(run_cli({"keyrate", "--direction", "up"}).code == 2);
    CHECK(run_cli({"keyrate", "--t", "abc"}).code == 2);
    const auto r = run_cli({"keyrate", "--t", "1.0", "--eta", "0.9"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }
  SUBCASE("no subcommand exits 2") { CHECK(run_cli({}).code == 2); }
}

TEST_CASE("figure series") {
  SUBCASE("columns and grids") {
    for (int id : {2, 4}) {
      const auto csv = parse_csv(run_cli({"figure", "--id", std::to_string(id)}).out);
      CHECK(csv.header == std::vector<std::string>{"eta", "T", "k_pseudo", "k_true"});
      CHECK(csv.rows.size() == sweep::kFigureEtas.size() * 98);
      CHECK(csv.rows.front()[csv.col("T")] == doctest::Approx(0.02));
      CHECK(csv.rows.back()[csv.col("T")] == doctest::Approx(0.99));
    }
    for (int id : {3, 5}) {
      const auto csv = parse_csv(run_cli({"figure", "--id", std::to_string(id)}).out);
      CHECK(csv.header ==
            std::vector<std::string>{"distance_km", "one_minus_eta", "k_pseudo", "intercepted"});
      CHECK(csv.rows.size() == sweep::kFigureDistancesKm.size() * 151);
      CHECK(csv.rows.back()[csv.col("one_minus_eta")] == doctest::Approx(0.3));
    }
  }
  SUBCASE("figure 2 eta = 1 control series") {
    const auto table = sweep::figure(2);
    std::size_t seen = 0;
    for (const auto& row : table.rows) {
      if (row[0] != 1.0) continue;
      REQUIRE(std::abs(row[2] - row[3]) <= 1e-12);
      ++seen;
    }
    CHECK(seen == 98);
  }
  SUBCASE("figure 3: at 20 km the intercepted curve meets k_pseudo near 1 - eta = 0.08") {
    const auto csv = parse_csv(run_cli({"figure", "--id", "3"}).out);
    double meet = -1.0;
    for (const auto& row : csv.rows) {
      if (row[0] != 20.0) continue;
      if (row[3] >= row[2]) {
        meet = row[1];
        break;
      }
    }
    CHECK(meet >= 0.06);
    CHECK(meet <= 0.10);
  }
  SUBCASE("figure 4: the zero-noise series crosses near T = 0.5") {
    const auto table = sweep::figure(4);
    std::map<double, double> true_cross, pseudo_cross;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      const auto& a = table.rows[i - 1];
      const auto& b = table.rows[i];
      if (a[0] != b[0]) continue;
      if (a[3] <= 0.0 && b[3] > 0.0) true_cross[b[0]] = b[1];
      if (a[2] <= 0.0 && b[2] > 0.0) pseudo_cross[b[0]] = b[1];
    }
    CHECK(true_cross.at(1.0) > 0.49);
    CHECK(true_cross.at(1.0) <= 0.51);
    // Bob's view is a clean channel of transmission eta T.
    for (double eta : sweep::kFigureEtas) {
      CHECK(eta * pseudo_cross.at(eta) > 0.49);
      CHECK(eta * pseudo_cross.at(eta) < 0.52);
      CHECK(true_cross.at(eta) >= pseudo_cross.at(eta));
    }
  }
  SUBCASE("bad id or unwritable output") {
    CHECK(run_cli({"figure", "--id", "7"}).code == 2);
    CHECK(run_cli({"figure"}).code == 2);
    CHECK(run_cli({"figure", "--id", "3", "--out", "/nonexistent-dir/x/fig3.csv"}).code == 3);
  }
  SUBCASE("file output is byte-identical across runs") {
    TempDir tmp;
    const auto a = tmp.file("a.csv"), b = tmp.file("b.csv");
    REQUIRE(run_cli({"figure", "--id", "5", "--out", a.string()}).code == 0);
    REQUIRE(run_cli({"figure", "--id", "5", "--out", b.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == run_cli({"figure", "--id", "5"}).out);
  }
  SUBCASE("json mirror") {
    const auto r = run_cli({"figure", "--id", "2", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc.is_array());
    CHECK(doc.size() == sweep::kFigureEtas.size() * 98);
    CHECK(doc[0].contains("k_pseudo"));
    CHECK(run_cli({"figure", "--id", "2", "--format", "xml"}).code == 2);
  }
}

TEST_CASE("rows satisfy the report arithmetic on read-back") {
  const auto r = run_cli({"sweep", "--axis", "one_minus_eta", "--start", "0", "--stop", "0.2",
                          "--step", "0.01", "--distance-km", "30", "--direction", "dr"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.rows.size() == 21);
  for (const auto& row : csv.rows) {
    const double i_ab = row[csv.col("i_ab")];
    // Three values each rounded to nine significant digits.
    const double tol = 2e-8 * std::max(1.0, i_ab);
    REQUIRE(std::abs(row[csv.col("k_true")] - (i_ab - row[csv.col("holevo_true")])) < tol);
    REQUIRE(std::abs(row[csv.col("k_pseudo")] - (i_ab - row[csv.col("holevo_pseudo")])) < tol);
    REQUIRE(std::abs(row[csv.col("intercepted")] -
                     (row[csv.col("k_pseudo")] - row[csv.col("k_true")])) < tol);
    REQUIRE((row[csv.col("secure")] == 1.0) == (row[csv.col("k_true")] > 0.0));
  }
}

TEST_CASE("sweep configuration") {
  TempDir tmp;
  const auto cfg = tmp.file("sweep.json");
  write_file(cfg, R"({"axis": "T", "start": 0.1, "stop": 0.9, "step": 0.1, "vs": 20,
                      "eta": 0.9, "direction": "rr"})");

  SUBCASE("config file") {
    const auto r = run_cli({"sweep", "--config", cfg.string()});
    REQUIRE(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK(csv.rows.size() == 9);
    CHECK(csv.rows[0][csv.col("eta")] == doctest::Approx(0.9));
  }
  SUBCASE("flags override the file") {
    const auto r = run_cli({"sweep", "--config", cfg.string(), "--eta", "0.95", "--step", "0.2"});
    REQUIRE(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK(csv.rows.size() == 5);
    CHECK(csv.rows[0][csv.col("eta")] == doctest::Approx(0.95));
  }
  SUBCASE("matches the library") {
    auto c = sweep::SweepConfig::load(cfg.string());
    const auto table = sweep::run_sweep(c);
    CHECK(sweep::to_csv(table) == run_cli({"sweep", "--config", cfg.string()}).out);
  }
  SUBCASE("rejected configurations") {
    write_file(tmp.file("bad.json"), R"({"axis": "T", "colour": "red"})");
    CHECK(run_cli({"sweep", "--config", tmp.file("bad.json").string()}).code == 2);
    write_file(tmp.file("broken.json"), "{ not json");
    CHECK(run_cli({"sweep", "--config", tmp.file("broken.json").string()}).code == 2);
    CHECK(run_cli({"sweep", "--config", tmp.file("missing.json").string()}).code == 3);
    CHECK(run_cli({"sweep", "--config", cfg.string(), "--step", "0"}).code == 2);
    CHECK(run_cli({"sweep", "--config", cfg.string(), "--start", "0.95"}).code == 2);
    CHECK(run_cli({"sweep", "--axis", "colour"}).code == 2);
  }
  SUBCASE("json output") {
    const auto r = run_cli({"sweep", "--config", cfg.string(), "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.size() == 9);
    CHECK(doc[8]["T"].get<double>() == doctest::Approx(0.9));
  }
}

TEST_CASE("range and config parsing") {
  CHECK(sweep::Range{0.0, 0.3, 0.002}.points().size() == 151);
  CHECK(sweep::Range{0.5, 0.5, 0.1}.points().size() == 1);
  CHECK_THROWS_AS((sweep::Range{0.0, 1.0, -0.1}.points()), ConfigError);
  CHECK_THROWS_AS((sweep::Range{1.0, 0.0, 0.1}.points()), ConfigError);
  CHECK(sweep::parse_axis("distance") == sweep::Axis::Distance);
  CHECK_THROWS_AS(sweep::parse_axis("x"), ConfigError);
  const auto c = sweep::SweepConfig::from_json(
      nlohmann::json::parse(R"({"t": 0.3, "noise": 1.2, "n_pulses": 20000, "seed": 9})"));
  CHECK(c.transmission.value() == 0.3);
  CHECK(c.noise.value() == 1.2);
  CHECK(c.n_pulses == 20000);
  CHECK(c.seed.value() == 9);
  CHECK_THROWS_AS(sweep::SweepConfig::from_json(nlohmann::json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("check subcommand") {
  const auto ok = run_cli({"check"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("check passed") != std::string::npos);
  CHECK(ok.out.find("max deviation") != std::string::npos);

  const auto bad = run_cli({"check", "--perturb", "1e-6"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("FAIL") != std::string::npos);

  CHECK(run_cli({"check", "--vs", ""}).code == 2);
  CHECK(run_cli({"check", "--t-start", "0.9", "--t-stop", "0.1"}).code == 2);
  CHECK(run_cli({"check", "--vs", "20", "--eta", "0.9", "--t-start", "0.5", "--t-stop", "0.5"}).code == 0);

  sweep::CheckGrid grid;
  const auto res = sweep::run_check(grid);
  CHECK(res.points == 4 * 19 * 4);
  CHECK(res.max_deviation() < 1e-9);
  CHECK(res.min_symplectic >= 1.0 - 1e-9);
}

TEST_CASE("simulate subcommand") {
  const std::vector<std::string> base = {"simulate", "--t", "0.5", "--eta", "0.9", "--n-pulses",
                                         "1000000", "--seed", "1"};
  const auto r = run_cli(base);
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 1);
  const auto& row = csv.rows[0];
  CHECK(std::abs(row[csv.col("t_hat")] - 0.45) < 0.005);
  CHECK(std::abs(row[csv.col("eps_hat")]) < 0.02);
  CHECK(row[csv.col("eta_T")] == doctest::Approx(0.45));
  CHECK(std::abs(row[csv.col("eps_w")]) < 1e-9);
  CHECK(std::abs(row[csv.col("k_true_sim")] - row[csv.col("k_true_analytic")]) < 0.02);

  SUBCASE("same seed, same bytes") { CHECK(run_cli(base).out == r.out); }
  SUBCASE("eta = 1 control") {
    const auto c = parse_csv(
        run_cli({"simulate", "--t", "0.5", "--eta", "1", "--n-pulses", "1000000", "--seed", "3"}).out);
    CHECK(std::abs(c.rows[0][c.col("eps_hat")]) < 0.02);
  }
  SUBCASE("seed from the environment, overridden by the flag") {
    const std::vector<std::string> no_seed = {"simulate", "--t", "0.5", "--eta", "0.9",
                                              "--n-pulses", "20000"};
    ::setenv("LOATTACK_SEED", "1", 1);
    const auto env1 = run_cli(no_seed).out;
    ::setenv("LOATTACK_SEED", "2", 1);
    const auto env2 = run_cli(no_seed).out;
    auto flagged = no_seed;
    flagged.insert(flagged.end(), {"--seed", "1"});
    const auto flag1 = run_cli(flagged).out;
    ::setenv("LOATTACK_SEED", "zebra", 1);
    CHECK(run_cli(no_seed).code == 2);
    ::unsetenv("LOATTACK_SEED");
    const auto dflt = run_cli(no_seed).out;
    CHECK(env1 != env2);
    CHECK(env1 == flag1);
    CHECK(dflt == env1);
  }
  SUBCASE("config file and bad pulse counts") {
    TempDir tmp;
    write_file(tmp.file("sim.json"), R"({"t": 0.5, "eta": 0.9, "n_pulses": 20000, "seed": 5})");
    const auto from_file = run_cli({"simulate", "--config", tmp.file("sim.json").string()});
    REQUIRE(from_file.code == 0);
    CHECK(from_file.out ==
          run_cli({"simulate", "--t", "0.5", "--eta", "0.9", "--n-pulses", "20000", "--seed", "5"}).out);
    CHECK(run_cli({"simulate", "--t", "0.5", "--eta", "0.9", "--n-pulses", "9999"}).code == 2);
    CHECK(run_cli({"simulate", "--t", "0.5", "--eta", "0.9", "--vs", "0", "--n-pulses", "20000"}).code == 2);
  }
}
