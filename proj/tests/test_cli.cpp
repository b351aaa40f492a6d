#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "cli_app.hpp"
#include "test_helpers.hpp"

using namespace statdist;
using statdist::io::json;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("dist reports quadrature and closed form per row", "[cli]") {
  const auto r = run_cli({"dist", "--theta1", "0.2", "--theta2", "1.2"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["command"] == "dist");
  CHECK(report["config"]["theta1"] == 0.2);
  CHECK(report["law"]["kind"] == "cos2");
  CHECK(report["proportionality"]["proportional"] == true);
  REQUIRE(report["rows"].size() == 1);
  const auto& row = report["rows"][0];
  CHECK(std::abs(row["quadrature"]["value"].get<double>() - 1.0) < 1e-8);
  CHECK(std::abs(row["closed_form"]["value"].get<double>() - 1.0) < 1e-12);
  CHECK(row["abs_diff"].get<double>() < 1e-8);
}

TEST_CASE("dist emits csv rows with the sweep", "[cli]") {
  const auto r = run_cli({"dist", "--theta1", "0.2", "--theta2", "1.2",
                          "--sweep", "4", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "theta1,theta2,d_quadrature,d_closed_form,abs_diff");
  // Final sweep row ends exactly at theta2.
  CHECK(lines[4].rfind("0.20000000000000001,1.2,", 0) == 0);
}

TEST_CASE("count reports the schedule and extrapolation", "[cli]") {
  const auto r = run_cli({"count", "--theta1", "0.1", "--theta2", "1.1",
                          "--schedule", "100,10000"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  REQUIRE(report["points"].size() == 2);
  CHECK(report["points"][0]["n"] == 100);
  CHECK(report["points"][0]["D"] == 9);
  CHECK(report["points"][1]["D"] == 99);
  CHECK(std::abs(report["richardson"]["value"].get<double>() - 1.0) < 1e-9);
  CHECK(report["richardson"]["valid"] == true);
  CHECK(std::abs(report["quadrature_distance"].get<double>() - 1.0) < 1e-8);

  const auto csv = run_cli({"count", "--theta1", "0.1", "--theta2", "1.1",
                            "--schedule", "100,10000", "--format", "csv"});
  const auto lines = lines_of(csv.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,D,D_over_sqrt_n");
  CHECK(lines[1] == "100,9,0.90000000000000002");
}

TEST_CASE("count surfaces numeric failures as exit 3", "[cli]") {
  const auto r = run_cli({"count", "--theta1", "0", "--theta2", "1.0"});
  CHECK(r.code == 3);
  CHECK(r.err.find("uncertainty vanishes") != std::string::npos);
}

TEST_CASE("simulate needs at least one mode", "[cli]") {
  const auto r = run_cli({"simulate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("nothing to simulate") != std::string::npos);
}

TEST_CASE("simulate coverage section reports the error model", "[cli]") {
  const auto r = run_cli({"simulate", "--theta-true", "0.6", "--n", "10000",
                          "--replicates", "60", "--seed", "7"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  const auto& cov = report["coverage"];
  CHECK(cov["replicates"] == 60);
  CHECK(cov["coverage"].get<double>() > 0.4);
  CHECK(cov["coverage"].get<double>() <= 1.0);
  CHECK(std::abs(cov["mean_p_hat"].get<double>() - 0.681) < 0.02);

  const auto again = run_cli({"simulate", "--theta-true", "0.6", "--n",
                              "10000", "--replicates", "60", "--seed", "7"});
  CHECK(again.out == r.out);
}

TEST_CASE("simulate convergence section follows the schedule", "[cli]") {
  const auto r = run_cli({"simulate", "--theta1", "0.2", "--theta2", "1.2",
                          "--schedule", "100,400", "--seed", "3", "--format",
                          "csv"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,D,D_over_sqrt_n,d_analytic");
  CHECK(lines[1].substr(0, 4) == "100,");

  const auto incomplete = run_cli({"simulate", "--theta1", "0.2"});
  CHECK(incomplete.code == 2);
}

TEST_CASE("simulate produces distance matrices from sheets", "[cli]") {
  const auto sheet = testutil::data_path("sheet_small.json");
  const auto r = run_cli({"simulate", "--sheet", sheet, "--matrix-mode",
                          "analytic", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "id,a,b,c");
  CHECK(lines[1].substr(0, 4) == "a,0,");

  const json report =
      json::parse(run_cli({"simulate", "--sheet", sheet, "--matrix-mode",
                           "analytic"})
                      .out);
  const auto& matrix = report["matrix"];
  REQUIRE(matrix["ids"].size() == 3);
  CHECK(std::abs(matrix["values"][0][1].get<double>() - 0.3) < 1e-8);
  CHECK(std::abs(matrix["values"][0][2].get<double>() - 0.6) < 1e-8);
  CHECK(matrix["failures"].empty());

  const auto bad = run_cli({"simulate", "--sheet", sheet, "--matrix-mode",
                            "bogus"});
  CHECK(bad.code == 2);
}

TEST_CASE("hilbert compares states and searches bases", "[cli]") {
  const auto r = run_cli({"hilbert", "--psi1", "[[1,0],[0,0]]", "--psi2",
                          "[[0,0],[1,0]]", "--restarts", "2"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(std::abs(report["d"].get<double>() - kHalfPi) < 1e-12);
  CHECK(std::abs(report["optimization"]["d_max"].get<double>() - kHalfPi) <
        1e-6);
  CHECK(report["optimization"]["best_basis"].size() == 2);

  const auto csv = run_cli({"hilbert", "--dim", "3", "--seed", "11",
                            "--random-bases", "2", "--restarts", "2",
                            "--format", "csv"});
  REQUIRE(csv.code == 0);
  const auto lines = lines_of(csv.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "basis,d_A,d");

  const auto mismatch = run_cli({"hilbert", "--psi1", "[[1,0],[0,0]]"});
  CHECK(mismatch.code == 2);
  const auto garbage = run_cli({"hilbert", "--psi1", "[[1,0],", "--psi2",
                                "[[0,0],[1,0]]"});
  CHECK(garbage.code == 2);
}

TEST_CASE("fisher tabulates the ratio against the separation", "[cli]") {
  const auto r = run_cli({"fisher", "--theta", "0.7", "--delta", "1e-3",
                          "--halvings", "2", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "delta,W,ratio,abs_error");

  const json report = json::parse(
      run_cli({"fisher", "--theta", "0.7", "--halvings", "1"}).out);
  CHECK(std::abs(report["fisher_information"].get<double>() - 4.0) < 1e-9);
  for (const auto& row : report["rows"]) {
    CHECK(std::abs(row["ratio"].get<double>() - 1.0) < 1e-6);
  }
}

TEST_CASE("channels encodes, decodes, and sweeps", "[cli]") {
  const auto r = run_cli({"channels", "--theta", "0.5"});
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["bank"]["count"] == 8);
  CHECK(report["encode"]["roundtrip_error"].get<double>() < 1e-9);

  const auto csv = run_cli({"channels", "--theta", "0.5", "--format", "csv"});
  const auto lines = lines_of(csv.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "c0,c1,c2,c3,c4,c5,c6,c7");

  const json sweep = json::parse(
      run_cli({"channels", "--sweep", "100"}).out);
  CHECK(sweep["sweep"]["max_error"].get<double>() < 1e-6);

  const json sim = json::parse(
      run_cli({"channels", "--theta", "0.4", "--theta2", "0.5"}).out);
  CHECK(sim["similarity"]["value"].get<double>() > 0.0);

  CHECK(run_cli({"channels"}).code == 2);
  CHECK(run_cli({"channels", "--theta2", "0.5"}).code == 2);
  CHECK(run_cli({"channels", "--channels", "2", "--theta", "0.5"}).code == 2);
}

TEST_CASE("law specs cover the three families", "[cli]") {
  const auto scaled = run_cli({"dist", "--law", "cos2:2", "--theta1", "0.1",
                               "--theta2", "0.7"});
  REQUIRE(scaled.code == 0);
  const json report = json::parse(scaled.out);
  CHECK(report["law"]["kind"] == "cos2_scaled");
  CHECK(std::abs(report["rows"][0]["closed_form"]["value"].get<double>() -
                 1.2) < 1e-9);

  const auto table = run_cli({"dist", "--law",
                              "table:" + testutil::data_path("coarse_table.csv"),
                              "--theta1", "0.1", "--theta2", "1.4"});
  CHECK(table.code == 0);

  CHECK(run_cli({"dist", "--law", "nope", "--theta1", "0", "--theta2", "1"})
            .code == 2);
  CHECK(run_cli({"dist", "--law", "cos2:zero", "--theta1", "0", "--theta2",
                 "1"})
            .code == 2);
  const auto bad = run_cli({"dist", "--law",
                            "table:" + testutil::data_path("bad_table.csv"),
                            "--theta1", "0.1", "--theta2", "0.9"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("row 3") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"dist"}).code == 2);
  CHECK(run_cli({"dist", "--theta1", "0.2", "--theta2", "1.2", "--format",
                 "xml"})
            .code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"dist", "--theta1", "-0.5", "--theta2", "1.0"}).code == 2);

  const auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("dist") != std::string::npos);
}

TEST_CASE("config files feed flags with command-line precedence", "[cli]") {
  const auto config = testutil::temp_path("statdist_cli_config.ini");
  {
    std::ofstream out(config);
    out << "theta1=0.2\n";
    out << "theta2=0.9\n";
  }
  const auto from_config = run_cli({"dist", "--config", config});
  REQUIRE(from_config.code == 0);
  CHECK(json::parse(from_config.out)["config"]["theta2"] == 0.9);

  const auto overridden =
      run_cli({"dist", "--config", config, "--theta2", "1.2"});
  REQUIRE(overridden.code == 0);
  const json report = json::parse(overridden.out);
  CHECK(report["config"]["theta1"] == 0.2);
  CHECK(report["config"]["theta2"] == 1.2);
}

TEST_CASE("artifacts write byte-identically to files and stdout", "[cli]") {
  const auto path_a = testutil::temp_path("statdist_cli_a.csv");
  const auto path_b = testutil::temp_path("statdist_cli_b.csv");
  const std::vector<std::string> base = {"count",    "--theta1", "0.1",
                                         "--theta2", "1.1",      "--schedule",
                                         "100,400",  "--format", "csv"};
  auto with_out = [&](const std::string& path) {
    auto args = base;
    args.push_back("--out");
    args.push_back(path);
    return args;
  };
  REQUIRE(run_cli(with_out(path_a)).code == 0);
  REQUIRE(run_cli(with_out(path_b)).code == 0);
  CHECK(slurp(path_a) == slurp(path_b));
  const auto stdout_run = run_cli(base);
  CHECK(stdout_run.out == slurp(path_a));
  CHECK(run_cli({"count", "--theta1", "0.1", "--theta2", "1.1", "--out",
                 "/no/such/dir/x.json"})
            .code == 2);
}

TEST_CASE("degrees flag annotates the console only", "[cli]") {
  const auto plain = run_cli({"dist", "--theta1", "0.2", "--theta2", "1.2"});
  const auto degrees =
      run_cli({"dist", "--theta1", "0.2", "--theta2", "1.2", "--degrees"});
  REQUIRE(degrees.code == 0);
  CHECK(degrees.out == plain.out);
  CHECK(degrees.err.find("deg") != std::string::npos);
}
