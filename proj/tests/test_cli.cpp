#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flatgp/cli.hpp"
#include "flatgp/dataset.hpp"
#include "flatgp/error.hpp"
#include "oracles.hpp"

using namespace flatgp;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
  json summary() const { return json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "flatgp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "flatgp_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

template <class Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("dataset parsing", "[cli]") {
  auto ds = parse_dataset_text("a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  CHECK(ds.X.size() == 3);
  CHECK(ds.X.dim() == 2);
  CHECK(ds.y.size() == 3);
  CHECK(ds.y(2) == 9.0);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});

  auto named = parse_dataset_text("y,a\n1,2\n3,4\n", "y");
  CHECK(named.y(1) == 3.0);
  CHECK(named.X.point(1)[0] == 4.0);

  CHECK(error_of([] { parse_dataset_text(""); }) == ErrorCode::EmptyDataset);
  CHECK(error_of([] { parse_dataset_text("a,y\n"); }) == ErrorCode::EmptyDataset);
  CHECK(error_of([] { parse_dataset("/nonexistent/file.csv"); }) == ErrorCode::MissingFile);
  try {
    parse_dataset_text("a,y\n1,2\n3\n");
    FAIL("expected RaggedRow");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::RaggedRow);
    CHECK(e.row() == 3);
  }
  try {
    parse_dataset_text("a,y\n1,2\n3,abc\n");
    FAIL("expected NonNumericCell");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::NonNumericCell);
    CHECK(e.row() == 3);
    CHECK(e.column() == 2);
  }
  CHECK(error_of([] { parse_dataset_text("a,y\nnan,2\n"); }) == ErrorCode::NonFiniteCell);
}

TEST_CASE("17-digit decimal round trip", "[cli]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::string text = "x,y\n";
  std::vector<double> vals;
  for (int i = 0; i < 200; ++i) {
    double a = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 200), b = u(rng) / 3.0;
    vals.push_back(a);
    vals.push_back(b);
    text += format_double(a) + "," + format_double(b) + "\n";
  }
  auto ds = parse_dataset_text(text);
  for (int i = 0; i < 200; ++i) {
    CHECK(ds.X.point(i)[0] == vals[2 * i]);
    CHECK(ds.y(i) == vals[2 * i + 1]);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("dof grid output", "[cli]") {
  auto o = run_cli({"dof-grid", "--n", "8", "--eps-grid", "0.01:10:20", "--gamma-grid", "1e-3:1e6:20",
                    "--format", "csv", "--seed", "4"});
  REQUIRE(o.code == cli::Success);
  auto rows = read_csv(o.out);
  REQUIRE(rows.size() == 401);
  CHECK(rows[0] == std::vector<std::string>{"eps", "gamma", "dof", "status"});
  for (size_t e = 0; e < 20; ++e)
    for (size_t g = 1; g < 20; ++g) {
      const auto& prev = rows[1 + e * 20 + g - 1];
      const auto& cur = rows[1 + e * 20 + g];
      CHECK(cur[0] == prev[0]);
      CHECK(std::stod(cur[2]) >= std::stod(prev[2]));
    }
}

TEST_CASE("output files embed the configuration and reproduce exactly", "[cli]") {
  std::string prefix = scratch("grid").string();
  std::vector<std::string> args = {"criteria-grid", "--kernel", "matern", "--nu", "2.5", "--n", "10",
                                   "--eps-grid", "0.5:5:4", "--gamma-grid", "0.1:100:4", "--seed", "11",
                                   "--out", prefix};
  REQUIRE(run_cli(args).code == cli::Success);
  std::ifstream js(prefix + ".json"), cs(prefix + ".csv");
  REQUIRE(js.good());
  REQUIRE(cs.good());
  std::stringstream a, b;
  a << js.rdbuf();
  b << cs.rdbuf();
  json s = json::parse(a.str());
  CHECK(s["seed"] == 11);
  CHECK(s["config"]["kernel"] == "matern");
  CHECK(s["config"]["nu"] == 2.5);
  CHECK(s["status"] == "ok");
  CHECK(s["results"]["argmin"].contains("sure"));
  CHECK(read_csv(b.str()).size() == 17);

  REQUIRE(run_cli(args).code == cli::Success);
  std::ifstream js2(prefix + ".json"), cs2(prefix + ".csv");
  std::stringstream a2, b2;
  a2 << js2.rdbuf();
  b2 << cs2.rdbuf();
  CHECK(a.str() == a2.str());
  CHECK(b.str() == b2.str());
}

TEST_CASE("fit and predict from a data file", "[cli]") {
  fs::path data = scratch("data.csv");
  {
    std::ofstream f(data);
    f << "x,y\n";
    for (int i = 0; i < 9; ++i) f << format_double(i / 8.0) << "," << format_double(std::sin(3.0 * i / 8.0)) << "\n";
  }
  auto fit = run_cli({"fit", "--data", data.string(), "--eps", "2", "--gamma", "3", "--sigma2", "0.01"});
  REQUIRE(fit.code == cli::Success);
  json s = fit.summary();
  CHECK(s["results"]["n"] == 9);
  CHECK(s["rows"].size() == 9);
  CHECK(s["results"]["dof"].get<double>() > 1.0);

  auto pred = run_cli({"predict", "--data", data.string(), "--model-a", "phs2|1", "--query", "0.25;0.5",
                       "--sigma2", "0"});
  REQUIRE(pred.code == cli::Success);
  json p = pred.summary();
  REQUIRE(p["rows"].size() == 2);
  CHECK(p["rows"][1]["mean"].get<double>() == Catch::Approx(std::sin(1.5)).margin(1e-12));
}

TEST_CASE("commands reproduce the module-level examples", "[cli]") {
  auto conv = run_cli({"converge", "--kernel", "exponential", "--p", "1", "--n", "8", "--eps-grid", "0.2:0.05:3"});
  REQUIRE(conv.code == cli::Success);
  json c = conv.summary();
  CHECK(c["results"]["slope"].get<double>() >= 0.8);
  CHECK(c["results"]["pass"] == true);
  CHECK(c["results"]["limit"] == "spline");

  auto curve = run_cli({"pred-curve", "--n", "8", "--seed", "2", "--eps", "2", "--sigma2", "1e-4",
                        "--gamma-grid", "1e-10:1e8:12", "--xa", "0.2", "--xb", "0.7"});
  REQUIRE(curve.code == cli::Success);
  json rows = curve.summary()["rows"];
  CHECK(std::abs(rows[0]["pred_a"].get<double>()) < 1e-5);
  CHECK(std::abs(rows[0]["pred_b"].get<double>()) < 1e-5);
  CHECK(rows[12]["kind"] == "anchor");

  auto eq = run_cli({"equiv-check", "--n", "9", "--model-a", "phs1|0", "--model-b", "phs1*2|0"});
  REQUIRE(eq.code == cli::Success);
  CHECK(eq.summary()["results"]["equivalent"] == false);
  auto same = run_cli({"equiv-check", "--n", "9", "--model-a", "zero|2", "--model-b", "poly1*5|2"});
  CHECK(same.summary()["results"]["equivalent"] == true);

  auto iso = run_cli({"isofreedom", "--n", "8", "--eps-grid", "0.4:0.05:6", "--dof", "1.5,2.5"});
  REQUIRE(iso.code == cli::Success);
  CHECK(iso.summary()["results"]["curves"][0]["slope"].get<double>() == Catch::Approx(-2.0).margin(0.15));

  auto matched = run_cli({"matched", "--kernel", "matern", "--nu", "1.5", "--eps", "2", "--gamma", "10", "--n", "10"});
  REQUIRE(matched.code == cli::Success);
  json m = matched.summary()["results"];
  CHECK(m["achieved_dof"].get<double>() == Catch::Approx(m["source_dof"].get<double>()).margin(1e-6));

  auto nug = run_cli({"nugget-compare", "--n", "8", "--eps", "0.05", "--nugget", "1e-6", "--gamma-grid",
                      "1e-2:1e12:29"});
  REQUIRE(nug.code == cli::Success);
  CHECK(nug.summary()["results"]["nugget_plateau"] == true);
}

TEST_CASE("exit codes and machine-readable errors", "[cli]") {
  CHECK(run_cli({}).code == cli::Usage);
  CHECK(run_cli({"nonsense"}).code == cli::Usage);
  CHECK(run_cli({"fit", "--kernel", "cauchy"}).code == cli::Usage);
  CHECK(run_cli({"fit", "--format", "xml"}).code == cli::Usage);
  CHECK(run_cli({"--help"}).code == cli::Success);

  auto missing = run_cli({"fit", "--data", "/nonexistent.csv"});
  CHECK(missing.code == cli::Usage);
  json s = missing.summary();
  CHECK(s["status"] == "error");
  CHECK(s["error"]["code"] == "MissingFile");

  auto nogrid = run_cli({"dof-grid"});
  CHECK(nogrid.code == cli::Usage);
  CHECK(nogrid.summary()["error"]["code"] == "InvalidArgument");

  // dof = n is unreachable: rows carry the code and the run is partial.
  auto partial = run_cli({"isofreedom", "--n", "5", "--eps-grid", "1:0.5:3", "--dof", "5"});
  CHECK(partial.code == cli::NumericalFailure);
  json p = partial.summary();
  CHECK(p["status"] == "partial");
  CHECK(p["rows"][0]["status"] == "UnreachableDof");

  auto few = run_cli({"converge", "--kernel", "exponential", "--p", "1", "--eps-grid", "0.2:0.1:2"});
  CHECK(few.code == cli::NumericalFailure);
  CHECK(few.summary()["error"]["code"] == "InsufficientGrid");
}

TEST_CASE("standalone binary", "[cli]") {
  std::string prefix = scratch("bin").string();
  std::string cmd = std::string("FLATGP_THREADS=1 ") + FLATGP_CLI_PATH + " fit --n 6 --out " + prefix + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  std::ifstream js(prefix + ".json");
  REQUIRE(js.good());
  json s = json::parse(js);
  CHECK(s["config"]["threads"] == 1);
  std::string bad = std::string(FLATGP_CLI_PATH) + " fit --bogus > /dev/null 2>&1";
  int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 1);
}
