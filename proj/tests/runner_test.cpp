#include "catoptrica/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "runner_detail.hpp"

using namespace catoptrica;
using namespace catoptrica::cli;
namespace dr = catoptrica::cli::detail_runner;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() /
      ("catoptrica_runner_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_circle_config() {
  return parse_config(R"({
    "profile": {"type": "circle", "R": 1.0},
    "u_range": [0.1, 2.0],
    "u_samples": 6,
    "v_samples": 3
  })");
}

}  // namespace

TEST_CASE("format_double survives a parse round trip") {
  for (double x : {0.0, 1.0 / 3.0, 3.14159265358979323846, -2.5e-17,
                   1.7976931348623157e308, 123456789.123456789}) {
    const std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("csv writer emits one line per row") {
  dr::Table t;
  t.columns = {"u", "n", "ok", "tag"};
  t.rows.push_back({0.5, 3, true, std::string("++")});
  t.rows.push_back({-1.25, -2, false, std::string("--")});
  CHECK(dr::to_csv(t) ==
        "u,n,ok,tag\n"
        "0.5,3,true,++\n"
        "-1.25,-2,false,--\n");
}

TEST_CASE("json writer mirrors the table") {
  dr::Table t;
  t.columns = {"u", "pass"};
  t.rows.push_back({1.5, true});
  const nlohmann::json doc = nlohmann::json::parse(dr::to_json(t, "focal"));
  CHECK(doc["command"] == "focal");
  REQUIRE(doc["columns"].size() == 2);
  CHECK(doc["columns"][0] == "u");
  REQUIRE(doc["rows"].size() == 1);
  CHECK(doc["rows"][0]["u"] == 1.5);
  CHECK(doc["rows"][0]["pass"] == true);
}

TEST_CASE("diagnostics csv keeps one cell per column") {
  std::vector<dr::DiagRow> diags;
  diags.push_back({0.5, -1.0, "focal_blowup", "denominator, near zero\nhere"});
  const std::string csv = dr::diagnostics_csv(diags);
  CHECK(csv ==
        "u,v,code,detail\n"
        "0.5,-1,focal_blowup,denominator; near zero;here\n");
}

TEST_CASE("parallel_for is order-independent and forwards exceptions") {
  const int n = 1000;
  std::vector<double> serial(n), threaded(n);
  dr::parallel_for(n, 1, [&](int k) { serial[k] = std::sqrt(k + 1.0); });
  dr::parallel_for(n, 4, [&](int k) { threaded[k] = std::sqrt(k + 1.0); });
  CHECK(serial == threaded);

  std::atomic<int> done{0};
  try {
    dr::parallel_for(n, 4, [&](int k) {
      if (k == 37) throw std::runtime_error("boom");
      ++done;
    });
    FAIL("expected the worker exception to propagate");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "boom");
  }
}

TEST_CASE("sign sweeps are ordered and stable") {
  const std::vector<SignCombo> one = dr::sweep_combos(false);
  REQUIRE(one.size() == 1);
  CHECK(dr::signs_text(one[0]) == "++");
  const std::vector<SignCombo> all = dr::sweep_combos(true);
  REQUIRE(all.size() == 4);
  CHECK(dr::signs_text(all[0]) == "++");
  CHECK(dr::signs_text(all[1]) == "+-");
  CHECK(dr::signs_text(all[2]) == "-+");
  CHECK(dr::signs_text(all[3]) == "--");
}

TEST_CASE("reflect sweep writes the table and diagnostics") {
  const fs::path dir = temp_dir();
  RunConfig cfg = small_circle_config();
  RunOptions opt;
  opt.out = (dir / "reflect.csv").string();
  std::ostringstream log;
  const int code = run(Command::reflect, cfg, opt, log);
  CHECK(code == 0);
  CHECK(log.str().find("reflect: wrote 18 rows") != std::string::npos);

  const std::string csv = slurp(dir / "reflect.csv");
  CHECK(csv.rfind("u,v,xi_re,xi_im,eta_re,eta_im,x1,x2,x3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 19);  // header + 6*3
  CHECK(fs::exists(dir / "reflect.csv.diagnostics.csv"));
  fs::remove_all(dir);
}

TEST_CASE("focal output is byte-identical across runs and thread counts") {
  const fs::path dir = temp_dir();
  RunConfig cfg = small_circle_config();
  std::ostringstream log;

  const auto run_once = [&](const char* name, int threads) {
    RunOptions opt;
    opt.out = (dir / name).string();
    opt.numeric = true;
    opt.signs_all = true;
    opt.threads = threads;
    REQUIRE(run(Command::focal, cfg, opt, log) == 0);
    return slurp(dir / name);
  };

  const std::string first = run_once("a.csv", 1);
  const std::string second = run_once("b.csv", 1);
  const std::string wide = run_once("c.csv", 4);
  CHECK(first == second);
  CHECK(first == wide);
  CHECK(!first.empty());
  fs::remove_all(dir);
}

TEST_CASE("missing output path is a configuration error") {
  RunConfig cfg = small_circle_config();
  RunOptions opt;  // no out anywhere
  std::ostringstream log;
  CHECK(run(Command::reflect, cfg, opt, log) == 1);
  CHECK(log.str().find("error:") != std::string::npos);
}

TEST_CASE("verify runs without an output file and reports per check") {
  RunConfig cfg = small_circle_config();
  RunOptions opt;
  std::ostringstream log;
  const int code = run(Command::verify, cfg, opt, log);
  CHECK(code == 0);
  const std::string text = log.str();
  CHECK(text.find("line_round_trip") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
  CHECK(text.find("checks passed") != std::string::npos);
}
