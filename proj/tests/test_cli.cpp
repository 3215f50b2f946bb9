// End-to-end checks on the command-line tool: schemas, determinism, thread
// independence, exit codes, golden regressions on the default configs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(REPHSIM_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

bool numeric_equal(const std::string& a, const std::string& b, double tol) {
  char* enda = nullptr;
  char* endb = nullptr;
  const double va = std::strtod(a.c_str(), &enda);
  const double vb = std::strtod(b.c_str(), &endb);
  const bool a_num = enda != a.c_str() && *enda == '\0' && !a.empty();
  const bool b_num = endb != b.c_str() && *endb == '\0' && !b.empty();
  if (a_num != b_num) return false;
  if (!a_num) return a == b;
  return std::abs(va - vb) <= tol * std::max({1.0, std::abs(va), std::abs(vb)});
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

double cell(const std::vector<std::vector<std::string>>& rows, size_t r, size_t c) {
  return std::strtod(rows.at(r).at(c).c_str(), nullptr);
}

}  // namespace

TEST_CASE("golden regression: default table") {
  const RunResult res = run_cli("table");
  REQUIRE(res.exit_code == 0);
  const auto got = parse_csv(res.output);
  const auto want = parse_csv(read_file(std::string(REPHSIM_GOLDEN) + "/table_default.csv"));
  REQUIRE(got.size() == want.size());
  for (size_t r = 0; r < want.size(); ++r) {
    REQUIRE(got[r].size() == want[r].size());
    for (size_t c = 0; c < want[r].size(); ++c) CHECK(numeric_equal(got[r][c], want[r][c], 1e-12));
  }
  // the live diff column stays inside the oracle tolerance
  for (size_t r = 1; r < got.size(); ++r) CHECK(cell(got, r, 4) < 1e-3);
}

TEST_CASE("golden regression: write-phase sweep with normalisation") {
  const RunResult res = run_cli("sweep-write-phase --sweep.points=9 --normalize=true");
  REQUIRE(res.exit_code == 0);
  const auto got = parse_csv(res.output);
  const auto want = parse_csv(read_file(std::string(REPHSIM_GOLDEN) + "/write_phase_9pt.csv"));
  REQUIRE(got.size() == want.size());
  for (size_t r = 0; r < want.size(); ++r)
    for (size_t c = 0; c < want[r].size(); ++c) CHECK(numeric_equal(got[r][c], want[r][c], 1e-12));
  // normalised column maps the extrema to 0 and 1
  CHECK(cell(got, 1, 2) == 0.0);
  CHECK(cell(got, 3, 2) == 1.0);
}

TEST_CASE("byte-identical reruns and thread independence") {
  const std::string args = "sweep-phase --sweep.points=13 --regime=eit --sequence.repetitions=2";
  const RunResult once = run_cli(args + " --threads 1");
  const RunResult twice = run_cli(args + " --threads 1");
  const RunResult pooled = run_cli(args + " --threads 4");
  REQUIRE(once.exit_code == 0);
  CHECK(once.output == twice.output);
  CHECK(once.output == pooled.output);
}

TEST_CASE("sweep-phase spin echo hits the catalogued extrema") {
  const RunResult res = run_cli("sweep-phase --sweep.points=5");
  REQUIRE(res.exit_code == 0);
  const auto rows = parse_csv(res.output);
  REQUIRE(rows.size() == 6);
  CHECK(cell(rows, 1, 1) == doctest::Approx(0.63).epsilon(1e-12));   // phi = 0
  CHECK(cell(rows, 3, 1) == doctest::Approx(0.99).epsilon(1e-12));   // phi = 180
  CHECK(cell(rows, 1, 2) == doctest::Approx(0.63).epsilon(1e-9));
  CHECK(cell(rows, 3, 2) == doctest::Approx(0.99).epsilon(1e-9));
}

TEST_CASE("sweep-phase light storage: flat single pair, structured double pair") {
  const RunResult single = run_cli("sweep-phase --regime=eit --sweep.points=9");
  REQUIRE(single.exit_code == 0);
  const auto srows = parse_csv(single.output);
  for (size_t r = 1; r < srows.size(); ++r)
    CHECK(cell(srows, r, 2) == doctest::Approx(0.6561).epsilon(1e-9));

  const RunResult dbl = run_cli("sweep-phase --regime=eit --sweep.points=5 --sequence.repetitions=2");
  REQUIRE(dbl.exit_code == 0);
  const auto drows = parse_csv(dbl.output);
  CHECK(cell(drows, 2, 2) - cell(drows, 1, 2) == doctest::Approx(0.73063).epsilon(1e-3));
  CHECK(cell(drows, 2, 1) == doctest::Approx(0.92910321).epsilon(1e-6));
}

TEST_CASE("sweep-count parity and feasibility diagnostics") {
  const RunResult ideal =
      run_cli("sweep-count --regime=eit --error.epsilon=0.0 --count.max_pulses=6");
  REQUIRE(ideal.exit_code == 0);
  const auto rows = parse_csv(ideal.output);
  REQUIRE(rows.size() == 7);
  for (size_t n = 1; n <= 6; ++n)
    CHECK(cell(rows, n, 1) == doctest::Approx(n % 2 == 0 ? 1.0 : 0.0).epsilon(1e-9));

  const RunResult enough = run_cli("sweep-count --regime=eit --count.max_pulses=3");
  const auto rows2 = parse_csv(enough.output);
  CHECK(cell(rows2, 2, 1) == doctest::Approx(0.6561).epsilon(1e-9));
  CHECK(cell(rows2, 3, 1) == doctest::Approx(0.104976).epsilon(1e-6));
  CHECK(cell(rows2, 3, 2) == doctest::Approx(0.104976).epsilon(1e-6));

  // pulses that do not fit the storage time name the largest feasible count
  const RunResult toomany =
      run_cli("sweep-count --regime=eit --count.max_pulses=40 --storage.t_st_us=100");
  CHECK(toomany.exit_code == 2);
  CHECK(toomany.output.find("max feasible") != std::string::npos);
}

TEST_CASE("field-profile emits the three stages") {
  const RunResult res = run_cli(
      "field-profile --regime=eit --error.epsilon=0.3 --eit.z_points=256 "
      "--eit.delta_k_l_over_pi=4");
  REQUIRE(res.exit_code == 0);
  const auto rows = parse_csv(res.output);
  REQUIRE(rows.size() == 1 + 3 * 256);
  CHECK(rows[1][0] == "write");
  CHECK(rows[1 + 256][0] == "hahn");
  CHECK(rows[1 + 512][0] == "cpmg");
  // write stage: unit magnitude ratio everywhere
  for (size_t r = 1; r < 257; r += 51) CHECK(cell(rows, r, 3) == doctest::Approx(1.0));
  // hahn stage: magnitude flat at 1-eps
  CHECK(cell(rows, 300, 3) == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("bloch trajectory output") {
  const RunResult res = run_cli(
      "bloch-traj --bloch.pulses=2 --bloch.cycle_us=20 --bloch.sample_dt_us=1 "
      "--bloch.detuning_khz=0 --bloch.xi0_deg=0");
  REQUIRE(res.exit_code == 0);
  const auto rows = parse_csv(res.output);
  REQUIRE(rows.size() >= 41);
  // on resonance the state starts on +X and returns there after two pulses
  CHECK(cell(rows, 1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cell(rows, rows.size() - 1, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("json output carries the schema and the resolved config") {
  const RunResult res = run_cli("table --format json --table.epsilons=[0.1] "
                                "--oracle.delta_points=64 --oracle.xi0_points=64");
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("\"schema\": \"rephsim.table.v1\"") != std::string::npos);
  CHECK(res.output.find("\"config\"") != std::string::npos);
  CHECK(res.output.find("\"delta_points\": 64") != std::string::npos);
}

TEST_CASE("golden regressions on the checked-in sweep recipes") {
  const struct {
    const char* cmd;
    const char* golden;
  } cases[] = {
      {"sweep-write-phase --config CONFIGS/fig2.cfg", "fig2.csv"},
      {"field-profile --config CONFIGS/fig3.cfg --eit.z_points=512", "fig3_z512.csv"},
      {"sweep-phase --config CONFIGS/fig5a.cfg", "fig5a.csv"},
      {"sweep-phase --config CONFIGS/fig5b.cfg", "fig5b.csv"},
      {"sweep-count --config CONFIGS/fig6.cfg", "fig6.csv"},
  };
  const std::string configs = std::string(REPHSIM_GOLDEN) + "/../../configs";
  for (const auto& c : cases) {
    std::string cmd = c.cmd;
    const std::string marker = "CONFIGS";
    cmd.replace(cmd.find(marker), marker.size(), configs);
    const RunResult res = run_cli(cmd);
    CAPTURE(c.golden);
    REQUIRE(res.exit_code == 0);
    const auto got = parse_csv(res.output);
    const auto want = parse_csv(read_file(std::string(REPHSIM_GOLDEN) + "/" + c.golden));
    REQUIRE(got.size() == want.size());
    for (size_t r = 0; r < want.size(); ++r) {
      REQUIRE(got[r].size() == want[r].size());
      for (size_t col = 0; col < want[r].size(); ++col)
        CHECK(numeric_equal(got[r][col], want[r][col], 1e-12));
    }
  }
}

TEST_CASE("config validation exit codes") {
  CHECK(run_cli("table --no.such.key=1").exit_code == 2);
  CHECK(run_cli("table --format bogus").exit_code == 2);
  CHECK(run_cli("sweep-write-phase --regime=eit").exit_code == 2);
  CHECK(run_cli("table --config /nonexistent.cfg").exit_code == 2);
  CHECK(run_cli("check --oracle.delta_points=64 --oracle.xi0_points=64").exit_code == 0);
}
