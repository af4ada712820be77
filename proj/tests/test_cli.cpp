#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// End-to-end checks of the haar-orbit binary: exit codes, report schema,
// file formats and regeneration determinism. The binary path arrives via
// --cli-bin from CTest.

namespace {

std::string g_cli;

struct RunResult {
  int exit_code;
  std::string stderr_text;
};

RunResult run_cli(const std::string& args) {
  const std::string err_path = "cli_stderr.txt";
  const std::string cmd = g_cli + " " + args + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  std::ifstream err(err_path);
  std::stringstream ss;
  ss << err.rdbuf();
  r.stderr_text = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<double> split_row(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
  return vals;
}

void write_state_file(const std::string& path, const std::vector<double>& diag) {
  nlohmann::json entries = nlohmann::json::array();
  const std::size_t d = diag.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      entries.push_back({i == j ? diag[i] : 0.0, 0.0});
    }
  }
  nlohmann::json j{{"dims", {{"da", 2}, {"db", 2}}}, {"matrix", entries}};
  std::ofstream out(path);
  out << j.dump();
}

}  // namespace

TEST_CASE("verify-weingarten report schema and exit code") {
  const RunResult r = run_cli("verify-weingarten --samples 20000 --seed 7 --out cli_wg.json");
  CHECK(r.exit_code == 0);

  const nlohmann::json rep = nlohmann::json::parse(slurp("cli_wg.json"));
  CHECK(rep["schema"] == 1);
  CHECK(rep["command"] == "verify-weingarten");
  CHECK(rep["pass"] == true);
  CHECK(rep["seed"] == 7);
  CHECK(rep["gates"].is_array());
  CHECK(rep["gates"].size() >= 8);
  for (const auto& gate : rep["gates"]) {
    CHECK(gate.contains("name"));
    CHECK(gate.contains("analytic"));
    CHECK(gate.contains("mc_mean"));
    CHECK(gate.contains("se"));
    CHECK(gate.contains("pass"));
  }

  // Stable schema across runs.
  const RunResult r2 = run_cli("verify-weingarten --samples 20000 --seed 7 --out cli_wg2.json");
  CHECK(r2.exit_code == 0);
  CHECK(slurp("cli_wg.json") == slurp("cli_wg2.json"));
}

TEST_CASE("gate failures drive a nonzero exit code") {
  // An absurdly tight sigma forces the statistical gates to fail while the
  // exact gates still pass; the command must exit 1 and mark them in the
  // report.
  const RunResult r = run_cli(
      "verify-channel --samples 5000 --seed 3 --sigma 0.000001 --out cli_channel_fail.json");
  CHECK(r.exit_code == 1);
  const nlohmann::json rep = nlohmann::json::parse(slurp("cli_channel_fail.json"));
  CHECK(rep["pass"] == false);
  bool saw_failure = false;
  for (const auto& gate : rep["gates"]) {
    if (!gate["pass"].get<bool>()) {
      saw_failure = true;
      CHECK(gate["name"].is_string());
      CHECK(gate["analytic"].is_number());
      CHECK(gate["mc_mean"].is_number());
      CHECK(gate["se"].is_number());
    }
  }
  CHECK(saw_failure);
}

TEST_CASE("verify-weingarten rejects d = 2") {
  const RunResult r = run_cli("verify-weingarten --da 1 --db 2 --out cli_never.json");
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.find("k=3 Weingarten undefined at d=2") != std::string::npos);
}

TEST_CASE("verify reports render as CSV too") {
  const RunResult r =
      run_cli("verify-channel --samples 5000 --seed 3 --format csv --out cli_channel.csv");
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(slurp("cli_channel.csv"));
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "name,analytic,mc_mean,se,pass");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].find(",true") != std::string::npos);
  }
}

TEST_CASE("figure-fidelity dataset") {
  const RunResult r = run_cli("figure-fidelity --points 300 --seed 11 --out cli_fid.csv");
  CHECK(r.exit_code == 0);
  const std::string first = slurp("cli_fid.csv");
  const auto lines = lines_of(first);
  REQUIRE(lines.size() == 302);  // header + N rows + summary
  CHECK(lines[0] == "purity,lower_bound,upper_bound");
  CHECK(lines.back().rfind("summary,", 0) == 0);

  double max_lower = -1.0;
  double min_upper = 2.0;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const auto vals = split_row(lines[i]);
    REQUIRE(vals.size() == 3);
    CHECK(vals[0] >= 0.25 - 1e-12);
    CHECK(vals[0] <= 1.0 + 1e-12);
    CHECK(vals[1] <= vals[2] + 1e-9);
    max_lower = std::max(max_lower, vals[1]);
    min_upper = std::min(min_upper, vals[2]);
  }
  CHECK(max_lower < min_upper);

  const auto summary = split_row(lines.back().substr(8));  // strip "summary,"
  CHECK(summary[0] == doctest::Approx(max_lower).epsilon(1e-12));
  CHECK(summary[1] == doctest::Approx(min_upper).epsilon(1e-12));

  // Bit-identical regeneration under the same seed.
  const RunResult r2 = run_cli("figure-fidelity --points 300 --seed 11 --out cli_fid2.csv");
  CHECK(r2.exit_code == 0);
  CHECK(first == slurp("cli_fid2.csv"));

  // Different seed, different dataset.
  run_cli("figure-fidelity --points 300 --seed 12 --out cli_fid3.csv");
  CHECK(first != slurp("cli_fid3.csv"));
}

TEST_CASE("figure-entropy dataset with corner rows") {
  const RunResult r = run_cli("figure-entropy --points 200 --seed 5 --out cli_ent.csv");
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(slurp("cli_ent.csv"));
  REQUIRE(lines.size() == 203);  // header + 2 corners + N points
  CHECK(lines[0] == "purity,lower_term,upper_entropy,gap_F");

  const auto uniform = split_row(lines[1]);
  CHECK(uniform[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(uniform[2] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(uniform[3] == doctest::Approx(0.0).epsilon(1e-12));

  const auto pure = split_row(lines[2]);
  CHECK(pure[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pure[1] == doctest::Approx(-std::log(0.7)).epsilon(1e-12));
  CHECK(pure[2] == doctest::Approx(0.9404479886553264).epsilon(1e-12));
  CHECK(pure[3] == doctest::Approx(0.5837730447165939).epsilon(1e-12));

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto vals = split_row(lines[i]);
    REQUIRE(vals.size() == 4);
    CHECK(vals[3] >= -1e-9);                        // gap_F nonnegative
    CHECK(vals[2] <= std::log(4.0) + 1e-9);         // upper entropy ceiling
    CHECK(vals[3] == doctest::Approx(vals[2] - vals[1]).epsilon(1e-9));
  }
}

TEST_CASE("page-table values") {
  const RunResult r = run_cli("page-table --max-n 4 --out cli_page.csv");
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(slurp("cli_page.csv"));
  CHECK(lines[0] == "m,n,page_entropy,diagonal_entropy,coherence");
  bool saw_22 = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto vals = split_row(lines[i]);
    REQUIRE(vals.size() == 5);
    if (vals[0] == 1.0) CHECK(vals[2] == 0.0);  // S_{1,n} = 0
    CHECK(vals[3] - vals[2] == doctest::Approx(vals[4]).epsilon(1e-12));
    if (vals[0] == 2.0 && vals[1] == 2.0) {
      saw_22 = true;
      CHECK(vals[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
      CHECK(vals[3] == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
      CHECK(vals[4] == doctest::Approx(0.25).epsilon(1e-14));
    }
  }
  CHECK(saw_22);
}

TEST_CASE("estimate on the maximally mixed state") {
  write_state_file("cli_mm.json", {0.25, 0.25, 0.25, 0.25});
  const RunResult r = run_cli("estimate --state cli_mm.json --out cli_mm_report.json");
  CHECK(r.exit_code == 0);
  const nlohmann::json rep = nlohmann::json::parse(slurp("cli_mm_report.json"));
  CHECK(rep["a1"].get<double>() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(rep["entropy_lower_bound_log"]["value"].get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep["qmi_lower_bound"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  // Sandwiches collapse to equalities.
  CHECK(rep["sum_entropy_bounds"]["lower"].get<double>() ==
        doctest::Approx(std::log(4.0)).epsilon(1e-10));
  CHECK(rep["sum_entropy_bounds"]["upper"].get<double>() ==
        doctest::Approx(std::log(4.0)).epsilon(1e-10));
  CHECK(rep["fidelity_bounds"]["upper"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(rep.contains("mc"));
}

TEST_CASE("estimate on a Bell state with MC enabled") {
  write_state_file("cli_bell_raw.json", {1.0, 0.0, 0.0, 0.0});
  // A diagonal pure state is unitarily equivalent to the Bell state; the
  // closed forms only see the spectrum.
  const RunResult r =
      run_cli("estimate --state cli_bell_raw.json --samples 5000 --seed 4 --out cli_bell_report.json");
  CHECK(r.exit_code == 0);
  const nlohmann::json rep = nlohmann::json::parse(slurp("cli_bell_report.json"));
  CHECK(rep["a1"].get<double>() == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(rep["a2"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rep["entropy_lower_bound_truncated"]["value"].get<double>() ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep["fidelity_bounds"]["lower"].get<double>() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rep["qmi_lower_bound"].get<double>() == doctest::Approx(0.35667494393873245).epsilon(1e-9));
  REQUIRE(rep.contains("mc"));
  CHECK(rep["mc"]["samples"] == 5000);
  const double mc_entropy = rep["mc"]["entropy_a"]["mean"].get<double>();
  const double mc_se = rep["mc"]["entropy_a"]["se"].get<double>();
  CHECK(std::abs(mc_entropy - 1.0 / 3.0) <= 4.0 * mc_se);
}

TEST_CASE("estimate rejects malformed state files") {
  {
    std::ofstream out("cli_bad.json");
    out << "{\"dims\": {\"da\": 2, \"db\": 2}, \"matrix\": [[1, 0,";  // truncated
  }
  const RunResult r = run_cli("estimate --state cli_bad.json");
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.find("cli_bad.json") != std::string::npos);
  CHECK(r.stderr_text.find("parse error") != std::string::npos);

  // Structurally valid JSON, invalid physics: trace 2.
  write_state_file("cli_bad2.json", {1.0, 1.0, 0.0, 0.0});
  const RunResult r2 = run_cli("estimate --state cli_bad2.json");
  CHECK(r2.exit_code == 2);
  CHECK(r2.stderr_text.find("trace") != std::string::npos);
}

TEST_CASE("HAAR_ORBIT_SEED overrides the default seed") {
  run_cli("figure-fidelity --points 50 --seed 99 --out cli_seed_flag.csv");
  setenv("HAAR_ORBIT_SEED", "99", 1);
  run_cli("figure-fidelity --points 50 --out cli_seed_env.csv");
  unsetenv("HAAR_ORBIT_SEED");
  CHECK(slurp("cli_seed_flag.csv") == slurp("cli_seed_env.csv"));

  // An explicit flag wins over the environment.
  setenv("HAAR_ORBIT_SEED", "123", 1);
  run_cli("figure-fidelity --points 50 --seed 99 --out cli_seed_both.csv");
  unsetenv("HAAR_ORBIT_SEED");
  CHECK(slurp("cli_seed_flag.csv") == slurp("cli_seed_both.csv"));
}

int main(int argc, char** argv) {
  doctest::Context ctx;
  std::vector<const char*> passthrough;
  for (int i = 0; i < argc; ++i) {
    if (std::string(argv[i]) == "--cli-bin" && i + 1 < argc) {
      g_cli = argv[++i];
    } else {
      passthrough.push_back(argv[i]);
    }
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli --cli-bin <path-to-haar-orbit>\n");
    return 1;
  }
  ctx.applyCommandLine(static_cast<int>(passthrough.size()), passthrough.data());
  return ctx.run();
}
