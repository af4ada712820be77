#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "haarorbit/figures.hpp"
#include "haarorbit/io.hpp"
#include "haarorbit/montecarlo.hpp"
#include "haarorbit/orbit_stats.hpp"
#include "haarorbit/verify.hpp"

// haar-orbit: verification suites, figure-data generation and ad-hoc
// estimation for bipartite unitary-orbit averages. Output is CSV or JSON;
// verification commands exit nonzero when any gate fails.

namespace {

using namespace haarorbit;

struct OutputSink {
  std::string path;    // empty: stdout
  std::string format;  // "csv" or "json"

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
      write_text_file(path, text);
    }
  }
};

void add_output_options(CLI::App* cmd, OutputSink& sink, const std::string& default_format) {
  sink.format = default_format;
  cmd->add_option("--out", sink.path, "Output file path (default: stdout)");
  cmd->add_option("--format", sink.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_mc_options(CLI::App* cmd, MCConfig& cfg) {
  cmd->add_option("--samples", cfg.samples, "Monte Carlo samples per estimate");
  cmd->add_option("--seed", cfg.seed, "RNG seed (64-bit)")->envname("HAAR_ORBIT_SEED");
  cmd->add_option("--sigma", cfg.sigma_gate, "Gate width in standard errors for scalar gates");
}

int render_suite(const SuiteResult& suite, const OutputSink& sink, const nlohmann::json& params) {
  for (const GateResult& g : suite.gates) {
    std::cerr << (g.pass ? "[PASS] " : "[FAIL] ") << g.name << " (analytic=" << g.analytic
              << ", mc_mean=" << g.mc_mean << ", se=" << g.se << ")\n";
  }
  std::size_t passed = 0;
  for (const GateResult& g : suite.gates) passed += g.pass ? 1 : 0;
  std::cerr << suite.suite << ": " << passed << "/" << suite.gates.size() << " gates passed\n";

  if (sink.format == "csv") {
    sink.emit(suite_report_csv(suite));
  } else {
    sink.emit(suite_report_json(suite, params).dump(2) + "\n");
  }
  return suite.all_pass() ? 0 : 1;
}

nlohmann::json estimate_report(const LoadedState& state, const MCConfig& cfg, bool run_mc) {
  const DensityMatrix& rho = state.rho;
  const BipartiteDims& dims = state.dims;
  const OrbitCoefficients k = orbit_coefficients(rho, dims);
  const ClampedBound trunc = entropy_lower_bound_truncated(rho, dims);
  const ClampedBound logb = entropy_lower_bound_log(rho, dims);
  const BoundsReport fid = fidelity_bounds(rho, dims);
  const BoundsReport ent = sum_entropy_bounds(rho, dims);
  const double qmi_input = qmi(rho, dims);

  nlohmann::json out{
      {"schema", 1},
      {"command", "estimate"},
      {"da", dims.d_a},
      {"db", dims.d_b},
      {"purity", purity(rho)},
      {"tr_rho3", matrix_power_trace(rho, 3)},
      {"entropy", von_neumann_entropy(rho)},
      {"a1", k.a1},
      {"a2", k.a2},
      {"f", k.f},
      {"g", k.g},
      {"h", k.h},
      {"c0", k.c0},
      {"c1", k.c1},
      {"c2", k.c2},
      {"entropy_lower_bound_truncated",
       {{"value", trunc.value}, {"raw", trunc.raw}, {"clamped", trunc.clamped}}},
      {"entropy_lower_bound_log",
       {{"value", logb.value}, {"raw", logb.raw}, {"clamped", logb.clamped}}},
      {"average_linear_entropy_a", average_linear_entropy_a(rho, dims)},
      {"average_linear_entropy_b", average_linear_entropy_b(rho, dims)},
      {"average_linear_entropy_sum", average_linear_entropy_sum(rho, dims)},
      {"qmi", qmi_input},
      {"qmi_lower_bound", qmi_lower_bound(rho, dims)},
      {"fidelity_bounds", {{"lower", fid.lower}, {"upper", fid.upper}}},
      {"sum_entropy_bounds", {{"lower", ent.lower}, {"upper", ent.upper}}}};

  if (run_mc) {
    const MCEstimate ea = mc_average_entropy_a(rho, dims, cfg);
    const MCEstimate eq = mc_average_qmi(rho, dims, cfg);
    const MCEstimate ef = mc_average_fidelity(rho, dims, cfg);
    const MCEstimate el = mc_average_linear_entropy_a(rho, dims, cfg);
    out["mc"] = {{"samples", cfg.samples},
                 {"seed", cfg.seed},
                 {"entropy_a", {{"mean", ea.mean}, {"se", ea.std_error}}},
                 {"qmi", {{"mean", eq.mean}, {"se", eq.std_error}}},
                 {"delta_qmi", eq.mean - qmi_input},
                 {"fidelity", {{"mean", ef.mean}, {"se", ef.std_error}}},
                 {"linear_entropy_a", {{"mean", el.mean}, {"se", el.std_error}}}};
  }
  return out;
}

std::string json_to_kv_csv(const nlohmann::json& j, const std::string& prefix = "") {
  std::string out;
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      out += json_to_kv_csv(value, name);
    } else {
      out += name + "," + value.dump() + "\n";
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form orbit averages for bipartite states, with Monte Carlo verification"};
  app.require_subcommand(1);

  // verify-weingarten
  int wg_da = 2, wg_db = 3;
  MCConfig wg_cfg;
  wg_cfg.samples = 200000;
  OutputSink wg_sink;
  CLI::App* wg_cmd = app.add_subcommand(
      "verify-weingarten", "Weingarten values, twirl identity and sixth-moment integral vs MC");
  wg_cmd->add_option("--da", wg_da, "Subsystem A dimension for the twirl gate");
  wg_cmd->add_option("--db", wg_db, "Subsystem B dimension for the twirl gate");
  add_mc_options(wg_cmd, wg_cfg);
  add_output_options(wg_cmd, wg_sink, "json");

  // verify-orbit
  int orbit_da = 2, orbit_db = 2;
  MCConfig orbit_cfg;
  OutputSink orbit_sink;
  CLI::App* orbit_cmd =
      app.add_subcommand("verify-orbit", "Orbit-average closed forms and bound sandwiches vs MC");
  orbit_cmd->add_option("--da", orbit_da, "Subsystem A dimension");
  orbit_cmd->add_option("--db", orbit_db, "Subsystem B dimension");
  add_mc_options(orbit_cmd, orbit_cfg);
  add_output_options(orbit_cmd, orbit_sink, "json");

  // verify-channel
  int channel_d = 3;
  MCConfig channel_cfg;
  OutputSink channel_sink;
  CLI::App* channel_cmd =
      app.add_subcommand("verify-channel", "Average channel purity closed form vs MC");
  channel_cmd->add_option("--d", channel_d, "Channel dimension (does not need to factor)");
  add_mc_options(channel_cmd, channel_cfg);
  add_output_options(channel_cmd, channel_sink, "json");

  // figure-fidelity
  std::size_t fid_points = 10000;
  std::uint64_t fid_seed = 42;
  OutputSink fid_sink;
  CLI::App* fid_cmd = app.add_subcommand(
      "figure-fidelity", "Two-qubit fidelity sandwich dataset over random simplex points");
  fid_cmd->add_option("--points", fid_points, "Number of simplex points");
  fid_cmd->add_option("--seed", fid_seed, "RNG seed")->envname("HAAR_ORBIT_SEED");
  add_output_options(fid_cmd, fid_sink, "csv");

  // figure-entropy
  std::size_t ent_points = 5000;
  std::uint64_t ent_seed = 42;
  OutputSink ent_sink;
  CLI::App* ent_cmd = app.add_subcommand(
      "figure-entropy", "Two-qubit entropy-bound dataset (corner rows first, then random points)");
  ent_cmd->add_option("--points", ent_points,
                      "Number of random simplex points after the two corner rows");
  ent_cmd->add_option("--seed", ent_seed, "RNG seed")->envname("HAAR_ORBIT_SEED");
  add_output_options(ent_cmd, ent_sink, "csv");

  // page-table
  int page_max_n = 8;
  OutputSink page_sink;
  CLI::App* page_cmd =
      app.add_subcommand("page-table", "Tabulate Page / diagonal average entropies and coherence");
  page_cmd->add_option("--max-n", page_max_n, "Largest environment dimension n (table covers m <= n)");
  add_output_options(page_cmd, page_sink, "csv");

  // estimate
  std::string state_path;
  MCConfig est_cfg;
  est_cfg.samples = 0;  // closed forms only unless requested
  OutputSink est_sink;
  CLI::App* est_cmd =
      app.add_subcommand("estimate", "All closed forms (and optional MC estimates) for a state file");
  est_cmd->add_option("--state", state_path, "Density-matrix JSON file")->required();
  est_cmd->add_option("--samples", est_cfg.samples, "MC samples (0: closed forms only)");
  est_cmd->add_option("--seed", est_cfg.seed, "RNG seed")->envname("HAAR_ORBIT_SEED");
  add_output_options(est_cmd, est_sink, "json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (wg_cmd->parsed()) {
      const SuiteResult suite = verify_weingarten_suite(wg_da, wg_db, wg_cfg);
      return render_suite(suite, wg_sink,
                          {{"da", wg_da},
                           {"db", wg_db},
                           {"samples", wg_cfg.samples},
                           {"seed", wg_cfg.seed},
                           {"sigma", wg_cfg.sigma_gate}});
    }
    if (orbit_cmd->parsed()) {
      const SuiteResult suite = verify_orbit_suite(orbit_da, orbit_db, orbit_cfg);
      return render_suite(suite, orbit_sink,
                          {{"da", orbit_da},
                           {"db", orbit_db},
                           {"samples", orbit_cfg.samples},
                           {"seed", orbit_cfg.seed},
                           {"sigma", orbit_cfg.sigma_gate}});
    }
    if (channel_cmd->parsed()) {
      const SuiteResult suite = verify_channel_suite(channel_d, channel_cfg);
      return render_suite(suite, channel_sink,
                          {{"d", channel_d},
                           {"samples", channel_cfg.samples},
                           {"seed", channel_cfg.seed},
                           {"sigma", channel_cfg.sigma_gate}});
    }
    if (fid_cmd->parsed()) {
      const auto rows = figure_fidelity_dataset(fid_points, fid_seed);
      const FidelityFigureSummary summary = summarize_fidelity_rows(rows);
      if (fid_sink.format == "csv") {
        fid_sink.emit(figure_fidelity_csv(rows, summary));
      } else {
        fid_sink.emit(
            figure_fidelity_json(rows, summary, {{"points", fid_points}, {"seed", fid_seed}})
                .dump(2) +
            "\n");
      }
      return 0;
    }
    if (ent_cmd->parsed()) {
      const auto rows = figure_entropy_dataset(ent_points, ent_seed);
      if (ent_sink.format == "csv") {
        ent_sink.emit(figure_entropy_csv(rows));
      } else {
        ent_sink.emit(
            figure_entropy_json(rows, {{"points", ent_points}, {"seed", ent_seed}}).dump(2) + "\n");
      }
      return 0;
    }
    if (page_cmd->parsed()) {
      if (page_max_n < 1) throw std::invalid_argument("page-table: --max-n must be >= 1");
      if (page_sink.format == "csv") {
        std::string out = "m,n,page_entropy,diagonal_entropy,coherence\n";
        for (int n = 1; n <= page_max_n; ++n) {
          for (int m = 1; m <= n; ++m) {
            out += std::to_string(m) + "," + std::to_string(n) + "," +
                   format_double(page_average_entropy(m, n)) + "," +
                   format_double(diagonal_average_entropy(m, n)) + "," +
                   format_double(average_coherence(m, n)) + "\n";
          }
        }
        page_sink.emit(out);
      } else {
        nlohmann::json rows = nlohmann::json::array();
        for (int n = 1; n <= page_max_n; ++n) {
          for (int m = 1; m <= n; ++m) {
            rows.push_back({m, n, page_average_entropy(m, n), diagonal_average_entropy(m, n),
                            average_coherence(m, n)});
          }
        }
        page_sink.emit(
            nlohmann::json{
                {"schema", 1},
                {"command", "page-table"},
                {"columns", {"m", "n", "page_entropy", "diagonal_entropy", "coherence"}},
                {"rows", rows}}
                .dump(2) +
            "\n");
      }
      return 0;
    }
    if (est_cmd->parsed()) {
      const LoadedState state = load_density_matrix_json(state_path);
      const bool run_mc = est_cfg.samples > 0;
      MCConfig cfg = est_cfg;
      if (!run_mc) cfg.samples = 100;  // unused; MC skipped entirely
      const nlohmann::json report = estimate_report(state, cfg, run_mc);
      if (est_sink.format == "csv") {
        est_sink.emit(json_to_kv_csv(report));
      } else {
        est_sink.emit(report.dump(2) + "\n");
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
