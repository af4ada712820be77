#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "haarorbit/figures.hpp"
#include "haarorbit/linalg.hpp"
#include "haarorbit/verify.hpp"

// File formats: density-matrix JSON input, CSV/JSON report and dataset
// rendering. CSV uses comma delimiters and '.' decimals; JSON reports carry
// "schema": 1.

namespace haarorbit {

using nlohmann::json;

struct LoadedState {
  DensityMatrix rho;
  BipartiteDims dims;
};

// Input schema:
//   {"dims": {"da": 2, "db": 2},
//    "matrix": [[re, im], ...]}   // d^2 entries, row-major
inline LoadedState load_density_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open state file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("state file " + path + ": " + e.what());
  }
  if (!j.contains("dims") || !j["dims"].contains("da") || !j["dims"].contains("db")) {
    throw std::runtime_error("state file " + path + ": missing dims.da / dims.db");
  }
  const int da = j["dims"]["da"].get<int>();
  const int db = j["dims"]["db"].get<int>();
  const BipartiteDims dims(da, db);
  if (!j.contains("matrix") || !j["matrix"].is_array()) {
    throw std::runtime_error("state file " + path + ": missing matrix array");
  }
  const auto& entries = j["matrix"];
  const int d = dims.d;
  if (static_cast<int>(entries.size()) != d * d) {
    throw std::runtime_error("state file " + path + ": matrix must hold " + std::to_string(d * d) +
                             " [re, im] pairs, found " + std::to_string(entries.size()));
  }
  Matrix m(d, d);
  for (int idx = 0; idx < d * d; ++idx) {
    const auto& pair = entries[static_cast<std::size_t>(idx)];
    if (!pair.is_array() || pair.size() != 2) {
      throw std::runtime_error("state file " + path + ": matrix entry " + std::to_string(idx) +
                               " is not an [re, im] pair");
    }
    m(idx / d, idx % d) = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  return {DensityMatrix(std::move(m)), dims};
}

// Round-trip-exact decimal rendering, used for all CSV numbers.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << contents;
}

// ---- Verification suite reports ------------------------------------------

inline json suite_report_json(const SuiteResult& suite, const json& params) {
  json gates = json::array();
  for (const GateResult& g : suite.gates) {
    gates.push_back({{"name", g.name},
                     {"analytic", g.analytic},
                     {"mc_mean", g.mc_mean},
                     {"se", g.se},
                     {"pass", g.pass}});
  }
  json out{{"schema", 1}, {"command", suite.suite}, {"pass", suite.all_pass()}, {"gates", gates}};
  out.update(params);
  return out;
}

inline std::string suite_report_csv(const SuiteResult& suite) {
  std::ostringstream out;
  out << "name,analytic,mc_mean,se,pass\n";
  for (const GateResult& g : suite.gates) {
    std::string name = g.name;
    for (char& ch : name) {
      if (ch == ',') ch = ';';
    }
    out << name << ',' << format_double(g.analytic) << ',' << format_double(g.mc_mean) << ','
        << format_double(g.se) << ',' << (g.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

// ---- Figure datasets -------------------------------------------------------

inline std::string figure_fidelity_csv(const std::vector<FidelityFigureRow>& rows,
                                       const FidelityFigureSummary& summary) {
  std::ostringstream out;
  out << "purity,lower_bound,upper_bound\n";
  for (const FidelityFigureRow& r : rows) {
    out << format_double(r.purity) << ',' << format_double(r.lower_bound) << ','
        << format_double(r.upper_bound) << '\n';
  }
  out << "summary," << format_double(summary.max_lower) << ',' << format_double(summary.min_upper)
      << '\n';
  return out.str();
}

inline json figure_fidelity_json(const std::vector<FidelityFigureRow>& rows,
                                 const FidelityFigureSummary& summary, const json& params) {
  json data = json::array();
  for (const FidelityFigureRow& r : rows) data.push_back({r.purity, r.lower_bound, r.upper_bound});
  json out{{"schema", 1},
           {"command", "figure-fidelity"},
           {"columns", {"purity", "lower_bound", "upper_bound"}},
           {"rows", data},
           {"summary", {{"max_lower", summary.max_lower}, {"min_upper", summary.min_upper}}}};
  out.update(params);
  return out;
}

inline std::string figure_entropy_csv(const std::vector<EntropyFigureRow>& rows) {
  std::ostringstream out;
  out << "purity,lower_term,upper_entropy,gap_F\n";
  for (const EntropyFigureRow& r : rows) {
    out << format_double(r.purity) << ',' << format_double(r.lower_term) << ','
        << format_double(r.upper_entropy) << ',' << format_double(r.gap) << '\n';
  }
  return out.str();
}

inline json figure_entropy_json(const std::vector<EntropyFigureRow>& rows, const json& params) {
  json data = json::array();
  for (const EntropyFigureRow& r : rows) {
    data.push_back({r.purity, r.lower_term, r.upper_entropy, r.gap});
  }
  json out{{"schema", 1},
           {"command", "figure-entropy"},
           {"columns", {"purity", "lower_term", "upper_entropy", "gap_F"}},
           {"rows", data}};
  out.update(params);
  return out;
}

}  // namespace haarorbit
