#pragma once

#include <cstdint>
#include <vector>

#include "haarorbit/haar.hpp"
#include "haarorbit/orbit_stats.hpp"

// Two-qubit scatter datasets behind the fidelity-sandwich and entropy-bound
// figures. Both are pure functions of (point count, seed) and regenerate
// bit-identically.

namespace haarorbit {

struct FidelityFigureRow {
  double purity;
  double lower_bound;  // c0 + c1 Tr L^2 + c2 Tr L^3
  double upper_bound;  // F(L, c0 + c1 L + c2 L^2) = sum_j sqrt(l_j m_j)
};

struct FidelityFigureSummary {
  double max_lower;
  double min_upper;
};

inline FidelityFigureRow fidelity_figure_row(const Spectrum& spectrum) {
  const BipartiteDims dims(2, 2);
  const double pur = spectrum.purity();
  const CCoefficients c = c_from_purity(dims, pur);
  FidelityFigureRow row;
  row.purity = pur;
  row.lower_bound = c.c0 + c.c1 * pur + c.c2 * spectrum.power_sum(3);
  row.upper_bound = 0.0;
  for (double lam : spectrum.probs) {
    const double m = c.c0 + c.c1 * lam + c.c2 * lam * lam;
    row.upper_bound += std::sqrt(std::max(lam * m, 0.0));
  }
  return row;
}

inline std::vector<FidelityFigureRow> figure_fidelity_dataset(std::size_t points,
                                                              std::uint64_t seed) {
  std::vector<FidelityFigureRow> rows;
  rows.reserve(points);
  RngStream rng(seed);
  for (std::size_t i = 0; i < points; ++i) rows.push_back(fidelity_figure_row(sample_simplex(4, rng)));
  return rows;
}

inline FidelityFigureSummary summarize_fidelity_rows(const std::vector<FidelityFigureRow>& rows) {
  FidelityFigureSummary s{rows.front().lower_bound, rows.front().upper_bound};
  for (const FidelityFigureRow& r : rows) {
    s.max_lower = std::max(s.max_lower, r.lower_bound);
    s.min_upper = std::min(s.min_upper, r.upper_bound);
  }
  return s;
}

struct EntropyFigureRow {
  double purity;
  double lower_term;     // -Tr[L ln(c0 + c1 L + c2 L^2)]
  double upper_entropy;  // S(c0 + c1 L + c2 L^2)
  double gap;            // upper_entropy - lower_term
};

inline EntropyFigureRow entropy_figure_row(const Spectrum& spectrum) {
  const BipartiteDims dims(2, 2);
  const double pur = spectrum.purity();
  const CCoefficients c = c_from_purity(dims, pur);
  EntropyFigureRow row;
  row.purity = pur;
  row.lower_term = 0.0;
  row.upper_entropy = 0.0;
  for (double lam : spectrum.probs) {
    const double m = c.c0 + c.c1 * lam + c.c2 * lam * lam;
    row.lower_term -= lam * std::log(m);
    if (m > kEigenCutoff) row.upper_entropy -= m * std::log(m);
  }
  row.gap = row.upper_entropy - row.lower_term;
  return row;
}

// First two rows are the deterministic corner points (uniform, pure), then
// `points` flat-Dirichlet samples.
inline std::vector<EntropyFigureRow> figure_entropy_dataset(std::size_t points,
                                                            std::uint64_t seed) {
  std::vector<EntropyFigureRow> rows;
  rows.reserve(points + 2);
  rows.push_back(entropy_figure_row(Spectrum({0.25, 0.25, 0.25, 0.25})));
  rows.push_back(entropy_figure_row(Spectrum({1.0, 0.0, 0.0, 0.0})));
  RngStream rng(seed);
  for (std::size_t i = 0; i < points; ++i) rows.push_back(entropy_figure_row(sample_simplex(4, rng)));
  return rows;
}

}  // namespace haarorbit
