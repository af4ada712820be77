#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "haarorbit/linalg.hpp"

// Closed-form orbit averages, series coefficients and correlation bounds for
// a bipartite state under global Haar conjugation. Everything here depends on
// the state only through (d_a, d_b) and the trace moments Tr rho^2, Tr rho^3,
// so each function also has a moment-level form usable from spectra.

namespace haarorbit {

inline double page_average_entropy(int m, int n) {
  if (m < 1 || m > n) throw std::invalid_argument("page_average_entropy: needs 1 <= m <= n");
  return harmonic_number(m * n) - harmonic_number(n) - (m - 1.0) / (2.0 * n);
}

inline double diagonal_average_entropy(int m, int n) {
  if (m < 1 || m > n) throw std::invalid_argument("diagonal_average_entropy: needs 1 <= m <= n");
  return harmonic_number(m * n) - harmonic_number(n);
}

inline double average_coherence(int m, int n) {
  if (m < 1 || m > n) throw std::invalid_argument("average_coherence: needs 1 <= m <= n");
  return (m - 1.0) / (2.0 * n);
}

namespace detail {

struct TraceMoments {
  double purity;  // Tr rho^2
  double tr3;     // Tr rho^3
};

inline TraceMoments trace_moments(const DensityMatrix& rho) {
  TraceMoments m{purity(rho), 0.0};
  const RealVector eig = hermitian_eigenvalues(rho.mat());
  for (int j = 0; j < eig.size(); ++j) {
    const double lam = std::max(eig(j), 0.0);
    m.tr3 += lam * lam * lam;
  }
  return m;
}

inline double nd_factor(const BipartiteDims& dims) {
  const double d = dims.d;
  return (d * d - 1.0) * (d * d - 4.0);
}

}  // namespace detail

// First series coefficient a1; decreasing in the purity, always < 1.
inline double a1_from_purity(const BipartiteDims& dims, double pur) {
  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  return (da - 1.0) / (d * d - 1.0) * ((1.0 + d * db) - (d + db) * pur);
}

inline double a1(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("a1: state dimension mismatch");
  return a1_from_purity(dims, purity(rho));
}

struct FghCoefficients {
  double f;  // purity-dependent
  double g;
  double h;
};

inline FghCoefficients fgh_from_purity(const BipartiteDims& dims, double pur) {
  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  const double nd = detail::nd_factor(dims);
  FghCoefficients out;
  out.f = da * (da * da - 1.0) * (db * db - 1.0) / nd * (da + db * pur - 2.0) +
          (d * d - 2.0 * da * da - 2.0) * (db * db - 1.0) / nd * (da - 1.0) * (da - 1.0);
  out.g = 2.0 * d * (da - 1.0) * (da * da - 1.0) * (db * db - 1.0) / nd;
  out.h = (da * da - 1.0) * (da * da - 4.0) * db * db / nd;
  return out;
}

inline FghCoefficients fgh(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("fgh: state dimension mismatch");
  return fgh_from_purity(dims, purity(rho));
}

// Second series coefficient a2 = (f + g/d_b + h/d_b^2)
//                              - (g + 2h/d_b) Tr rho^2 + h Tr rho^3.
inline double a2_from_moments(const BipartiteDims& dims, double pur, double tr3) {
  const FghCoefficients k = fgh_from_purity(dims, pur);
  const double db = dims.d_b;
  return (k.f + k.g / db + k.h / (db * db)) - (k.g + 2.0 * k.h / db) * pur + k.h * tr3;
}

inline double a2(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("a2: state dimension mismatch");
  const detail::TraceMoments m = detail::trace_moments(rho);
  return a2_from_moments(dims, m.purity, m.tr3);
}

// Lower bounds on the average subsystem entropy. The raw value is kept next
// to the usable (ceiling-clamped) one; `clamped` flags the pathological case
// where the raw bound exceeds ln d_a.
struct ClampedBound {
  double value;
  double raw;
  bool clamped;
};

namespace detail {

inline ClampedBound clamp_to_entropy_ceiling(double raw, const BipartiteDims& dims) {
  const double ceiling = std::log(static_cast<double>(dims.d_a));
  if (raw > ceiling) return {ceiling, raw, true};
  return {raw, raw, false};
}

}  // namespace detail

// Two-term series truncation a1 + a2/2.
inline ClampedBound entropy_lower_bound_truncated(const DensityMatrix& rho, const BipartiteDims& dims) {
  const detail::TraceMoments m = detail::trace_moments(rho);
  const double raw = a1_from_purity(dims, m.purity) + 0.5 * a2_from_moments(dims, m.purity, m.tr3);
  return detail::clamp_to_entropy_ceiling(raw, dims);
}

// Full geometric-minorant resummation -ln(1 - a1).
inline ClampedBound entropy_lower_bound_log(const DensityMatrix& rho, const BipartiteDims& dims) {
  const double a = a1(rho, dims);
  if (a >= 1.0) throw std::logic_error("entropy_lower_bound_log: a1 >= 1 should be impossible");
  return detail::clamp_to_entropy_ceiling(-std::log1p(-a), dims);
}

// Exact average linear entropy of subsystem A.
inline double average_linear_entropy_a(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("average_linear_entropy_a: dimension mismatch");
  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  return (da - 1.0) * (db - 1.0) / (d + 1.0) + (d * da - db) / (d * d - 1.0) * linear_entropy(rho);
}

inline double average_linear_entropy_b(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("average_linear_entropy_b: dimension mismatch");
  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  return (da - 1.0) * (db - 1.0) / (d + 1.0) + (d * db - da) / (d * d - 1.0) * linear_entropy(rho);
}

inline double average_linear_entropy_sum(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("average_linear_entropy_sum: dimension mismatch");
  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  return 2.0 * (da - 1.0) * (db - 1.0) / (d + 1.0) + (da + db) / (d + 1.0) * linear_entropy(rho);
}

struct CCoefficients {
  double c0;  // purity-dependent
  double c1;
  double c2;
};

inline CCoefficients c_from_purity(const BipartiteDims& dims, double pur) {
  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  const double nd = detail::nd_factor(dims);
  const double k = (da * da - 1.0) * (db * db - 1.0);
  CCoefficients c;
  c.c0 = k * (d - 2.0 * pur) / nd;
  c.c1 = (d * d * (da * da + db * db - 6.0) + 4.0) / nd;
  c.c2 = 2.0 * d * k / nd;
  return c;
}

inline CCoefficients c_coefficients(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("c_coefficients: dimension mismatch");
  return c_from_purity(dims, purity(rho));
}

// int U^dag (rho'_A (x) rho'_B) U dmu(U) = c0 1 + c1 rho + c2 rho^2.
inline DensityMatrix pullback_product_average(const DensityMatrix& rho, const BipartiteDims& dims) {
  const CCoefficients c = c_coefficients(rho, dims);
  const Matrix& r = rho.mat();
  Matrix out = c.c0 * Matrix::Identity(dims.d, dims.d) + c.c1 * r + c.c2 * (r * r);
  return DensityMatrix(std::move(out));
}

// Quantum mutual information through the entropy sum.
inline double qmi(const DensityMatrix& rho, const BipartiteDims& dims) {
  const DensityMatrix rho_a = partial_trace_b(rho, dims);
  const DensityMatrix rho_b = partial_trace_a(rho, dims);
  return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho);
}

// Same quantity as relative entropy to the product of marginals; the two
// routes agree to ~1e-8 and are cross-checked in the test suite.
inline double qmi_via_relative_entropy(const DensityMatrix& rho, const BipartiteDims& dims) {
  const DensityMatrix rho_a = partial_trace_b(rho, dims);
  const DensityMatrix rho_b = partial_trace_a(rho, dims);
  return relative_entropy(rho, DensityMatrix(tensor_product(rho_a.mat(), rho_b.mat())));
}

// Lower bound on the average QMI over the orbit:
// S(rho || c0 1 + c1 rho + c2 rho^2). Zero iff rho is maximally mixed.
inline double qmi_lower_bound(const DensityMatrix& rho, const BipartiteDims& dims) {
  return relative_entropy(rho, pullback_product_average(rho, dims));
}

struct BoundsReport {
  double lower;
  double upper;
  std::optional<double> value_or_estimate;
};

// Sandwich for the average fidelity between an orbit point and the product of
// its marginals.
inline BoundsReport fidelity_bounds(const DensityMatrix& rho, const BipartiteDims& dims) {
  const detail::TraceMoments m = detail::trace_moments(rho);
  const CCoefficients c = c_from_purity(dims, m.purity);
  BoundsReport rep;
  rep.lower = c.c0 + c.c1 * m.purity + c.c2 * m.tr3;
  rep.upper = fidelity(rho, pullback_product_average(rho, dims));
  return rep;
}

// Sandwich for <S_A + S_B> over the orbit.
inline BoundsReport sum_entropy_bounds(const DensityMatrix& rho, const BipartiteDims& dims) {
  const DensityMatrix pullback = pullback_product_average(rho, dims);
  BoundsReport rep;
  rep.lower = von_neumann_entropy(rho) + relative_entropy(rho, pullback);
  rep.upper = von_neumann_entropy(pullback);
  return rep;
}

// Gap between the Theorem-3 bounds as a spectral function:
// F = S(M) - S(L) - S(L || M) with M = c0 + c1 L + c2 L^2 on the diagonal.
inline double entropy_gap(const Spectrum& spectrum, const BipartiteDims& dims) {
  if (static_cast<int>(spectrum.size()) != dims.d) {
    throw std::invalid_argument("entropy_gap: spectrum length must equal d_a*d_b");
  }
  const CCoefficients c = c_from_purity(dims, spectrum.purity());
  double s_m = 0.0;       // S(M)
  double rel = 0.0;       // S(L || M)
  double s_lam = 0.0;     // S(L)
  for (double lam : spectrum.probs) {
    const double m = c.c0 + c.c1 * lam + c.c2 * lam * lam;
    if (m > kEigenCutoff) s_m -= m * std::log(m);
    if (lam > kEigenCutoff) {
      s_lam -= lam * std::log(lam);
      rel += lam * (std::log(lam) - std::log(m));
    }
  }
  return s_m - s_lam - rel;
}

// Maximal QMI over the orbit (balanced systems): ln d - S(Lambda).
inline double max_qmi(const Spectrum& spectrum, const BipartiteDims& dims) {
  if (dims.d_a != dims.d_b) throw std::invalid_argument("max_qmi: requires d_a = d_b");
  if (static_cast<int>(spectrum.size()) != dims.d) {
    throw std::invalid_argument("max_qmi: spectrum length must equal d_a*d_b");
  }
  return std::log(static_cast<double>(dims.d)) - spectrum.entropy();
}

// Minimal QMI over a two-qubit orbit; the spectrum is sorted descending
// internally to match the lambda_1 >= ... >= lambda_4 convention.
inline double min_qmi_two_qubit(const Spectrum& spectrum) {
  if (spectrum.size() != 4) throw std::invalid_argument("min_qmi_two_qubit: needs a length-4 spectrum");
  const Spectrum s = spectrum.sorted_descending();
  const double l1 = s.probs[0];
  const double l2 = s.probs[1];
  const double l3 = s.probs[2];
  return binary_entropy(std::min(l1 + l2, 1.0)) + binary_entropy(std::min(l1 + l3, 1.0)) - s.entropy();
}

// Two-qubit marginal compatibility: minimal marginal eigenvalues
// (lam_a_min, lam_b_min) are achievable with global spectrum `spectrum` iff
// all three inequalities hold. A 1e-9 slack absorbs eigensolver noise.
inline bool bravyi_compatible(const Spectrum& spectrum, double lam_a_min, double lam_b_min) {
  if (spectrum.size() != 4) throw std::invalid_argument("bravyi_compatible: needs a length-4 spectrum");
  constexpr double eps = 1e-9;
  const Spectrum s = spectrum.sorted_descending();
  const double l1 = s.probs[0];
  const double l2 = s.probs[1];
  const double l3 = s.probs[2];
  const double l4 = s.probs[3];
  const bool first = std::min(lam_a_min, lam_b_min) >= l3 + l4 - eps;
  const bool second = lam_a_min + lam_b_min >= l2 + l3 + 2.0 * l4 - eps;
  const bool third = std::abs(lam_a_min - lam_b_min) <= std::min(l1 - l3, l2 - l4) + eps;
  return first && second && third;
}

struct OrbitCoefficients {
  double a1, a2;
  double f, g, h;
  double c0, c1, c2;
};

inline OrbitCoefficients orbit_coefficients(const DensityMatrix& rho, const BipartiteDims& dims) {
  if (rho.dim() != dims.d) throw std::invalid_argument("orbit_coefficients: dimension mismatch");
  const detail::TraceMoments m = detail::trace_moments(rho);
  const FghCoefficients k = fgh_from_purity(dims, m.purity);
  const CCoefficients c = c_from_purity(dims, m.purity);
  return {a1_from_purity(dims, m.purity), a2_from_moments(dims, m.purity, m.tr3),
          k.f, k.g, k.h, c.c0, c.c1, c.c2};
}

}  // namespace haarorbit
