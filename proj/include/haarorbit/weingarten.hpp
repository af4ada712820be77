#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "haarorbit/linalg.hpp"

// Closed-form Weingarten functions for moment order k <= 3, the second-moment
// twirl identity, the sixth-moment matrix integral, and the Choi/Kraus
// channel helpers built on them.

namespace haarorbit {

// Closed forms at fixed dimension. The k = 3 entries need d >= 3: their
// denominators carry a (d^2 - 4) factor.
struct WeingartenTable {
  int d;
  double wg1;
  double wg11, wg2;
  double wg111, wg21, wg3;

  static WeingartenTable make(int d) {
    if (d < 3) throw std::invalid_argument("WeingartenTable: needs d >= 3 for the k = 3 entries");
    const double dd = static_cast<double>(d);
    const double n2 = dd * dd - 1.0;
    const double n3 = (dd * dd - 1.0) * (dd * dd - 4.0);
    WeingartenTable t;
    t.d = d;
    t.wg1 = 1.0 / dd;
    t.wg11 = 1.0 / n2;
    t.wg2 = -1.0 / (dd * n2);
    t.wg111 = (dd * dd - 2.0) / (dd * n3);
    t.wg21 = -1.0 / n3;
    t.wg3 = 2.0 / (dd * n3);
    return t;
  }
};

// Wg(partition, d) for integer partitions of k <= 3. Parts may be given in
// any order.
inline double wg(std::vector<int> partition, int d) {
  if (partition.empty()) throw std::invalid_argument("wg: empty partition");
  int k = 0;
  for (int part : partition) {
    if (part < 1) throw std::invalid_argument("wg: partition parts must be positive");
    k += part;
  }
  if (k > 3) throw std::invalid_argument("wg: closed forms implemented for k <= 3 only");
  if (d < 1) throw std::invalid_argument("wg: d must be >= 1");
  if (k >= 2 && d < 2) throw std::invalid_argument("wg: k = 2 forms need d >= 2");
  if (k == 3 && d < 3) {
    throw std::invalid_argument(d == 2 ? "k=3 Weingarten undefined at d=2"
                                       : "wg: k = 3 forms need d >= 3");
  }
  std::sort(partition.begin(), partition.end(), std::greater<int>());
  const double dd = static_cast<double>(d);
  if (k == 1) return 1.0 / dd;
  if (k == 2) {
    if (partition[0] == 1) return 1.0 / (dd * dd - 1.0);
    return -1.0 / (dd * (dd * dd - 1.0));
  }
  const WeingartenTable t = WeingartenTable::make(d);
  if (partition[0] == 1) return t.wg111;
  if (partition[0] == 2) return t.wg21;
  return t.wg3;
}

// A superoperator is passed as its action on matrices; the two scalars the
// twirl identity needs can be supplied precomputed to skip the d^2 matrix-unit
// evaluations.
using Superop = std::function<Matrix(const Matrix&)>;

struct SuperopScalars {
  Complex trace;              // Tr Xi = sum_{m,n} <m| Xi(|m><n|) |n>
  Complex trace_on_identity;  // Tr [Xi(1)]
};

inline Complex superop_trace(const Superop& phi, int d) {
  if (d < 1) throw std::invalid_argument("superop_trace: d must be >= 1");
  Complex total(0.0, 0.0);
  Matrix unit = Matrix::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      unit(m, n) = Complex(1.0, 0.0);
      total += phi(unit)(m, n);
      unit(m, n) = Complex(0.0, 0.0);
    }
  }
  return total;
}

inline SuperopScalars superop_scalars(const Superop& phi, int d) {
  return {superop_trace(phi, d), phi(Matrix::Identity(d, d)).trace()};
}

inline Superop gamma_superop(const BipartiteDims& dims) {
  return [dims](const Matrix& x) { return gamma_map(x, dims); };
}

inline SuperopScalars gamma_superop_scalars(const BipartiteDims& dims) {
  const double da = dims.d_a;
  const double db = dims.d_b;
  return {Complex(da * da * db, 0.0), Complex(da * db * db, 0.0)};
}

// int U^dag Xi(U X U^dag) U dmu(U) given the superoperator's two scalars.
inline Matrix twirl_second_moment(const SuperopScalars& s, const Matrix& x, int d) {
  if (d < 2) throw std::invalid_argument("twirl_second_moment: d must be >= 2");
  if (x.rows() != d || x.cols() != d) throw std::invalid_argument("twirl_second_moment: X must be d x d");
  const double dd = static_cast<double>(d);
  const double denom = dd * (dd * dd - 1.0);
  const Complex coeff_id = (dd * s.trace_on_identity - s.trace) / denom;
  const Complex coeff_x = (dd * s.trace - s.trace_on_identity) / denom;
  return coeff_id * x.trace() * Matrix::Identity(d, d) + coeff_x * x;
}

inline Matrix twirl_second_moment(const Superop& phi, const Matrix& x, int d) {
  return twirl_second_moment(superop_scalars(phi, d), x, d);
}

struct MuCoefficients {
  Complex mu1, mu2, mu3, mu4, mu5;
};

namespace detail {

struct OperandTraces {
  Complex a, d, x, b, c;
  Complex ad, ax, dx, adx, dax, bc;
};

inline OperandTraces operand_traces(const Matrix& a, const Matrix& b, const Matrix& c,
                                    const Matrix& d_op, const Matrix& x, int d) {
  for (const Matrix* m : {&a, &b, &c, &d_op, &x}) {
    if (m->rows() != d || m->cols() != d) {
      throw std::invalid_argument("sixth moment: all operands must be d x d");
    }
  }
  OperandTraces t;
  t.a = a.trace();
  t.d = d_op.trace();
  t.x = x.trace();
  t.b = b.trace();
  t.c = c.trace();
  t.ad = (a * d_op).trace();
  t.ax = (a * x).trace();
  t.dx = (d_op * x).trace();
  t.adx = (a * d_op * x).trace();
  t.dax = (d_op * a * x).trace();
  t.bc = (b * c).trace();
  return t;
}

}  // namespace detail

// Production path: the Wg-substituted coefficient expressions, with
// N_d = (d^2 - 1)(d^2 - 4) divided out at the end.
inline MuCoefficients mu_coefficients(const Matrix& a, const Matrix& b, const Matrix& c,
                                      const Matrix& d_op, const Matrix& x, int d) {
  if (d < 3) {
    throw std::invalid_argument(d == 2 ? "k=3 Weingarten undefined at d=2"
                                       : "mu_coefficients: d must be >= 3");
  }
  const detail::OperandTraces t = detail::operand_traces(a, b, c, d_op, x, d);
  const double dd = static_cast<double>(d);
  const double nd = (dd * dd - 1.0) * (dd * dd - 4.0);
  const double p = dd - 2.0 / dd;
  const double q = 2.0 / dd;

  MuCoefficients mu;
  mu.mu1 = (p * t.ad * t.x * t.bc + p * t.dax * t.b * t.c + q * t.a * t.dx * t.bc +
            q * t.d * t.ax * t.bc + q * t.a * t.d * t.x * t.b * t.c + q * t.adx * t.b * t.c -
            t.a * t.d * t.x * t.bc - t.adx * t.bc - t.dax * t.bc - t.ad * t.x * t.b * t.c -
            t.a * t.dx * t.b * t.c - t.d * t.ax * t.b * t.c) /
           nd;
  mu.mu2 = (p * t.a * t.d * t.x + q * t.adx + q * t.dax - t.ad * t.x - t.a * t.dx - t.d * t.ax) / nd;
  mu.mu3 = (q * t.dax + q * t.a * t.d * t.x + p * t.adx - t.ad * t.x - t.a * t.dx - t.d * t.ax) / nd;
  mu.mu4 = (p * t.a * t.dx * t.c + q * t.ad * t.x * t.c + q * t.d * t.ax * t.c -
            t.a * t.d * t.x * t.c - t.adx * t.c - t.dax * t.c) /
           nd;
  mu.mu5 = (q * t.ad * t.x * t.b + q * t.a * t.dx * t.b + p * t.d * t.ax * t.b -
            t.a * t.d * t.x * t.b - t.adx * t.b - t.dax * t.b) /
           nd;
  return mu;
}

// Cross-check path: the raw 12-term (resp. 6-term) Weingarten sums before any
// simplification. Kept deliberately close to the case-by-case expansion; the
// two paths agreeing to ~1e-10 guards both against transcription slips.
inline MuCoefficients mu_coefficients_raw(const Matrix& a, const Matrix& b, const Matrix& c,
                                          const Matrix& d_op, const Matrix& x, int d) {
  if (d < 3) {
    throw std::invalid_argument(d == 2 ? "k=3 Weingarten undefined at d=2"
                                       : "mu_coefficients_raw: d must be >= 3");
  }
  const detail::OperandTraces t = detail::operand_traces(a, b, c, d_op, x, d);
  const WeingartenTable w = WeingartenTable::make(d);

  MuCoefficients mu;
  mu.mu1 = w.wg111 * t.ad * t.x * t.bc + w.wg21 * t.a * t.d * t.x * t.bc +
           w.wg21 * t.adx * t.bc + w.wg21 * t.dax * t.bc + w.wg3 * t.a * t.dx * t.bc +
           w.wg3 * t.d * t.ax * t.bc + w.wg21 * t.ad * t.x * t.b * t.c +
           w.wg3 * t.a * t.d * t.x * t.b * t.c + w.wg3 * t.adx * t.b * t.c +
           w.wg111 * t.dax * t.b * t.c + w.wg21 * t.a * t.dx * t.b * t.c +
           w.wg21 * t.d * t.ax * t.b * t.c;
  mu.mu2 = w.wg21 * t.ad * t.x + w.wg111 * t.a * t.d * t.x + w.wg3 * t.adx + w.wg3 * t.dax +
           w.wg21 * t.a * t.dx + w.wg21 * t.d * t.ax;
  mu.mu3 = w.wg21 * t.ad * t.x + w.wg3 * t.a * t.d * t.x + w.wg111 * t.adx + w.wg3 * t.dax +
           w.wg21 * t.a * t.dx + w.wg21 * t.d * t.ax;
  mu.mu4 = w.wg3 * t.ad * t.x * t.c + w.wg21 * t.a * t.d * t.x * t.c + w.wg21 * t.adx * t.c +
           w.wg21 * t.dax * t.c + w.wg111 * t.a * t.dx * t.c + w.wg3 * t.d * t.ax * t.c;
  mu.mu5 = w.wg3 * t.ad * t.x * t.b + w.wg21 * t.a * t.d * t.x * t.b + w.wg21 * t.adx * t.b +
           w.wg21 * t.dax * t.b + w.wg3 * t.a * t.dx * t.b + w.wg111 * t.d * t.ax * t.b;
  return mu;
}

// int U A U^dag B U X U^dag C U D U^dag dmu(U)
//   = mu1 1 + mu2 BC + mu3 CB + mu4 B + mu5 C.
inline Matrix sixth_moment_integral(const Matrix& a, const Matrix& b, const Matrix& c,
                                    const Matrix& d_op, const Matrix& x, int d) {
  const MuCoefficients mu = mu_coefficients(a, b, c, d_op, x, d);
  return mu.mu1 * Matrix::Identity(d, d) + mu.mu2 * (b * c) + mu.mu3 * (c * b) + mu.mu4 * b +
         mu.mu5 * c;
}

// Trace-preserving channel in Kraus form.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> kraus_ops) : ops_(std::move(kraus_ops)) {
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: needs at least one Kraus operator");
    d_out_ = static_cast<int>(ops_.front().rows());
    d_in_ = static_cast<int>(ops_.front().cols());
    Matrix sum = Matrix::Zero(d_in_, d_in_);
    for (const Matrix& e : ops_) {
      if (e.rows() != d_out_ || e.cols() != d_in_) {
        throw std::invalid_argument("KrausChannel: inconsistent Kraus operator shapes");
      }
      sum += e.adjoint() * e;
    }
    const double dev = (sum - Matrix::Identity(d_in_, d_in_)).cwiseAbs().maxCoeff();
    if (dev > 1e-8) throw std::invalid_argument("KrausChannel: sum E^dag E != 1 (not trace preserving)");
  }

  Matrix apply(const Matrix& x) const {
    Matrix out = Matrix::Zero(d_out_, d_out_);
    for (const Matrix& e : ops_) out += e * x * e.adjoint();
    return out;
  }

  const std::vector<Matrix>& kraus() const { return ops_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }

  static KrausChannel identity(int d) { return KrausChannel({Matrix::Identity(d, d)}); }

  // Kraus set {|i><j| / sqrt(d)}; maps everything to 1/d.
  static KrausChannel depolarizing(int d) {
    std::vector<Matrix> ops;
    ops.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        Matrix e = Matrix::Zero(d, d);
        e(i, j) = scale;
        ops.push_back(std::move(e));
      }
    }
    return KrausChannel(std::move(ops));
  }

 private:
  std::vector<Matrix> ops_;
  int d_in_ = 0;
  int d_out_ = 0;
};

// Choi matrix J = sum_j vec(E_j) vec(E_j)^dag, column-stacking vectorization.
inline Matrix choi_matrix(const KrausChannel& ch) {
  const int rows = ch.d_out() * ch.d_in();
  Matrix j = Matrix::Zero(rows, rows);
  for (const Matrix& e : ch.kraus()) {
    const Eigen::Map<const Eigen::VectorXcd> v(e.data(), e.size());
    j += v * v.adjoint();
  }
  return j;
}

// int Tr[E(U rho U^dag)^2] dmu(U) in closed form through Tr J^2 and Tr E(1)^2.
inline double channel_average_purity(const KrausChannel& ch, const DensityMatrix& rho) {
  if (ch.d_in() != ch.d_out()) {
    throw std::invalid_argument("channel_average_purity: channel must be square");
  }
  const int d = ch.d_in();
  if (d < 2) throw std::invalid_argument("channel_average_purity: d must be >= 2");
  if (rho.dim() != d) throw std::invalid_argument("channel_average_purity: state dimension mismatch");
  const double dd = static_cast<double>(d);
  const double pur = purity(rho);
  const double tr_j2 = choi_matrix(ch).squaredNorm();  // J is Hermitian
  const double tr_ei2 = ch.apply(Matrix::Identity(d, d)).squaredNorm();
  const double denom = dd * (dd * dd - 1.0);
  return (dd * pur - 1.0) / denom * tr_j2 + (dd - pur) / denom * tr_ei2;
}

}  // namespace haarorbit
