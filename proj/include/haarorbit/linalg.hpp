#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Complex matrix primitives, bipartite structure maps and the entropy/distance
// functionals everything else is built on. All logarithms are natural.

namespace haarorbit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Validation tolerances. Haar-sampled reductions routinely carry ~1e-15
// asymmetries and tiny negative eigenvalues; these absorb them without
// letting genuinely broken states through.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEigenCutoff = 1e-12;  // 0*ln(0) := 0 and support tests
inline constexpr double kSupportWeightTol = 1e-10;

struct BipartiteDims {
  int d_a;
  int d_b;
  int d;

  BipartiteDims(int da, int db) : d_a(da), d_b(db), d(da * db) {
    if (da < 2 || db < 2) {
      throw std::invalid_argument("BipartiteDims: both subsystem dimensions must be >= 2");
    }
  }
};

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Eigenvalues (ascending) of a numerically Hermitian matrix; the input is
// symmetrized first so MC averages with ~1e-15 asymmetry stay stable.
inline RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Hermitian PSD trace-one matrix with its dimension. Construction validates;
// every instance in circulation satisfies the state axioms.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
      throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    }
    const double herm_dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > kHermitianTol) {
      throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    }
    const double trace_dev = std::abs(mat_.trace() - Complex(1.0, 0.0));
    if (trace_dev > kTraceTol) {
      throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond tolerance");
    }
    mat_ = hermitize(mat_);
    const RealVector eig = hermitian_eigenvalues(mat_);
    if (eig.minCoeff() < -kPsdTol) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    }
  }

  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
  }

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    const double n = psi.norm();
    if (n < kEigenCutoff) throw std::invalid_argument("DensityMatrix::pure: zero vector");
    Eigen::VectorXcd v = psi / n;
    return DensityMatrix(v * v.adjoint());
  }

  static DensityMatrix diagonal(const std::vector<double>& probs) {
    const int d = static_cast<int>(probs.size());
    Matrix m = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) m(j, j) = probs[static_cast<std::size_t>(j)];
    return DensityMatrix(std::move(m));
  }

 private:
  Matrix mat_;
};

// Probability vector (point of the simplex).
struct Spectrum {
  std::vector<double> probs;

  explicit Spectrum(std::vector<double> p) : probs(std::move(p)) {
    if (probs.empty()) throw std::invalid_argument("Spectrum: empty");
    double sum = 0.0;
    for (double v : probs) {
      if (v < -kEigenCutoff) throw std::invalid_argument("Spectrum: negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kTraceTol) {
      throw std::invalid_argument("Spectrum: entries do not sum to 1");
    }
  }

  std::size_t size() const { return probs.size(); }

  Spectrum sorted_descending() const {
    std::vector<double> p = probs;
    std::sort(p.begin(), p.end(), std::greater<double>());
    return Spectrum(std::move(p));
  }

  double power_sum(int k) const {
    double s = 0.0;
    for (double v : probs) s += std::pow(std::max(v, 0.0), k);
    return s;
  }

  double purity() const { return power_sum(2); }

  double entropy() const {
    double s = 0.0;
    for (double v : probs) {
      if (v > kEigenCutoff) s -= v * std::log(v);
    }
    return std::max(s, 0.0);
  }
};

// Kronecker product with (i_A, i_B) row-major block ordering, the same
// ordering the partial traces below assume.
inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

namespace detail {

inline void check_bipartite(const Matrix& x, const BipartiteDims& dims, const char* who) {
  if (x.rows() != dims.d || x.cols() != dims.d) {
    throw std::invalid_argument(std::string(who) + ": matrix dimension does not match d_a*d_b");
  }
}

}  // namespace detail

// Tr_B on an arbitrary d x d matrix.
inline Matrix partial_trace_b(const Matrix& x, const BipartiteDims& dims) {
  detail::check_bipartite(x, dims, "partial_trace_b");
  Matrix out = Matrix::Zero(dims.d_a, dims.d_a);
  for (int ia = 0; ia < dims.d_a; ++ia) {
    for (int ja = 0; ja < dims.d_a; ++ja) {
      Complex s(0.0, 0.0);
      for (int b = 0; b < dims.d_b; ++b) {
        s += x(ia * dims.d_b + b, ja * dims.d_b + b);
      }
      out(ia, ja) = s;
    }
  }
  return out;
}

// Tr_A on an arbitrary d x d matrix.
inline Matrix partial_trace_a(const Matrix& x, const BipartiteDims& dims) {
  detail::check_bipartite(x, dims, "partial_trace_a");
  Matrix out = Matrix::Zero(dims.d_b, dims.d_b);
  for (int ib = 0; ib < dims.d_b; ++ib) {
    for (int jb = 0; jb < dims.d_b; ++jb) {
      Complex s(0.0, 0.0);
      for (int a = 0; a < dims.d_a; ++a) {
        s += x(a * dims.d_b + ib, a * dims.d_b + jb);
      }
      out(ib, jb) = s;
    }
  }
  return out;
}

inline DensityMatrix partial_trace_b(const DensityMatrix& rho, const BipartiteDims& dims) {
  return DensityMatrix(partial_trace_b(rho.mat(), dims));
}

inline DensityMatrix partial_trace_a(const DensityMatrix& rho, const BipartiteDims& dims) {
  return DensityMatrix(partial_trace_a(rho.mat(), dims));
}

// Gamma(X) = (Tr_B X) (x) 1_B. Note Tr Gamma(X) = d_b * Tr X.
inline Matrix gamma_map(const Matrix& x, const BipartiteDims& dims) {
  return tensor_product(partial_trace_b(x, dims), Matrix::Identity(dims.d_b, dims.d_b));
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  const RealVector eig = hermitian_eigenvalues(rho.mat());
  double s = 0.0;
  for (int j = 0; j < eig.size(); ++j) {
    if (eig(j) > kEigenCutoff) s -= eig(j) * std::log(eig(j));
  }
  return std::max(s, 0.0);
}

inline double purity(const DensityMatrix& rho) {
  // Tr rho^2 = ||rho||_F^2 for Hermitian rho.
  return rho.mat().squaredNorm();
}

inline double linear_entropy(const DensityMatrix& rho) { return 1.0 - purity(rho); }

// Tr rho^k through the spectrum.
inline double matrix_power_trace(const DensityMatrix& rho, int k) {
  if (k < 1) throw std::invalid_argument("matrix_power_trace: k must be >= 1");
  const RealVector eig = hermitian_eigenvalues(rho.mat());
  double s = 0.0;
  for (int j = 0; j < eig.size(); ++j) {
    s += std::pow(std::max(eig(j), 0.0), k);
  }
  return s;
}

// S(rho || sigma) = Tr rho (ln rho - ln sigma). Returns +infinity when rho
// has weight outside the support of sigma, so bound chains stay ordered
// instead of erroring.
inline double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(sigma.mat()));
  const RealVector s = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  double cross = 0.0;  // Tr rho ln sigma
  for (int j = 0; j < s.size(); ++j) {
    const double w = std::real((v.col(j).adjoint() * rho.mat() * v.col(j))(0, 0));
    if (s(j) < kEigenCutoff) {
      if (w > kSupportWeightTol) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += w * std::log(s(j));
  }
  return -von_neumann_entropy(rho) - cross;
}

// Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
  const RealVector lam = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  RealVector root = lam;
  for (int j = 0; j < root.size(); ++j) root(j) = std::sqrt(std::max(root(j), 0.0));
  const Matrix sqrt_rho = v * root.asDiagonal() * v.adjoint();
  const RealVector mu = hermitian_eigenvalues(sqrt_rho * sigma.mat() * sqrt_rho);
  double f = 0.0;
  for (int j = 0; j < mu.size(); ++j) f += std::sqrt(std::max(mu(j), 0.0));
  return std::clamp(f, 0.0, 1.0);
}

// Nonnegative binary entropy, h(0) = h(1) = 0, max ln 2 at p = 1/2.
inline double binary_entropy(double p) {
  if (p < -kEigenCutoff || p > 1.0 + kEigenCutoff) {
    throw std::invalid_argument("binary_entropy: p outside [0, 1]");
  }
  p = std::clamp(p, 0.0, 1.0);
  double h = 0.0;
  if (p > kEigenCutoff) h -= p * std::log(p);
  if (1.0 - p > kEigenCutoff) h -= (1.0 - p) * std::log(1.0 - p);
  return std::max(h, 0.0);
}

inline double harmonic_number(int k) {
  if (k < 1) throw std::invalid_argument("harmonic_number: k must be >= 1");
  double h = 0.0;
  for (int j = 1; j <= k; ++j) h += 1.0 / static_cast<double>(j);
  return h;
}

}  // namespace haarorbit
