#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include "haarorbit/linalg.hpp"

// Reproducible sampling of Haar-random unitaries, induced-measure density
// matrices and flat Dirichlet simplex points. Streams are derived from
// (seed, stream index), so concurrent batches stay deterministic no matter
// how threads are scheduled.

namespace haarorbit {

namespace detail {

// splitmix64 finalizer; decorrelates (seed, stream) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(detail::mix64(detail::mix64(seed) ^ detail::mix64(stream))) {}

  RngStream substream(std::uint64_t index) const { return RngStream(seed_, detail::mix64(stream_) + index + 1); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; fixed two-draw consumption keeps the
  // stream accounting platform-independent (std::normal_distribution is not).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Complex Ginibre matrix: i.i.d. complex Gaussian entries.
inline Matrix sample_ginibre(int rows, int cols, RngStream& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("sample_ginibre: empty shape");
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      g(i, j) = rng.complex_gaussian();
    }
  }
  return g;
}

// Haar-random unitary: QR of a Ginibre matrix, then each column is rotated by
// the phase making the matching diagonal entry of R real positive. Without
// that correction the distribution is not Haar.
inline Matrix sample_haar_unitary(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_haar_unitary: d must be >= 1");
  const Matrix g = sample_ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix u = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
    u.col(j) *= phase;
  }
  return u;
}

// Density matrix from the measure induced by tracing an ancilla of the given
// rank out of a Haar-random pure state; rank = d is the standard flat case,
// rank = 1 gives pure states.
inline DensityMatrix sample_random_density(int d, int rank, RngStream& rng) {
  if (d < 1 || rank < 1) throw std::invalid_argument("sample_random_density: d and rank must be >= 1");
  const Matrix g = sample_ginibre(d, rank, rng);
  Matrix m = g * g.adjoint();
  m = hermitize(m);
  const double tr = std::real(m.trace());
  return DensityMatrix(m / tr);
}

// Uniform (flat Dirichlet) point of the probability simplex, via normalized
// unit exponentials.
inline Spectrum sample_simplex(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_simplex: d must be >= 1");
  std::vector<double> e(static_cast<std::size_t>(d));
  double sum = 0.0;
  for (auto& v : e) {
    v = -std::log(1.0 - rng.uniform());
    sum += v;
  }
  if (sum <= 0.0) {
    // All-zero exponentials have probability ~2^-53d; fall back to uniform.
    for (auto& v : e) v = 1.0 / static_cast<double>(d);
    return Spectrum(std::move(e));
  }
  for (auto& v : e) v /= sum;
  return Spectrum(std::move(e));
}

}  // namespace haarorbit
