#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "haarorbit/haar.hpp"
#include "haarorbit/linalg.hpp"
#include "haarorbit/weingarten.hpp"

// Haar-sampling estimators for every orbit average with a closed form (or a
// bound) elsewhere in the library. Batches run concurrently on substreams
// derived from (seed, batch index) and are reduced in index order with
// pairwise summation, so results are bit-identical regardless of scheduling.

namespace haarorbit {

struct MCConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 42;
  std::size_t batch_size = 0;  // 0: auto, targets ~50 batches
  double sigma_gate = 3.0;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

struct MCMatrixEstimate {
  Matrix mean;
  Eigen::MatrixXd entry_se;
  double max_entry_se = 0.0;
  std::size_t samples = 0;
};

namespace detail {

struct BatchPlan {
  std::size_t batches;
  std::size_t batch_size;
  std::size_t total;
};

inline BatchPlan plan_batches(const MCConfig& cfg) {
  if (cfg.samples < 100) throw std::invalid_argument("MCConfig: samples must be >= 100");
  std::size_t bs = cfg.batch_size;
  if (bs == 0) bs = std::max<std::size_t>(1, cfg.samples / 50);
  const std::size_t nb = std::max<std::size_t>(2, cfg.samples / bs);
  return {nb, bs, nb * bs};
}

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

// Runs `body(batch_index, stream)` for every batch on a small worker pool.
template <typename Body>
inline void for_each_batch(const BatchPlan& plan, std::uint64_t seed, Body&& body) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, plan.batches));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t b = next.fetch_add(1); b < plan.batches; b = next.fetch_add(1)) {
      RngStream rng(seed, b);
      body(b, rng);
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

inline MCEstimate estimate_from_batch_means(std::span<const double> means, std::size_t total) {
  const double nb = static_cast<double>(means.size());
  const double mean = pairwise_sum(means) / nb;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (nb - 1.0);
  return {mean, std::sqrt(var / nb), total};
}

}  // namespace detail

// Scalar estimator: `sample` maps an RNG stream to one draw of the estimand.
template <typename Fn>
inline MCEstimate mc_scalar(const MCConfig& cfg, Fn&& sample) {
  const detail::BatchPlan plan = detail::plan_batches(cfg);
  std::vector<double> means(plan.batches, 0.0);
  detail::for_each_batch(plan, cfg.seed, [&](std::size_t b, RngStream& rng) {
    double acc = 0.0;
    for (std::size_t i = 0; i < plan.batch_size; ++i) acc += sample(rng);
    means[b] = acc / static_cast<double>(plan.batch_size);
  });
  return detail::estimate_from_batch_means(means, plan.total);
}

// Matrix-valued estimator with per-entry standard errors.
template <typename Fn>
inline MCMatrixEstimate mc_matrix(int rows, int cols, const MCConfig& cfg, Fn&& sample) {
  const detail::BatchPlan plan = detail::plan_batches(cfg);
  std::vector<Matrix> means(plan.batches);
  detail::for_each_batch(plan, cfg.seed, [&](std::size_t b, RngStream& rng) {
    Matrix acc = Matrix::Zero(rows, cols);
    for (std::size_t i = 0; i < plan.batch_size; ++i) acc += sample(rng);
    means[b] = acc / static_cast<double>(plan.batch_size);
  });

  const double nb = static_cast<double>(plan.batches);
  Matrix mean = Matrix::Zero(rows, cols);
  // Pairwise reduction entry-by-entry would be overkill; batch counts are
  // small (~50), a single pass in index order is already deterministic.
  for (const Matrix& m : means) mean += m;
  mean /= nb;

  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(rows, cols);
  for (const Matrix& m : means) var += (m - mean).cwiseAbs2();
  var /= (nb - 1.0);

  MCMatrixEstimate est;
  est.mean = std::move(mean);
  est.entry_se = (var / nb).cwiseSqrt();
  est.max_entry_se = est.entry_se.maxCoeff();
  est.samples = plan.total;
  return est;
}

// ---- Orbit-average estimators -------------------------------------------

inline MCEstimate mc_average_entropy_a(const DensityMatrix& rho, const BipartiteDims& dims,
                                       const MCConfig& cfg) {
  const Matrix r = rho.mat();
  const double ceiling = std::log(static_cast<double>(dims.d_a)) + 1e-9;
  return mc_scalar(cfg, [r, dims, ceiling](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    const DensityMatrix reduced(partial_trace_b(Matrix(u * r * u.adjoint()), dims));
    const double s = von_neumann_entropy(reduced);
    if (s < -1e-12 || s > ceiling) throw std::logic_error("mc_average_entropy_a: sample out of range");
    return s;
  });
}

inline MCEstimate mc_average_entropy_b(const DensityMatrix& rho, const BipartiteDims& dims,
                                       const MCConfig& cfg) {
  const Matrix r = rho.mat();
  return mc_scalar(cfg, [r, dims](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    return von_neumann_entropy(DensityMatrix(partial_trace_a(Matrix(u * r * u.adjoint()), dims)));
  });
}

inline MCEstimate mc_average_linear_entropy_a(const DensityMatrix& rho, const BipartiteDims& dims,
                                              const MCConfig& cfg) {
  const Matrix r = rho.mat();
  return mc_scalar(cfg, [r, dims](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    return linear_entropy(DensityMatrix(partial_trace_b(Matrix(u * r * u.adjoint()), dims)));
  });
}

inline MCEstimate mc_average_linear_entropy_b(const DensityMatrix& rho, const BipartiteDims& dims,
                                              const MCConfig& cfg) {
  const Matrix r = rho.mat();
  return mc_scalar(cfg, [r, dims](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    return linear_entropy(DensityMatrix(partial_trace_a(Matrix(u * r * u.adjoint()), dims)));
  });
}

inline MCEstimate mc_average_qmi(const DensityMatrix& rho, const BipartiteDims& dims,
                                 const MCConfig& cfg) {
  const Matrix r = rho.mat();
  const double s_global = von_neumann_entropy(rho);  // invariant along the orbit
  return mc_scalar(cfg, [r, dims, s_global](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    const Matrix rp = u * r * u.adjoint();
    const double sa = von_neumann_entropy(DensityMatrix(partial_trace_b(rp, dims)));
    const double sb = von_neumann_entropy(DensityMatrix(partial_trace_a(rp, dims)));
    return sa + sb - s_global;
  });
}

inline MCEstimate mc_average_fidelity(const DensityMatrix& rho, const BipartiteDims& dims,
                                      const MCConfig& cfg) {
  const Matrix r = rho.mat();
  return mc_scalar(cfg, [r, dims](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    const DensityMatrix rp(Matrix(u * r * u.adjoint()));
    const DensityMatrix ra = partial_trace_b(rp, dims);
    const DensityMatrix rb = partial_trace_a(rp, dims);
    return fidelity(rp, DensityMatrix(tensor_product(ra.mat(), rb.mat())));
  });
}

// E[rho'_A (x) rho'_B]; Hermitian by symmetrization of the mean.
inline MCMatrixEstimate mc_product_average(const DensityMatrix& rho, const BipartiteDims& dims,
                                           const MCConfig& cfg) {
  const Matrix r = rho.mat();
  MCMatrixEstimate est = mc_matrix(dims.d, dims.d, cfg, [r, dims](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    const Matrix rp = u * r * u.adjoint();
    return Matrix(tensor_product(partial_trace_b(rp, dims), partial_trace_a(rp, dims)));
  });
  est.mean = hermitize(est.mean);
  return est;
}

// E[U^dag (rho'_A (x) rho'_B) U].
inline MCMatrixEstimate mc_pullback_average(const DensityMatrix& rho, const BipartiteDims& dims,
                                            const MCConfig& cfg) {
  const Matrix r = rho.mat();
  MCMatrixEstimate est = mc_matrix(dims.d, dims.d, cfg, [r, dims](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    const Matrix rp = u * r * u.adjoint();
    const Matrix prod = tensor_product(partial_trace_b(rp, dims), partial_trace_a(rp, dims));
    return Matrix(u.adjoint() * prod * u);
  });
  est.mean = hermitize(est.mean);
  return est;
}

inline MCMatrixEstimate mc_sixth_moment(const Matrix& a, const Matrix& b, const Matrix& c,
                                        const Matrix& d_op, const Matrix& x, int d,
                                        const MCConfig& cfg) {
  return mc_matrix(d, d, cfg, [&a, &b, &c, &d_op, &x, d](RngStream& rng) {
    const Matrix u = sample_haar_unitary(d, rng);
    const Matrix ua = u.adjoint();
    return Matrix(u * a * ua * b * u * x * ua * c * u * d_op * ua);
  });
}

inline MCMatrixEstimate mc_twirl_second_moment(const Superop& phi, const Matrix& x, int d,
                                               const MCConfig& cfg) {
  return mc_matrix(d, d, cfg, [&phi, &x, d](RngStream& rng) {
    const Matrix u = sample_haar_unitary(d, rng);
    return Matrix(u.adjoint() * phi(u * x * u.adjoint()) * u);
  });
}

// a_n estimator: per-sample Tr[rho U^dag (Gamma(U T U^dag))^n U] with
// T = 1/d_b - rho.
inline MCEstimate mc_an(const DensityMatrix& rho, const BipartiteDims& dims, int n,
                        const MCConfig& cfg) {
  if (n < 1) throw std::invalid_argument("mc_an: n must be >= 1");
  const Matrix r = rho.mat();
  const Matrix t = Matrix::Identity(dims.d, dims.d) / static_cast<double>(dims.d_b) - r;
  return mc_scalar(cfg, [r, t, dims, n](RngStream& rng) {
    const Matrix u = sample_haar_unitary(dims.d, rng);
    const Matrix w = gamma_map(Matrix(u * t * u.adjoint()), dims);
    Matrix power = w;
    for (int j = 1; j < n; ++j) power = power * w;
    return std::real((u * r * u.adjoint() * power).trace());
  });
}

inline MCEstimate mc_channel_purity(const KrausChannel& ch, const DensityMatrix& rho,
                                    const MCConfig& cfg) {
  if (ch.d_in() != ch.d_out() || ch.d_in() != rho.dim()) {
    throw std::invalid_argument("mc_channel_purity: square channel matching the state required");
  }
  const Matrix r = rho.mat();
  const int d = rho.dim();
  return mc_scalar(cfg, [&ch, r, d](RngStream& rng) {
    const Matrix u = sample_haar_unitary(d, rng);
    return ch.apply(Matrix(u * r * u.adjoint())).squaredNorm();
  });
}

// Exploratory report for the open balanced-system symmetry question:
// both subsystem entropy averages plus their difference with a pooled SE.
// Reported only; nothing asserts the difference vanishes.
struct SubsystemSymmetryReport {
  MCEstimate entropy_a;
  MCEstimate entropy_b;
  MCEstimate difference;  // mean(S_A - S_B) with batch-level SE
};

inline SubsystemSymmetryReport mc_subsystem_symmetry(const DensityMatrix& rho,
                                                     const BipartiteDims& dims,
                                                     const MCConfig& cfg) {
  const detail::BatchPlan plan = detail::plan_batches(cfg);
  const Matrix r = rho.mat();
  std::vector<double> means_a(plan.batches, 0.0);
  std::vector<double> means_b(plan.batches, 0.0);
  detail::for_each_batch(plan, cfg.seed, [&](std::size_t b, RngStream& rng) {
    double acc_a = 0.0;
    double acc_b = 0.0;
    for (std::size_t i = 0; i < plan.batch_size; ++i) {
      const Matrix u = sample_haar_unitary(dims.d, rng);
      const Matrix rp = u * r * u.adjoint();
      acc_a += von_neumann_entropy(DensityMatrix(partial_trace_b(rp, dims)));
      acc_b += von_neumann_entropy(DensityMatrix(partial_trace_a(rp, dims)));
    }
    means_a[b] = acc_a / static_cast<double>(plan.batch_size);
    means_b[b] = acc_b / static_cast<double>(plan.batch_size);
  });
  std::vector<double> means_diff(plan.batches, 0.0);
  for (std::size_t b = 0; b < plan.batches; ++b) means_diff[b] = means_a[b] - means_b[b];
  return {detail::estimate_from_batch_means(means_a, plan.total),
          detail::estimate_from_batch_means(means_b, plan.total),
          detail::estimate_from_batch_means(means_diff, plan.total)};
}

}  // namespace haarorbit
