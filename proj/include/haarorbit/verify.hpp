#pragma once

#include <string>
#include <vector>

#include "haarorbit/haar.hpp"
#include "haarorbit/montecarlo.hpp"
#include "haarorbit/orbit_stats.hpp"
#include "haarorbit/weingarten.hpp"

// Named verification gates pitting each closed form against its Monte Carlo
// oracle (or against an exact identity). The CLI verify-* commands render
// these suites; exit status is tied to all_pass().

namespace haarorbit {

struct GateResult {
  std::string name;
  double analytic = 0.0;  // reference value; 0 for max-deviation gates
  double mc_mean = 0.0;   // observed value (MC mean or computed quantity)
  double se = 0.0;        // standard error; 0 for exact gates
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<GateResult> gates;

  bool all_pass() const {
    for (const GateResult& g : gates) {
      if (!g.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline GateResult exact_gate(std::string name, double expected, double observed, double tol) {
  return {std::move(name), expected, observed, 0.0, std::abs(expected - observed) <= tol};
}

inline GateResult scalar_gate(std::string name, double analytic, const MCEstimate& est,
                              double n_sigma) {
  // The 1e-9 floor covers zero-variance estimands (single-point orbits).
  return {std::move(name), analytic, est.mean, est.std_error,
          std::abs(analytic - est.mean) <= n_sigma * est.std_error + 1e-9};
}

// Entrywise |analytic - mc| <= n_se * SE + floor; reports the entry with the
// worst allowance ratio (analytic field holds the zero-deviation target).
inline GateResult matrix_gate(std::string name, const Matrix& analytic,
                              const MCMatrixEstimate& est, double n_se) {
  constexpr double floor = 1e-9;
  bool pass = true;
  double worst_ratio = -1.0;
  double worst_dev = 0.0;
  double worst_se = 0.0;
  for (int i = 0; i < analytic.rows(); ++i) {
    for (int j = 0; j < analytic.cols(); ++j) {
      const double dev = std::abs(analytic(i, j) - est.mean(i, j));
      const double allowance = n_se * est.entry_se(i, j) + floor;
      if (dev > allowance) pass = false;
      const double ratio = dev / allowance;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_dev = dev;
        worst_se = est.entry_se(i, j);
      }
    }
  }
  return {std::move(name), 0.0, worst_dev, worst_se, pass};
}

inline DensityMatrix seeded_state(const BipartiteDims& dims, std::uint64_t seed,
                                  std::uint64_t index) {
  RngStream rng(seed, 0xface0000ULL + index);
  return sample_random_density(dims.d, dims.d, rng);
}

}  // namespace detail

inline KrausChannel sample_two_kraus_channel(int d, RngStream& rng) {
  const Matrix g1 = sample_ginibre(d, d, rng);
  const Matrix g2 = sample_ginibre(d, d, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(g1.adjoint() * g1 + g2.adjoint() * g2));
  const Matrix inv_sqrt = es.operatorInverseSqrt();
  return KrausChannel({g1 * inv_sqrt, g2 * inv_sqrt});
}

// Weingarten values, the twirl identity and the sixth-moment integral.
// Twirl MC runs at (da, db); the sixth-moment gates run at d = 3 and d = 4.
inline SuiteResult verify_weingarten_suite(int da, int db, const MCConfig& cfg) {
  if (da * db < 3) throw std::invalid_argument("k=3 Weingarten undefined at d=2");
  const BipartiteDims dims(da, db);
  SuiteResult suite{"verify-weingarten", {}};

  suite.gates.push_back(detail::exact_gate("wg(1,1,1) d=4", 7.0 / 360.0, wg({1, 1, 1}, 4), 1e-14));
  suite.gates.push_back(detail::exact_gate("wg(2,1) d=4", -1.0 / 180.0, wg({2, 1}, 4), 1e-14));
  suite.gates.push_back(detail::exact_gate("wg(3) d=4", 1.0 / 360.0, wg({3}, 4), 1e-14));

  {
    double worst = 0.0;
    RngStream rng(cfg.seed, 0xabc);
    for (int d : {3, 4, 5}) {
      for (int rep = 0; rep < 100; ++rep) {
        const Matrix a = sample_ginibre(d, d, rng);
        const Matrix b = sample_ginibre(d, d, rng);
        const Matrix c = sample_ginibre(d, d, rng);
        const Matrix dd = sample_ginibre(d, d, rng);
        const Matrix x = sample_ginibre(d, d, rng);
        const MuCoefficients s = mu_coefficients(a, b, c, dd, x, d);
        const MuCoefficients r = mu_coefficients_raw(a, b, c, dd, x, d);
        worst = std::max({worst, std::abs(s.mu1 - r.mu1), std::abs(s.mu2 - r.mu2),
                          std::abs(s.mu3 - r.mu3), std::abs(s.mu4 - r.mu4),
                          std::abs(s.mu5 - r.mu5)});
      }
    }
    suite.gates.push_back(detail::exact_gate("mu coefficients raw vs simplified", 0.0, worst, 1e-10));
  }

  {
    RngStream rng(cfg.seed, 0xdef);
    const Matrix x = sample_ginibre(dims.d, dims.d, rng);
    const Superop id = [](const Matrix& m) { return m; };
    const double dev = (twirl_second_moment(id, x, dims.d) - x).cwiseAbs().maxCoeff();
    suite.gates.push_back(detail::exact_gate("twirl identity superoperator fixed point", 0.0, dev, 1e-12));
  }

  {
    const DensityMatrix rho = detail::seeded_state(dims, cfg.seed, 1);
    const double d = dims.d;
    const Matrix expect = (d * db - da) / (d * d - 1.0) * Matrix::Identity(dims.d, dims.d) +
                          (d * da - db) / (d * d - 1.0) * rho.mat();
    const Matrix got = twirl_second_moment(gamma_superop_scalars(dims), rho.mat(), dims.d);
    suite.gates.push_back(detail::exact_gate("twirl Gamma bipartite closed form", 0.0,
                                             (got - expect).cwiseAbs().maxCoeff(), 1e-12));
    const MCMatrixEstimate mc = mc_twirl_second_moment(gamma_superop(dims), rho.mat(), dims.d, cfg);
    suite.gates.push_back(detail::matrix_gate("twirl Gamma vs MC", got, mc, 5.0));
  }

  {
    const int d = 3;
    RngStream rng(cfg.seed, 0x60);
    const Matrix b = hermitize(sample_ginibre(d, d, rng));
    const Matrix c = hermitize(sample_ginibre(d, d, rng));
    const Matrix id = Matrix::Identity(d, d);
    const double dev = (sixth_moment_integral(id, b, c, id, id, d) - b * c).cwiseAbs().maxCoeff();
    suite.gates.push_back(detail::exact_gate("sixth moment A=D=X=1 returns BC (d=3)", 0.0, dev, 1e-12));

    const Matrix a = hermitize(sample_ginibre(d, d, rng));
    const Matrix d_op = hermitize(sample_ginibre(d, d, rng));
    const Matrix x = hermitize(sample_ginibre(d, d, rng));
    const Matrix analytic = sixth_moment_integral(a, b, c, d_op, x, d);
    suite.gates.push_back(detail::matrix_gate("sixth moment vs MC (d=3)", analytic,
                                              mc_sixth_moment(a, b, c, d_op, x, d, cfg), 5.0));
  }

  {
    const int d = 4;
    RngStream rng(cfg.seed, 0x61);
    const Matrix a = hermitize(sample_ginibre(d, d, rng));
    const Matrix b = hermitize(sample_ginibre(d, d, rng));
    const Matrix c = hermitize(sample_ginibre(d, d, rng));
    const Matrix d_op = hermitize(sample_ginibre(d, d, rng));
    const Matrix x = hermitize(sample_ginibre(d, d, rng));
    const double analytic = std::real(sixth_moment_integral(a, b, c, d_op, x, d).trace());
    const MCEstimate mc = mc_scalar(cfg, [&](RngStream& r) {
      const Matrix u = sample_haar_unitary(d, r);
      const Matrix ua = u.adjoint();
      return std::real((u * a * ua * b * u * x * ua * c * u * d_op * ua).trace());
    });
    suite.gates.push_back(detail::scalar_gate("sixth moment trace vs MC (d=4)", analytic, mc, cfg.sigma_gate));
  }

  return suite;
}

// Orbit-average closed forms against MC at (da, db).
inline SuiteResult verify_orbit_suite(int da, int db, const MCConfig& cfg) {
  const BipartiteDims dims(da, db);
  SuiteResult suite{"verify-orbit", {}};

  const DensityMatrix rho = detail::seeded_state(dims, cfg.seed, 2);

  {
    const Matrix expect = Matrix::Identity(dims.d, dims.d) / static_cast<double>(dims.d);
    suite.gates.push_back(detail::matrix_gate("Prop 1: product average is maximally mixed", expect,
                                              mc_product_average(rho, dims, cfg), 5.0));
  }
  {
    const Matrix analytic = pullback_product_average(rho, dims).mat();
    suite.gates.push_back(detail::matrix_gate("pullback average vs c-polynomial", analytic,
                                              mc_pullback_average(rho, dims, cfg), 5.0));
  }

  for (std::uint64_t k = 0; k < 3; ++k) {
    const DensityMatrix state = detail::seeded_state(dims, cfg.seed, 10 + k);
    suite.gates.push_back(detail::scalar_gate("a1 vs mc_an(1) state " + std::to_string(k),
                                              a1(state, dims), mc_an(state, dims, 1, cfg),
                                              cfg.sigma_gate));
    suite.gates.push_back(detail::scalar_gate("a2 vs mc_an(2) state " + std::to_string(k),
                                              a2(state, dims), mc_an(state, dims, 2, cfg),
                                              cfg.sigma_gate));
  }

  suite.gates.push_back(detail::scalar_gate("average linear entropy A exact",
                                            average_linear_entropy_a(rho, dims),
                                            mc_average_linear_entropy_a(rho, dims, cfg),
                                            cfg.sigma_gate));
  suite.gates.push_back(detail::scalar_gate("average linear entropy B exact",
                                            average_linear_entropy_b(rho, dims),
                                            mc_average_linear_entropy_b(rho, dims, cfg),
                                            cfg.sigma_gate));

  {
    // Universal entropy inequality on a batch of random states.
    double worst = -1.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const DensityMatrix state = detail::seeded_state(dims, cfg.seed, 100 + k);
      const BoundsReport rep = sum_entropy_bounds(state, dims);
      worst = std::max(worst, rep.lower - rep.upper);
    }
    suite.gates.push_back(detail::exact_gate("Theorem 3: lower <= upper on 100 states", 0.0,
                                             std::max(worst, 0.0), 1e-9));
  }

  {
    const BoundsReport bounds = sum_entropy_bounds(rho, dims);
    const double s_rho = von_neumann_entropy(rho);
    const MCEstimate est = mc_average_qmi(rho, dims, cfg);
    const double sum_mean = est.mean + s_rho;  // <S_A + S_B> = <QMI> + S(rho)
    GateResult gate;
    gate.name = "Theorem 3: MC entropy sum inside sandwich";
    gate.analytic = 0.5 * (bounds.lower + bounds.upper);
    gate.mc_mean = sum_mean;
    gate.se = est.std_error;
    gate.pass = (sum_mean + cfg.sigma_gate * est.std_error >= bounds.lower) &&
                (sum_mean - cfg.sigma_gate * est.std_error <= bounds.upper);
    suite.gates.push_back(gate);

    GateResult qmi_gate;
    qmi_gate.name = "QMI lower bound below MC average";
    qmi_gate.analytic = qmi_lower_bound(rho, dims);
    qmi_gate.mc_mean = est.mean;
    qmi_gate.se = est.std_error;
    qmi_gate.pass = est.mean + cfg.sigma_gate * est.std_error >= qmi_gate.analytic;
    suite.gates.push_back(qmi_gate);
  }

  {
    const BoundsReport bounds = fidelity_bounds(rho, dims);
    const MCEstimate est = mc_average_fidelity(rho, dims, cfg);
    GateResult gate;
    gate.name = "fidelity sandwich";
    gate.analytic = 0.5 * (bounds.lower + bounds.upper);
    gate.mc_mean = est.mean;
    gate.se = est.std_error;
    gate.pass = (est.mean >= bounds.lower - cfg.sigma_gate * est.std_error) &&
                (est.mean <= bounds.upper + cfg.sigma_gate * est.std_error);
    suite.gates.push_back(gate);
  }

  {
    const MCEstimate est = mc_average_entropy_a(rho, dims, cfg);
    const double bound = std::max(entropy_lower_bound_truncated(rho, dims).value,
                                  entropy_lower_bound_log(rho, dims).value);
    GateResult gate;
    gate.name = "Theorem 1 entropy lower bounds below MC average";
    gate.analytic = bound;
    gate.mc_mean = est.mean;
    gate.se = est.std_error;
    gate.pass = est.mean + cfg.sigma_gate * est.std_error >= bound &&
                est.mean <= std::log(static_cast<double>(dims.d_a)) + cfg.sigma_gate * est.std_error;
    suite.gates.push_back(gate);
  }

  if (da == 2 && db == 2) {
    RngStream rng(cfg.seed, 0xb7a);
    int violations = 0;
    for (int rep = 0; rep < 10000; ++rep) {
      const DensityMatrix state = sample_random_density(4, 4, rng);
      const Matrix u = sample_haar_unitary(4, rng);
      const Matrix rotated = u * state.mat() * u.adjoint();
      const RealVector global = hermitian_eigenvalues(state.mat());
      std::vector<double> spec(4);
      for (int j = 0; j < 4; ++j) spec[static_cast<std::size_t>(j)] = std::max(global(j), 0.0);
      const double lam_a = hermitian_eigenvalues(partial_trace_b(rotated, dims)).minCoeff();
      const double lam_b = hermitian_eigenvalues(partial_trace_a(rotated, dims)).minCoeff();
      if (!bravyi_compatible(Spectrum(spec), std::max(lam_a, 0.0), std::max(lam_b, 0.0))) ++violations;
    }
    suite.gates.push_back(detail::exact_gate("Bravyi necessary-direction sweep (10000 orbits)", 0.0,
                                             static_cast<double>(violations), 0.5));
  }

  return suite;
}

// Channel average-purity closed form against MC at dimension d.
inline SuiteResult verify_channel_suite(int d, const MCConfig& cfg) {
  if (d < 2) throw std::invalid_argument("verify-channel: d must be >= 2");
  SuiteResult suite{"verify-channel", {}};
  RngStream rng(cfg.seed, 0xc4a);
  const DensityMatrix rho = sample_random_density(d, d, rng);

  suite.gates.push_back(detail::exact_gate("identity channel closed form = purity", purity(rho),
                                           channel_average_purity(KrausChannel::identity(d), rho),
                                           1e-12));
  suite.gates.push_back(detail::exact_gate("depolarizing channel closed form = 1/d",
                                           1.0 / static_cast<double>(d),
                                           channel_average_purity(KrausChannel::depolarizing(d), rho),
                                           1e-12));
  {
    const KrausChannel ch = KrausChannel::identity(d);
    suite.gates.push_back(detail::scalar_gate("identity channel vs MC",
                                              channel_average_purity(ch, rho),
                                              mc_channel_purity(ch, rho, cfg), cfg.sigma_gate));
  }
  {
    const KrausChannel ch = sample_two_kraus_channel(d, rng);
    const Matrix j = choi_matrix(ch);
    suite.gates.push_back(detail::exact_gate("Choi trace of TP channel = d", static_cast<double>(d),
                                             std::real(j.trace()), 1e-8));
    suite.gates.push_back(detail::scalar_gate("random 2-Kraus channel vs MC",
                                              channel_average_purity(ch, rho),
                                              mc_channel_purity(ch, rho, cfg), cfg.sigma_gate));
  }
  return suite;
}

}  // namespace haarorbit
