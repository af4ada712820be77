#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "haarorbit/haar.hpp"
#include "haarorbit/montecarlo.hpp"
#include "haarorbit/weingarten.hpp"

using namespace haarorbit;

namespace {

Matrix random_hermitian(int d, RngStream& rng) {
  const Matrix g = sample_ginibre(d, d, rng);
  return hermitize(g);
}

KrausChannel random_two_kraus_channel(int d, RngStream& rng) {
  const Matrix g1 = sample_ginibre(d, d, rng);
  const Matrix g2 = sample_ginibre(d, d, rng);
  const Matrix m = g1.adjoint() * g1 + g2.adjoint() * g2;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Matrix inv_sqrt = es.operatorInverseSqrt();
  return KrausChannel({g1 * inv_sqrt, g2 * inv_sqrt});
}

void check_matrix_close(const Matrix& analytic, const MCMatrixEstimate& mc, double n_se) {
  for (int i = 0; i < analytic.rows(); ++i) {
    for (int j = 0; j < analytic.cols(); ++j) {
      const double dev = std::abs(analytic(i, j) - mc.mean(i, j));
      CHECK(dev <= n_se * mc.entry_se(i, j) + 1e-9);
    }
  }
}

}  // namespace

TEST_CASE("Weingarten closed-form values") {
  CHECK(wg({1, 1, 1}, 4) == doctest::Approx(7.0 / 360.0).epsilon(1e-14));
  CHECK(wg({2, 1}, 4) == doctest::Approx(-1.0 / 180.0).epsilon(1e-14));
  CHECK(wg({3}, 4) == doctest::Approx(1.0 / 360.0).epsilon(1e-14));
  CHECK(wg({1, 2}, 4) == wg({2, 1}, 4));  // parts in any order

  for (int d : {2, 3, 5}) {
    const double dd = d;
    CHECK(wg({1}, d) == doctest::Approx(1.0 / dd).epsilon(1e-15));
    CHECK(wg({1, 1}, d) == doctest::Approx(1.0 / (dd * dd - 1.0)).epsilon(1e-15));
    CHECK(wg({2}, d) == doctest::Approx(-1.0 / (dd * (dd * dd - 1.0))).epsilon(1e-15));
  }

  CHECK_THROWS_AS((void)wg({4}, 5), std::invalid_argument);
  CHECK_THROWS_AS((void)wg({2, 2}, 5), std::invalid_argument);
  CHECK_THROWS_WITH((void)wg({3}, 2), "k=3 Weingarten undefined at d=2");
  CHECK_THROWS_AS((void)WeingartenTable::make(2), std::invalid_argument);

  const WeingartenTable t = WeingartenTable::make(4);
  CHECK(t.wg111 == wg({1, 1, 1}, 4));
  CHECK(t.wg21 == wg({2, 1}, 4));
  CHECK(t.wg3 == wg({3}, 4));
}

TEST_CASE("superoperator trace") {
  const Superop id = [](const Matrix& x) { return x; };
  CHECK(std::abs(superop_trace(id, 3) - Complex(9.0, 0.0)) < 1e-12);

  const BipartiteDims dims(2, 3);
  CHECK(std::abs(superop_trace(gamma_superop(dims), 6) - Complex(12.0, 0.0)) < 1e-9);
  const SuperopScalars gs = gamma_superop_scalars(dims);
  CHECK(std::abs(gs.trace - Complex(12.0, 0.0)) < 1e-12);
  CHECK(std::abs(gs.trace_on_identity - Complex(18.0, 0.0)) < 1e-12);

  RngStream rng(2);
  const Matrix a = sample_ginibre(4, 4, rng);
  const Superop ad_a = [&a](const Matrix& x) { return Matrix(a * x * a.adjoint()); };
  CHECK(std::abs(superop_trace(ad_a, 4) - Complex(std::norm(a.trace()), 0.0)) < 1e-10);
}

TEST_CASE("second-moment twirl: identity superoperator is a fixed point") {
  RngStream rng(3);
  const Matrix x = sample_ginibre(4, 4, rng);
  const Superop id = [](const Matrix& m) { return m; };
  CHECK((twirl_second_moment(id, x, 4) - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("second-moment twirl of Gamma matches the bipartite closed form") {
  const BipartiteDims dims(2, 3);
  RngStream rng(4);
  const DensityMatrix rho = sample_random_density(6, 6, rng);
  const Matrix got = twirl_second_moment(gamma_superop_scalars(dims), rho.mat(), dims.d);

  const double d = dims.d;
  const double da = dims.d_a;
  const double db = dims.d_b;
  const Matrix expect = (d * db - da) / (d * d - 1.0) * Matrix::Identity(dims.d, dims.d) +
                        (d * da - db) / (d * d - 1.0) * rho.mat();
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);

  // Same result through the generic evaluation path.
  CHECK((twirl_second_moment(gamma_superop(dims), rho.mat(), dims.d) - expect).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("second-moment twirl against the Monte Carlo oracle") {
  const int d = 3;
  RngStream rng(5);
  const Matrix a = sample_ginibre(d, d, rng);
  const Matrix b = sample_ginibre(d, d, rng);
  const Matrix x = random_hermitian(d, rng);
  const Superop xi = [&a, &b](const Matrix& m) { return Matrix(a * m * a.adjoint() + b * m * b.adjoint()); };

  const Matrix analytic = twirl_second_moment(xi, x, d);
  MCConfig cfg;
  cfg.samples = 200000;
  cfg.seed = 42;
  const MCMatrixEstimate mc = mc_twirl_second_moment(xi, x, d, cfg);
  check_matrix_close(analytic, mc, 5.0);
}

TEST_CASE("sixth moment: integrand independent of U") {
  const int d = 3;
  RngStream rng(6);
  const Matrix b = sample_ginibre(d, d, rng);
  const Matrix c = sample_ginibre(d, d, rng);
  const Matrix id = Matrix::Identity(d, d);

  // A = D = X = 1 leaves the integrand equal to BC.
  const Matrix got = sixth_moment_integral(id, b, c, id, id, d);
  CHECK((got - b * c).cwiseAbs().maxCoeff() < 1e-12);

  // All identity: result is the identity and the mu weights sum to 1.
  CHECK((sixth_moment_integral(id, id, id, id, id, d) - id).cwiseAbs().maxCoeff() < 1e-13);
  const MuCoefficients mu = mu_coefficients(id, id, id, id, id, d);
  const Complex total = mu.mu1 + mu.mu2 + mu.mu3 + mu.mu4 + mu.mu5;
  CHECK(std::abs(total - Complex(1.0, 0.0)) < 1e-13);
}

TEST_CASE("sixth moment: traceless X with A = D keeps only trace-free terms") {
  const int d = 4;
  RngStream rng(7);
  const Matrix a = sample_ginibre(d, d, rng);
  Matrix x = random_hermitian(d, rng);
  x -= x.trace() / static_cast<double>(d) * Matrix::Identity(d, d);
  const Matrix b = sample_ginibre(d, d, rng);
  const Matrix c = sample_ginibre(d, d, rng);

  const MuCoefficients mu = mu_coefficients(a, b, c, a, x, d);

  const Complex tr_a = a.trace();
  const Complex tr_b = b.trace();
  const Complex tr_c = c.trace();
  const Complex tr_bc = (b * c).trace();
  const Complex tr_ax = (a * x).trace();
  const Complex tr_aax = (a * a * x).trace();
  const double dd = d;
  const double nd = (dd * dd - 1.0) * (dd * dd - 4.0);
  const double p = dd - 2.0 / dd;
  const double q = 2.0 / dd;

  // Surviving terms of the coefficient expressions once every Tr X factor is
  // zero and D = A (so Tr ADX = Tr DAX = Tr A^2 X, Tr AX = Tr DX).
  const Complex mu1_expect = (p * tr_aax * tr_b * tr_c + 2.0 * q * tr_a * tr_ax * tr_bc +
                              q * tr_aax * tr_b * tr_c - 2.0 * tr_aax * tr_bc -
                              2.0 * tr_a * tr_ax * tr_b * tr_c) /
                             nd;
  const Complex mu2_expect = (q * tr_aax * 2.0 - 2.0 * tr_a * tr_ax) / nd;
  const Complex mu3_expect = ((q + p) * tr_aax - 2.0 * tr_a * tr_ax) / nd;
  CHECK(std::abs(mu.mu1 - mu1_expect) < 1e-12);
  CHECK(std::abs(mu.mu2 - mu2_expect) < 1e-12);
  CHECK(std::abs(mu.mu3 - mu3_expect) < 1e-12);
}

TEST_CASE("raw Weingarten sums equal the simplified coefficients") {
  RngStream rng(8);
  for (int d : {3, 4, 5}) {
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix a = sample_ginibre(d, d, rng);
      const Matrix b = sample_ginibre(d, d, rng);
      const Matrix c = sample_ginibre(d, d, rng);
      const Matrix dd = sample_ginibre(d, d, rng);
      const Matrix x = sample_ginibre(d, d, rng);
      const MuCoefficients simp = mu_coefficients(a, b, c, dd, x, d);
      const MuCoefficients raw = mu_coefficients_raw(a, b, c, dd, x, d);
      CHECK(std::abs(simp.mu1 - raw.mu1) < 1e-10);
      CHECK(std::abs(simp.mu2 - raw.mu2) < 1e-10);
      CHECK(std::abs(simp.mu3 - raw.mu3) < 1e-10);
      CHECK(std::abs(simp.mu4 - raw.mu4) < 1e-10);
      CHECK(std::abs(simp.mu5 - raw.mu5) < 1e-10);
    }
  }
  CHECK_THROWS_WITH((void)mu_coefficients(Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                          Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                          Matrix::Identity(2, 2), 2),
                    "k=3 Weingarten undefined at d=2");
}

TEST_CASE("sixth moment against the Monte Carlo oracle at d = 3") {
  const int d = 3;
  RngStream rng(9);
  const Matrix a = random_hermitian(d, rng);
  const Matrix b = random_hermitian(d, rng);
  const Matrix c = random_hermitian(d, rng);
  const Matrix d_op = random_hermitian(d, rng);
  const Matrix x = random_hermitian(d, rng);

  const Matrix analytic = sixth_moment_integral(a, b, c, d_op, x, d);
  MCConfig cfg;
  cfg.samples = 200000;
  cfg.seed = 42;
  const MCMatrixEstimate mc = mc_sixth_moment(a, b, c, d_op, x, d, cfg);
  check_matrix_close(analytic, mc, 5.0);
}

TEST_CASE("sixth moment trace comparison at d = 4") {
  const int d = 4;
  RngStream rng(10);
  const Matrix a = random_hermitian(d, rng);
  const Matrix b = random_hermitian(d, rng);
  const Matrix c = random_hermitian(d, rng);
  const Matrix d_op = random_hermitian(d, rng);
  const Matrix x = random_hermitian(d, rng);

  const double analytic_trace = std::real(sixth_moment_integral(a, b, c, d_op, x, d).trace());
  MCConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 42;
  const MCEstimate mc = mc_scalar(cfg, [&](RngStream& r) {
    const Matrix u = sample_haar_unitary(d, r);
    const Matrix ua = u.adjoint();
    return std::real((u * a * ua * b * u * x * ua * c * u * d_op * ua).trace());
  });
  CHECK(std::abs(mc.mean - analytic_trace) <= 3.0 * mc.std_error);
}

TEST_CASE("sixth moment conjugation covariance") {
  const int d = 3;
  RngStream rng(11);
  const Matrix a = random_hermitian(d, rng);
  const Matrix b = random_hermitian(d, rng);
  const Matrix c = random_hermitian(d, rng);
  const Matrix d_op = random_hermitian(d, rng);
  const Matrix x = random_hermitian(d, rng);
  const Matrix v = sample_haar_unitary(d, rng);

  const Matrix base = sixth_moment_integral(a, b, c, d_op, x, d);
  const Matrix conj = sixth_moment_integral(Matrix(v * a * v.adjoint()), Matrix(v * b * v.adjoint()),
                                            Matrix(v * c * v.adjoint()), Matrix(v * d_op * v.adjoint()),
                                            Matrix(v * x * v.adjoint()), d);
  CHECK((conj - v * base * v.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Choi matrices") {
  const KrausChannel id2 = KrausChannel::identity(2);
  const Matrix j_id = choi_matrix(id2);
  Matrix expect = Matrix::Zero(4, 4);  // 2 |Omega><Omega| with vec(1_2) = (1,0,0,1)
  expect(0, 0) = expect(0, 3) = expect(3, 0) = expect(3, 3) = 1.0;
  CHECK((j_id - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(j_id.squaredNorm() == doctest::Approx(4.0).epsilon(1e-14));

  const KrausChannel dep2 = KrausChannel::depolarizing(2);
  const Matrix j_dep = choi_matrix(dep2);
  CHECK((j_dep - 0.5 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(j_dep.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));

  RngStream rng(12);
  const KrausChannel ch = random_two_kraus_channel(3, rng);
  CHECK(std::abs(choi_matrix(ch).trace() - Complex(3.0, 0.0)) < 1e-8);

  CHECK_THROWS_AS(KrausChannel({Matrix::Identity(2, 2), Matrix::Identity(2, 2)}),
                  std::invalid_argument);
}

TEST_CASE("channel average purity") {
  RngStream rng(13);
  const DensityMatrix rho = sample_random_density(3, 3, rng);

  CHECK(channel_average_purity(KrausChannel::identity(3), rho) ==
        doctest::Approx(purity(rho)).epsilon(1e-12));
  CHECK(channel_average_purity(KrausChannel::depolarizing(3), rho) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const KrausChannel ch = random_two_kraus_channel(3, rng);
  const double analytic = channel_average_purity(ch, rho);
  MCConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 42;
  const MCEstimate mc = mc_channel_purity(ch, rho, cfg);
  CHECK(std::abs(mc.mean - analytic) <= 3.0 * mc.std_error);
}
