#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rd2d/local_fit.hpp"

using namespace rd2d;

TEST_CASE("constant outcomes reproduce the constant with zero residuals") {
  Dataset d = oracle::random_dataset(120, 11);
  for (auto& y : d.y) y = 3.25;
  LocalFit fit = fit_local(d, 0.1, -0.2, 1, 0.8, 0.8, 1, Kernel::triangular, KernelType::prod);
  CHECK(fit.wls.beta(0) == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(fit.wls.residuals.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noiseless linear surfaces are reproduced exactly at the cutoff") {
  for (Kernel k : {Kernel::triangular, Kernel::epanechnikov, Kernel::uniform}) {
    for (KernelType t : {KernelType::prod, KernelType::rad}) {
      Dataset d = oracle::random_dataset(200, 21, 0.0);
      double a = 0.7, b1 = -1.3, b2 = 0.4;
      for (std::size_t i = 0; i < d.n(); ++i) d.y[i] = a + b1 * d.x1[i] + b2 * d.x2[i];
      double x1 = 0.15, x2 = -0.1;
      LocalFit fit = fit_local(d, x1, x2, 0, 0.7, 0.9, 1, k, t);
      CHECK(fit.wls.beta(0) == doctest::Approx(a + b1 * x1 + b2 * x2).epsilon(1e-8));
    }
  }
}

TEST_CASE("random instances match the raw normal-equation oracle") {
  for (int p : {1, 2}) {
    for (KernelType t : {KernelType::prod, KernelType::rad}) {
      Dataset d = oracle::random_dataset(200, 31 + p, 1.0);
      double x1 = 0.05, x2 = 0.0, h1 = 0.6, h2 = 0.75;
      LocalFit fit = fit_local(d, x1, x2, 1, h1, h2, p, Kernel::triangular, t);
      oracle::RawFit raw = oracle::fit_biv_raw(d, x1, x2, 1, h1, h2, p, Kernel::triangular, t);
      MultiIndexSet mis(p);
      REQUIRE(fit.wls.beta.size() == static_cast<int>(raw.beta.size()));
      for (int a = 0; a < mis.dim(); ++a) {
        // scaled coefficient = h1^k1 h2^k2 * raw coefficient
        double scale = std::pow(h1, mis.at(a).k1) * std::pow(h2, mis.at(a).k2);
        CHECK(fit.wls.beta(a) == doctest::Approx(raw.beta[static_cast<std::size_t>(a)] * scale)
                                     .epsilon(1e-8));
      }
      REQUIRE(fit.wls.n_eff == static_cast<int>(raw.idx.size()));
      for (int i = 0; i < fit.wls.n_eff; ++i) {
        CHECK(fit.wls.idx[static_cast<std::size_t>(i)] == raw.idx[static_cast<std::size_t>(i)]);
        CHECK(fit.wls.residuals(i) ==
              doctest::Approx(raw.residuals[static_cast<std::size_t>(i)]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("gram matrix matches the naive assembly and degenerates to zero") {
  Dataset d = oracle::random_dataset(50, 41);
  Eigen::MatrixXd g =
      gram_matrix(d, 0.0, 0.0, 1, 0.5, 0.6, 2, Kernel::epanechnikov, KernelType::prod);
  auto naive = oracle::gram_naive(d, 0.0, 0.0, 1, 0.5, 0.6, 2, Kernel::epanechnikov,
                                  KernelType::prod);
  for (int a = 0; a < g.rows(); ++a)
    for (int b = 0; b < g.cols(); ++b)
      CHECK(g(a, b) == doctest::Approx(naive[a][b]).epsilon(1e-12));
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-14);

  // far-away evaluation point: no in-kernel mass
  Eigen::MatrixXd zero =
      gram_matrix(d, 100.0, 100.0, 1, 0.5, 0.6, 2, Kernel::epanechnikov, KernelType::prod);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theta vector matches the naive assembly") {
  Dataset d = oracle::random_dataset(50, 43);
  MultiIndex k{1, 1};
  Eigen::VectorXd th =
      theta_vector(d, 0.0, 0.0, 0, 0.5, 0.5, 1, Kernel::triangular, KernelType::prod, k);
  auto naive =
      oracle::theta_naive(d, 0.0, 0.0, 0, 0.5, 0.5, 1, Kernel::triangular, KernelType::prod, k);
  for (int a = 0; a < th.size(); ++a)
    CHECK(th(a) == doctest::Approx(naive[static_cast<std::size_t>(a)]).epsilon(1e-12));

  CHECK_THROWS_AS(theta_vector(d, 0.0, 0.0, 0, 0.5, 0.5, 1, Kernel::triangular,
                               KernelType::prod, MultiIndex{1, 0}),
                  ValidationError);
  Eigen::VectorXd zero =
      theta_vector(d, 50.0, 50.0, 0, 0.5, 0.5, 1, Kernel::triangular, KernelType::prod, k);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("leverages sum to the basis dimension") {
  Dataset d = oracle::random_dataset(300, 47);
  LocalFit fit = fit_local(d, 0.0, 0.0, 1, 0.9, 0.9, 2, Kernel::triangular, KernelType::prod);
  CHECK(fit.wls.leverage.sum() == doctest::Approx(MultiIndexSet(2).dim()).epsilon(1e-8));
  CHECK(fit.wls.leverage.minCoeff() >= 0.0);
  CHECK(fit.wls.leverage.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("weighted residuals are orthogonal to the basis") {
  Dataset d = oracle::random_dataset(250, 53);
  LocalFit fit = fit_local(d, 0.1, 0.1, 0, 0.8, 0.7, 1, Kernel::epanechnikov, KernelType::rad);
  Eigen::VectorXd ortho =
      fit.wls.rows.transpose() * (fit.wls.weights.cwiseProduct(fit.wls.residuals));
  CHECK(ortho.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("effective counts come from strictly positive weights") {
  Dataset d = oracle::random_dataset(150, 59);
  LocalFit f0 = fit_local(d, 0.0, 0.0, 0, 0.5, 0.5, 1, Kernel::triangular, KernelType::prod);
  LocalFit f1 = fit_local(d, 0.0, 0.0, 1, 0.5, 0.5, 1, Kernel::triangular, KernelType::prod);
  auto [n0, n1] = effective_counts(f0, f1);
  CHECK(n0 == f0.wls.n_eff);
  CHECK(n1 == f1.wls.n_eff);
  CHECK(n0 + n1 <= static_cast<int>(d.n()));
}

TEST_CASE("singular designs raise a structured error") {
  Dataset d;
  for (int i = 0; i < 30; ++i) {  // all mass at one point: only the intercept is identified
    d.x1.push_back(0.0);
    d.x2.push_back(0.0);
    d.t.push_back(1);
    d.y.push_back(1.0 * i);
  }
  CHECK_THROWS_WITH_AS(
      fit_local(d, 0.0, 0.0, 1, 1.0, 1.0, 1, Kernel::triangular, KernelType::prod, 6),
      doctest::Contains("cutoff 7"), NumericalError);
}

TEST_CASE("derivative read-off recovers polynomial coefficients") {
  Dataset d = oracle::random_dataset(400, 61, 0.0);
  for (std::size_t i = 0; i < d.n(); ++i)
    d.y[i] = 1.0 + 2.0 * d.x1[i] - 0.5 * d.x2[i] + 3.0 * d.x1[i] * d.x1[i];
  LocalFit fit = fit_local(d, 0.0, 0.0, 1, 0.8, 0.8, 2, Kernel::triangular, KernelType::prod);
  CHECK(fit.derivative(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(fit.derivative(1, 0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(fit.derivative(0, 1) == doctest::Approx(-0.5).epsilon(1e-7));
  CHECK(fit.derivative(2, 0) == doctest::Approx(6.0).epsilon(1e-6));  // 2! * 3
}
