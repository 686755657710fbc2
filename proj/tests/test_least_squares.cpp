#include <algorithm>
#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/least_squares.hpp"
#include "doctest.h"

using namespace hfcqed::fit;

TEST_CASE("linear model on exact data recovers (a, b) immediately") {
  Trace t;
  for (int k = 0; k < 20; ++k) {
    t.x.push_back(k);
    t.y.push_back(2.5 * k - 1.25);
  }
  ModelFn model = [](double x, const Eigen::VectorXd& p) { return p[0] * x + p[1]; };
  Eigen::VectorXd init(2);
  init << 1.0, 0.0;
  const FitResult r = fit_trace(model, t, init, Bounds::unbounded(2), {"a", "b"});
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  CHECK(r.value("a") == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(r.value("b") == doctest::Approx(-1.25).epsilon(1e-10));
}

TEST_CASE("quadratic residual: minimum found from different starts") {
  // residual r_j(p) = p - c_j has the unique least-squares minimum mean(c)
  ResidualFn fn = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(3);
    r << p[0] - 1.0, p[0] - 2.0, p[0] - 6.0;
    return r;
  };
  for (double start : {-10.0, 0.0, 15.0}) {
    Eigen::VectorXd init(1);
    init << start;
    Bounds b = Bounds::unbounded(1);
    b.lower[0] = -20.0;
    b.upper[0] = 20.0;
    const FitResult r = least_squares(fn, init, b, {"p"});
    CHECK(r.converged);
    CHECK(r.value("p") == doctest::Approx(3.0).epsilon(1e-8));
  }
}

TEST_CASE("constant model on constant data gives zero residual") {
  Trace t;
  for (int k = 0; k < 8; ++k) {
    t.x.push_back(k);
    t.y.push_back(4.2);
  }
  ModelFn model = [](double, const Eigen::VectorXd& p) { return p[0]; };
  Eigen::VectorXd init(1);
  init << 0.0;
  const FitResult r = fit_trace(model, t, init, Bounds::unbounded(1), {"c"});
  CHECK(r.converged);
  CHECK(r.residual_norm == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("point reordering leaves the solution unchanged (to tolerance)") {
  std::mt19937 gen(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> xs, ys;
  for (int k = 0; k < 40; ++k) {
    const double x = 0.1 * k;
    xs.push_back(x);
    ys.push_back(3.0 * std::exp(-x / 1.7) + 0.2 + noise(gen));
  }
  ModelFn model = [](double x, const Eigen::VectorXd& p) {
    return p[0] * std::exp(-x / p[1]) + p[2];
  };
  Eigen::VectorXd init(3);
  init << 2.0, 1.0, 0.0;

  auto fit_with_order = [&](const std::vector<std::size_t>& order) {
    ResidualFn fn = [&, order](const Eigen::VectorXd& p) {
      Eigen::VectorXd r(static_cast<Eigen::Index>(order.size()));
      for (std::size_t k = 0; k < order.size(); ++k)
        r[static_cast<Eigen::Index>(k)] =
            model(xs[order[k]], p) - ys[order[k]];
      return r;
    };
    return least_squares(fn, init, Bounds::unbounded(3), {"a", "tau", "c"});
  };

  std::vector<std::size_t> fwd(xs.size()), rev(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    fwd[k] = k;
    rev[k] = xs.size() - 1 - k;
  }
  const FitResult a = fit_with_order(fwd);
  const FitResult b = fit_with_order(rev);
  CHECK(a.converged);
  CHECK(b.converged);
  for (int j = 0; j < 3; ++j)
    CHECK(a.params[j] == doctest::Approx(b.params[j]).epsilon(1e-7));
}

TEST_CASE("covariance is symmetric positive semidefinite") {
  Trace t;
  std::mt19937 gen(3);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int k = 0; k < 30; ++k) {
    t.x.push_back(k);
    t.y.push_back(1.5 * k + 0.5 + noise(gen));
  }
  ModelFn model = [](double x, const Eigen::VectorXd& p) { return p[0] * x + p[1]; };
  Eigen::VectorXd init(2);
  init << 1.0, 0.0;
  const FitResult r = fit_trace(model, t, init, Bounds::unbounded(2), {"a", "b"});
  CHECK(r.converged);
  CHECK(r.covariance(0, 1) == doctest::Approx(r.covariance(1, 0)).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.covariance);
  CHECK(es.eigenvalues().minCoeff() >= -1e-18);
}

TEST_CASE("init outside bounds is rejected; bounds clamp the iterates") {
  ResidualFn fn = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(1);
    r << p[0] - 5.0;
    return r;
  };
  Eigen::VectorXd init(1);
  init << 3.0;
  Bounds b = Bounds::unbounded(1);
  b.upper[0] = 2.0;
  CHECK_THROWS_AS(least_squares(fn, init, b, {"p"}), hfcqed::Error);

  init << 1.0;
  const FitResult r = least_squares(fn, init, b, {"p"});
  CHECK(r.params[0] <= 2.0 + 1e-15);
}

TEST_CASE("invalid traces are rejected") {
  Trace t;
  t.x = {0.0, 1.0, 1.0};
  t.y = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(t.validate(), hfcqed::Error);
  t.x = {0.0, 1.0};
  t.y = {0.0};
  CHECK_THROWS_AS(t.validate(), hfcqed::Error);
}
