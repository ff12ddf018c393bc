#include <doctest.h>

#include <cmath>
#include <limits>

#include "fsfir/regress.hpp"
#include "fsfir/rng.hpp"

using namespace fsfir;

namespace {

Eigen::MatrixXd random_inputs(int n, int d, Rng& rng) {
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.normal();
    return X;
}

}  // namespace

TEST_CASE("scalar closed form") {
    // n = 1, x = 0, y = 2, sigma_f^2 = 1, l = 1, noise = 1:
    // posterior mean at 0 is 1/(1+1) * 2 = 1
    Eigen::MatrixXd X(1, 1);
    X << 0.0;
    Eigen::VectorXd y(1);
    y << 2.0;
    GprModel m = gpr_fit_fixed(X, y, {1.0, 1.0, 1.0});
    Eigen::VectorXd p = gpr_predict(m, X);
    CHECK(p(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant targets are reproduced nearby") {
    Rng rng(1);
    Eigen::MatrixXd X = random_inputs(20, 2, rng);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 3.0);
    GprModel m = gpr_fit_fixed(X, y, {1.0, 2.0, 1e-6});
    Eigen::MatrixXd q = X.topRows(5);
    q.array() += 0.01;
    Eigen::VectorXd p = gpr_predict(m, q);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(p(i) - 3.0) < 0.01 * 3.0);
}

TEST_CASE("interpolation at the jitter floor") {
    Rng rng(2);
    Eigen::MatrixXd X = random_inputs(15, 1, rng);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y(i) = std::sin(X(i, 0));
    GprModel m = gpr_fit_fixed(X, y, {1.0, 1.0, kGprJitterFloor});
    Eigen::VectorXd p = gpr_predict(m, X);
    CHECK((p - y).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("kernel decay far from training data") {
    Rng rng(3);
    Eigen::MatrixXd X = random_inputs(10, 1, rng);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y(i) = 1.0 + 0.5 * X(i, 0);
    GprModel m = gpr_fit_fixed(X, y, {1.0, 0.5, 0.01});
    Eigen::MatrixXd far(1, 1);
    far << X.col(0).maxCoeff() + 10.0 * m.params.lengthscale;
    Eigen::VectorXd p = gpr_predict(m, far);
    CHECK(std::abs(p(0)) < 0.01 * y.cwiseAbs().maxCoeff());
}

TEST_CASE("prediction is linear in targets") {
    Rng rng(4);
    Eigen::MatrixXd X = random_inputs(12, 2, rng);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = rng.normal();
    Eigen::MatrixXd q = random_inputs(4, 2, rng);
    GprModel m1 = gpr_fit_fixed(X, y, {1.0, 1.0, 0.1});
    GprModel m2 = gpr_fit_fixed(X, (2.0 * y).eval(), {1.0, 1.0, 0.1});
    Eigen::VectorXd p1 = gpr_predict(m1, q);
    Eigen::VectorXd p2 = gpr_predict(m2, q);
    CHECK((p2 - 2.0 * p1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid search determinism and optimality") {
    Rng rng(5);
    Eigen::MatrixXd X = random_inputs(30, 2, rng);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y(i) = std::sin(X(i, 0)) + 0.1 * rng.normal();
    GprModel a = gpr_fit(X, y);
    GprModel b = gpr_fit(X, y);
    CHECK(a.params.lengthscale == b.params.lengthscale);
    CHECK(a.params.signal_var == b.params.signal_var);
    CHECK(a.params.noise_var == b.params.noise_var);

    // chosen point maximizes the log marginal likelihood over the grid
    const GprParamGrid grid = detail::default_grid(X, y);
    for (double sf : grid.signal_vars)
        for (double l : grid.lengthscales)
            for (double nv : grid.noise_vars)
                CHECK(gpr_fit_fixed(X, y, {sf, l, nv}).log_marginal <= a.log_marginal);
}

TEST_CASE("permuting training rows leaves predictions unchanged") {
    Rng rng(6);
    Eigen::MatrixXd X = random_inputs(20, 2, rng);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y(i) = rng.normal();
    Eigen::MatrixXd Xp(20, 2);
    Eigen::VectorXd yp(20);
    for (int i = 0; i < 20; ++i) {
        Xp.row(i) = X.row(19 - i);
        yp(i) = y(19 - i);
    }
    Eigen::MatrixXd q = random_inputs(5, 2, rng);
    Eigen::VectorXd p1 = gpr_predict(gpr_fit_fixed(X, y, {1.0, 1.0, 0.1}), q);
    Eigen::VectorXd p2 = gpr_predict(gpr_fit_fixed(Xp, yp, {1.0, 1.0, 0.1}), q);
    CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("validation") {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 1.0;
    Eigen::VectorXd y(2);
    y << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(gpr_fit(X, y), InvalidArgument);

    Eigen::VectorXd y2(2);
    y2 << 1.0, 2.0;
    GprModel m = gpr_fit(X, y2);
    Eigen::MatrixXd bad(1, 2);
    bad << 0.0, 0.0;
    CHECK_THROWS_AS(gpr_predict(m, bad), ShapeError);
}
