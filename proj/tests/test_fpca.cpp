#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsfir/fpca.hpp"
#include "fsfir/rng.hpp"

using namespace fsfir;

namespace {

Curve constant_curve(const GridPtr& g, double v) {
    return Curve(g, Eigen::VectorXd::Constant(g->n_points(), v));
}

}  // namespace

TEST_CASE("center") {
    auto g = make_grid(32);
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(32, 0.0, 1.0);
    Curve f(g, v), neg(g, -v);

    auto [c1, m1] = center({f, neg});
    CHECK(m1.values.isZero(1e-15));
    CHECK((c1[0].values - v).isZero(1e-15));

    auto [c2, m2] = center({f});
    CHECK((m2.values - v).isZero(0.0));
    CHECK(c2[0].values.isZero(0.0));

    auto [c3, m3] = center({constant_curve(g, 1.0), constant_curve(g, 3.0)});
    CHECK(m3.values.isApproxToConstant(2.0));
    CHECK(c3[0].values.isApproxToConstant(-1.0));
    CHECK(c3[1].values.isApproxToConstant(1.0));

    CHECK_THROWS_AS(center({}), InvalidArgument);
}

TEST_CASE("centered samples sum to zero pointwise") {
    auto g = make_grid(64);
    Rng rng(11);
    std::vector<Curve> samples;
    for (int i = 0; i < 7; ++i) {
        Eigen::VectorXd v(64);
        for (int j = 0; j < 64; ++j) v(j) = rng.normal();
        samples.emplace_back(g, v);
    }
    auto [centered, mean] = center(samples);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(64);
    for (const auto& c : centered) total += c.values;
    CHECK(total.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sample_covariance") {
    auto g = make_grid(64);
    Eigen::VectorXd phi(64);
    for (int i = 0; i < 64; ++i)
        phi(i) = std::numbers::sqrt2 * std::sin(0.5 * std::numbers::pi * g->points(i));

    SUBCASE("plus-minus pair gives rank one kernel") {
        Curve f(g, phi), nf(g, -phi);
        auto cov = sample_covariance({f, nf});
        Eigen::MatrixXd expect = phi * phi.transpose();
        CHECK((cov.kernel - expect).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("zero samples give zero kernel") {
        Curve z(g, Eigen::VectorXd::Zero(64));
        auto cov = sample_covariance({z, z, z});
        CHECK(cov.kernel.isZero(0.0));
    }

    SUBCASE("single direction with unit empirical variance") {
        // a_k chosen with sum a_k^2 / n = 1
        std::vector<double> a = {1.0, -1.0, std::sqrt(2.0), 0.0};
        std::vector<Curve> zs;
        for (double ak : a) zs.emplace_back(g, (ak * phi).eval());
        auto cov = sample_covariance(zs);
        CHECK((cov.kernel - phi * phi.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    }

    Curve f(g, phi);
    CHECK_THROWS_AS(sample_covariance({f}), InsufficientSamples);
}

TEST_CASE("top_eigensystem rank-1 spectral identity") {
    auto g = make_grid(128);
    Eigen::VectorXd phi(128);
    for (int i = 0; i < 128; ++i)
        phi(i) = std::numbers::sqrt2 * std::sin(1.5 * std::numbers::pi * g->points(i));
    // unit quadrature norm within trapezoid error; normalize exactly
    double nrm = std::sqrt((g->weights.array() * phi.array().square()).sum());
    phi /= nrm;

    CovarianceOperator cov{g, phi * phi.transpose()};
    auto eig = top_eigensystem(cov, 1);
    CHECK(eig.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((eig.eigenfunctions[0].values - phi).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(top_eigensystem(cov, 2), RankDeficient);
}

TEST_CASE("brownian motion kernel top eigenvalue") {
    auto g = make_grid(512);
    const int N = g->n_points();
    Eigen::MatrixXd K(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) K(i, j) = std::min(g->points(i), g->points(j));
    CovarianceOperator cov{g, K};
    auto eig = top_eigensystem(cov, 3);
    const double pi = std::numbers::pi;
    CHECK(eig.eigenvalues(0) == doctest::Approx(4.0 / (pi * pi)).epsilon(1e-3));
    // integral equation residual for the top pair
    Eigen::VectorXd lhs = K * g->weights.asDiagonal() * eig.eigenfunctions[0].values;
    Eigen::VectorXd rhs = eig.eigenvalues(0) * eig.eigenfunctions[0].values;
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-6);
}

TEST_CASE("scores: orthonormality, variances, determinism") {
    auto g = make_grid(128);
    Rng rng(5);
    std::vector<Curve> samples;
    auto fam = BasisFamily::fourier_cosine(6);
    Eigen::MatrixXd B = basis_values(fam, 6, g);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd coeff(6);
        for (int j = 0; j < 6; ++j) coeff(j) = rng.normal() / (j + 1);
        samples.emplace_back(g, (B * coeff).eval());
    }
    auto [centered, mean] = center(samples);
    auto cov = sample_covariance(centered);
    auto eig = top_eigensystem(cov, 5);
    Eigen::MatrixXd S = scores(centered, eig);

    // eigenfunctions quadrature-orthonormal
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            double ip = inner_product(eig.eigenfunctions[a], eig.eigenfunctions[b]);
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-8);
        }

    // column variances equal eigenvalues; columns uncorrelated
    const int n = static_cast<int>(samples.size());
    Eigen::MatrixXd C = S.transpose() * S / double(n);
    for (int a = 0; a < 5; ++a) {
        CHECK(std::abs(C(a, a) - eig.eigenvalues(a)) < 1e-8);
        for (int b = a + 1; b < 5; ++b) CHECK(std::abs(C(a, b)) < 1e-8);
    }

    // eigenvalues descending, nonnegative, trace bound
    double tr = (g->weights.array() * cov.kernel.diagonal().array()).sum();
    double sum = 0.0;
    for (int a = 0; a < 5; ++a) {
        CHECK(eig.eigenvalues(a) >= 0.0);
        if (a > 0) CHECK(eig.eigenvalues(a) <= eig.eigenvalues(a - 1));
        sum += eig.eigenvalues(a);
    }
    CHECK(sum <= tr + 1e-8);

    // sample on an eigen-direction has a unit row
    Eigen::MatrixXd S1 = scores({eig.eigenfunctions[0]}, eig);
    CHECK(std::abs(S1(0, 0) - 1.0) < 1e-8);
    for (int b = 1; b < 5; ++b) CHECK(std::abs(S1(0, b)) < 1e-8);

    // bit-exact determinism
    auto eig2 = top_eigensystem(cov, 5);
    CHECK(eig.eigenvalues == eig2.eigenvalues);
    for (int a = 0; a < 5; ++a)
        CHECK(eig.eigenfunctions[a].values == eig2.eigenfunctions[a].values);
}
