#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsfir/synth.hpp"

using namespace fsfir;

TEST_CASE("brownian_kl sample paths") {
    auto g = make_grid(256);
    Rng rng(41);
    auto curves = brownian_kl(200, 100, g, rng);
    for (const auto& c : curves) CHECK(c.values(0) == 0.0);

    // Var(X(1)) ~ 2 sum_{k<=100} ((k-1/2)pi)^{-2} ~ 0.9990
    Rng rng2(42);
    auto many = brownian_kl(10000, 100, g, rng2);
    double mean = 0.0, ss = 0.0;
    for (const auto& c : many) mean += c.values(255);
    mean /= 10000.0;
    for (const auto& c : many) ss += (c.values(255) - mean) * (c.values(255) - mean);
    const double var = ss / 9999.0;
    double expect = 0.0;
    for (int k = 1; k <= 100; ++k)
        expect += brownian_kl_eigenvalue(k) * 2.0 *
                  std::pow(std::sin((k - 0.5) * std::numbers::pi), 2);
    CHECK(expect == doctest::Approx(0.9990).epsilon(1e-3));
    CHECK(var == doctest::Approx(expect).epsilon(0.05));

    // fixed seed determinism
    Rng ra(7), rb(7);
    auto a = brownian_kl(3, 10, g, ra);
    auto b = brownian_kl(3, 10, g, rb);
    for (int i = 0; i < 3; ++i) CHECK(a[i].values == b[i].values);
}

TEST_CASE("gen_m1 structure") {
    auto g = make_grid(256);
    auto ds = gen_m1(500, 123, 0.25, g);
    CHECK(ds.model_id == "M1");
    CHECK(ds.truth.size() == 1);
    CHECK(ds.Y.rows() == 500);

    // beta_bar_2 = 4 * (+1) * 2^{-2} = 1 exactly; check the normalized
    // coefficient against the closed-form norm over the 100 retained terms
    double norm_sq = 0.3 * 0.3;
    for (int j = 2; j <= 100; ++j) norm_sq += 16.0 / (double(j) * j * j * j);
    auto fam = BasisFamily::fourier_cosine(100);
    Eigen::VectorXd c = project_coeffs(ds.truth[0], fam, 100);
    CHECK(c(1) == doctest::Approx(1.0 / std::sqrt(norm_sq)).epsilon(1e-6));

    // beta has unit quadrature norm
    CHECK(l2_norm(ds.truth[0]) == doctest::Approx(1.0).epsilon(1e-4));

    // determinism
    auto ds2 = gen_m1(500, 123, 0.25, g);
    CHECK(ds.Y == ds2.Y);
    CHECK(ds.X[7].values == ds2.X[7].values);
}

TEST_CASE("gen_m1 noiseless response matches the index") {
    auto g = make_grid(512);
    auto ds = gen_m1(50, 9, 0.0, g);
    for (int i = 0; i < 50; ++i) {
        Curve x = ds.X[static_cast<size_t>(i)];
        const double proj = inner_product(x, ds.truth[0]);
        CHECK(ds.Y(i, 0) == doctest::Approx(proj).epsilon(1e-4));
    }
}

TEST_CASE("gen_m1 score variances decay like j^{-1.1}") {
    auto fam = BasisFamily::fourier_cosine(100);
    auto g2 = make_grid(256);
    auto ds2 = gen_m1(100000, 77, 0.25, g2);
    for (int j : {1, 3}) {
        Curve phi = eval_basis(fam, j, g2);
        double mean = 0.0, ss = 0.0;
        std::vector<double> s(ds2.X.size());
        for (size_t i = 0; i < ds2.X.size(); ++i) s[i] = inner_product(ds2.X[i], phi);
        for (double v : s) mean += v;
        mean /= double(s.size());
        for (double v : s) ss += (v - mean) * (v - mean);
        const double var = ss / double(s.size() - 1);
        CHECK(var == doctest::Approx(std::pow(j, -1.1)).epsilon(0.10));
    }
}

TEST_CASE("gen_m2 structure") {
    auto g = make_grid(256);
    auto ds = gen_m2(10000, 55, 0.25, g);
    CHECK(ds.truth.size() == 2);

    auto fam = BasisFamily::brownian_kl(100);
    CHECK((ds.truth[0].values - eval_basis(fam, 2, g).values).isZero(0.0));
    CHECK((ds.truth[1].values - eval_basis(fam, 3, g).values).isZero(0.0));

    // scores are N(0, lambda_k) and the cubic term dominates
    std::vector<double> s1(ds.X.size()), s2(ds.X.size());
    for (size_t i = 0; i < ds.X.size(); ++i) {
        s1[i] = inner_product(ds.X[i], ds.truth[0]);
        s2[i] = inner_product(ds.X[i], ds.truth[1]);
    }
    auto var_of = [](const std::vector<double>& v) {
        double m = 0.0, ss = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        for (double x : v) ss += (x - m) * (x - m);
        return ss / double(v.size() - 1);
    };
    CHECK(var_of(s1) == doctest::Approx(brownian_kl_eigenvalue(2)).epsilon(0.1));
    CHECK(var_of(s2) == doctest::Approx(brownian_kl_eigenvalue(3)).epsilon(0.1));

    std::vector<double> cubic(ds.X.size());
    for (size_t i = 0; i < ds.X.size(); ++i) cubic[i] = 100.0 * s2[i] * s2[i] * s2[i];
    CHECK(var_of(cubic) / var_of(s1) > 10.0);
}

TEST_CASE("gen_m3 lognormal mean") {
    auto g = make_grid(256);
    auto ds = gen_m3(100000, 66, 0.25, g);
    CHECK(ds.truth.size() == 1);
    double mean = ds.Y.col(0).mean();
    const double lambda2 = brownian_kl_eigenvalue(2);
    CHECK(std::exp(lambda2 / 2.0) == doctest::Approx(1.0228).epsilon(1e-3));
    CHECK(mean == doctest::Approx(std::exp(lambda2 / 2.0)).epsilon(0.01));

    auto ds2 = gen_m3(100000, 66, 0.25, g);
    CHECK(ds.Y == ds2.Y);
}

TEST_CASE("noiseless ground-truth link for every model") {
    auto g = make_grid(256);
    auto m2 = gen_m2(30, 1, 0.0, g);
    for (int i = 0; i < 30; ++i) {
        const double s1 = inner_product(m2.X[static_cast<size_t>(i)], m2.truth[0]);
        const double s2 = inner_product(m2.X[static_cast<size_t>(i)], m2.truth[1]);
        CHECK(m2.Y(i, 0) == doctest::Approx(s1 + 100.0 * s2 * s2 * s2).epsilon(1e-4));
    }
    auto m3 = gen_m3(30, 2, 0.0, g);
    for (int i = 0; i < 30; ++i) {
        const double s = inner_product(m3.X[static_cast<size_t>(i)], m3.truth[0]);
        CHECK(m3.Y(i, 0) == doctest::Approx(std::exp(s)).epsilon(1e-4));
    }
}
