#pragma once

// Seeded generators for the three synthetic single/multi-index models with
// functional predictors, each returning ground-truth direction curves.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"
#include "fsfir/funcspace.hpp"
#include "fsfir/rng.hpp"

namespace fsfir {

struct SynthDataset {
    std::vector<Curve> X;
    Eigen::MatrixXd Y;          // n x 1
    std::vector<Curve> truth;   // true direction curves
    std::string model_id;       // M1 / M2 / M3
    uint64_t seed = 0;
    double noise_var = 0.25;
};

constexpr int kSynthBasisTerms = 100;

namespace detail {

inline std::vector<Curve> matrix_to_curves(const Eigen::MatrixXd& values, const GridPtr& grid) {
    std::vector<Curve> out;
    out.reserve(static_cast<size_t>(values.rows()));
    for (int i = 0; i < values.rows(); ++i) out.emplace_back(grid, values.row(i).transpose());
    return out;
}

}  // namespace detail

/// Standard Brownian motion truncated to its first n_terms KL components:
/// X_i(t) = sum_k ((k-1/2)pi)^{-1} xi_ik sqrt(2) sin((k-1/2)pi t).
inline std::vector<Curve> brownian_kl(int n, int n_terms, const GridPtr& grid, Rng& rng) {
    if (n < 1 || n_terms < 1) throw InvalidArgument("brownian_kl: n and n_terms must be >= 1");
    Eigen::MatrixXd coeff(n, n_terms);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n_terms; ++k)
            coeff(i, k) = std::sqrt(brownian_kl_eigenvalue(k + 1)) * rng.normal();
    const Eigen::MatrixXd B = basis_values(BasisFamily::brownian_kl(n_terms), n_terms, grid);
    return detail::matrix_to_curves(coeff * B.transpose(), grid);
}

/// M1: Y = <X, beta> + eps with a Fourier-cosine expansion; beta has
/// coefficients 0.3, 4(-1)^j j^{-2} normalized over the 100 retained terms,
/// and X has independent N(0, j^{-1.1}) coefficients.
inline SynthDataset gen_m1(int n, uint64_t seed, double noise_var, const GridPtr& grid) {
    if (n < 1) throw InvalidArgument("gen_m1: n must be >= 1");
    const int J = kSynthBasisTerms;
    Eigen::VectorXd beta_bar(J);
    beta_bar(0) = 0.3;
    for (int j = 2; j <= J; ++j) beta_bar(j - 1) = 4.0 * ((j % 2 == 0) ? 1.0 : -1.0) / (j * j);
    const Eigen::VectorXd beta = beta_bar / beta_bar.norm();

    Rng rng(seed);
    Eigen::MatrixXd coeff(n, J);
    for (int i = 0; i < n; ++i)
        for (int j = 1; j <= J; ++j) coeff(i, j - 1) = std::pow(j, -0.55) * rng.normal();

    Eigen::MatrixXd Y(n, 1);
    const double sigma = std::sqrt(noise_var);
    for (int i = 0; i < n; ++i) Y(i, 0) = coeff.row(i).dot(beta) + sigma * rng.normal();

    const auto family = BasisFamily::fourier_cosine(J);
    const Eigen::MatrixXd B = basis_values(family, J, grid);
    SynthDataset ds;
    ds.X = detail::matrix_to_curves(coeff * B.transpose(), grid);
    ds.Y = std::move(Y);
    ds.truth = {Curve(grid, B * beta)};
    ds.model_id = "M1";
    ds.seed = seed;
    ds.noise_var = noise_var;
    return ds;
}

/// M2: Y = <beta1, X> + 100 <beta2, X>^3 + eps, X a truncated Brownian
/// motion; beta1 and beta2 are the k = 2 and k = 3 KL eigenfunctions.
inline SynthDataset gen_m2(int n, uint64_t seed, double noise_var, const GridPtr& grid) {
    if (n < 1) throw InvalidArgument("gen_m2: n must be >= 1");
    const int J = kSynthBasisTerms;
    Rng rng(seed);
    Eigen::MatrixXd coeff(n, J);
    for (int i = 0; i < n; ++i)
        for (int k = 1; k <= J; ++k)
            coeff(i, k - 1) = std::sqrt(brownian_kl_eigenvalue(k)) * rng.normal();

    Eigen::MatrixXd Y(n, 1);
    const double sigma = std::sqrt(noise_var);
    for (int i = 0; i < n; ++i) {
        const double s1 = coeff(i, 1);  // <beta1, X>, KL index k = 2
        const double s2 = coeff(i, 2);  // <beta2, X>, KL index k = 3
        Y(i, 0) = s1 + 100.0 * s2 * s2 * s2 + sigma * rng.normal();
    }

    const auto family = BasisFamily::brownian_kl(J);
    const Eigen::MatrixXd B = basis_values(family, J, grid);
    SynthDataset ds;
    ds.X = detail::matrix_to_curves(coeff * B.transpose(), grid);
    ds.Y = std::move(Y);
    ds.truth = {eval_basis(family, 2, grid), eval_basis(family, 3, grid)};
    ds.model_id = "M2";
    ds.seed = seed;
    ds.noise_var = noise_var;
    return ds;
}

/// M3: Y = exp(<beta, X>) + eps with beta the k = 2 KL eigenfunction.
inline SynthDataset gen_m3(int n, uint64_t seed, double noise_var, const GridPtr& grid) {
    if (n < 1) throw InvalidArgument("gen_m3: n must be >= 1");
    const int J = kSynthBasisTerms;
    Rng rng(seed);
    Eigen::MatrixXd coeff(n, J);
    for (int i = 0; i < n; ++i)
        for (int k = 1; k <= J; ++k)
            coeff(i, k - 1) = std::sqrt(brownian_kl_eigenvalue(k)) * rng.normal();

    Eigen::MatrixXd Y(n, 1);
    const double sigma = std::sqrt(noise_var);
    for (int i = 0; i < n; ++i) Y(i, 0) = std::exp(coeff(i, 1)) + sigma * rng.normal();

    const auto family = BasisFamily::brownian_kl(J);
    const Eigen::MatrixXd B = basis_values(family, J, grid);
    SynthDataset ds;
    ds.X = detail::matrix_to_curves(coeff * B.transpose(), grid);
    ds.Y = std::move(Y);
    ds.truth = {eval_basis(family, 2, grid)};
    ds.model_id = "M3";
    ds.seed = seed;
    ds.noise_var = noise_var;
    return ds;
}

inline SynthDataset gen_model(const std::string& model_id, int n, uint64_t seed, double noise_var,
                              const GridPtr& grid) {
    if (model_id == "M1") return gen_m1(n, seed, noise_var, grid);
    if (model_id == "M2") return gen_m2(n, seed, noise_var, grid);
    if (model_id == "M3") return gen_m3(n, seed, noise_var, grid);
    throw InvalidArgument("unknown model id: " + model_id);
}

/// Analytic coordinate basis in which a model's true directions are exact.
inline BasisFamily model_coordinate_basis(const std::string& model_id) {
    if (model_id == "M1") return BasisFamily::fourier_cosine(kSynthBasisTerms);
    return BasisFamily::brownian_kl(kSynthBasisTerms);
}

inline int model_dimension(const std::string& model_id) { return model_id == "M2" ? 2 : 1; }

}  // namespace fsfir
