#pragma once

// Functional PCA: sample mean, sample covariance operator, truncated
// eigensystem of the quadrature-weighted eigenproblem, and score matrices.

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"
#include "fsfir/funcspace.hpp"

namespace fsfir {

struct CovarianceOperator {
    GridPtr grid;
    Eigen::MatrixXd kernel;  // N x N, symmetric PSD
};

struct EigenSystem {
    Eigen::VectorXd eigenvalues;   // descending, nonnegative
    std::vector<Curve> eigenfunctions;  // quadrature-orthonormal

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

constexpr double kRankTolerance = 1e-12;

/// Stack sample values into an n x N matrix (shared grid enforced).
inline Eigen::MatrixXd curves_to_matrix(const std::vector<Curve>& samples) {
    if (samples.empty()) throw InvalidArgument("curves_to_matrix: empty sample list");
    const int n = static_cast<int>(samples.size());
    const int N = samples[0].grid->n_points();
    Eigen::MatrixXd Z(n, N);
    for (int i = 0; i < n; ++i) {
        require_same_grid(samples[0], samples[static_cast<size_t>(i)]);
        Z.row(i) = samples[static_cast<size_t>(i)].values;
    }
    return Z;
}

inline std::pair<std::vector<Curve>, Curve> center(const std::vector<Curve>& samples) {
    if (samples.empty()) throw InvalidArgument("center: empty sample list");
    const GridPtr grid = samples[0].grid;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(grid->n_points());
    for (const Curve& s : samples) {
        require_same_grid(samples[0], s);
        mean += s.values;
    }
    mean /= static_cast<double>(samples.size());
    std::vector<Curve> centered;
    centered.reserve(samples.size());
    for (const Curve& s : samples) centered.emplace_back(grid, s.values - mean);
    return {std::move(centered), Curve(grid, std::move(mean))};
}

/// Sample covariance kernel K(t_i, t_j) = (1/n) sum_k Z_k(t_i) Z_k(t_j).
inline CovarianceOperator sample_covariance(const std::vector<Curve>& centered) {
    if (centered.size() < 2) throw InsufficientSamples("sample_covariance: need n >= 2");
    Eigen::MatrixXd Z = curves_to_matrix(centered);
    CovarianceOperator cov;
    cov.grid = centered[0].grid;
    cov.kernel = (Z.transpose() * Z) / static_cast<double>(Z.rows());
    cov.kernel = 0.5 * (cov.kernel + cov.kernel.transpose()).eval();
    return cov;
}

namespace detail {

// Full spectrum of the symmetrized weighted problem W^{1/2} K W^{1/2},
// eigenvalues descending, eigenvectors columns in the symmetrized coordinates.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> weighted_spectrum(const CovarianceOperator& cov) {
    const Eigen::VectorXd ws = cov.grid->weights.array().sqrt();
    Eigen::MatrixXd A = ws.asDiagonal() * cov.kernel * ws.asDiagonal();
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const int N = static_cast<int>(A.rows());
    Eigen::VectorXd vals(N);
    Eigen::MatrixXd vecs(N, N);
    for (int i = 0; i < N; ++i) {  // Eigen returns ascending order
        vals(i) = es.eigenvalues()(N - 1 - i);
        vecs.col(i) = es.eigenvectors().col(N - 1 - i);
    }
    return {std::move(vals), std::move(vecs)};
}

inline void fix_sign(Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-8) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

}  // namespace detail

/// Number of eigenvalues above the relative pseudo-inverse threshold.
inline int numerical_rank(const CovarianceOperator& cov) {
    auto [vals, vecs] = detail::weighted_spectrum(cov);
    if (vals.size() == 0 || vals(0) <= 0) return 0;
    int r = 0;
    while (r < vals.size() && vals(r) > kRankTolerance * vals(0)) ++r;
    return r;
}

/// Top-m eigenpairs of the covariance operator under quadrature.
///
/// Eigenfunction values are W^{-1/2} times the unit eigenvector of
/// W^{1/2} K W^{1/2}; the sign convention makes the first coordinate with
/// magnitude above 1e-8 positive.
inline EigenSystem top_eigensystem(const CovarianceOperator& cov, int m) {
    const int N = static_cast<int>(cov.kernel.rows());
    if (m < 1 || m > N) throw InvalidArgument("top_eigensystem: m out of range");
    auto [vals, vecs] = detail::weighted_spectrum(cov);
    if (vals(0) <= 0 || vals(m - 1) < kRankTolerance * vals(0))
        throw RankDeficient("top_eigensystem: truncation level exceeds numerical rank");
    const Eigen::VectorXd inv_ws = cov.grid->weights.array().sqrt().inverse();
    EigenSystem eig;
    eig.eigenvalues = vals.head(m);
    eig.eigenfunctions.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd phi = inv_ws.asDiagonal() * vecs.col(j);
        detail::fix_sign(phi);
        eig.eigenfunctions.emplace_back(cov.grid, std::move(phi));
    }
    return eig;
}

/// Score matrix, entry (i, j) = <Z_i, phi_j> under quadrature.
inline Eigen::MatrixXd scores(const std::vector<Curve>& centered, const EigenSystem& eig) {
    Eigen::MatrixXd Z = curves_to_matrix(centered);
    const GridPtr grid = centered[0].grid;
    const int m = eig.size();
    Eigen::MatrixXd WPhi(grid->n_points(), m);
    for (int j = 0; j < m; ++j) {
        require_same_grid(centered[0], eig.eigenfunctions[static_cast<size_t>(j)]);
        WPhi.col(j) =
            grid->weights.asDiagonal() * eig.eigenfunctions[static_cast<size_t>(j)].values;
    }
    return Z * WPhi;
}

}  // namespace fsfir
