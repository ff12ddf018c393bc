#pragma once

// The three estimators of the central subspace for functional predictors:
// FSFIR (slicing-free, via the MDDO coordinate matrix), truncated FSIR and
// regularized FSIR, plus prediction of reduced coordinates.
//
// All three work in sample-eigenfunction coordinates, where the truncated
// covariance is exactly diag(lambda_1..lambda_m); the FSFIR pseudo-inverse
// step is componentwise division by lambda_j.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"
#include "fsfir/fpca.hpp"
#include "fsfir/funcspace.hpp"
#include "fsfir/mdd.hpp"

namespace fsfir {

enum class SdrMethod { fsfir, tfsir, rfsir };

inline std::string to_string(SdrMethod m) {
    switch (m) {
        case SdrMethod::fsfir: return "fsfir";
        case SdrMethod::tfsir: return "tfsir";
        case SdrMethod::rfsir: return "rfsir";
    }
    return "?";
}

struct SdrHyper {
    int m = 0;           // truncation level (fsfir/tfsir)
    double rho = 0.0;    // ridge parameter (rfsir)
    int basis_size = 0;  // FPCA size (rfsir)
    int H = 0;           // slice count (tfsir/rfsir)
};

struct SdrModel {
    SdrMethod method = SdrMethod::fsfir;
    int d = 0;
    std::vector<Curve> directions;  // unit quadrature norm, sign-fixed
    Curve mean;
    EigenSystem eig;
    SdrHyper hyper;
    bool degenerate_spectrum = false;
};

namespace detail {

// Top-d eigenpairs of a small symmetric matrix, descending.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> top_symmetric_eig(const Eigen::MatrixXd& A,
                                                                     int d) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    const int m = static_cast<int>(A.rows());
    Eigen::VectorXd vals(d);
    Eigen::MatrixXd vecs(m, d);
    for (int k = 0; k < d; ++k) {
        vals(k) = es.eigenvalues()(m - 1 - k);
        vecs.col(k) = es.eigenvectors().col(m - 1 - k);
    }
    return {std::move(vals), std::move(vecs)};
}

// Map coordinate columns (in the eigenfunction basis) to unit-norm,
// sign-fixed direction curves. Sign rule: largest-magnitude coefficient
// positive, first such index on ties.
inline std::vector<Curve> coords_to_directions(Eigen::MatrixXd coords, const EigenSystem& eig,
                                               const GridPtr& grid) {
    const int m = static_cast<int>(coords.rows());
    Eigen::MatrixXd Phi(grid->n_points(), m);
    for (int j = 0; j < m; ++j) Phi.col(j) = eig.eigenfunctions[static_cast<size_t>(j)].values;
    std::vector<Curve> out;
    out.reserve(static_cast<size_t>(coords.cols()));
    for (int k = 0; k < coords.cols(); ++k) {
        Eigen::VectorXd c = coords.col(k);
        const double nrm = c.norm();
        if (nrm > 0) c /= nrm;
        int imax = 0;
        c.cwiseAbs().maxCoeff(&imax);
        if (c(imax) < 0) c = -c;
        out.emplace_back(grid, Phi * c);
    }
    return out;
}

inline std::vector<int> slice_order(const Eigen::MatrixXd& Y) {
    std::vector<int> idx(static_cast<size_t>(Y.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return Y(a, 0) < Y(b, 0); });
    return idx;
}

// H x m matrix of slice means of the score rows, samples ordered by Y
// (stable, original-index tiebreak); slice sizes floor(n/H) with the
// remainder appended to the last slice.
inline Eigen::MatrixXd slice_means(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& Y,
                                   int H) {
    const int n = static_cast<int>(scores.rows());
    const std::vector<int> order = slice_order(Y);
    const int base = n / H;
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(H, scores.cols());
    int pos = 0;
    for (int h = 0; h < H; ++h) {
        const int size = (h == H - 1) ? n - base * (H - 1) : base;
        for (int r = 0; r < size; ++r) means.row(h) += scores.row(order[static_cast<size_t>(pos++)]);
        means.row(h) /= static_cast<double>(size);
    }
    return means;
}

// Slice-based direction coordinates with a given whitening vector
// w_j = (denominator_j)^{-1/2}; shared by tfsir and rfsir.
inline std::pair<Eigen::MatrixXd, bool> sir_coords(const Eigen::MatrixXd& slice_mean_rows,
                                                   const Eigen::VectorXd& whiten, int d) {
    const int H = static_cast<int>(slice_mean_rows.rows());
    const Eigen::MatrixXd W = slice_mean_rows * whiten.asDiagonal();
    const Eigen::MatrixXd Lambda = (W.transpose() * W) / static_cast<double>(H);
    auto [vals, vecs] = top_symmetric_eig(Lambda, d);
    const bool degenerate = vals(0) <= 1e-10 || vals(d - 1) <= 1e-12 * vals(0);
    return {whiten.asDiagonal() * vecs, degenerate};
}

}  // namespace detail

/// Precomputed FSFIR state at a maximal truncation level. Because the MDDO
/// coordinate matrix at level m is the leading m x m block of the matrix at
/// m_max (and the eigensystem heads agree), one preparation serves a whole
/// m-sweep.
struct FsfirSweep {
    Curve mean;
    EigenSystem eig;          // m_max eigenpairs
    Eigen::MatrixXd mddo;     // m_max x m_max
    GridPtr grid;

    static FsfirSweep prepare(const std::vector<Curve>& X, const Eigen::MatrixXd& Y, int m_max,
                              int block = kDefaultMddBlock) {
        const int n = static_cast<int>(X.size());
        if (static_cast<int>(Y.rows()) != n) throw ShapeError("fsfir: X and Y sizes differ");
        if (m_max < 1 || n <= m_max) throw InvalidArgument("fsfir: need n > m >= 1");
        auto [centered, mean] = center(X);
        const CovarianceOperator cov = sample_covariance(centered);
        FsfirSweep s;
        s.grid = X[0].grid;
        s.mean = std::move(mean);
        s.eig = top_eigensystem(cov, m_max);
        const Eigen::MatrixXd S = scores(centered, s.eig);
        s.mddo = mddo_hat(S, Y, block).entries;
        return s;
    }

    SdrModel fit(int m, int d) const {
        if (d < 1 || m < d || m > eig.size()) throw InvalidArgument("fsfir: need m >= d >= 1");
        auto [mu, gamma] = detail::top_symmetric_eig(mddo.topLeftCorner(m, m), d);
        // beta coordinates: Gamma_m^dagger gamma_k = gamma_k ./ lambda
        const Eigen::VectorXd inv_lambda = eig.eigenvalues.head(m).cwiseInverse();
        SdrModel model;
        model.method = SdrMethod::fsfir;
        model.d = d;
        model.mean = mean;
        model.eig.eigenvalues = eig.eigenvalues.head(m);
        model.eig.eigenfunctions.assign(eig.eigenfunctions.begin(),
                                        eig.eigenfunctions.begin() + m);
        model.hyper.m = m;
        model.degenerate_spectrum = mu(0) <= 0 || mu(d - 1) <= 1e-12 * mu(0);
        model.directions =
            detail::coords_to_directions(inv_lambda.asDiagonal() * gamma, model.eig, grid);
        return model;
    }
};

/// FSFIR, Algorithm steps: center, FPCA to m, scores, MDDO matrix, top-d
/// eigenvectors, truncated-covariance pseudo-inverse, map back to curves.
inline SdrModel fsfir_fit(const std::vector<Curve>& X, const Eigen::MatrixXd& Y, int m, int d,
                          int block = kDefaultMddBlock) {
    if (d < 1 || m < d) throw InvalidArgument("fsfir_fit: need m >= d >= 1");
    return FsfirSweep::prepare(X, Y, m, block).fit(m, d);
}

/// FSFIR against a supplied (e.g. analytic) eigensystem instead of sample
/// FPCA. The truncated covariance is no longer diagonal in the supplied
/// coordinates, so the full score covariance is pseudo-inverted.
inline SdrModel fsfir_fit_with_basis(const std::vector<Curve>& X, const Eigen::MatrixXd& Y,
                                     const EigenSystem& basis, int d,
                                     int block = kDefaultMddBlock) {
    const int m = basis.size();
    if (d < 1 || m < d) throw InvalidArgument("fsfir_fit_with_basis: need m >= d >= 1");
    auto [centered, mean] = center(X);
    const Eigen::MatrixXd S = scores(centered, basis);
    const Eigen::MatrixXd gram = (S.transpose() * S) / static_cast<double>(S.rows());
    const Eigen::MatrixXd M = mddo_hat(S, Y, block).entries;
    auto [mu, gamma] = detail::top_symmetric_eig(M, d);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmax <= 0 || es.eigenvalues().minCoeff() < kRankTolerance * lmax)
        throw RankDeficient("fsfir_fit_with_basis: score covariance is rank deficient");
    const Eigen::MatrixXd pinv = es.eigenvectors() *
                                 es.eigenvalues().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().transpose();

    SdrModel model;
    model.method = SdrMethod::fsfir;
    model.d = d;
    model.mean = std::move(mean);
    model.eig = basis;
    model.hyper.m = m;
    model.degenerate_spectrum = mu(0) <= 0 || mu(d - 1) <= 1e-12 * mu(0);
    model.directions = detail::coords_to_directions(pinv * gamma, basis, X[0].grid);
    return model;
}

/// Precomputed slice-estimator state at a maximal truncation level; serves
/// whole m-sweeps (truncated) and rho-sweeps (regularized) from one FPCA
/// pass, matching tfsir_fit / rfsir_fit exactly.
struct SliceSweep {
    Curve mean;
    EigenSystem eig;            // m_max eigenpairs
    Eigen::MatrixXd slice_means;  // H x m_max
    GridPtr grid;
    int H = 0;

    static SliceSweep prepare(const std::vector<Curve>& X, const Eigen::MatrixXd& Y, int m_max,
                              int H) {
        const int n = static_cast<int>(X.size());
        if (Y.cols() != 1) throw UnsupportedResponse("slice sweep: response must be univariate");
        if (static_cast<int>(Y.rows()) != n) throw ShapeError("slice sweep: X and Y sizes differ");
        if (H < 2) throw InvalidArgument("slice sweep: need H >= 2");
        if (H > n / 2) throw TooManySlices("slice sweep: need n >= 2H");
        auto [centered, mean] = center(X);
        const CovarianceOperator cov = sample_covariance(centered);
        SliceSweep s;
        s.grid = X[0].grid;
        s.mean = std::move(mean);
        s.eig = top_eigensystem(cov, m_max);
        s.slice_means = detail::slice_means(scores(centered, s.eig), Y, H);
        s.H = H;
        return s;
    }

  private:
    SdrModel finish(SdrMethod method, int m, int d, const Eigen::VectorXd& whiten,
                    SdrHyper hyper) const {
        auto [coords, degenerate] = detail::sir_coords(s_means_head(m), whiten, d);
        SdrModel model;
        model.method = method;
        model.d = d;
        model.mean = mean;
        model.eig.eigenvalues = eig.eigenvalues.head(m);
        model.eig.eigenfunctions.assign(eig.eigenfunctions.begin(),
                                        eig.eigenfunctions.begin() + m);
        model.hyper = hyper;
        model.hyper.H = H;
        model.degenerate_spectrum = degenerate;
        model.directions = detail::coords_to_directions(coords, model.eig, grid);
        return model;
    }

    Eigen::MatrixXd s_means_head(int m) const { return slice_means.leftCols(m); }

  public:
    SdrModel fit_truncated(int m, int d) const {
        if (d < 1 || m < d || m > eig.size())
            throw InvalidArgument("slice sweep: need m >= d >= 1");
        return finish(SdrMethod::tfsir, m, d, eig.eigenvalues.head(m).array().rsqrt(),
                      {.m = m});
    }

    SdrModel fit_regularized(double rho, int d) const {
        if (rho <= 0) throw InvalidArgument("slice sweep: rho must be positive");
        const int m = eig.size();
        if (d < 1 || m < d) throw InvalidArgument("slice sweep: need basis >= d >= 1");
        return finish(SdrMethod::rfsir, m, d, (eig.eigenvalues.array() + rho).rsqrt(),
                      {.rho = rho, .basis_size = m});
    }
};

/// Truncated FSIR with H response slices.
inline SdrModel tfsir_fit(const std::vector<Curve>& X, const Eigen::MatrixXd& Y, int m, int H,
                          int d) {
    const int n = static_cast<int>(X.size());
    if (Y.cols() != 1) throw UnsupportedResponse("tfsir_fit: response must be univariate");
    if (static_cast<int>(Y.rows()) != n) throw ShapeError("tfsir_fit: X and Y sizes differ");
    if (H < 2) throw InvalidArgument("tfsir_fit: need H >= 2");
    if (H > n / 2) throw TooManySlices("tfsir_fit: need n >= 2H");
    if (d < 1 || m < d) throw InvalidArgument("tfsir_fit: need m >= d >= 1");

    auto [centered, mean] = center(X);
    const CovarianceOperator cov = sample_covariance(centered);
    EigenSystem eig = top_eigensystem(cov, m);
    const Eigen::MatrixXd S = scores(centered, eig);
    const Eigen::MatrixXd means = detail::slice_means(S, Y, H);
    const Eigen::VectorXd whiten = eig.eigenvalues.array().rsqrt();
    auto [coords, degenerate] = detail::sir_coords(means, whiten, d);

    SdrModel model;
    model.method = SdrMethod::tfsir;
    model.d = d;
    model.mean = std::move(mean);
    model.hyper.m = m;
    model.hyper.H = H;
    model.degenerate_spectrum = degenerate;
    model.directions = detail::coords_to_directions(coords, eig, X[0].grid);
    model.eig = std::move(eig);
    return model;
}

/// Regularized FSIR: FPCA to basis_size (capped at numerical rank), slice
/// means, whitening by (lambda + rho)^{-1/2} instead of the pseudo-inverse.
inline SdrModel rfsir_fit(const std::vector<Curve>& X, const Eigen::MatrixXd& Y, double rho,
                          int H, int d, int basis_size = 100) {
    const int n = static_cast<int>(X.size());
    if (Y.cols() != 1) throw UnsupportedResponse("rfsir_fit: response must be univariate");
    if (static_cast<int>(Y.rows()) != n) throw ShapeError("rfsir_fit: X and Y sizes differ");
    if (H < 2) throw InvalidArgument("rfsir_fit: need H >= 2");
    if (H > n / 2) throw TooManySlices("rfsir_fit: need n >= 2H");
    if (rho <= 0) throw InvalidArgument("rfsir_fit: rho must be positive");
    if (d < 1 || basis_size < d) throw InvalidArgument("rfsir_fit: need basis_size >= d >= 1");

    auto [centered, mean] = center(X);
    const CovarianceOperator cov = sample_covariance(centered);
    const int m = std::min({basis_size, numerical_rank(cov), n - 1});
    if (m < d) throw RankDeficient("rfsir_fit: numerical rank below d");
    EigenSystem eig = top_eigensystem(cov, m);
    const Eigen::MatrixXd S = scores(centered, eig);
    const Eigen::MatrixXd means = detail::slice_means(S, Y, H);
    const Eigen::VectorXd whiten = (eig.eigenvalues.array() + rho).rsqrt();
    auto [coords, degenerate] = detail::sir_coords(means, whiten, d);

    SdrModel model;
    model.method = SdrMethod::rfsir;
    model.d = d;
    model.mean = std::move(mean);
    model.hyper.rho = rho;
    model.hyper.H = H;
    model.hyper.basis_size = basis_size;
    model.degenerate_spectrum = degenerate;
    model.directions = detail::coords_to_directions(coords, eig, X[0].grid);
    model.eig = std::move(eig);
    return model;
}

/// Reduced coordinates <X - mean, beta_k>, k = 1..d.
inline Eigen::VectorXd reduce(const SdrModel& model, const Curve& X) {
    require_same_grid(model.mean, X);
    const Curve centered(X.grid, X.values - model.mean.values);
    Eigen::VectorXd out(model.d);
    for (int k = 0; k < model.d; ++k)
        out(k) = inner_product(centered, model.directions[static_cast<size_t>(k)]);
    return out;
}

inline Eigen::MatrixXd reduce(const SdrModel& model, const std::vector<Curve>& X) {
    Eigen::MatrixXd out(static_cast<int>(X.size()), model.d);
    for (size_t i = 0; i < X.size(); ++i) out.row(static_cast<int>(i)) = reduce(model, X[i]);
    return out;
}

}  // namespace fsfir
