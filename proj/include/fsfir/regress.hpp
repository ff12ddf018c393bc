#pragma once

// Minimal Gaussian-process regression with an RBF kernel. Hyperparameters
// are chosen by exact log marginal likelihood over a finite grid; ties go
// to larger lengthscale, then larger noise variance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"

namespace fsfir {

struct GprParams {
    double signal_var = 1.0;
    double lengthscale = 1.0;
    double noise_var = 0.1;
};

struct GprParamGrid {
    std::vector<double> lengthscales;
    std::vector<double> signal_vars;
    std::vector<double> noise_vars;
};

constexpr double kGprJitterFloor = 1e-10;

struct GprModel {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    GprParams params;
    Eigen::VectorXd alpha;  // (K + noise I)^{-1} y
    double log_marginal = 0.0;
};

namespace detail {

inline Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const GprParams& p) {
    Eigen::MatrixXd K(A.rows(), B.rows());
    const double inv2l2 = 1.0 / (2.0 * p.lengthscale * p.lengthscale);
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < B.rows(); ++j)
            K(i, j) = p.signal_var * std::exp(-(A.row(i) - B.row(j)).squaredNorm() * inv2l2);
    return K;
}

// Cholesky of K + noise I with x10 jitter escalation (3 attempts).
inline std::pair<Eigen::LLT<Eigen::MatrixXd>, double> factor_kernel(const Eigen::MatrixXd& K,
                                                                    double noise_var) {
    double nv = std::max(noise_var, kGprJitterFloor);
    for (int attempt = 0; attempt <= 3; ++attempt) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += nv;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) return {std::move(llt), nv};
        nv *= 10.0;
    }
    throw IllConditionedKernel("gpr: kernel factorization failed after jitter escalation");
}

inline double median_pairwise_distance(const Eigen::MatrixXd& X) {
    std::vector<double> dists;
    for (int i = 0; i < X.rows(); ++i)
        for (int j = i + 1; j < X.rows(); ++j) dists.push_back((X.row(i) - X.row(j)).norm());
    if (dists.empty()) return 1.0;
    std::sort(dists.begin(), dists.end());
    double med = dists[dists.size() / 2];
    return med > 0 ? med : 1.0;
}

inline GprParamGrid default_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const double med = median_pairwise_distance(X);
    const double var_y =
        std::max((y.array() - y.mean()).square().sum() / std::max<int>(1, y.size() - 1), 1e-12);
    GprParamGrid g;
    for (int k = -4; k <= 4; ++k) g.lengthscales.push_back(med * std::pow(2.0, k));
    g.signal_vars = {0.5 * var_y, 1.0 * var_y, 2.0 * var_y};
    g.noise_vars = {0.01 * var_y, 0.05 * var_y, 0.1 * var_y, 0.5 * var_y};
    return g;
}

}  // namespace detail

/// Fit with fixed hyperparameters (allows n = 1).
inline GprModel gpr_fit_fixed(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const GprParams& params) {
    if (X.rows() != y.size() || X.rows() < 1) throw ShapeError("gpr_fit_fixed: bad shapes");
    if (!X.allFinite() || !y.allFinite()) throw InvalidArgument("gpr_fit_fixed: non-finite input");
    if (params.signal_var <= 0 || params.lengthscale <= 0)
        throw InvalidArgument("gpr_fit_fixed: kernel parameters must be positive");
    GprModel m;
    m.inputs = X;
    m.targets = y;
    m.params = params;
    const Eigen::MatrixXd K = detail::rbf_kernel(X, X, params);
    auto [llt, nv] = detail::factor_kernel(K, params.noise_var);
    m.params.noise_var = nv;
    m.alpha = llt.solve(y);
    const int n = static_cast<int>(y.size());
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    m.log_marginal = -0.5 * y.dot(m.alpha) - 0.5 * logdet -
                     0.5 * n * std::log(2.0 * std::numbers::pi);
    return m;
}

/// Grid-searched fit; the chosen point maximizes the exact log marginal
/// likelihood, ties broken toward larger lengthscale then larger noise.
inline GprModel gpr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const std::optional<GprParamGrid>& param_grid = std::nullopt) {
    if (X.rows() != y.size() || X.rows() < 2) throw InvalidArgument("gpr_fit: need n >= 2");
    if (!X.allFinite() || !y.allFinite()) throw InvalidArgument("gpr_fit: non-finite input");
    const GprParamGrid grid = param_grid ? *param_grid : detail::default_grid(X, y);
    std::optional<GprModel> best;
    for (double sf : grid.signal_vars) {
        for (double l : grid.lengthscales) {
            for (double nv : grid.noise_vars) {
                GprModel cand = gpr_fit_fixed(X, y, {sf, l, nv});
                if (!best || cand.log_marginal > best->log_marginal ||
                    (cand.log_marginal == best->log_marginal &&
                     (cand.params.lengthscale > best->params.lengthscale ||
                      (cand.params.lengthscale == best->params.lengthscale &&
                       cand.params.noise_var > best->params.noise_var)))) {
                    best = std::move(cand);
                }
            }
        }
    }
    return *best;
}

/// Posterior means k_*^T (K + noise I)^{-1} y.
inline Eigen::VectorXd gpr_predict(const GprModel& model, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != model.inputs.cols())
        throw ShapeError("gpr_predict: query dimension mismatch");
    return detail::rbf_kernel(X_new, model.inputs, model.params) * model.alpha;
}

}  // namespace fsfir
