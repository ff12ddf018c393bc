#pragma once

// Sample martingale difference divergence matrix:
//
//   MDDM_n(V|U) = -(1/n^2) sum_{h,l} (V_h - Vbar)(V_l - Vbar)^T ||U_h - U_l||
//
// computed as -(1/n^2) Vt^T D Vt with Vt row-centered and D the Euclidean
// pairwise-distance matrix of the U rows. D is never materialized: row
// blocks of configurable size are streamed and reduced in block order.

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"

namespace fsfir {

struct MddMatrix {
    Eigen::MatrixXd entries;  // symmetric, PSD up to roundoff

    int dim() const { return static_cast<int>(entries.rows()); }
};

constexpr int kDefaultMddBlock = 1024;

namespace detail {

// Distances from U rows [h0, h0+b) to all U rows, by direct differences.
// Direct differencing keeps the result exactly translation invariant
// whenever the shifted inputs are exactly representable.
inline void distance_block(const Eigen::MatrixXd& U, int h0, int b, Eigen::MatrixXd& D) {
    const int n = static_cast<int>(U.rows());
    const int q = static_cast<int>(U.cols());
    D.resize(b, n);
    if (q == 1) {
        for (int i = 0; i < b; ++i) {
            const double ui = U(h0 + i, 0);
            for (int l = 0; l < n; ++l) D(i, l) = std::abs(ui - U(l, 0));
        }
        return;
    }
    for (int i = 0; i < b; ++i) {
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int c = 0; c < q; ++c) {
                const double d = U(h0 + i, c) - U(l, c);
                s += d * d;
            }
            D(i, l) = std::sqrt(s);
        }
    }
}

inline Eigen::MatrixXd centered_quadratic_form(const Eigen::MatrixXd& Vt,
                                               const Eigen::MatrixXd& U, int block) {
    const int n = static_cast<int>(Vt.rows());
    const int p = static_cast<int>(Vt.cols());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd D;
    for (int h0 = 0; h0 < n; h0 += block) {
        const int b = std::min(block, n - h0);
        distance_block(U, h0, b, D);
        acc.noalias() += Vt.middleRows(h0, b).transpose() * (D * Vt);
    }
    Eigen::MatrixXd M = (-acc / (static_cast<double>(n) * n)).eval();
    return 0.5 * (M + M.transpose()).eval();
}

}  // namespace detail

inline MddMatrix mddm_n(const Eigen::MatrixXd& V, const Eigen::MatrixXd& U,
                        int block = kDefaultMddBlock) {
    if (V.rows() != U.rows()) throw ShapeError("mddm_n: V and U row counts differ");
    if (V.rows() < 2) throw InsufficientSamples("mddm_n: need n >= 2");
    if (block <= 0) throw InvalidArgument("mddm_n: block must be positive");
    Eigen::MatrixXd Vt = V.rowwise() - V.colwise().mean();
    return {detail::centered_quadratic_form(Vt, U, block)};
}

/// MDDO coordinate matrix from already-centered FPCA scores; identical to
/// mddm_n(scores, Y) since re-centering is idempotent on centered input.
inline MddMatrix mddo_hat(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& Y,
                          int block = kDefaultMddBlock) {
    if (scores.rows() != Y.rows()) throw ShapeError("mddo_hat: score and Y row counts differ");
    if (scores.rows() < 2) throw InsufficientSamples("mddo_hat: need n >= 2");
    if (block <= 0) throw InvalidArgument("mddo_hat: block must be positive");
    return {detail::centered_quadratic_form(scores, Y, block)};
}

}  // namespace fsfir
