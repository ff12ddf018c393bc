#pragma once

// Shared representation of L2[0,1] elements: uniform grids with trapezoidal
// quadrature, curves sampled on a grid, orthonormal basis families and
// coefficient projections.

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"

namespace fsfir {

struct Grid {
    Eigen::VectorXd points;   // strictly increasing, t_1 = 0, t_N = 1
    Eigen::VectorXd weights;  // trapezoidal, positive, sum to 1

    int n_points() const { return static_cast<int>(points.size()); }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid on [0,1] with trapezoidal quadrature weights.
inline GridPtr make_grid(int n_points) {
    if (n_points < 2) throw InvalidArgument("make_grid: n_points must be >= 2");
    auto g = std::make_shared<Grid>();
    const double h = 1.0 / (n_points - 1);
    g->points = Eigen::VectorXd::LinSpaced(n_points, 0.0, 1.0);
    g->weights = Eigen::VectorXd::Constant(n_points, h);
    g->weights(0) = h / 2.0;
    g->weights(n_points - 1) = h / 2.0;
    return g;
}

struct Curve {
    GridPtr grid;
    Eigen::VectorXd values;

    Curve() = default;
    Curve(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
        if (!grid || values.size() != grid->n_points())
            throw ShapeError("Curve: values length must equal grid.n_points");
    }
};

inline bool same_grid(const Grid& a, const Grid& b) {
    return &a == &b || a.n_points() == b.n_points();
}

inline void require_same_grid(const Curve& f, const Curve& g) {
    if (!f.grid || !g.grid || !same_grid(*f.grid, *g.grid))
        throw IncompatibleGrids("curves live on different grids");
}

/// Quadrature inner product sum_i w_i f(t_i) g(t_i), summed left to right.
inline double inner_product(const Curve& f, const Curve& g) {
    require_same_grid(f, g);
    const auto& w = f.grid->weights;
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i) acc += w(i) * f.values(i) * g.values(i);
    return acc;
}

inline double l2_norm(const Curve& f) { return std::sqrt(inner_product(f, f)); }

enum class BasisKind { fourier_cosine, brownian_kl, empirical };

// Analytic families are closed-form rules; the empirical kind carries its
// member curves explicitly.
struct BasisFamily {
    BasisKind kind = BasisKind::fourier_cosine;
    int count = 0;
    std::vector<Curve> functions;  // empirical only

    static BasisFamily fourier_cosine(int count) { return {BasisKind::fourier_cosine, count, {}}; }
    static BasisFamily brownian_kl(int count) { return {BasisKind::brownian_kl, count, {}}; }
    static BasisFamily empirical(std::vector<Curve> funcs) {
        BasisFamily f;
        f.kind = BasisKind::empirical;
        f.count = static_cast<int>(funcs.size());
        f.functions = std::move(funcs);
        return f;
    }
};

/// Evaluate the j-th basis function (1-based) on a grid.
inline Curve eval_basis(const BasisFamily& family, int j, const GridPtr& grid) {
    if (j < 1 || j > family.count) throw IndexError("eval_basis: index out of range");
    const double pi = std::numbers::pi;
    const double sqrt2 = std::numbers::sqrt2;
    switch (family.kind) {
        case BasisKind::fourier_cosine: {
            Eigen::VectorXd v(grid->n_points());
            if (j == 1) {
                v.setOnes();
            } else {
                for (int i = 0; i < v.size(); ++i)
                    v(i) = sqrt2 * std::cos((j - 1) * pi * grid->points(i));
            }
            return Curve(grid, std::move(v));
        }
        case BasisKind::brownian_kl: {
            // KL eigenfunctions of standard Brownian motion on [0,1].
            Eigen::VectorXd v(grid->n_points());
            const double freq = (j - 0.5) * pi;
            for (int i = 0; i < v.size(); ++i) v(i) = sqrt2 * std::sin(freq * grid->points(i));
            return Curve(grid, std::move(v));
        }
        case BasisKind::empirical: {
            const Curve& f = family.functions[static_cast<size_t>(j - 1)];
            if (!same_grid(*f.grid, *grid))
                throw IncompatibleGrids("eval_basis: empirical family on a different grid");
            return f;
        }
    }
    throw InvalidArgument("eval_basis: unknown basis kind");
}

/// KL eigenvalue of standard Brownian motion matching the brownian_kl family.
inline double brownian_kl_eigenvalue(int k) {
    const double freq = (k - 0.5) * std::numbers::pi;
    return 1.0 / (freq * freq);
}

/// First m quadrature coefficients <f, phi_j>.
inline Eigen::VectorXd project_coeffs(const Curve& f, const BasisFamily& family, int m) {
    if (m < 0 || m > family.count) throw IndexError("project_coeffs: m out of range");
    Eigen::VectorXd c(m);
    for (int j = 1; j <= m; ++j) c(j - 1) = inner_product(f, eval_basis(family, j, f.grid));
    return c;
}

/// Values of the first m basis functions stacked column-wise (N x m).
inline Eigen::MatrixXd basis_values(const BasisFamily& family, int m, const GridPtr& grid) {
    Eigen::MatrixXd B(grid->n_points(), m);
    for (int j = 1; j <= m; ++j) B.col(j - 1) = eval_basis(family, j, grid).values;
    return B;
}

}  // namespace fsfir
