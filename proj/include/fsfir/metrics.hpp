#pragma once

// Subspace estimation error D(B; Bhat) = ||P_B - P_Bhat|| in the operator
// norm, with projectors built in a fixed orthonormal coordinate basis.

#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"
#include "fsfir/funcspace.hpp"

namespace fsfir {

struct ProjectionMatrix {
    Eigen::MatrixXd entries;  // symmetric idempotent

    int dim() const { return static_cast<int>(entries.rows()); }
};

namespace detail {

inline Eigen::MatrixXd direction_coords(const std::vector<Curve>& directions,
                                        const BasisFamily& basis) {
    if (directions.empty()) throw InvalidArgument("direction set is empty");
    Eigen::MatrixXd C(basis.count, static_cast<int>(directions.size()));
    for (size_t k = 0; k < directions.size(); ++k)
        C.col(static_cast<int>(k)) = project_coeffs(directions[k], basis, basis.count);
    return C;
}

inline ProjectionMatrix projection_from_coords(const Eigen::MatrixXd& C) {
    for (int k = 0; k < C.cols(); ++k)
        if (C.col(k).norm() < 1e-14) throw InvalidArgument("all-zero direction");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU);
    const double smax = svd.singularValues()(0);
    int rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()(rank) > 1e-10 * smax)
        ++rank;
    const Eigen::MatrixXd Q = svd.matrixU().leftCols(rank);
    Eigen::MatrixXd P = Q * Q.transpose();
    return {0.5 * (P + P.transpose()).eval()};
}

}  // namespace detail

inline ProjectionMatrix orthonormalize_projection(const std::vector<Curve>& directions,
                                                  const BasisFamily& coordinate_basis) {
    return detail::projection_from_coords(detail::direction_coords(directions, coordinate_basis));
}

inline ProjectionMatrix orthonormalize_projection(const Eigen::MatrixXd& coeff_columns) {
    return detail::projection_from_coords(coeff_columns);
}

/// Largest singular value of P_B - P_Bhat; 0 iff equal spans, <= 1 on
/// equal ranks.
inline double subspace_distance(const ProjectionMatrix& P, const ProjectionMatrix& Q) {
    if (P.dim() != Q.dim()) throw ShapeError("subspace_distance: projector dimensions differ");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.entries - Q.entries,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double subspace_distance(const std::vector<Curve>& B, const std::vector<Curve>& B_hat,
                                const BasisFamily& coordinate_basis) {
    return subspace_distance(orthonormalize_projection(B, coordinate_basis),
                             orthonormalize_projection(B_hat, coordinate_basis));
}

}  // namespace fsfir
