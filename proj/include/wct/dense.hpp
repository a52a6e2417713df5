#pragma once

#include <Eigen/Dense>

namespace wct {

/// Coordinate realization of an operator on a finite L^2(mu)-type space,
/// carrying the masses that define <f, g> = sum f_i conj(g_i) mass_i.
struct DenseMatrix {
  Eigen::MatrixXcd entries;
  Eigen::VectorXd mass;

  Eigen::Index dim() const { return entries.rows(); }

  /// Adjoint with respect to the mass-weighted inner product: W^-1 M^H W.
  DenseMatrix weighted_adjoint() const;
};

inline DenseMatrix DenseMatrix::weighted_adjoint() const {
  const Eigen::VectorXcd w = mass.cast<std::complex<double>>();
  Eigen::MatrixXcd adj = w.cwiseInverse().asDiagonal() * entries.adjoint() * w.asDiagonal();
  return {std::move(adj), mass};
}

}  // namespace wct
