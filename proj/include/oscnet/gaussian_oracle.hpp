#pragma once

#include <Eigen/Dense>
#include <complex>

#include "oscnet/model.hpp"

namespace oscnet {

/// Linear-Gaussian description of a fully quadratic model. Coordinates are
/// ordered z = (p, q), each block vertex-major like State.
struct GaussianOracle {
  Eigen::MatrixXd drift;       // A = [[-G, -K], [I, 0]]
  Eigen::MatrixXd diffusion;   // D = diag(gamma_v T_v) on bath momenta
  Eigen::MatrixXd covariance;  // solves A S + S A^T + 2D = 0
  Eigen::VectorXcd eigenvalues;

  /// max |A S + S A^T + 2D|.
  double residual() const;
  /// min over eigenvalues of -Re(lambda): the slowest relaxation rate of the mean.
  double spectral_gap() const;
  /// Relaxation rate of second moments, twice the spectral gap.
  double second_moment_rate() const { return 2.0 * spectral_gap(); }
};

/// Stiffness K of the total potential (|G| n square).
Eigen::MatrixXd stiffness_matrix(const Model& model);

/// Throws ArgumentError for non-quadratic potentials and DiagnosticError when
/// the Lyapunov equation has no unique solution.
GaussianOracle gaussian_stationary_covariance(const Model& model);

/// Solves A X + X A^T + C = 0 by complex Schur decomposition and triangular
/// back-substitution.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// Covariance of exp(-H/T) for a quadratic model: T I on p, T K^{-1} on q.
Eigen::MatrixXd gibbs_covariance(const Model& model, double temperature);

}  // namespace oscnet
