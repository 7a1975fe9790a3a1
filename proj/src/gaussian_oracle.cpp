#include "oscnet/gaussian_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "oscnet/errors.hpp"

namespace oscnet {

namespace {

void add_block(Eigen::MatrixXd& k, std::size_t row, std::size_t col, const std::vector<double>& block, std::size_t n,
               double sign) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      k(static_cast<Eigen::Index>(row * n + i), static_cast<Eigen::Index>(col * n + j)) += sign * block[i * n + j];
    }
  }
}

void require_quadratic(const Model& model) {
  if (!model.all_quadratic()) {
    throw ArgumentError("Gaussian oracle requires every pinning and interaction potential to be quadratic");
  }
}

}  // namespace

Eigen::MatrixXd stiffness_matrix(const Model& model) {
  require_quadratic(model);
  const std::size_t n = model.dimension();
  const auto m = static_cast<Eigen::Index>(model.coordinate_count());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  for (VertexId v = 0; v < model.vertex_count(); ++v) {
    if (const auto* u = model.pinning(v)) add_block(k, v, v, u->stiffness(), n, 1.0);
  }
  const auto& edges = model.topology().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ke = model.interaction(e).stiffness();
    add_block(k, edges[e].a, edges[e].a, ke, n, 1.0);
    add_block(k, edges[e].b, edges[e].b, ke, n, 1.0);
    add_block(k, edges[e].a, edges[e].b, ke, n, -1.0);
    add_block(k, edges[e].b, edges[e].a, ke, n, -1.0);
  }
  return k;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  const Eigen::Index m = A.rows();
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(A);
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  // A = U T U^H turns the equation into T X + X T^H = -U^H C U.
  const Eigen::MatrixXcd rhs = -(U.adjoint() * C.cast<std::complex<double>>() * U);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index j = m - 1; j >= 0; --j) {
    for (Eigen::Index i = m - 1; i >= 0; --i) {
      std::complex<double> s = rhs(i, j);
      for (Eigen::Index k = i + 1; k < m; ++k) s -= T(i, k) * X(k, j);
      for (Eigen::Index k = j + 1; k < m; ++k) s -= X(i, k) * std::conj(T(j, k));
      const std::complex<double> d = T(i, i) + std::conj(T(j, j));
      if (std::abs(d) <= 1e-13 * scale) {
        throw DiagnosticError("Lyapunov equation is singular: drift has eigenvalues summing to zero");
      }
      X(i, j) = s / d;
    }
  }
  Eigen::MatrixXd result = (U * X * U.adjoint()).real();
  return 0.5 * (result + result.transpose());
}

double GaussianOracle::residual() const {
  return (drift * covariance + covariance * drift.transpose() + 2.0 * diffusion).cwiseAbs().maxCoeff();
}

double GaussianOracle::spectral_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) gap = std::min(gap, -eigenvalues(i).real());
  return gap;
}

GaussianOracle gaussian_stationary_covariance(const Model& model) {
  require_quadratic(model);
  const std::size_t n = model.dimension();
  const auto m = static_cast<Eigen::Index>(model.coordinate_count());
  GaussianOracle oracle;
  oracle.drift = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  oracle.diffusion = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (VertexId v = 0; v < model.vertex_count(); ++v) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto i = static_cast<Eigen::Index>(v * n + c);
      oracle.drift(i, i) = -model.gamma(v);
      oracle.diffusion(i, i) = model.gamma(v) * model.temperature(v);
    }
  }
  oracle.drift.topRightCorner(m, m) = -stiffness_matrix(model);
  oracle.drift.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  oracle.eigenvalues = oracle.drift.eigenvalues();

  const Eigen::MatrixXd C = 2.0 * oracle.diffusion;
  oracle.covariance = solve_lyapunov(oracle.drift, C);
  // One refinement sweep on the residual recovers digits lost in the Schur basis change.
  const Eigen::MatrixXd r = oracle.drift * oracle.covariance + oracle.covariance * oracle.drift.transpose() + C;
  oracle.covariance += solve_lyapunov(oracle.drift, r);
  return oracle;
}

Eigen::MatrixXd gibbs_covariance(const Model& model, double temperature) {
  if (!(temperature > 0.0)) throw ArgumentError("Gibbs temperature must be positive");
  const Eigen::MatrixXd k = stiffness_matrix(model);
  const Eigen::Index m = k.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw ArgumentError("Gibbs measure is not normalisable: total stiffness is not positive definite");
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  sigma.topLeftCorner(m, m) = temperature * Eigen::MatrixXd::Identity(m, m);
  sigma.bottomRightCorner(m, m) = temperature * llt.solve(Eigen::MatrixXd::Identity(m, m));
  return sigma;
}

}  // namespace oscnet
