#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "oscnet/model.hpp"
#include "oscnet/rng.hpp"

namespace oscnet {

/// Draws z ~ exp(-H/T) / Z.
///
/// Fully quadratic models are sampled exactly through a Cholesky factor of
/// T K^{-1}. Otherwise positions come from rejection sampling with a Gaussian
/// envelope matched to the Hessian of the total potential at the origin; this
/// is valid when every potential is a soft_power (any degree), a quadratic, or
/// an even_power of degree 2, and every vertex is pinned. Those potentials
/// dominate their own second-order Taylor polynomial at 0, so the acceptance
/// ratio never exceeds one. Momenta are always exact N(0, T I).
class GibbsSampler {
 public:
  enum class Method { ExactGaussian, Rejection };

  static constexpr double kAcceptanceFloor = 0.01;

  GibbsSampler(const Model& model, double temperature);

  State sample(RngStream& rng);

  Method method() const { return method_; }
  double temperature() const { return temperature_; }
  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }
  double acceptance_rate() const;

 private:
  double total_potential(std::span<const double> q) const;

  const Model* model_;
  double temperature_;
  Method method_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor of the position covariance
  Eigen::MatrixXd envelope_precision_;
  double phi0_ = 0.0;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
};

}  // namespace oscnet
