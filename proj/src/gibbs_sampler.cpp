#include "oscnet/gibbs_sampler.hpp"

#include <cmath>

#include "oscnet/errors.hpp"
#include "oscnet/gaussian_oracle.hpp"

namespace oscnet {

namespace {

constexpr const char* kSupported =
    "supported Gibbs sampling forms: all potentials quadratic (exact), or every vertex pinned and every potential "
    "one of soft_power, quadratic, even_power of degree 2 (rejection)";

bool envelope_dominated(const PotentialSpec& spec) {
  switch (spec.family()) {
    case Family::SoftPower:
    case Family::Quadratic: return true;
    case Family::EvenPower: return spec.degree() == 2.0;
    case Family::LocalPiece: return false;
  }
  return false;
}

void add_hessian_block(Eigen::MatrixXd& h, std::size_t a, std::size_t b, const Eigen::MatrixXd& block, double sign) {
  const auto n = block.rows();
  h.block(static_cast<Eigen::Index>(a) * n, static_cast<Eigen::Index>(b) * n, n, n) += sign * block;
}

}  // namespace

GibbsSampler::GibbsSampler(const Model& model, double temperature) : model_(&model), temperature_(temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ArgumentError("Gibbs temperature must be positive and finite");
  }
  const auto m = static_cast<Eigen::Index>(model.coordinate_count());
  if (model.all_quadratic()) {
    method_ = Method::ExactGaussian;
    const Eigen::MatrixXd cov = gibbs_covariance(model, temperature).bottomRightCorner(m, m);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw ArgumentError(std::string("Gibbs covariance not factorisable; ") + kSupported);
    factor_ = llt.matrixL();
    return;
  }

  method_ = Method::Rejection;
  for (VertexId v = 0; v < model.vertex_count(); ++v) {
    const auto* u = model.pinning(v);
    if (!u || !envelope_dominated(*u)) {
      throw ArgumentError("vertex " + model.topology().name(v) + " has no samplable pinning; " + kSupported);
    }
  }
  for (const auto& v : model.interactions()) {
    if (!envelope_dominated(v)) throw ArgumentError(std::string("interaction not samplable; ") + kSupported);
  }
  // Hessian of the total potential at q = 0.
  const std::size_t n = model.dimension();
  const std::vector<double> origin(n, 0.0);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (VertexId v = 0; v < model.vertex_count(); ++v) add_hessian_block(h, v, v, hessian(*model.pinning(v), origin), 1.0);
  const auto& edges = model.topology().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Eigen::MatrixXd he = hessian(model.interaction(e), origin);
    add_hessian_block(h, edges[e].a, edges[e].a, he, 1.0);
    add_hessian_block(h, edges[e].b, edges[e].b, he, 1.0);
    add_hessian_block(h, edges[e].a, edges[e].b, he, -1.0);
    add_hessian_block(h, edges[e].b, edges[e].a, he, -1.0);
  }
  envelope_precision_ = h;
  Eigen::LLT<Eigen::MatrixXd> llt(temperature * h.inverse());
  if (llt.info() != Eigen::Success) throw ArgumentError(std::string("envelope is not positive definite; ") + kSupported);
  factor_ = llt.matrixL();
  phi0_ = total_potential(std::vector<double>(static_cast<std::size_t>(m), 0.0));
}

double GibbsSampler::total_potential(std::span<const double> q) const {
  const std::size_t n = model_->dimension();
  double phi = 0.0;
  for (VertexId v = 0; v < model_->vertex_count(); ++v) {
    if (const auto* u = model_->pinning(v)) phi += u->value(q.subspan(v * n, n));
  }
  std::vector<double> dq(n);
  const auto& edges = model_->topology().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    for (std::size_t c = 0; c < n; ++c) dq[c] = q[edges[e].b * n + c] - q[edges[e].a * n + c];
    phi += model_->interaction(e).value(dq);
  }
  return phi;
}

double GibbsSampler::acceptance_rate() const {
  return proposals_ == 0 ? 1.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
}

State GibbsSampler::sample(RngStream& rng) {
  State z = State::zeros_like(*model_);
  const auto m = static_cast<Eigen::Index>(z.q.size());
  Eigen::VectorXd xi(m);
  for (;;) {
    for (Eigen::Index i = 0; i < m; ++i) xi(i) = rng.normal();
    Eigen::Map<Eigen::VectorXd>(z.q.data(), m) = factor_ * xi;
    ++proposals_;
    if (method_ == Method::ExactGaussian) break;
    const Eigen::Map<const Eigen::VectorXd> q(z.q.data(), m);
    const double excess = total_potential(z.q) - phi0_ - 0.5 * q.dot(envelope_precision_ * q);
    if (excess < -1e-9 * std::max(1.0, std::abs(phi0_))) {
      throw DiagnosticError("rejection envelope does not dominate the Gibbs density");
    }
    if (rng.uniform() < std::exp(-std::max(0.0, excess) / temperature_)) break;
    if (proposals_ >= 1000 && acceptance_rate() < kAcceptanceFloor) {
      throw DiagnosticError("rejection sampler acceptance rate fell below 1%");
    }
  }
  ++accepted_;
  const double sd = std::sqrt(temperature_);
  for (double& p : z.p) p = sd * rng.normal();
  return z;
}

}  // namespace oscnet
