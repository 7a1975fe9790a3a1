#include "oscnet/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "jet.hpp"
#include "oscnet/errors.hpp"
#include "oscnet/rng.hpp"

namespace oscnet {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

int total_degree(const Monomial& m) { return std::accumulate(m.powers.begin(), m.powers.end(), 0); }

double monomial_value(const Monomial& m, std::span<const double> x) {
  double v = m.coefficient;
  for (std::size_t i = 0; i < x.size(); ++i) v *= ipow(x[i], m.powers[i]);
  return v;
}

void monomial_add_gradient(const Monomial& m, std::span<const double> x, double scale, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (m.powers[i] == 0) continue;
    double d = m.coefficient * m.powers[i] * ipow(x[i], m.powers[i] - 1);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) d *= ipow(x[j], m.powers[j]);
    }
    out[i] += scale * d;
  }
}

int top_degree(const std::vector<Monomial>& terms) {
  int top = 0;
  for (const auto& m : terms) {
    if (m.coefficient != 0.0) top = std::max(top, total_degree(m));
  }
  return top;
}

void check_dim(const PotentialSpec& spec, std::span<const double> x) {
  if (x.size() != spec.dimension()) {
    throw ArgumentError("dimension mismatch: potential is " + std::to_string(spec.dimension()) +
                        "-dimensional, argument has " + std::to_string(x.size()) + " components");
  }
}

/// Taylor jet of V around x, exact to the requested order.
detail::Jet taylor_jet(const PotentialSpec& spec, std::span<const double> x, int order) {
  const std::size_t n = spec.dimension();
  auto space = detail::jet_space(n, order);
  std::vector<detail::Jet> vars;
  vars.reserve(n);
  for (std::size_t i = 0; i < n; ++i) vars.push_back(detail::Jet::variable(space, i, x[i]));

  auto squared_norm = [&] {
    detail::Jet s(space);
    for (const auto& v : vars) s += v * v;
    return s;
  };

  switch (spec.family()) {
    case Family::SoftPower: {
      detail::Jet s = squared_norm();
      s += 1.0;
      const double a = spec.degree() / 2.0;
      const double s0 = s.constant();
      std::vector<double> derivs(order + 1);
      double falling = 1.0;
      for (int k = 0; k <= order; ++k) {
        derivs[k] = falling * std::pow(s0, a - k);
        falling *= (a - k);
      }
      return s.compose(derivs);
    }
    case Family::EvenPower:
      return squared_norm().pow(static_cast<unsigned>(spec.degree()) / 2u);
    case Family::Quadratic: {
      detail::Jet result(space);
      const auto& k = spec.stiffness();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (k[i * n + j] != 0.0) result += (vars[i] * vars[j]) * (0.5 * k[i * n + j]);
        }
      }
      return result;
    }
    case Family::LocalPiece: {
      detail::Jet result(space, spec.shift());
      for (const auto& m : spec.terms()) {
        detail::Jet term(space, m.coefficient);
        for (std::size_t i = 0; i < n; ++i) {
          if (m.powers[i] > 0) term = term * vars[i].pow(static_cast<unsigned>(m.powers[i]));
        }
        result += term;
      }
      return result;
    }
  }
  return detail::Jet(space);
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::SoftPower: return "soft_power";
    case Family::EvenPower: return "even_power";
    case Family::Quadratic: return "quadratic";
    case Family::LocalPiece: return "local_piece";
  }
  return "unknown";
}

PotentialSpec PotentialSpec::soft_power(std::size_t dim, double degree) {
  if (dim == 0) throw ArgumentError("potential dimension must be >= 1");
  if (!(degree >= 2.0) || !std::isfinite(degree)) {
    throw ArgumentError("soft_power degree must be a finite real >= 2");
  }
  return PotentialSpec(Family::SoftPower, dim, degree);
}

PotentialSpec PotentialSpec::even_power(std::size_t dim, int degree) {
  if (dim == 0) throw ArgumentError("potential dimension must be >= 1");
  if (degree < 2 || degree % 2 != 0) throw ArgumentError("even_power degree must be an even integer >= 2");
  return PotentialSpec(Family::EvenPower, dim, degree);
}

PotentialSpec PotentialSpec::quadratic(std::size_t dim, std::vector<double> stiffness) {
  if (dim == 0) throw ArgumentError("potential dimension must be >= 1");
  if (stiffness.size() != dim * dim) {
    throw ArgumentError("quadratic stiffness must have " + std::to_string(dim * dim) + " entries");
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> k(
      stiffness.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if (!k.allFinite() || (k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ArgumentError("quadratic stiffness must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw ArgumentError("quadratic stiffness must be positive definite");
  }
  PotentialSpec spec(Family::Quadratic, dim, 2.0);
  spec.stiffness_ = std::move(stiffness);
  return spec;
}

PotentialSpec PotentialSpec::isotropic_quadratic(std::size_t dim, double k) {
  std::vector<double> stiffness(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) stiffness[i * dim + i] = k;
  return quadratic(dim, std::move(stiffness));
}

PotentialSpec PotentialSpec::local_piece(std::size_t dim, std::vector<Monomial> terms, double shift) {
  if (dim == 0) throw ArgumentError("potential dimension must be >= 1");
  if (terms.empty()) throw ArgumentError("local_piece needs at least one monomial");
  for (const auto& m : terms) {
    if (m.powers.size() != dim) throw ArgumentError("local_piece monomial has wrong number of exponents");
    for (int p : m.powers) {
      if (p < 0) throw ArgumentError("local_piece exponents must be non-negative");
    }
    if (!std::isfinite(m.coefficient)) throw ArgumentError("local_piece coefficients must be finite");
  }
  PotentialSpec spec(Family::LocalPiece, dim, 0.0);
  spec.degree_ = top_degree(terms);
  spec.terms_ = std::move(terms);
  spec.shift_ = shift;
  return spec;
}

bool PotentialSpec::exactly_homogeneous() const {
  switch (family_) {
    case Family::SoftPower: return false;
    case Family::EvenPower:
    case Family::Quadratic: return true;
    case Family::LocalPiece:
      if (shift_ != 0.0) return false;
      return std::all_of(terms_.begin(), terms_.end(), [&](const Monomial& m) {
        return m.coefficient == 0.0 || total_degree(m) == static_cast<int>(degree_);
      });
  }
  return false;
}

double PotentialSpec::value(std::span<const double> x) const {
  switch (family_) {
    case Family::SoftPower: return std::pow(1.0 + norm2(x), 0.5 * degree_);
    case Family::EvenPower: return ipow(norm2(x), static_cast<int>(degree_) / 2);
    case Family::Quadratic: {
      double v = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) row += stiffness_[i * dim_ + j] * x[j];
        v += x[i] * row;
      }
      return 0.5 * v;
    }
    case Family::LocalPiece: {
      double v = shift_;
      for (const auto& m : terms_) v += monomial_value(m, x);
      return v;
    }
  }
  return 0.0;
}

void PotentialSpec::add_gradient(std::span<const double> x, double scale, std::span<double> out) const {
  switch (family_) {
    case Family::SoftPower: {
      const double c = scale * degree_ * std::pow(1.0 + norm2(x), 0.5 * degree_ - 1.0);
      for (std::size_t i = 0; i < dim_; ++i) out[i] += c * x[i];
      return;
    }
    case Family::EvenPower: {
      const int r = static_cast<int>(degree_);
      const double c = scale * r * ipow(norm2(x), r / 2 - 1);
      for (std::size_t i = 0; i < dim_; ++i) out[i] += c * x[i];
      return;
    }
    case Family::Quadratic:
      for (std::size_t i = 0; i < dim_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) row += stiffness_[i * dim_ + j] * x[j];
        out[i] += scale * row;
      }
      return;
    case Family::LocalPiece:
      for (const auto& m : terms_) monomial_add_gradient(m, x, scale, out);
      return;
  }
}

double PotentialSpec::limiting_value(std::span<const double> x) const {
  switch (family_) {
    case Family::SoftPower: return std::pow(norm2(x), 0.5 * degree_);
    case Family::EvenPower:
    case Family::Quadratic: return value(x);
    case Family::LocalPiece: {
      double v = 0.0;
      for (const auto& m : terms_) {
        if (total_degree(m) == static_cast<int>(degree_)) v += monomial_value(m, x);
      }
      return v;
    }
  }
  return 0.0;
}

void PotentialSpec::add_limiting_gradient(std::span<const double> x, double scale, std::span<double> out) const {
  switch (family_) {
    case Family::SoftPower: {
      const double s = norm2(x);
      if (s == 0.0) return;  // degree >= 2: gradient of |x|^r vanishes at the origin
      const double c = scale * degree_ * std::pow(s, 0.5 * degree_ - 1.0);
      for (std::size_t i = 0; i < dim_; ++i) out[i] += c * x[i];
      return;
    }
    case Family::EvenPower:
    case Family::Quadratic: add_gradient(x, scale, out); return;
    case Family::LocalPiece:
      for (const auto& m : terms_) {
        if (total_degree(m) == static_cast<int>(degree_)) monomial_add_gradient(m, x, scale, out);
      }
      return;
  }
}

double eval(const PotentialSpec& spec, std::span<const double> x) {
  check_dim(spec, x);
  return spec.value(x);
}

std::vector<double> grad(const PotentialSpec& spec, std::span<const double> x) {
  check_dim(spec, x);
  std::vector<double> g(x.size(), 0.0);
  spec.add_gradient(x, 1.0, g);
  return g;
}

double limiting_eval(const PotentialSpec& spec, std::span<const double> x) {
  check_dim(spec, x);
  return spec.limiting_value(x);
}

std::vector<double> limiting_grad(const PotentialSpec& spec, std::span<const double> x) {
  check_dim(spec, x);
  std::vector<double> g(x.size(), 0.0);
  spec.add_limiting_gradient(x, 1.0, g);
  return g;
}

Eigen::MatrixXd hessian(const PotentialSpec& spec, std::span<const double> x) {
  check_dim(spec, x);
  const std::size_t n = spec.dimension();
  const detail::Jet jet = taylor_jet(spec, x, 2);
  Eigen::MatrixXd h(n, n);
  std::vector<int> alpha(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(alpha.begin(), alpha.end(), 0);
      ++alpha[i];
      ++alpha[j];
      h(i, j) = jet.derivative(alpha);
    }
  }
  return h;
}

Eigen::MatrixXd derivative_rows(const PotentialSpec& spec, std::span<const double> x, int ell) {
  check_dim(spec, x);
  if (ell < 1 || ell > kMaxNondegeneracyOrder) {
    throw ArgumentError("derivative order ell must lie in [1, " + std::to_string(kMaxNondegeneracyOrder) + "]");
  }
  const std::size_t n = spec.dimension();
  const detail::Jet jet = taylor_jet(spec, x, ell + 1);
  const auto& space = jet.space();
  std::vector<std::vector<double>> rows;
  std::vector<int> shifted(n);
  for (std::size_t k = 0; k < space.size(); ++k) {
    const int order = space.order(k);
    if (order < 1 || order > ell) continue;
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      shifted = space.multi_index(k);
      ++shifted[i];
      row[i] = jet.derivative(shifted);
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) m(r, i) = rows[r][i];
  }
  return m;
}

NondegeneracyResult check_nondegenerate(const PotentialSpec& spec, const std::vector<std::vector<double>>& samples,
                                        int ell, double tol) {
  if (ell < 1 || ell > kMaxNondegeneracyOrder) {
    throw ArgumentError("nondegeneracy order ell=" + std::to_string(ell) + " outside [1, " +
                        std::to_string(kMaxNondegeneracyOrder) + "]");
  }
  if (samples.empty()) throw ArgumentError("nondegeneracy check needs at least one sample point");
  if (!(tol > 0.0)) throw ArgumentError("rank tolerance must be positive");

  NondegeneracyResult result;
  result.ell = ell;
  result.tolerance = tol;
  result.overall = true;
  const auto n = static_cast<int>(spec.dimension());
  for (const auto& x : samples) {
    const Eigen::MatrixXd rows = derivative_rows(spec, x, ell);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    const auto& sv = svd.singularValues();
    int rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol * sv(0)) ++rank;
      }
    }
    const bool ok = rank == n;
    result.per_sample.push_back(ok);
    result.ranks.push_back(rank);
    result.overall = result.overall && ok;
  }
  return result;
}

std::vector<std::vector<double>> default_nondegeneracy_samples(std::size_t dim) {
  std::vector<std::vector<double>> samples;
  samples.emplace_back(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> e(dim, 0.0);
    e[i] = 1.0;
    samples.push_back(std::move(e));
  }
  RngStream rng(0xC2C2C2C2u, dim);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x(dim);
    rng.fill_normal(x);
    const double r = 5.0 * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
    const double norm = std::sqrt(norm2(x));
    for (double& v : x) v *= r / norm;
    samples.push_back(std::move(x));
  }
  return samples;
}

std::vector<std::vector<double>> sphere_points(std::size_t dim, int count) {
  std::vector<std::vector<double>> pts;
  if (dim == 1) return {{-1.0}, {1.0}};
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      pts.push_back({std::cos(a), std::sin(a)});
    }
    return pts;
  }
  if (dim == 3) {
    // Fibonacci lattice.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      pts.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
    return pts;
  }
  RngStream rng(0x5EED5EEDu, dim);
  for (int k = 0; k < count; ++k) {
    std::vector<double> x(dim);
    rng.fill_normal(x);
    const double norm = std::sqrt(norm2(x));
    for (double& v : x) v /= norm;
    pts.push_back(std::move(x));
  }
  return pts;
}

CoercivityResult check_coercive_limit(const PotentialSpec& spec, int sphere_samples) {
  if (sphere_samples < 100) throw ArgumentError("coercivity check needs at least 100 sphere samples");
  const std::size_t n = spec.dimension();
  auto pts = sphere_points(n, sphere_samples);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t k = 0; k < pts.size(); ++k) ranked.emplace_back(spec.limiting_value(pts[k]), k);
  std::sort(ranked.begin(), ranked.end());

  CoercivityResult best;
  best.min_value = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::min<std::size_t>(5, ranked.size());
  std::vector<double> g(n), trial(n);
  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> x = pts[ranked[s].second];
    double fx = ranked[s].first;
    double step = 0.1;
    for (int it = 0; it < 300 && step > 1e-14; ++it) {
      std::fill(g.begin(), g.end(), 0.0);
      spec.add_limiting_gradient(x, 1.0, g);
      double radial = 0.0;
      for (std::size_t i = 0; i < n; ++i) radial += g[i] * x[i];
      double gnorm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        g[i] -= radial * x[i];
        gnorm += g[i] * g[i];
      }
      gnorm = std::sqrt(gnorm);
      if (gnorm < 1e-14) break;
      bool improved = false;
      while (step > 1e-14) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - step * g[i] / gnorm;
        const double tn = std::sqrt(norm2(trial));
        for (double& v : trial) v /= tn;
        const double ft = spec.limiting_value(trial);
        if (ft < fx) {
          x = trial;
          fx = ft;
          step *= 1.5;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (fx < best.min_value) {
      best.min_value = fx;
      best.argmin = x;
    }
  }
  best.coercive = best.min_value > 0.0;
  return best;
}

std::vector<HomogeneityDeviation> check_near_homogeneous(const PotentialSpec& spec, const std::vector<double>& lambdas,
                                                         int sphere_samples) {
  if (lambdas.size() < 3) throw ArgumentError("near-homogeneity profile needs at least 3 scale factors");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1]))) {
      throw ArgumentError("scale factors must be positive and strictly increasing");
    }
  }
  std::vector<HomogeneityDeviation> profile;
  if (spec.exactly_homogeneous()) {
    // V coincides with V_inf, which is homogeneous: every deviation vanishes identically.
    for (double l : lambdas) profile.push_back({l, 0.0, 0.0});
    return profile;
  }
  const std::size_t n = spec.dimension();
  const double r = spec.degree();
  const auto pts = sphere_points(n, sphere_samples);
  std::vector<double> scaled(n), g(n), g_inf(n);
  for (double l : lambdas) {
    HomogeneityDeviation dev{l, 0.0, 0.0};
    const double value_scale = std::pow(l, -r);
    const double grad_scale = std::pow(l, 1.0 - r);
    for (const auto& x : pts) {
      for (std::size_t i = 0; i < n; ++i) scaled[i] = l * x[i];
      dev.value_deviation =
          std::max(dev.value_deviation, std::abs(spec.value(scaled) * value_scale - spec.limiting_value(x)));
      std::fill(g.begin(), g.end(), 0.0);
      std::fill(g_inf.begin(), g_inf.end(), 0.0);
      spec.add_gradient(scaled, grad_scale, g);
      spec.add_limiting_gradient(x, 1.0, g_inf);
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += (g[i] - g_inf[i]) * (g[i] - g_inf[i]);
      dev.gradient_deviation = std::max(dev.gradient_deviation, std::sqrt(d));
    }
    profile.push_back(dev);
  }
  return profile;
}

}  // namespace oscnet
