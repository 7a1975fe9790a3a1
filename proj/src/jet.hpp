#pragma once

// Truncated multivariate Taylor polynomials ("jets") in the displacement h
// around a base point x. Used to obtain exact derivatives D^alpha V(x) of the
// closed-form potential families up to moderate order.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace oscnet::detail {

/// Enumeration of multi-indices |alpha| <= degree in `dim` variables together
/// with the product table alpha + beta.
class JetSpace {
 public:
  JetSpace(std::size_t dim, int degree);

  std::size_t dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<int>& multi_index(std::size_t k) const { return indices_[k]; }
  int order(std::size_t k) const { return orders_[k]; }
  /// Position of multi-index alpha, or npos when |alpha| > degree.
  std::size_t find(std::span<const int> alpha) const;
  /// Position of alpha_i + alpha_j, or npos when truncated away.
  std::size_t sum(std::size_t i, std::size_t j) const { return sum_[i * size() + j]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t dim_;
  int degree_;
  std::vector<std::vector<int>> indices_;
  std::vector<int> orders_;
  std::vector<std::size_t> sum_;
};

class Jet {
 public:
  explicit Jet(std::shared_ptr<const JetSpace> space, double constant = 0.0);

  /// x_i + h_i
  static Jet variable(std::shared_ptr<const JetSpace> space, std::size_t i, double base);

  double constant() const { return coeffs_[0]; }
  double coefficient(std::size_t k) const { return coeffs_[k]; }
  /// D^alpha of the represented function at the base point (alpha! times the coefficient).
  double derivative(std::span<const int> alpha) const;
  const JetSpace& space() const { return *space_; }

  Jet& operator+=(const Jet& other);
  Jet& operator*=(double s);
  Jet& operator+=(double c);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }

  Jet pow(unsigned exponent) const;
  /// f(self) given f^{(k)}(constant()) for k = 0..degree.
  Jet compose(std::span<const double> derivatives) const;

 private:
  std::shared_ptr<const JetSpace> space_;
  std::vector<double> coeffs_;
};

std::shared_ptr<const JetSpace> jet_space(std::size_t dim, int degree);

}  // namespace oscnet::detail
