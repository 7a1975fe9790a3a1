#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace oscnet {

enum class Family { SoftPower, EvenPower, Quadratic, LocalPiece };

std::string to_string(Family family);

/// c * prod_i x_i^{powers[i]}
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> powers;
};

/// A pinning or interaction potential from the closed family
///   SoftPower   (1 + |x|^2)^{r/2},  real r >= 2
///   EvenPower   |x|^r,              even r >= 2
///   Quadratic   x.Kx / 2,           K symmetric positive definite
///   LocalPiece  explicit polynomial + additive shift (local model only)
/// The limiting homogeneous form is |x|^r for the power families, the
/// potential itself for Quadratic, and the top-degree homogeneous part of
/// the polynomial for LocalPiece.
class PotentialSpec {
 public:
  static PotentialSpec soft_power(std::size_t dim, double degree);
  static PotentialSpec even_power(std::size_t dim, int degree);
  /// Row-major dim x dim stiffness matrix.
  static PotentialSpec quadratic(std::size_t dim, std::vector<double> stiffness);
  static PotentialSpec isotropic_quadratic(std::size_t dim, double k);
  static PotentialSpec local_piece(std::size_t dim, std::vector<Monomial> terms, double shift = 0.0);

  Family family() const { return family_; }
  std::size_t dimension() const { return dim_; }
  /// Homogeneity degree of the limiting form (l_p or l_i when used in a model).
  double degree() const { return degree_; }
  const std::vector<double>& stiffness() const { return stiffness_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  double shift() const { return shift_; }
  /// True when V coincides with its limiting form (no near-homogeneous correction).
  bool exactly_homogeneous() const;

  // Unchecked fast paths; x.size() must equal dimension().
  double value(std::span<const double> x) const;
  /// out += scale * grad V(x)
  void add_gradient(std::span<const double> x, double scale, std::span<double> out) const;
  double limiting_value(std::span<const double> x) const;
  void add_limiting_gradient(std::span<const double> x, double scale, std::span<double> out) const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

 private:
  PotentialSpec(Family family, std::size_t dim, double degree)
      : family_(family), dim_(dim), degree_(degree) {}

  Family family_;
  std::size_t dim_;
  double degree_;
  std::vector<double> stiffness_;
  std::vector<Monomial> terms_;
  double shift_ = 0.0;
};

// Checked operations. Dimension mismatches throw ArgumentError.
double eval(const PotentialSpec& spec, std::span<const double> x);
std::vector<double> grad(const PotentialSpec& spec, std::span<const double> x);
double limiting_eval(const PotentialSpec& spec, std::span<const double> x);
std::vector<double> limiting_grad(const PotentialSpec& spec, std::span<const double> x);
Eigen::MatrixXd hessian(const PotentialSpec& spec, std::span<const double> x);

/// Rows D^alpha grad V(x) for 1 <= |alpha| <= ell, computed from exact Taylor jets.
Eigen::MatrixXd derivative_rows(const PotentialSpec& spec, std::span<const double> x, int ell);

inline constexpr int kMaxNondegeneracyOrder = 6;
inline constexpr double kDefaultRankTolerance = 1e-8;

struct NondegeneracyResult {
  bool overall = false;
  std::vector<bool> per_sample;
  std::vector<int> ranks;
  int ell = 0;
  double tolerance = 0.0;
  // Finite sample set: a pass is evidence, not proof.
  bool sampled = true;
};

/// Numerical rank test of the derivative rows at every sample. Singular values
/// below tol * sigma_max count as zero.
NondegeneracyResult check_nondegenerate(const PotentialSpec& spec, const std::vector<std::vector<double>>& samples,
                                        int ell, double tol = kDefaultRankTolerance);

/// Origin, unit basis vectors and 20 seeded random points in the ball of radius 5.
std::vector<std::vector<double>> default_nondegeneracy_samples(std::size_t dim);

struct CoercivityResult {
  bool coercive = false;
  double min_value = 0.0;
  std::vector<double> argmin;
  bool sampled = true;
};

/// Minimum of the limiting form over a quasi-uniform sphere sample, refined by
/// projected gradient descent from the best sample points.
CoercivityResult check_coercive_limit(const PotentialSpec& spec, int sphere_samples = 400);

struct HomogeneityDeviation {
  double lambda = 0.0;
  double value_deviation = 0.0;     // sup |V(lx)/l^r - V_inf(x)|
  double gradient_deviation = 0.0;  // sup |grad V(lx)/l^{r-1} - grad V_inf(x)|
};

std::vector<HomogeneityDeviation> check_near_homogeneous(const PotentialSpec& spec, const std::vector<double>& lambdas,
                                                         int sphere_samples = 200);

/// Deterministic quasi-uniform points on the unit sphere of R^dim.
std::vector<std::vector<double>> sphere_points(std::size_t dim, int count);

}  // namespace oscnet
