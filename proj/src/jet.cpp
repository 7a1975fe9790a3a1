#include "jet.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace oscnet::detail {

namespace {

void enumerate(std::size_t dim, int remaining, std::vector<int>& current, std::size_t pos,
               std::vector<std::vector<int>>& out) {
  if (pos == dim) {
    out.push_back(current);
    return;
  }
  for (int a = 0; a <= remaining; ++a) {
    current[pos] = a;
    enumerate(dim, remaining - a, current, pos + 1, out);
  }
  current[pos] = 0;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

JetSpace::JetSpace(std::size_t dim, int degree) : dim_(dim), degree_(degree) {
  std::vector<int> current(dim, 0);
  enumerate(dim, degree, current, 0, indices_);
  std::stable_sort(indices_.begin(), indices_.end(), [](const auto& a, const auto& b) {
    int sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    return sa < sb;
  });
  for (const auto& idx : indices_) {
    int s = 0;
    for (int x : idx) s += x;
    orders_.push_back(s);
  }
  const std::size_t n = indices_.size();
  sum_.assign(n * n, npos);
  std::vector<int> tmp(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (orders_[i] + orders_[j] > degree) continue;
      for (std::size_t d = 0; d < dim; ++d) tmp[d] = indices_[i][d] + indices_[j][d];
      sum_[i * n + j] = find(tmp);
    }
  }
}

std::size_t JetSpace::find(std::span<const int> alpha) const {
  int s = 0;
  for (int a : alpha) s += a;
  if (s > degree_) return npos;
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (orders_[k] == s && std::equal(alpha.begin(), alpha.end(), indices_[k].begin())) return k;
  }
  return npos;
}

std::shared_ptr<const JetSpace> jet_space(std::size_t dim, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = std::make_shared<const JetSpace>(dim, degree);
  return slot;
}

Jet::Jet(std::shared_ptr<const JetSpace> space, double constant)
    : space_(std::move(space)), coeffs_(space_->size(), 0.0) {
  coeffs_[0] = constant;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> space, std::size_t i, double base) {
  Jet j(space, base);
  if (space->degree() >= 1) {
    std::vector<int> alpha(space->dim(), 0);
    alpha[i] = 1;
    j.coeffs_[space->find(alpha)] = 1.0;
  }
  return j;
}

double Jet::derivative(std::span<const int> alpha) const {
  const std::size_t k = space_->find(alpha);
  if (k == JetSpace::npos) return 0.0;
  double weight = 1.0;
  for (int a : alpha) weight *= factorial(a);
  return weight * coeffs_[k];
}

Jet& Jet::operator+=(const Jet& other) {
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::operator+=(double c) {
  coeffs_[0] += c;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.space_);
  const std::size_t n = a.coeffs_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coeffs_[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = a.space_->sum(i, j);
      if (k != JetSpace::npos) out.coeffs_[k] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return out;
}

Jet Jet::pow(unsigned exponent) const {
  Jet result(space_, 1.0);
  Jet base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Jet Jet::compose(std::span<const double> derivatives) const {
  // f(c + d) = sum_k f^(k)(c) d^k / k!, with d nilpotent beyond the truncation degree.
  Jet delta = *this;
  delta.coeffs_[0] = 0.0;
  Jet result(space_, derivatives[0]);
  Jet power(space_, 1.0);
  double k_factorial = 1.0;
  for (int k = 1; k <= space_->degree() && k < static_cast<int>(derivatives.size()); ++k) {
    power = power * delta;
    k_factorial *= k;
    Jet term = power;
    term *= derivatives[k] / k_factorial;
    result += term;
  }
  return result;
}

}  // namespace oscnet::detail
