#include "fedgame/duration_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fedgame/errors.hpp"

namespace fedgame {

DurationModel::DurationModel(std::vector<double> coefficients, int max_k, double d_cap,
                             FitMode mode, std::uint64_t seed)
    : coefficients_(std::move(coefficients)),
      max_k_(max_k),
      d_cap_(d_cap),
      mode_(mode),
      seed_(seed) {
  if (coefficients_.empty()) throw InvalidArgument("duration model needs a coefficient");
  if (max_k_ < 1) throw InvalidArgument(fmt::format("duration model max_k {} < 1", max_k_));
  if (!(d_cap_ >= kFloor)) {
    throw InvalidArgument(fmt::format("duration cap {} below floor {}", d_cap_, kFloor));
  }
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw InvalidArgument("non-finite duration coefficient");
  }
}

DurationModel DurationModel::constant(int max_k, double value) {
  return DurationModel({value}, max_k, std::max(value, kFloor));
}

DurationModel DurationModel::interpolate(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidArgument("interpolation needs at least two values");

  // Newton divided differences on nodes 0..n-1, then expand to monomials.
  std::vector<double> dd(values.begin(), values.end());
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / static_cast<double>(level);
    }
  }
  std::vector<double> coeffs(n, 0.0);
  std::vector<double> basis{1.0};  // prod_{j<i} (k - j)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) coeffs[j] += dd[i] * basis[j];
    std::vector<double> next(basis.size() + 1, 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      next[j + 1] += basis[j];
      next[j] -= static_cast<double>(i) * basis[j];
    }
    basis = std::move(next);
  }
  const double cap = std::max(*std::max_element(values.begin(), values.end()), kFloor);
  return DurationModel(std::move(coeffs), static_cast<int>(n) - 1, cap);
}

double DurationModel::eval(double k) const {
  if (!(k >= 0.0 && k <= static_cast<double>(max_k_))) {
    throw DomainError(fmt::format("participant count {} outside [0, {}]", k, max_k_));
  }
  double v = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) v = v * k + *it;
  return std::clamp(v, kFloor, d_cap_);
}

std::vector<double> DurationModel::tabulate(int n) const {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = eval(k);
  return out;
}

DurationModel DurationModel::shifted(double offset) const {
  auto coeffs = coefficients_;
  coeffs[0] += offset;
  return DurationModel(std::move(coeffs), max_k_, d_cap_ + offset, mode_, seed_);
}

}  // namespace fedgame
