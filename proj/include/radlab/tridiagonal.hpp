#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace radlab {

class TridiagonalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves sub[i] x[i-1] + diag[i] x[i] + super[i] x[i+1] = rhs[i] by the
/// Thomas algorithm.  sub[0] and super[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& sub,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& super,
                                             std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || super.size() != n || rhs.size() != n)
    throw std::invalid_argument("tridiagonal bands must have equal length");
  if (n == 0) return rhs;
  std::vector<double> c(n);
  double pivot = diag[0];
  if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot))
    throw TridiagonalFailure("zero pivot in row 0");
  c[0] = super[0] / pivot;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - sub[i] * c[i - 1];
    if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot))
      throw TridiagonalFailure("zero pivot in row " + std::to_string(i));
    c[i] = super[i] / pivot;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  for (double x : rhs)
    if (!std::isfinite(x)) throw TridiagonalFailure("non-finite tridiagonal solution");
  return rhs;
}

}  // namespace radlab
