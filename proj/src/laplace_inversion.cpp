#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "gtp/closed_form.hpp"
#include "gtp/errors.hpp"

namespace gtp {

// u(t) = (1/2 pi i) int e^{st} G(s)/s ds along s = mu (1 + i v)^2.
// With mu at the saddle p' d^2 / (4 t^2) the leading exponent st - sqrt(p' s) d
// is real on the whole contour, so the sum can be accumulated in log form.
double log_inverse_laplace_ball(const std::function<std::complex<double>(std::complex<double>)>& scaled_log_ratio,
                                double p_conj, double d, double t) {
  if (!(t > 0)) throw DomainError("inverse Laplace: t must be > 0");
  // log corrections are O(log a) so the leading term is exact to double precision
  const double a_saddle = p_conj * d * d / (4.0 * t);
  if (a_saddle > 1e100) return -a_saddle;
  const double a = std::max(a_saddle, 4.0);
  const double vmax = std::sqrt(42.0 / a);
  const double h = std::min(std::numbers::pi / (7.0 * std::sqrt(a)), 0.1);
  const int K = static_cast<int>(std::ceil(vmax / h));
  const double root = std::sqrt(p_conj * a) / std::sqrt(t);
  // st - z d = a c^2 - b c; b = 2a exactly at the saddle
  const double b = a_saddle >= 4.0 ? 2.0 * a : 2.0 * std::sqrt(a * a_saddle);
  std::vector<std::complex<double>> terms(K + 1);
  double lmax = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= K; ++k) {
    const std::complex<double> c(1.0, k * h);
    const double y = k * h;
    // the factor mu from ds cancels the 1/s
    std::complex<double> L = std::complex<double>(a - b - a * y * y, y * (2.0 * a - b)) + scaled_log_ratio(root * c) -
                             std::log(c);
    if (k == 0) L += std::log(0.5);
    terms[k] = L;
    lmax = std::max(lmax, L.real());
  }
  std::complex<double> sum = 0.0;
  for (const auto& L : terms) sum += std::exp(L - lmax);
  if (!(sum.real() > 0.0) || !std::isfinite(sum.real()))
    throw NumericalError("inverse Laplace: non-positive contour sum");
  return lmax + std::log(sum.real()) + std::log(2.0 * h / std::numbers::pi);
}

}  // namespace gtp
