#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace gtp {

// p in (1, inf]; infinity is an exact state, not a large number.
class PExponent {
 public:
  static PExponent finite(double p);
  static PExponent infinity();
  // Accepts a decimal number or "inf".
  static PExponent parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  double value() const;
  double conj() const;                // p' = p/(p-1), 1 at infinity
  double alpha(int N) const;          // (N-p)/(p-1); -1 at infinity
  double beta(int N) const;           // alpha/2
  double phi_exponent(int N) const;   // (N+p-2)/(2(p-1)); 1/2 at infinity
  double barrier_constant(int N) const;
  // max and min eigenvalue of (1/p) I + (1 - 2/p) e e^T
  double ellipticity_max() const;
  double ellipticity_min() const;
  std::string str() const;

  bool operator==(const PExponent& o) const {
    return infinite_ == o.infinite_ && (infinite_ || p_ == o.p_);
  }

 private:
  PExponent(double p, bool inf) : p_(p), infinite_(inf) {}
  double p_;
  bool infinite_;
};

double erfc(double x);
double log_erfc(double x);
// e^{x^2} erfc(x) for x >= 0
double erfcx(double x);
double inverse_erfc(double y);
// inverse_erfc(exp(log_y)) without forming exp(log_y); log_y < log 2
double inverse_erfc_log(double log_y);

double gamma(double x);
double log_gamma(double x);

double bessel_j(double nu, double x);
// x^{-nu} J_nu(x), finite at x = 0
double bessel_j_scaled(double nu, double x);
std::vector<double> bessel_zeros(double nu, int n_max);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss rule for weight (1-x)^a (1+x)^b on [-1, 1].
QuadratureRule gauss_jacobi(double a, double b, int n);
QuadratureRule gauss_legendre(int n);
// Nodes theta in (0, pi), weights for the weight (sin theta)^alpha.
QuadratureRule jacobi_quadrature(double alpha, int n);

// log of int_0^pi exp(-w (1 - cos theta)) (sin theta)^alpha d theta.
class ExpSineMoment {
 public:
  explicit ExpSineMoment(double alpha);
  double alpha() const { return alpha_; }
  double log_value(double w) const;
  std::complex<double> log_value(std::complex<double> w) const;

 private:
  template <class T>
  T eval(T w) const;
  double alpha_;
  double a_;  // Jacobi parameter (alpha - 1)/2
  QuadratureRule full64_, full128_, full256_;
  QuadratureRule near_, far_;
};

double erfc_moment(int N, double q);

}  // namespace gtp
