#include "gtp/specfun.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gtp/errors.hpp"

namespace gtp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
}  // namespace

PExponent PExponent::finite(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must satisfy 1 < p < inf (use infinity())");
  return PExponent(p, false);
}

PExponent PExponent::infinity() { return PExponent(std::numeric_limits<double>::infinity(), true); }

PExponent PExponent::parse(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  s = s.substr(i);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "inf" || s == "infinity" || s == "+inf") return infinity();
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse exponent '" + std::string(text) + "'");
  }
  if (used != s.size()) throw DomainError("cannot parse exponent '" + std::string(text) + "'");
  if (std::isinf(v) && v > 0) return infinity();
  return finite(v);
}

double PExponent::value() const { return p_; }

double PExponent::conj() const { return infinite_ ? 1.0 : p_ / (p_ - 1.0); }

double PExponent::alpha(int N) const { return infinite_ ? -1.0 : (N - p_) / (p_ - 1.0); }

double PExponent::beta(int N) const { return 0.5 * alpha(N); }

double PExponent::phi_exponent(int N) const {
  return infinite_ ? 0.5 : (N + p_ - 2.0) / (2.0 * (p_ - 1.0));
}

double PExponent::barrier_constant(int N) const {
  const double e = std::numbers::e;
  if (infinite_) return std::sqrt(e / 2.0);
  return std::pow(p_ * e / (2.0 * (N + p_ - 2.0)), phi_exponent(N));
}

double PExponent::ellipticity_max() const {
  if (infinite_) return 1.0;
  return std::max(1.0 / p_, 1.0 - 1.0 / p_);
}

double PExponent::ellipticity_min() const {
  if (infinite_) return 0.0;
  return std::min(1.0 / p_, 1.0 - 1.0 / p_);
}

std::string PExponent::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << p_;
  return os.str();
}

double erfc(double x) { return std::erfc(x); }

double erfcx(double x) {
  if (x < 0) throw DomainError("erfcx: x must be >= 0");
  if (x < 5.0) return std::exp(x * x) * std::erfc(x);
  // continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))
  double t = x;
  for (int k = 80; k >= 1; --k) t = x + 0.5 * k / t;
  return kInvSqrtPi / t;
}

double log_erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 1.0) return std::log(std::erfc(x));
  return std::log(erfcx(x)) - x * x;
}

double inverse_erfc_log(double log_y) {
  if (!(log_y < std::log(2.0))) throw DomainError("inverse_erfc: argument must lie in (0, 2)");
  if (std::isinf(log_y)) throw DomainError("inverse_erfc: argument must lie in (0, 2)");
  if (log_y == 0.0) return 0.0;
  if (log_y > 0.0) {
    const double y = std::exp(log_y);
    return -inverse_erfc(2.0 - y);
  }
  // log erfc(x) < -x^2 for x > 0 bounds the root by sqrt(-log_y)
  const double hi = std::sqrt(-log_y) + 1.0;
  auto f = [log_y](double x) {
    const double lx = log_erfc(x);
    // d/dx log erfc(x) = -2 exp(-x^2) / (sqrt(pi) erfc(x))
    const double d = x >= 0 ? -2.0 * kInvSqrtPi / erfcx(x) : -2.0 * kInvSqrtPi * std::exp(-x * x - lx);
    return std::make_pair(lx - log_y, d);
  };
  double guess = std::sqrt(std::max(0.0, -log_y - 0.5 * std::log(kPi * std::max(1.0, -log_y))));
  guess = std::clamp(guess, 0.0, hi);
  std::uintmax_t it = 200;
  return boost::math::tools::newton_raphson_iterate(f, guess, 0.0, hi, 52, it);
}

double inverse_erfc(double y) {
  if (!(y > 0.0 && y < 2.0)) throw DomainError("inverse_erfc: argument must lie in (0, 2)");
  if (y == 1.0) return 0.0;
  if (y > 1.0) return -inverse_erfc(2.0 - y);
  return inverse_erfc_log(std::log(y));
}

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: x must be > 0");
  return std::tgamma(x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: x must be > 0");
  return std::lgamma(x);
}

double bessel_j(double nu, double x) {
  if (!(nu > -1.0)) throw DomainError("bessel_j: order must exceed -1");
  if (x < 0.0) throw DomainError("bessel_j: x must be >= 0");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (x < 1e-3) return std::pow(x, nu) * bessel_j_scaled(nu, x);
  return boost::math::cyl_bessel_j(nu, x);
}

double bessel_j_scaled(double nu, double x) {
  if (!(nu > -1.0)) throw DomainError("bessel_j_scaled: order must exceed -1");
  if (x <= 1.0) {
    // sum_k (-1)^k (x/2)^{2k} / (2^nu k! Gamma(k+nu+1))
    const double q = 0.25 * x * x;
    double term = std::exp(-nu * std::log(2.0) - std::lgamma(nu + 1.0));
    double sum = term;
    for (int k = 1; k < 40; ++k) {
      term *= -q / (k * (k + nu));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return boost::math::cyl_bessel_j(nu, x) * std::pow(x, -nu);
}

std::vector<double> bessel_zeros(double nu, int n_max) {
  if (!(nu > -1.0)) throw DomainError("bessel_zeros: order must exceed -1");
  if (n_max < 1) throw DomainError("bessel_zeros: n_max must be >= 1");
  std::vector<double> zeros;
  zeros.reserve(n_max);
  auto J = [nu](double x) { return bessel_j(nu, x); };
  // J_nu > 0 on (0, j_1); scan finely until the first sign change, then in
  // steps well below the zero spacing (which tends to pi)
  double step = 0.05 * std::min(1.0, nu + 1.0);
  double a = step;
  double fa = J(a);
  const double limit = (n_max + std::abs(nu) + 4.0) * kPi * 1.5 + 10.0;
  while (static_cast<int>(zeros.size()) < n_max) {
    if (a > limit) {
      std::ostringstream os;
      os << "bessel_zeros: bracketing failed for nu=" << nu << " after " << zeros.size()
         << " zeros (scan reached x=" << a << ")";
      throw NumericalError(os.str());
    }
    const double b = a + step;
    const double fb = J(b);
    if (fb == 0.0) {
      zeros.push_back(b);
      a = b + 1e-9;
      fa = J(a);
      step = kPi / 4;
      continue;
    }
    if ((fa < 0) != (fb < 0)) {
      std::uintmax_t it = 100;
      auto r = boost::math::tools::toms748_solve(J, a, b, fa, fb,
                                                 boost::math::tools::eps_tolerance<double>(52), it);
      zeros.push_back(0.5 * (r.first + r.second));
      step = kPi / 4;
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

QuadratureRule gauss_jacobi(double a, double b, int n) {
  if (!(a > -1.0) || !(b > -1.0)) throw DomainError("gauss_jacobi: parameters must exceed -1");
  if (n < 1) throw DomainError("gauss_jacobi: n must be >= 1");
  const double s = a + b;
  Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag[k] = (b - a) / (s + 2.0);
    } else {
      const double d = 2.0 * k + s;
      diag[k] = (b * b - a * a) / (d * (d + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    double v;
    if (k == 1) {
      v = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      const double d = 2.0 * k + s;
      v = 4.0 * k * (k + a) * (k + b) * (k + s) / (d * d * (d + 1.0) * (d - 1.0));
    }
    off[k - 1] = std::sqrt(v);
  }
  const double log_mu0 = (s + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                         std::lgamma(s + 2.0);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = std::exp(log_mu0);
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::VectorXd sub = off.head(n - 1);
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("gauss_jacobi: eigen solve failed");
  const double mu0 = std::exp(log_mu0);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(0.0, 0.0, n); }

QuadratureRule jacobi_quadrature(double alpha, int n) {
  if (!(alpha > -1.0)) throw DomainError("jacobi_quadrature: alpha must exceed -1");
  const double a = 0.5 * (alpha - 1.0);
  QuadratureRule r = gauss_jacobi(a, a, n);
  for (auto& x : r.nodes) x = 2.0 * std::asin(std::sqrt(std::clamp(0.5 * (1.0 - x), 0.0, 1.0)));
  return r;
}

namespace {
constexpr double kSplitDecay = 40.0;
}

ExpSineMoment::ExpSineMoment(double alpha) : alpha_(alpha), a_(0.5 * (alpha - 1.0)) {
  if (!(alpha > -1.0)) throw DomainError("ExpSineMoment: alpha must exceed -1");
  full64_ = gauss_jacobi(a_, a_, 64);
  full128_ = gauss_jacobi(a_, a_, 128);
  full256_ = gauss_jacobi(a_, a_, 256);
  near_ = gauss_jacobi(0.0, a_, 128);
  far_ = gauss_jacobi(0.0, a_, 64);
}

template <class T>
T ExpSineMoment::eval(T w) const {
  using std::abs;
  using std::exp;
  using std::log;
  using std::pow;
  const double re = std::real(w);
  const double mag = abs(w);
  if (re < 0.0) throw DomainError("ExpSineMoment: Re w must be >= 0");
  if (re <= 0.5 * kSplitDecay) {
    const QuadratureRule* r = nullptr;
    if (mag <= 20.0)
      r = &full64_;
    else if (mag <= 60.0)
      r = &full128_;
    else if (mag <= 150.0)
      r = &full256_;
    else
      throw NumericalError("ExpSineMoment: oscillatory argument beyond supported range");
    T sum = T(0);
    for (size_t i = 0; i < r->nodes.size(); ++i) sum += r->weights[i] * exp(-w * (1.0 - r->nodes[i]));
    return log(sum);
  }
  // split at 1 - c: the weight (1-x)^a sits in the Gauss rule near x = 1
  const double c = kSplitDecay / re;
  T near = T(0);
  for (size_t i = 0; i < near_.nodes.size(); ++i) {
    const double tau = 0.5 * (1.0 + near_.nodes[i]);
    near += near_.weights[i] * std::pow(2.0 - c * tau, a_) * exp(-w * (c * tau));
  }
  const double log_near_scale = (a_ + 1.0) * std::log(c) - (a_ + 1.0) * std::log(2.0);
  T far = T(0);
  const double half = 0.5 * (2.0 - c);
  for (size_t i = 0; i < far_.nodes.size(); ++i) {
    const double one_minus_x = 2.0 - half * (1.0 + far_.nodes[i]);
    far += far_.weights[i] * std::pow(one_minus_x, a_) * exp(-w * one_minus_x);
  }
  const double log_far_scale = (a_ + 1.0) * std::log(half);
  const T far_rel = far * std::exp(log_far_scale - log_near_scale);
  return log_near_scale + log(near + far_rel);
}

double ExpSineMoment::log_value(double w) const {
  if (!(w >= 0.0)) throw DomainError("ExpSineMoment: w must be >= 0");
  return eval<double>(w);
}

std::complex<double> ExpSineMoment::log_value(std::complex<double> w) const {
  return eval<std::complex<double>>(w);
}

double erfc_moment(int N, double q) {
  if (N < 2) throw DomainError("erfc_moment: N must be >= 2");
  if (!(q > 1.0) || !std::isfinite(q)) throw DomainError("erfc_moment: q must satisfy 1 < q < inf");
  const double k = 0.5 * (N - 1);
  auto log_f = [=](double s) { return (q - 1.0) * log_erfc(s) + k * std::log(s); };
  double smax = 1.0;
  while (log_f(smax) > -40.0) smax *= 1.25;
  auto f = [=](double s) { return s <= 0.0 ? 0.0 : std::exp(log_f(s)); };
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  const double value = ts.integrate(f, 0.0, smax, 1e-14, &err);
  // log f is concave past its peak; tail <= f(smax) / |d log f / ds|
  const double slope = (q - 1.0) * 2.0 * smax - k / smax;
  if (!(slope > 0.0)) throw NumericalError("erfc_moment: tail bound unavailable");
  const double tail = std::exp(log_f(smax)) / slope;
  if (!(tail <= 1e-12 * value)) throw NumericalError("erfc_moment: tail bound exceeded");
  return value;
}

}  // namespace gtp
