#include "gtp/closed_form.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gtp/errors.hpp"

namespace gtp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSeriesDecay = 50.0;
}  // namespace

double ScalarField::value(const Point& x, double t) const { return std::exp(log_value(x, t)); }

double ScalarField::profile_value(double d, double t) const { return std::exp(profile_log_value(d, t)); }

double ScalarField::profile_log_value(double, double) const {
  throw DomainError("field does not depend on the boundary distance alone");
}

int ScalarField::dim() const { return domain_ ? domain_->dim() : 0; }

double ConstantField::log_value(const Point&, double) const { return c_ > 0 ? std::log(c_) : kNegInf; }
double ConstantField::profile_log_value(double, double) const { return c_ > 0 ? std::log(c_) : kNegInf; }

HalfSpaceSolution::HalfSpaceSolution(PExponent p, int N) : ScalarField(p, Domain::half_space(N)) {}

double HalfSpaceSolution::profile_value(double d, double t) const {
  if (d <= 0.0) return 1.0;
  if (t <= 0.0) return 0.0;
  return erfc(std::sqrt(p_.conj() / (4.0 * t)) * d);
}

double HalfSpaceSolution::profile_log_value(double d, double t) const {
  if (d <= 0.0) return 0.0;
  if (t <= 0.0) return kNegInf;
  return log_erfc(std::sqrt(p_.conj() / (4.0 * t)) * d);
}

double HalfSpaceSolution::value(const Point& x, double t) const {
  if (x[0] < 0.0) throw DomainError("half-space solution: x_1 must be >= 0");
  return profile_value(x[0], t);
}

double HalfSpaceSolution::log_value(const Point& x, double t) const {
  if (x[0] < 0.0) throw DomainError("half-space solution: x_1 must be >= 0");
  return profile_log_value(x[0], t);
}

ErfcProfileField::ErfcProfileField(PExponent p, Domain domain, std::function<double(double)> shift)
    : ScalarField(p, std::move(domain)), shift_(std::move(shift)) {}

double ErfcProfileField::profile_value(double d, double t) const {
  return erfc(std::sqrt(p_.conj() / (4.0 * t)) * d + shift_(t));
}

double ErfcProfileField::profile_log_value(double d, double t) const {
  return log_erfc(std::sqrt(p_.conj() / (4.0 * t)) * d + shift_(t));
}

double ErfcProfileField::log_value(const Point& x, double t) const {
  return profile_log_value(distance_to_boundary(*domain_, x), t);
}

std::shared_ptr<const std::vector<double>> bessel_zero_table(double nu, int n) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nu);
  if (it != cache.end() && static_cast<int>(it->second->size()) >= n) return it->second;
  auto table = std::make_shared<const std::vector<double>>(bessel_zeros(nu, n));
  cache[nu] = table;
  return table;
}

BallParabolic::BallParabolic(PExponent p, double R, int N) : BallParabolic(p, R, N, Options{}) {}

BallParabolic::BallParabolic(PExponent p, double R, int N, Options opt)
    : ScalarField(p, Domain::ball(R, N)), R_(R), N_(N), opt_(opt) {
  if (opt_.max_zeros < 10) throw DomainError("ball_parabolic: need at least 10 zeros");
  double gmax;
  if (p.is_infinite()) {
    beta_ = -0.5;
    gmax = (opt_.max_zeros - 0.5) * std::numbers::pi;
  } else {
    beta_ = p.beta(N);
    zeros_ = bessel_zero_table(beta_, opt_.max_zeros);
    coef_.reserve(zeros_->size());
    for (int n = 0; n < opt_.max_zeros; ++n) {
      const double g = (*zeros_)[n];
      coef_.push_back(2.0 / (g * bessel_j(beta_ + 1.0, g)));
    }
    gmax = (*zeros_)[opt_.max_zeros - 1];
    moment_ = std::make_shared<ExpSineMoment>(p.alpha(N));
  }
  t_min_ = kSeriesDecay * p.conj() * R * R / (gmax * gmax);
}

double BallParabolic::series_value(double r, double t) const {
  if (r < 0 || r > R_ * (1 + 1e-12)) throw DomainError("ball_parabolic: radius outside the ball");
  if (r >= R_) return 1.0;
  if (t <= 0.0) return 0.0;
  if (t < t_min_) {
    std::ostringstream os;
    os << "series regime exceeded: t = " << t << " below t_min = " << t_min_
       << "; use the erfc barrier interval";
    throw SeriesRegimeExceeded(os.str());
  }
  const double scale = t / (p_.conj() * R_ * R_);
  double sum = 0.0;
  if (p_.is_infinite()) {
    for (int n = 1; n <= opt_.max_zeros; ++n) {
      const double g = (n - 0.5) * std::numbers::pi;
      const double e = g * g * scale;
      if (e > kSeriesDecay) break;
      const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
      sum += sgn / (2 * n - 1) * std::exp(-e) * std::cos(g * r / R_);
    }
    return 1.0 - 4.0 / std::numbers::pi * sum;
  }
  const double ratio = r / R_;
  for (int n = 0; n < opt_.max_zeros; ++n) {
    const double g = (*zeros_)[n];
    const double e = g * g * scale;
    if (e > kSeriesDecay) break;
    const double x = g * ratio;
    double phi;
    if (x <= 1.0)
      phi = std::pow(g, beta_) * bessel_j_scaled(beta_, x);
    else
      phi = bessel_j(beta_, x) * std::pow(ratio, -beta_);
    sum += coef_[n] * std::exp(-e) * phi;
  }
  return 1.0 - sum;
}

std::complex<double> BallParabolic::scaled_log_transform_ratio(std::complex<double> z, double r) const {
  if (p_.is_infinite()) return std::log(1.0 + std::exp(-2.0 * z * r)) - std::log(1.0 + std::exp(-2.0 * z * R_));
  return moment_->log_value(z * r) - moment_->log_value(z * R_);
}

double BallParabolic::inversion_log_value(double r, double t) const {
  if (r < 0 || r > R_ * (1 + 1e-12)) throw DomainError("ball_parabolic: radius outside the ball");
  if (r >= R_) return 0.0;
  if (t <= 0.0) return kNegInf;
  auto f = [this, r](std::complex<double> z) { return scaled_log_transform_ratio(z, r); };
  return log_inverse_laplace_ball(f, p_.conj(), R_ - r, t);
}

bool BallParabolic::use_series(double d, double t) const {
  return t >= t_min_ && p_.conj() * d * d / (4.0 * t) <= opt_.inversion_threshold;
}

double BallParabolic::radial_log_value(double r, double t) const {
  if (r < 0 || r > R_ * (1 + 1e-12)) throw DomainError("ball_parabolic: radius outside the ball");
  if (r >= R_) return 0.0;
  if (t <= 0.0) return kNegInf;
  if (use_series(R_ - r, t)) {
    const double v = series_value(r, t);
    if (v > 1e-200) return std::log(v);
  }
  return inversion_log_value(r, t);
}

double BallParabolic::radial_value(double r, double t) const {
  if (r < 0 || r > R_ * (1 + 1e-12)) throw DomainError("ball_parabolic: radius outside the ball");
  if (r >= R_) return 1.0;
  if (t <= 0.0) return 0.0;
  if (use_series(R_ - r, t)) {
    const double v = series_value(r, t);
    if (v > 1e-200) return v;
  }
  return std::exp(inversion_log_value(r, t));
}

double BallParabolic::value(const Point& x, double t) const { return radial_value(x.norm(), t); }
double BallParabolic::log_value(const Point& x, double t) const { return radial_log_value(x.norm(), t); }

double BallParabolic::profile_value(double d, double t) const {
  return radial_value(std::max(0.0, R_ - d), t);
}
double BallParabolic::profile_log_value(double d, double t) const {
  return radial_log_value(std::max(0.0, R_ - d), t);
}

std::pair<double, double> BallParabolic::erfc_sandwich(const PExponent& p, double d, double t, double shift) {
  const double arg = std::sqrt(p.conj() / (4.0 * t)) * d;
  return {erfc(arg + shift), erfc(arg - shift)};
}

BallElliptic::BallElliptic(PExponent p, double R, int N, double eps) : p_(p), R_(R), N_(N), eps_(eps) {
  if (!(eps > 0)) throw DomainError("ball_elliptic: eps must be > 0");
  if (!(R > 0)) throw DomainError("ball_elliptic: R must be > 0");
  if (N < 2) throw DomainError("ball_elliptic: N must be >= 2");
  if (!p.is_infinite()) moment_ = std::make_shared<ExpSineMoment>(p.alpha(N));
}

double BallElliptic::radial_log_value(double r) const {
  if (r < 0 || r > R_ * (1 + 1e-12)) throw DomainError("ball_elliptic: radius outside the ball");
  if (r >= R_) return 0.0;
  const double a = std::sqrt(p_.conj()) / eps_;
  const double lead = -a * (R_ - r);
  if (p_.is_infinite()) return lead + std::log1p(std::exp(-2 * a * r)) - std::log1p(std::exp(-2 * a * R_));
  return lead + moment_->log_value(a * r) - moment_->log_value(a * R_);
}

double BallElliptic::log_value(const Point& x) const { return radial_log_value(x.norm()); }
double BallElliptic::value(const Point& x) const { return std::exp(log_value(x)); }

GlobalPhi::GlobalPhi(PExponent p, int N) : ScalarField(p, std::nullopt), N_(N) {
  if (N < 1) throw DomainError("global_phi: N must be >= 1");
}

double GlobalPhi::log_value(const Point& x, double t) const {
  if (!(t > 0)) throw DomainError("global_phi: t must be > 0");
  return -exponent() * std::log(t) - p_.conj() * x.squaredNorm() / (4.0 * t);
}

BarrierBelow::BarrierBelow(PExponent p, Domain domain, Point z)
    : ScalarField(p, domain), phi_(p, domain.dim()), z_(std::move(z)) {
  if (domain.contains(z_)) throw DomainError("barrier_below: z must lie outside the closed domain");
  dz_ = domain.boundary_distance(z_);
  const int N = domain.dim();
  log_scale_ = std::log(p.barrier_constant(N)) + 2.0 * p.phi_exponent(N) * std::log(dz_);
}

double BarrierBelow::log_value(const Point& x, double t) const {
  return log_scale_ + phi_.log_value(x - z_, t);
}

BarrierAbove::BarrierAbove(PExponent p, Domain domain)
    : ScalarField(p, domain), unit_(p, 1.0, domain.dim()) {}

double BarrierAbove::profile_log_value(double d, double t) const {
  if (d <= 0.0) return 0.0;
  return unit_.radial_log_value(0.0, t / (d * d));
}

double BarrierAbove::profile_value(double d, double t) const {
  if (d <= 0.0) return 1.0;
  return unit_.radial_value(0.0, t / (d * d));
}

double BarrierAbove::log_value(const Point& x, double t) const {
  return profile_log_value(distance_to_boundary(*domain_, x), t);
}

VTransform::VTransform(FieldPtr field) : ScalarField(field->p(), field->domain()), field_(std::move(field)) {}

double VTransform::from_log(const PExponent& p, double log_u, double t) {
  if (!(t > 0)) throw DomainError("v_transform: t must be > 0");
  if (std::isnan(log_u) || log_u > 0.0 || std::isinf(log_u))
    throw DomainError("v_transform: field value must lie in (0, 1]");
  if (log_u == 0.0) return 0.0;
  return 2.0 * std::sqrt(t / p.conj()) * inverse_erfc_log(log_u);
}

double VTransform::value(const Point& x, double t) const { return from_log(p_, field_->log_value(x, t), t); }
double VTransform::log_value(const Point& x, double t) const { return std::log(value(x, t)); }

FieldPtr half_space_solution(PExponent p, int N) { return std::make_shared<HalfSpaceSolution>(p, N); }
std::shared_ptr<const BallParabolic> ball_parabolic(PExponent p, double R, int N) {
  return std::make_shared<BallParabolic>(p, R, N);
}
BallElliptic ball_elliptic(PExponent p, double R, int N, double eps) { return BallElliptic(p, R, N, eps); }
FieldPtr global_phi(PExponent p, int N) { return std::make_shared<GlobalPhi>(p, N); }
FieldPtr barrier_below(PExponent p, const Domain& domain, const Point& z) {
  return std::make_shared<BarrierBelow>(p, domain, z);
}
FieldPtr barrier_above(PExponent p, const Domain& domain) { return std::make_shared<BarrierAbove>(p, domain); }
FieldPtr v_transform(FieldPtr field) { return std::make_shared<VTransform>(std::move(field)); }

}  // namespace gtp
