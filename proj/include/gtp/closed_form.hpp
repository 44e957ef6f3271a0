#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gtp/geometry.hpp"
#include "gtp/specfun.hpp"

namespace gtp {

// Evaluator (x, t) -> u with a native log-domain path.
class ScalarField {
 public:
  ScalarField(PExponent p, std::optional<Domain> domain) : p_(p), domain_(std::move(domain)) {}
  virtual ~ScalarField() = default;

  virtual double value(const Point& x, double t) const;
  virtual double log_value(const Point& x, double t) const = 0;

  // Fields that depend on z only through d(z) expose that profile.
  virtual bool has_distance_profile() const { return false; }
  virtual double profile_value(double d, double t) const;
  virtual double profile_log_value(double d, double t) const;

  const PExponent& p() const { return p_; }
  const std::optional<Domain>& domain() const { return domain_; }
  int dim() const;

 protected:
  PExponent p_;
  std::optional<Domain> domain_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

class ConstantField : public ScalarField {
 public:
  ConstantField(double c, PExponent p, std::optional<Domain> domain)
      : ScalarField(p, std::move(domain)), c_(c) {}
  double value(const Point&, double) const override { return c_; }
  double log_value(const Point&, double) const override;
  bool has_distance_profile() const override { return true; }
  double profile_value(double, double) const override { return c_; }
  double profile_log_value(double, double) const override;

 private:
  double c_;
};

// erfc(sqrt(p'/(4t)) x_1) on {x_1 > 0}
class HalfSpaceSolution : public ScalarField {
 public:
  HalfSpaceSolution(PExponent p, int N);
  double value(const Point& x, double t) const override;
  double log_value(const Point& x, double t) const override;
  bool has_distance_profile() const override { return true; }
  double profile_value(double d, double t) const override;
  double profile_log_value(double d, double t) const override;
};

// erfc(sqrt(p'/(4t)) d(z) + shift(t)), the profile used in content sandwiches.
class ErfcProfileField : public ScalarField {
 public:
  ErfcProfileField(PExponent p, Domain domain, std::function<double(double)> shift);
  double log_value(const Point& x, double t) const override;
  bool has_distance_profile() const override { return true; }
  double profile_value(double d, double t) const override;
  double profile_log_value(double d, double t) const override;

 private:
  std::function<double(double)> shift_;
};

// Radial ball problem u_t = Lu, u(.,0) = 0, u = 1 on |x| = R.
class BallParabolic : public ScalarField {
 public:
  struct Options {
    int max_zeros = 2000;
    // inversion is used once p' d^2 / (4 t) exceeds this
    double inversion_threshold = 12.0;
  };
  BallParabolic(PExponent p, double R, int N);
  BallParabolic(PExponent p, double R, int N, Options opt);

  double value(const Point& x, double t) const override;
  double log_value(const Point& x, double t) const override;
  bool has_distance_profile() const override { return true; }
  double profile_value(double d, double t) const override;
  double profile_log_value(double d, double t) const override;

  double radial_log_value(double r, double t) const;
  double radial_value(double r, double t) const;
  // Eigenfunction series only; throws SeriesRegimeExceeded below t_min().
  double series_value(double r, double t) const;
  // Contour inversion of the Laplace transform only.
  double inversion_log_value(double r, double t) const;
  double t_min() const { return t_min_; }
  double radius() const { return R_; }
  int N() const { return N_; }
  // erfc barrier interval for a given argument shift.
  static std::pair<double, double> erfc_sandwich(const PExponent& p, double d, double t, double shift);

 private:
  bool use_series(double d, double t) const;
  // log of the transformed profile plus z (R - r)
  std::complex<double> scaled_log_transform_ratio(std::complex<double> z, double r) const;
  double R_;
  int N_;
  Options opt_;
  double beta_ = 0.0;
  std::shared_ptr<const std::vector<double>> zeros_;
  std::vector<double> coef_;
  std::shared_ptr<const ExpSineMoment> moment_;
  double t_min_ = 0.0;
};

// Stationary radial solution of u - eps^2 Lu = 0 on the ball, u = 1 on the sphere.
class BallElliptic {
 public:
  BallElliptic(PExponent p, double R, int N, double eps);
  double value(const Point& x) const;
  double log_value(const Point& x) const;
  double radial_log_value(double r) const;
  const PExponent& p() const { return p_; }
  double eps() const { return eps_; }
  double radius() const { return R_; }

 private:
  PExponent p_;
  double R_;
  int N_;
  double eps_;
  std::shared_ptr<const ExpSineMoment> moment_;
};

// Self-similar solution on R^N.
class GlobalPhi : public ScalarField {
 public:
  GlobalPhi(PExponent p, int N);
  double log_value(const Point& x, double t) const override;
  double exponent() const { return p_.phi_exponent(N_); }

 private:
  int N_;
};

class BarrierBelow : public ScalarField {
 public:
  BarrierBelow(PExponent p, Domain domain, Point z);
  double log_value(const Point& x, double t) const override;
  double exterior_distance() const { return dz_; }

 private:
  GlobalPhi phi_;
  Point z_;
  double dz_;
  double log_scale_;
};

class BarrierAbove : public ScalarField {
 public:
  BarrierAbove(PExponent p, Domain domain);
  double log_value(const Point& x, double t) const override;
  bool has_distance_profile() const override { return true; }
  double profile_value(double d, double t) const override;
  double profile_log_value(double d, double t) const override;

 private:
  BallParabolic unit_;
};

// v = (2 sqrt(t) / sqrt(p')) erfc^{-1}(u)
class VTransform : public ScalarField {
 public:
  explicit VTransform(FieldPtr field);
  double value(const Point& x, double t) const override;
  double log_value(const Point& x, double t) const override;
  static double from_log(const PExponent& p, double log_u, double t);

 private:
  FieldPtr field_;
};

FieldPtr half_space_solution(PExponent p, int N = 2);
std::shared_ptr<const BallParabolic> ball_parabolic(PExponent p, double R, int N);
BallElliptic ball_elliptic(PExponent p, double R, int N, double eps);
FieldPtr global_phi(PExponent p, int N);
FieldPtr barrier_below(PExponent p, const Domain& domain, const Point& z);
FieldPtr barrier_above(PExponent p, const Domain& domain);
FieldPtr v_transform(FieldPtr field);

// Shared, immutable tables of Bessel zeros keyed by order.
std::shared_ptr<const std::vector<double>> bessel_zero_table(double nu, int n);

// Bromwich inversion on a parabolic contour for the radial ball problem.
// scaled_log_ratio(z) must return log of the transformed profile at z = sqrt(p' s) plus z d.
double log_inverse_laplace_ball(const std::function<std::complex<double>(std::complex<double>)>& scaled_log_ratio,
                                double p_conj, double d, double t);

}  // namespace gtp
