#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gtp {

using Point = Eigen::VectorXd;

struct HalfSpace {
  int dim = 2;  // {x_1 > 0}
};
struct Ball {
  double radius = 1.0;  // centered at the origin
  int dim = 2;
};
struct Ellipse2D {
  double a = 2.0;  // semi-axis along x
  double b = 1.0;
};

// Smooth 2D region given by a level function (positive inside) and a
// closed counter-clockwise boundary parametrization on [0, 1).
struct Implicit2D {
  std::function<double(double, double)> level;
  std::function<Eigen::Vector2d(double)> boundary;
  int segments = 4096;
  std::string label = "implicit";
};

struct PolylineData;

class Domain {
 public:
  enum class Kind { HalfSpace, Ball, Ellipse2D, Implicit2D };

  static Domain half_space(int dim);
  static Domain ball(double radius, int dim);
  static Domain ellipse(double a, double b);
  static Domain implicit(Implicit2D region);
  // |x/a|^m + |y/b|^m < 1
  static Domain superellipse(double a, double b, double m, int segments = 4096);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool bounded() const { return kind_ != Kind::HalfSpace; }
  std::string describe() const;

  const HalfSpace& as_half_space() const;
  const Ball& as_ball() const;
  const Ellipse2D& as_ellipse() const;
  const Implicit2D& as_implicit() const;

  bool contains(const Point& x) const;  // closed domain
  // Unsigned distance to the boundary from any point.
  double boundary_distance(const Point& x) const;
  Point nearest_boundary_point(const Point& x) const;
  // Principal curvatures at a boundary point, interior normal convention.
  std::vector<double> curvatures(const Point& y) const;
  // First boundary crossing of the segment x + s (e), s in (0, 1].
  std::optional<double> segment_crossing(const Point& x, const Point& e) const;
  // Axis-aligned bounding box (bounded 2D kinds).
  Eigen::Vector2d box_min() const;
  Eigen::Vector2d box_max() const;
  std::vector<Point> boundary_samples(int n) const;

 private:
  Domain() = default;
  Kind kind_ = Kind::Ball;
  int dim_ = 2;
  HalfSpace half_;
  Ball ball_;
  Ellipse2D ellipse_;
  std::shared_ptr<const Implicit2D> implicit_;
  std::shared_ptr<const PolylineData> polyline_;
};

double distance_to_boundary(const Domain& domain, const Point& x);

struct CurvatureInfo {
  std::vector<double> kappa;
  double pi_gamma = 1.0;
  bool condition_violated = false;  // R kappa_j >= 1 for some j
};
CurvatureInfo curvatures_and_pi(const Domain& domain, const Point& y, double R);

struct TouchingBallConfig {
  Point center;
  double radius = 0.0;
  Point contact;
  std::vector<double> kappa;
  double pi_gamma = 1.0;
};

TouchingBallConfig validate_touching_ball(const Domain& domain, const Point& x, double R,
                                          int sphere_samples = 4096);

double unit_sphere_area(int d);
double ball_volume(int N, double R);

enum class AreaMethod { Auto, MonteCarlo };

struct ParallelArea {
  double area = 0.0;
  double std_error = 0.0;
  bool analytic = true;
};

struct MonteCarloOptions {
  std::uint64_t seed = 12345;
  long samples = 400000;
  double shell_fraction = 0.05;  // shell width relative to s
};

bool has_analytic_parallel_area(const Domain& domain);
ParallelArea parallel_area(const Domain& domain, const TouchingBallConfig& config, double s,
                           AreaMethod method = AreaMethod::Auto, const MonteCarloOptions& mc = {});

// Limit of s^{-(N-1)/2} * area(s) as s -> 0.
double parallel_area_limit(int N, double R, double pi_gamma);

}  // namespace gtp
