#include "gtp/geometry.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gtp/errors.hpp"
#include "gtp/specfun.hpp"

namespace gtp {

namespace {

constexpr double kPi = std::numbers::pi;

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b, Eigen::Vector2d* closest = nullptr) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const Eigen::Vector2d c = a + s * ab;
  if (closest) *closest = c;
  return (p - c).norm();
}

}  // namespace

// Uniform bucket grid over polyline segments for nearest-segment queries.
class SegmentIndex {
 public:
  explicit SegmentIndex(const std::vector<Eigen::Vector2d>& poly) : poly_(poly) {
    lo_ = hi_ = poly[0];
    for (const auto& v : poly) {
      lo_ = lo_.cwiseMin(v);
      hi_ = hi_.cwiseMax(v);
    }
    const double ext = std::max(hi_.x() - lo_.x(), hi_.y() - lo_.y());
    cell_ = ext / 64.0;
    nx_ = static_cast<int>((hi_.x() - lo_.x()) / cell_) + 1;
    ny_ = static_cast<int>((hi_.y() - lo_.y()) / cell_) + 1;
    cells_.assign(static_cast<size_t>(nx_) * ny_, {});
    const int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k) {
      const auto& a = poly[k];
      const auto& b = poly[(k + 1) % n];
      const int i0 = cx(std::min(a.x(), b.x())), i1 = cx(std::max(a.x(), b.x()));
      const int j0 = cy(std::min(a.y(), b.y())), j1 = cy(std::max(a.y(), b.y()));
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) cells_[static_cast<size_t>(j) * nx_ + i].push_back(k);
    }
  }

  double nearest(const Eigen::Vector2d& p, Eigen::Vector2d* closest) const {
    const int n = static_cast<int>(poly_.size());
    const Eigen::Vector2d q = p.cwiseMax(lo_).cwiseMin(hi_);
    const double outside = (p - q).norm();
    const int ic = cx(q.x()), jc = cy(q.y());
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector2d best_pt = poly_[0];
    const int rmax = std::max(nx_, ny_);
    for (int r = 0; r <= rmax; ++r) {
      for (int i = ic - r; i <= ic + r; ++i) {
        for (int j = jc - r; j <= jc + r; ++j) {
          if (std::max(std::abs(i - ic), std::abs(j - jc)) != r) continue;
          if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
          for (int k : cells_[static_cast<size_t>(j) * nx_ + i]) {
            Eigen::Vector2d c;
            const double d = point_segment_distance(p, poly_[k], poly_[(k + 1) % n], &c);
            if (d < best) {
              best = d;
              best_pt = c;
            }
          }
        }
      }
      if (best <= outside + r * cell_) break;
    }
    if (closest) *closest = best_pt;
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>((x - lo_.x()) / cell_), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - lo_.y()) / cell_), 0, ny_ - 1); }
  const std::vector<Eigen::Vector2d>& poly_;
  Eigen::Vector2d lo_, hi_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

namespace {

// nearest point on the ellipse boundary, parametrized by theta
double ellipse_nearest_theta(const Ellipse2D& e, double x0, double y0) {
  auto D = [&](double th) {
    const double dx = x0 - e.a * std::cos(th), dy = y0 - e.b * std::sin(th);
    return dx * dx + dy * dy;
  };
  const int M = 64;
  int best = 0;
  double best_v = D(0.0);
  std::vector<double> vals(M);
  for (int i = 0; i < M; ++i) {
    vals[i] = D(2 * kPi * i / M);
    if (vals[i] < best_v) {
      best_v = vals[i];
      best = i;
    }
  }
  double th_best = 2 * kPi * best / M;
  double d_best = best_v;
  // refine every local minimum of the coarse samples
  for (int i = 0; i < M; ++i) {
    const double v = vals[i];
    if (v > vals[(i + M - 1) % M] || v > vals[(i + 1) % M]) continue;
    const double lo = 2 * kPi * (i - 1) / M, hi = 2 * kPi * (i + 1) / M;
    auto r = boost::math::tools::brent_find_minima(D, lo, hi, 52);
    double th = r.first;
    // Newton polish on the stationarity condition
    for (int k = 0; k < 3; ++k) {
      const double s = std::sin(th), c = std::cos(th);
      const double g = -e.a * x0 * s + e.b * y0 * c + (e.a * e.a - e.b * e.b) * s * c;
      const double dg = -e.a * x0 * c - e.b * y0 * s + (e.a * e.a - e.b * e.b) * (c * c - s * s);
      if (dg == 0.0) break;
      const double nt = th - g / dg;
      if (std::abs(nt - th) > 1e-3) break;
      if (D(nt) <= D(th)) th = nt;
    }
    if (D(th) < d_best) {
      d_best = D(th);
      th_best = th;
    }
  }
  return th_best;
}

double implicit_curvature(const Implicit2D& r, double x, double y) {
  const double h = 1e-4;
  const auto& f = r.level;
  const double fx = (f(x + h, y) - f(x - h, y)) / (2 * h);
  const double fy = (f(x, y + h) - f(x, y - h)) / (2 * h);
  const double f0 = f(x, y);
  const double fxx = (f(x + h, y) - 2 * f0 + f(x - h, y)) / (h * h);
  const double fyy = (f(x, y + h) - 2 * f0 + f(x, y - h)) / (h * h);
  const double fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
  const double g = std::hypot(fx, fy);
  return -(fxx * fy * fy - 2 * fx * fy * fxy + fyy * fx * fx) / (g * g * g);
}

std::vector<Point> sphere_points(int N, const Point& center, double R, int M) {
  std::vector<Point> pts;
  pts.reserve(M);
  if (N == 2) {
    for (int k = 0; k < M; ++k) {
      const double th = 2 * kPi * k / M;
      Point z = center;
      z[0] += R * std::cos(th);
      z[1] += R * std::sin(th);
      pts.push_back(z);
    }
  } else if (N == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < M; ++k) {
      const double zc = 1.0 - 2.0 * (k + 0.5) / M;
      const double rr = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      const double th = golden * k;
      Point z = center;
      z[0] += R * rr * std::cos(th);
      z[1] += R * rr * std::sin(th);
      z[2] += R * zc;
      pts.push_back(z);
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g;
    for (int k = 0; k < M; ++k) {
      Point v(N);
      for (int i = 0; i < N; ++i) v[i] = g(rng);
      pts.push_back(center + R * v / v.norm());
    }
  }
  return pts;
}

}  // namespace

struct PolylineData {
  explicit PolylineData(std::vector<Eigen::Vector2d> p) : poly(std::move(p)), index(poly) {}
  std::vector<Eigen::Vector2d> poly;
  SegmentIndex index;
};

Domain Domain::half_space(int dim) {
  if (dim < 2) throw DomainError("half_space: dimension must be >= 2");
  Domain d;
  d.kind_ = Kind::HalfSpace;
  d.dim_ = dim;
  d.half_.dim = dim;
  return d;
}

Domain Domain::ball(double radius, int dim) {
  if (!(radius > 0)) throw DomainError("ball: radius must be > 0");
  if (dim < 2) throw DomainError("ball: dimension must be >= 2");
  Domain d;
  d.kind_ = Kind::Ball;
  d.dim_ = dim;
  d.ball_ = {radius, dim};
  return d;
}

Domain Domain::ellipse(double a, double b) {
  if (!(a > 0 && b > 0)) throw DomainError("ellipse: semi-axes must be > 0");
  Domain d;
  d.kind_ = Kind::Ellipse2D;
  d.dim_ = 2;
  d.ellipse_ = {a, b};
  return d;
}

Domain Domain::implicit(Implicit2D region) {
  if (!region.level || !region.boundary) throw DomainError("implicit: level and boundary required");
  if (region.segments < 16) throw DomainError("implicit: need at least 16 segments");
  Domain d;
  d.kind_ = Kind::Implicit2D;
  d.dim_ = 2;
  std::vector<Eigen::Vector2d> poly;
  poly.reserve(region.segments);
  for (int k = 0; k < region.segments; ++k)
    poly.push_back(region.boundary(static_cast<double>(k) / region.segments));
  d.polyline_ = std::make_shared<const PolylineData>(std::move(poly));
  d.implicit_ = std::make_shared<const Implicit2D>(std::move(region));
  return d;
}

Domain Domain::superellipse(double a, double b, double m, int segments) {
  if (!(a > 0 && b > 0 && m >= 2)) throw DomainError("superellipse: need a, b > 0 and m >= 2");
  Implicit2D r;
  r.level = [=](double x, double y) {
    return 1.0 - std::pow(std::pow(std::abs(x / a), m) + std::pow(std::abs(y / b), m), 1.0 / m);
  };
  r.boundary = [=](double s) {
    const double th = 2 * kPi * s;
    const double c = std::cos(th), sn = std::sin(th);
    const double rho = std::pow(std::pow(std::abs(c / a), m) + std::pow(std::abs(sn / b), m), -1.0 / m);
    return Eigen::Vector2d(rho * c, rho * sn);
  };
  r.segments = segments;
  std::ostringstream os;
  os << "superellipse(" << a << "," << b << "," << m << ")";
  r.label = os.str();
  return implicit(std::move(r));
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::HalfSpace: os << "halfspace(N=" << dim_ << ")"; break;
    case Kind::Ball: os << "ball(radius=" << ball_.radius << ",N=" << dim_ << ")"; break;
    case Kind::Ellipse2D: os << "ellipse(a=" << ellipse_.a << ",b=" << ellipse_.b << ")"; break;
    case Kind::Implicit2D: os << implicit_->label; break;
  }
  return os.str();
}

const HalfSpace& Domain::as_half_space() const {
  if (kind_ != Kind::HalfSpace) throw DomainError("domain is not a half-space");
  return half_;
}
const Ball& Domain::as_ball() const {
  if (kind_ != Kind::Ball) throw DomainError("domain is not a ball");
  return ball_;
}
const Ellipse2D& Domain::as_ellipse() const {
  if (kind_ != Kind::Ellipse2D) throw DomainError("domain is not an ellipse");
  return ellipse_;
}
const Implicit2D& Domain::as_implicit() const {
  if (kind_ != Kind::Implicit2D) throw DomainError("domain is not implicit");
  return *implicit_;
}

bool Domain::contains(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match domain");
  switch (kind_) {
    case Kind::HalfSpace: return x[0] >= 0.0;
    case Kind::Ball: return x.norm() <= ball_.radius * (1.0 + 1e-15);
    case Kind::Ellipse2D: {
      const double u = x[0] / ellipse_.a, v = x[1] / ellipse_.b;
      return u * u + v * v <= 1.0 + 1e-14;
    }
    case Kind::Implicit2D: return implicit_->level(x[0], x[1]) >= -1e-13;
  }
  return false;
}

double Domain::boundary_distance(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match domain");
  switch (kind_) {
    case Kind::HalfSpace: return std::abs(x[0]);
    case Kind::Ball: return std::abs(ball_.radius - x.norm());
    case Kind::Ellipse2D: {
      const double th = ellipse_nearest_theta(ellipse_, x[0], x[1]);
      return std::hypot(x[0] - ellipse_.a * std::cos(th), x[1] - ellipse_.b * std::sin(th));
    }
    case Kind::Implicit2D: {
      return polyline_->index.nearest(Eigen::Vector2d(x[0], x[1]), nullptr);
    }
  }
  return 0.0;
}

Point Domain::nearest_boundary_point(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match domain");
  switch (kind_) {
    case Kind::HalfSpace: {
      Point y = x;
      y[0] = 0.0;
      return y;
    }
    case Kind::Ball: {
      const double r = x.norm();
      if (r == 0.0) {
        Point y = Point::Zero(dim_);
        y[0] = ball_.radius;
        return y;
      }
      return x * (ball_.radius / r);
    }
    case Kind::Ellipse2D: {
      const double th = ellipse_nearest_theta(ellipse_, x[0], x[1]);
      Point y(2);
      y << ellipse_.a * std::cos(th), ellipse_.b * std::sin(th);
      return y;
    }
    case Kind::Implicit2D: {
      Eigen::Vector2d bp;
      polyline_->index.nearest(Eigen::Vector2d(x[0], x[1]), &bp);
      Point y(2);
      y << bp.x(), bp.y();
      return y;
    }
  }
  return x;
}

std::vector<double> Domain::curvatures(const Point& y) const {
  switch (kind_) {
    case Kind::HalfSpace: return std::vector<double>(dim_ - 1, 0.0);
    case Kind::Ball: return std::vector<double>(dim_ - 1, 1.0 / ball_.radius);
    case Kind::Ellipse2D: {
      const double a = ellipse_.a, b = ellipse_.b;
      const double th = std::atan2(y[1] / b, y[0] / a);
      const double s = std::sin(th), c = std::cos(th);
      return {a * b / std::pow(a * a * s * s + b * b * c * c, 1.5)};
    }
    case Kind::Implicit2D: return {implicit_curvature(*implicit_, y[0], y[1])};
  }
  return {};
}

std::optional<double> Domain::segment_crossing(const Point& x, const Point& e) const {
  auto first_root = [](double A, double B, double C) -> std::optional<double> {
    // A s^2 + B s + C = 0 with C <= 0 (start inside): positive root
    if (A <= 0) return std::nullopt;
    const double disc = B * B - 4 * A * C;
    if (disc < 0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
    double s1 = q / A, s2 = q != 0 ? C / q : s1;
    double s = std::max(s1, s2);
    if (s > 0 && s <= 1.0) return s;
    return std::nullopt;
  };
  switch (kind_) {
    case Kind::HalfSpace: {
      if (e[0] >= 0) return std::nullopt;
      const double s = -x[0] / e[0];
      if (s > 0 && s <= 1.0) return s;
      return std::nullopt;
    }
    case Kind::Ball:
      return first_root(e.squaredNorm(), 2 * x.dot(e), x.squaredNorm() - ball_.radius * ball_.radius);
    case Kind::Ellipse2D: {
      const double ia = 1.0 / (ellipse_.a * ellipse_.a), ib = 1.0 / (ellipse_.b * ellipse_.b);
      const double A = e[0] * e[0] * ia + e[1] * e[1] * ib;
      const double B = 2 * (x[0] * e[0] * ia + x[1] * e[1] * ib);
      const double C = x[0] * x[0] * ia + x[1] * x[1] * ib - 1.0;
      return first_root(A, B, C);
    }
    case Kind::Implicit2D: {
      const auto& f = implicit_->level;
      const int K = 16;
      double s0 = 0.0, f0 = f(x[0], x[1]);
      for (int k = 1; k <= K; ++k) {
        const double s1 = static_cast<double>(k) / K;
        const double f1 = f(x[0] + s1 * e[0], x[1] + s1 * e[1]);
        if (f1 < 0 && f0 >= 0) {
          double lo = s0, hi = s1;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f(x[0] + mid * e[0], x[1] + mid * e[1]) >= 0)
              lo = mid;
            else
              hi = mid;
          }
          return 0.5 * (lo + hi);
        }
        s0 = s1;
        f0 = f1;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Eigen::Vector2d Domain::box_min() const {
  switch (kind_) {
    case Kind::Ball: return Eigen::Vector2d(-ball_.radius, -ball_.radius);
    case Kind::Ellipse2D: return Eigen::Vector2d(-ellipse_.a, -ellipse_.b);
    case Kind::Implicit2D: {
      Eigen::Vector2d lo = polyline_->poly[0];
      for (const auto& v : polyline_->poly) lo = lo.cwiseMin(v);
      return lo;
    }
    default: throw DomainError("unbounded domain has no bounding box");
  }
}

Eigen::Vector2d Domain::box_max() const {
  switch (kind_) {
    case Kind::Ball: return Eigen::Vector2d(ball_.radius, ball_.radius);
    case Kind::Ellipse2D: return Eigen::Vector2d(ellipse_.a, ellipse_.b);
    case Kind::Implicit2D: {
      Eigen::Vector2d hi = polyline_->poly[0];
      for (const auto& v : polyline_->poly) hi = hi.cwiseMax(v);
      return hi;
    }
    default: throw DomainError("unbounded domain has no bounding box");
  }
}

std::vector<Point> Domain::boundary_samples(int n) const {
  if (n < 1) throw DomainError("boundary_samples: n must be >= 1");
  std::vector<Point> out;
  out.reserve(n);
  switch (kind_) {
    case Kind::HalfSpace: {
      for (int k = 0; k < n; ++k) {
        Point y = Point::Zero(dim_);
        for (int i = 1; i < dim_; ++i) y[i] = std::sin(1.7 * (k + 1) * i) * 10.0;
        out.push_back(y);
      }
      return out;
    }
    case Kind::Ball: return sphere_points(dim_, Point::Zero(dim_), ball_.radius, n);
    case Kind::Ellipse2D:
      for (int k = 0; k < n; ++k) {
        const double th = 2 * kPi * k / n;
        Point y(2);
        y << ellipse_.a * std::cos(th), ellipse_.b * std::sin(th);
        out.push_back(y);
      }
      return out;
    case Kind::Implicit2D:
      for (int k = 0; k < n; ++k) {
        const Eigen::Vector2d v = implicit_->boundary(static_cast<double>(k) / n);
        Point y(2);
        y << v.x(), v.y();
        out.push_back(y);
      }
      return out;
  }
  return out;
}

double distance_to_boundary(const Domain& domain, const Point& x) {
  if (!domain.contains(x)) throw DomainError("distance_to_boundary: point outside the domain");
  return domain.boundary_distance(x);
}

CurvatureInfo curvatures_and_pi(const Domain& domain, const Point& y, double R) {
  if (!(R > 0)) throw DomainError("curvatures_and_pi: R must be > 0");
  CurvatureInfo info;
  info.kappa = domain.curvatures(y);
  info.pi_gamma = 1.0;
  for (double k : info.kappa) {
    if (R * k >= 1.0) info.condition_violated = true;
    info.pi_gamma *= 1.0 - R * k;
  }
  return info;
}

TouchingBallConfig validate_touching_ball(const Domain& domain, const Point& x, double R,
                                          int sphere_samples) {
  if (!(R > 0)) throw DomainError("validate_touching_ball: R must be > 0");
  if (!domain.contains(x))
    throw GeometryError(GeometryError::Kind::Outside, "validate_touching_ball: center outside the domain");
  const double tol = 1e-9 * std::max(1.0, R);
  const double d = domain.boundary_distance(x);
  if (std::abs(d - R) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "not touching: distance to boundary " << d << " differs from R = " << R;
    throw GeometryError(GeometryError::Kind::NotTouching, os.str());
  }
  TouchingBallConfig cfg;
  cfg.center = x;
  cfg.radius = R;
  cfg.contact = domain.nearest_boundary_point(x);
  const int N = domain.dim();
  const auto pts = sphere_points(N, x, R, sphere_samples);
  const double spacing =
      N == 2 ? 2 * kPi / sphere_samples : std::sqrt(4 * kPi / sphere_samples) * (N == 3 ? 1.0 : 4.0);
  const double exclusion = 10.0 * spacing * R;
  for (const auto& z : pts) {
    const bool inside = domain.contains(z);
    const double dz = domain.boundary_distance(z);
    if ((!inside || dz <= tol) && (z - cfg.contact).norm() > exclusion) {
      std::ostringstream os;
      os << "non-unique contact: sphere point at distance " << (z - cfg.contact).norm()
         << " from the contact also meets the boundary";
      throw GeometryError(GeometryError::Kind::NonUniqueContact, os.str());
    }
  }
  auto ci = curvatures_and_pi(domain, cfg.contact, R);
  cfg.kappa = ci.kappa;
  cfg.pi_gamma = ci.pi_gamma;
  return cfg;
}

double unit_sphere_area(int d) {
  if (d < 1) throw DomainError("unit_sphere_area: d must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int N, double R) { return unit_sphere_area(N) / N * std::pow(R, N); }

bool has_analytic_parallel_area(const Domain& domain) {
  return domain.kind() == Domain::Kind::HalfSpace || domain.kind() == Domain::Kind::Ball;
}

namespace {

ParallelArea monte_carlo_area(const Domain& domain, const TouchingBallConfig& cfg, double s,
                              const MonteCarloOptions& mc) {
  const int N = domain.dim();
  const double R = cfg.radius;
  const double delta = mc.shell_fraction * std::min(s, 2 * R - s);
  std::mt19937_64 rng(mc.seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  long hits = 0;
  Point z(N);
  for (long k = 0; k < mc.samples; ++k) {
    double n2 = 0;
    for (int i = 0; i < N; ++i) {
      z[i] = g(rng);
      n2 += z[i] * z[i];
    }
    const double rad = R * std::pow(u01(rng), 1.0 / N) / std::sqrt(n2);
    for (int i = 0; i < N; ++i) z[i] = cfg.center[i] + rad * z[i];
    const double dz = domain.boundary_distance(z);
    if (std::abs(dz - s) < 0.5 * delta) ++hits;
  }
  const double vol = ball_volume(N, R);
  const double frac = static_cast<double>(hits) / mc.samples;
  ParallelArea out;
  out.analytic = false;
  out.area = vol * frac / delta;
  out.std_error = vol * std::sqrt(std::max(frac * (1 - frac), 1.0 / mc.samples) / mc.samples) / delta;
  return out;
}

double cap_angle_integral(int N, double phi) {
  // int_0^phi sin^{N-2}
  if (N == 2) return phi;
  if (N == 3) return 1.0 - std::cos(phi);
  static const QuadratureRule gl = gauss_legendre(64);
  double sum = 0.0;
  for (size_t i = 0; i < gl.nodes.size(); ++i) {
    const double th = 0.5 * phi * (1.0 + gl.nodes[i]);
    sum += gl.weights[i] * std::pow(std::sin(th), N - 2);
  }
  return 0.5 * phi * sum;
}

}  // namespace

ParallelArea parallel_area(const Domain& domain, const TouchingBallConfig& cfg, double s,
                           AreaMethod method, const MonteCarloOptions& mc) {
  const double R = cfg.radius;
  const int N = domain.dim();
  if (!(s > 0.0) || !(s < 2 * R)) return {0.0, 0.0, true};
  if (method == AreaMethod::MonteCarlo || !has_analytic_parallel_area(domain))
    return monte_carlo_area(domain, cfg, s, mc);
  ParallelArea out;
  if (domain.kind() == Domain::Kind::HalfSpace) {
    const double rho = std::sqrt(std::max(0.0, 2 * R * s - s * s));
    out.area = std::pow(kPi, 0.5 * (N - 1)) * std::pow(rho, N - 1) / std::tgamma(0.5 * (N + 1));
    return out;
  }
  const double big = domain.as_ball().radius;
  const double rs = big - s;
  const double c = cfg.center.norm();
  double cosphi;
  if (c == 0.0)
    cosphi = rs < R ? -1.0 : 1.0;
  else
    cosphi = std::clamp((rs * rs + c * c - R * R) / (2 * rs * c), -1.0, 1.0);
  const double phi = std::acos(cosphi);
  const double omega = N == 2 ? 2.0 : unit_sphere_area(N - 1);
  out.area = omega * std::pow(rs, N - 1) * cap_angle_integral(N, phi);
  if (N == 2) out.area = 2.0 * rs * phi;
  return out;
}

double parallel_area_limit(int N, double R, double pi_gamma) {
  if (!(pi_gamma > 0)) throw DomainError("parallel_area_limit: pi_gamma must be > 0");
  return unit_sphere_area(N - 1) * std::pow(2 * R, 0.5 * (N - 1)) / ((N - 1) * std::sqrt(pi_gamma));
}

}  // namespace gtp
