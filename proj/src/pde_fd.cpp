#include "gtp/pde_fd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "gtp/errors.hpp"

namespace gtp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fold_angle(double a) {
  a = std::fmod(a, kPi);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw NumericalError("read_binary: truncated grid dump");
  return to_little(v);
}

}  // namespace

Grid2D::Grid2D(Domain domain, double h, double snap, int stencil_radius)
    : domain_(std::move(domain)), h_(h), snap_(snap), radius_(stencil_radius) {
  if (domain_.dim() != 2 || !domain_.bounded())
    throw GeometryError(GeometryError::Kind::Unsupported, "Grid2D: needs a bounded 2D domain");
  if (!(h > 0)) throw DomainError("Grid2D: h must be > 0");
  if (!(snap >= 0 && snap < 1)) throw DomainError("Grid2D: snap must lie in [0, 1)");
  if (stencil_radius < 1) throw DomainError("Grid2D: stencil radius must be >= 1");

  directions_ = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int b = 0; b <= radius_; ++b)
    for (int a = -radius_; a <= radius_; ++a) {
      if (b == 0 && a <= 0) continue;
      if (std::gcd(std::abs(a), b) != 1) continue;
      if (std::max(std::abs(a), b) <= 1) continue;
      directions_.emplace_back(a, b);
    }

  const int pad = radius_ + 1;
  const Eigen::Vector2d lo = domain_.box_min(), hi = domain_.box_max();
  i0_ = static_cast<int>(std::floor(lo.x() / h)) - pad;
  j0_ = static_cast<int>(std::floor(lo.y() / h)) - pad;
  nx_ = static_cast<int>(std::ceil(hi.x() / h)) + pad - i0_ + 1;
  ny_ = static_cast<int>(std::ceil(hi.y() / h)) + pad - j0_ + 1;

  types_.assign(static_cast<size_t>(nx_) * ny_, NodeType::Exterior);
  std::vector<double> dist(types_.size(), 0.0);
  for (int n = 0; n < size(); ++n) {
    const Point x = position(n);
    if (!domain_.contains(x)) continue;
    dist[n] = domain_.boundary_distance(x);
    if (dist[n] >= snap_ * h_) {
      types_[n] = NodeType::Interior;
      interior_.push_back(n);
    } else {
      types_[n] = NodeType::Boundary;
      boundary_nodes_.push_back(n);
      projections_.push_back(domain_.nearest_boundary_point(x));
    }
  }

  for (size_t b = 0; b < boundary_nodes_.size(); ++b) {
    NormalStencil ns;
    const int n = boundary_nodes_[b];
    const Eigen::Vector2d x = position(n);
    const Eigen::Vector2d y = projections_[b].head<2>();
    const double delta = (x - y).norm();
    if (delta > 1e-12 * h_) {
      const Eigen::Vector2d q = x + h_ * (x - y) / delta;
      const double fx = q.x() / h_ - i0_, fy = q.y() / h_ - j0_;
      const int ci = static_cast<int>(std::floor(fx)), cj = static_cast<int>(std::floor(fy));
      const double a = fx - ci, c = fy - cj;
      const int idx[4] = {index(ci, cj), index(ci + 1, cj), index(ci, cj + 1), index(ci + 1, cj + 1)};
      const double w[4] = {(1 - a) * (1 - c), a * (1 - c), (1 - a) * c, a * c};
      bool ok = ci >= 0 && cj >= 0 && ci + 1 < nx_ && cj + 1 < ny_;
      for (int m = 0; ok && m < 4; ++m) ok = types_[idx[m]] != NodeType::Exterior;
      if (ok) {
        for (int m = 0; m < 4; ++m) {
          ns.corner[m] = idx[m];
          ns.weight[m] = w[m];
        }
        ns.theta = delta / (delta + h_);
      }
    }
    normal_.push_back(ns);
  }

  const size_t nd = directions_.size();
  arms_.resize(interior_.size() * nd * 2);
  for (size_t k = 0; k < interior_.size(); ++k) {
    const int n = interior_[k];
    const int i = i_of(n), j = j_of(n);
    const Point x = position(n);
    for (size_t d = 0; d < nd; ++d) {
      for (int side = 0; side < 2; ++side) {
        const int sg = side == 0 ? 1 : -1;
        const Eigen::Vector2i v = sg * directions_[d];
        Arm& arm = arms_[(k * nd + d) * 2 + side];
        const int ni = i + v.x(), nj = j + v.y();
        const int nb = index(ni, nj);
        const double len = h_ * v.cast<double>().norm();
        std::optional<double> s;
        if (dist[n] <= len * (1 + 1e-12)) s = domain_.segment_crossing(x, h_ * v.cast<double>());
        if (s && (*s < 1.0 || types_[nb] == NodeType::Exterior)) {
          arm.target = -static_cast<std::int32_t>(crossings_.size()) - 1;
          arm.s = *s;
          crossings_.push_back((x + *s * h_ * v.cast<double>()).head<2>());
        } else if (types_[nb] == NodeType::Exterior) {
          arm.target = -static_cast<std::int32_t>(crossings_.size()) - 1;
          arm.s = 1.0;
          crossings_.push_back(domain_.nearest_boundary_point(position(nb)).head<2>());
        } else {
          arm.target = nb;
          arm.s = 1.0;
        }
      }
    }
  }
}

Eigen::Vector2d Grid2D::position(int node) const {
  return {(i_of(node) + i0_) * h_, (j_of(node) + j0_) * h_};
}

FdSolver::FdSolver(std::shared_ptr<const Grid2D> grid, PExponent p, BoundaryData data, SolverOptions opt)
    : grid_(std::move(grid)), p_(p), data_(std::move(data)), opt_(opt) {
  if (!grid_) throw DomainError("FdSolver: null grid");
  if (!data_) throw DomainError("FdSolver: boundary data missing");
  if (!(opt_.safety > 0 && opt_.safety <= 1)) throw ConfigError("safety factor must lie in (0, 1]");
  if (p_.is_infinite()) {
    c_iso_ = 0.0;
    c_dir_ = 1.0;
  } else {
    c_iso_ = 1.0 / p_.value();
    c_dir_ = (p_.value() - 2.0) / p_.value();
  }
  // the 9-point split is monotone for every gradient direction in this range
  const double r2 = std::sqrt(2.0);
  const bool nine_point_always =
      c_dir_ >= 0 ? c_iso_ >= c_dir_ * (r2 - 1) / 2 : c_iso_ + c_dir_ * (1 + r2) / 2 >= 0;
  wide_ = !nine_point_always;
  if (wide_ && grid_->stencil_radius() < 2) throw ConfigError("this p needs a grid stencil radius >= 2");
  const auto& dirs = grid_->directions();
  dir_angle_.resize(dirs.size());
  for (size_t d = 0; d < dirs.size(); ++d) dir_angle_[d] = fold_angle(std::atan2(dirs[d].y(), dirs[d].x()));
  dir_order_.resize(dirs.size());
  std::iota(dir_order_.begin(), dir_order_.end(), 0);
  std::sort(dir_order_.begin(), dir_order_.end(), [&](int a, int b) { return dir_angle_[a] < dir_angle_[b]; });
  eps_g_ = opt_.gradient_threshold < 0 ? grid_->h() : opt_.gradient_threshold;

  // bound on the stencil coefficient sum over all gradient directions
  const double h = grid_->h();
  const double iso_w = c_dir_ >= 0 ? c_iso_ : c_iso_ + c_dir_;
  const double dir_w = std::abs(c_dir_);
  double bmax = 0.0;
  std::vector<double> S(dirs.size());
  for (size_t k = 0; k < grid_->interior().size(); ++k) {
    double smax_all = 0.0;
    const size_t nd = dirs.size();
    for (size_t d = 0; d < nd; ++d) {
      const Arm& a = grid_->arm(static_cast<int>(k), static_cast<int>(d), true);
      const Arm& b = grid_->arm(static_cast<int>(k), static_cast<int>(d), false);
      const double L = h * dirs[d].cast<double>().norm();
      S[d] = 2.0 / (L * L * a.s * b.s);
      smax_all = std::max(smax_all, S[d]);
    }
    const double trA = 2 * c_iso_ + c_dir_;
    double B = trA * std::max({S[0], S[1], S[2], S[3]});
    if (wide_) B = std::max(B, iso_w * (S[0] + S[1]) + (dir_w + 2 * iso_w) * smax_all);
    bmax = std::max(bmax, B);
  }
  const double emax = p_.ellipticity_max();
  dt_limit_ = h * h / (8.0 * emax);
  if (bmax > 0) dt_limit_ = std::min(dt_limit_, 1.0 / bmax);
  if (opt_.dt > 0) {
    if (opt_.dt > dt_limit_ * (1 + 1e-12))
      throw ConfigError("dt = " + std::to_string(opt_.dt) + " exceeds the stability bound " +
                        std::to_string(dt_limit_));
    dt_ = opt_.dt;
  } else if (opt_.dt < 0) {
    throw ConfigError("dt must be positive");
  } else {
    dt_ = opt_.safety * dt_limit_;
  }
}

void FdSolver::refresh_boundary(FieldState& s, double t) const {
  const auto& g = *grid_;
  const auto& bn = g.boundary_nodes();
  const auto& pr = g.boundary_projections();
  const auto& ns = g.normal_stencils();
  std::vector<double> next(bn.size());
  for (size_t i = 0; i < bn.size(); ++i) {
    const double v = data_(pr[i], t);
    s.data_lo = std::min(s.data_lo, v);
    s.data_hi = std::max(s.data_hi, v);
    double inner = v;
    if (ns[i].theta > 0) {
      inner = 0.0;
      for (int m = 0; m < 4; ++m) inner += ns[i].weight[m] * s.values[ns[i].corner[m]];
    }
    next[i] = v + ns[i].theta * (inner - v);
  }
  for (size_t i = 0; i < bn.size(); ++i) s.values[bn[i]] = next[i];
  const auto& cr = g.crossings();
  for (size_t i = 0; i < cr.size(); ++i) {
    const double v = data_(cr[i], t);
    s.crossing[i] = v;
    s.data_lo = std::min(s.data_lo, v);
    s.data_hi = std::max(s.data_hi, v);
  }
}

FieldState FdSolver::initial_state() const {
  const auto& g = *grid_;
  FieldState s;
  s.values.assign(g.size(), kNaN);
  for (int n : g.interior()) s.values[n] = 0.0;
  for (int n : g.boundary_nodes()) s.values[n] = 0.0;
  s.crossing.assign(g.crossings().size(), 0.0);
  s.dt = dt_;
  refresh_boundary(s, 0.0);
  return s;
}

FieldState FdSolver::sample_state(const std::function<double(const Eigen::Vector2d&)>& f, double t) const {
  const auto& g = *grid_;
  FieldState s;
  s.t = t;
  s.dt = dt_;
  s.values.assign(g.size(), kNaN);
  for (int n = 0; n < g.size(); ++n)
    if (g.type(n) != Grid2D::NodeType::Exterior) s.values[n] = f(g.position(n));
  s.crossing.resize(g.crossings().size());
  for (size_t i = 0; i < s.crossing.size(); ++i) s.crossing[i] = f(g.crossings()[i]);
  return s;
}

LaplacianValue FdSolver::gtp_laplacian(const FieldState& st, int k) const {
  const auto& g = *grid_;
  const auto& dirs = g.directions();
  const double h = g.h();
  const double u0 = st.values[g.interior()[k]];
  auto arm_value = [&](const Arm& a) { return a.target >= 0 ? st.values[a.target] : st.crossing[-a.target - 1]; };

  // second difference along direction d: value and coefficient sum
  auto second = [&](int d, double& coef) {
    const Arm& a = g.arm(k, d, true);
    const Arm& b = g.arm(k, d, false);
    const double L2 = h * h * dirs[d].squaredNorm();
    const double cp = 2.0 / (L2 * a.s * (a.s + b.s));
    const double cm = 2.0 / (L2 * b.s * (a.s + b.s));
    coef = cp + cm;
    return cp * (arm_value(a) - u0) + cm * (arm_value(b) - u0);
  };
  auto first = [&](int d) {
    const Arm& a = g.arm(k, d, true);
    const Arm& b = g.arm(k, d, false);
    const double sp = a.s, sm = b.s;
    return (sm * sm * (arm_value(a) - u0) - sp * sp * (arm_value(b) - u0)) / (h * sp * sm * (sp + sm));
  };

  LaplacianValue out;
  const double gx = first(0), gy = first(1);
  const double gn = std::hypot(gx, gy);
  double cx, cy, cdp, cdm;
  const double dxx = second(0, cx), dyy = second(1, cy);

  if (gn < eps_g_) {
    const double dpp = second(2, cdp), dmm = second(3, cdm);
    const double uxy = 0.5 * (dpp - dmm);
    const double tr = dxx + dyy;
    const double disc = std::sqrt(0.25 * (dxx - dyy) * (dxx - dyy) + uxy * uxy);
    const double lam = 0.5 * tr - disc, Lam = 0.5 * tr + disc;
    if (p_.is_infinite()) {
      out.lower = lam;
      out.upper = Lam;
    } else {
      const double q = p_.value() - 2.0;
      const double pv = p_.value();
      out.lower = (tr + std::max(q, 0.0) * lam + std::min(q, 0.0) * Lam) / pv;
      out.upper = (tr + std::max(q, 0.0) * Lam + std::min(q, 0.0) * lam) / pv;
    }
    out.critical = true;
    out.value = 0.5 * tr;
    out.coefficient_sum = 0.5 * (cx + cy);
    return out;
  }

  const double xi1 = gx / gn, xi2 = gy / gn;
  const double a11 = c_iso_ + c_dir_ * xi1 * xi1;
  const double a22 = c_iso_ + c_dir_ * xi2 * xi2;
  const double a12 = c_dir_ * xi1 * xi2;
  const double m12 = std::abs(a12);
  if (a11 >= m12 && a22 >= m12) {
    double cd;
    const double dd = second(a12 >= 0 ? 2 : 3, cd);
    out.value = (a11 - m12) * dxx + (a22 - m12) * dyy + 2 * m12 * dd;
    out.coefficient_sum = (a11 - m12) * cx + (a22 - m12) * cy + 2 * m12 * cd;
  } else {
    if (!wide_ && g.stencil_radius() < 2) throw NumericalError("gtp_laplacian: stencil cannot be made monotone");
    // A = iso I + w e e^T with w >= 0
    double ex = xi1, ey = xi2, iso = c_iso_;
    const double w = std::abs(c_dir_);
    if (c_dir_ < 0) {
      ex = -xi2;
      ey = xi1;
      iso = c_iso_ + c_dir_;
    }
    const double th = fold_angle(std::atan2(ey, ex));
    const int M = static_cast<int>(dir_order_.size());
    int j = static_cast<int>(std::upper_bound(dir_order_.begin(), dir_order_.end(), th,
                                              [&](double v, int d) { return v < dir_angle_[d]; }) -
                             dir_order_.begin()) -
            1;
    if (j < 0) j = M - 1;
    const int d1 = dir_order_[j], d2 = dir_order_[(j + 1) % M];
    double phi1 = th - dir_angle_[d1];
    if (phi1 < 0) phi1 += kPi;
    double phi2 = dir_angle_[d2] - th;
    if (phi2 <= 0) phi2 += kPi;
    double w1, w2, m = 0.0;
    if (phi1 < 1e-14) {
      w1 = 1.0;
      w2 = 0.0;
    } else {
      const double den = std::sin(2 * (phi1 + phi2));
      w1 = std::sin(2 * phi2) / den;
      w2 = std::sin(2 * phi1) / den;
      m = 0.5 * (1.0 - w1 - w2);
      if (iso + w * m < 0) {
        w1 = phi2 / (phi1 + phi2);
        w2 = phi1 / (phi1 + phi2);
        m = 0.0;
      }
    }
    double c1, c2;
    const double D1 = second(d1, c1), D2 = second(d2, c2);
    const double ie = iso + w * m;
    out.value = ie * (dxx + dyy) + w * (w1 * D1 + w2 * D2);
    out.coefficient_sum = ie * (cx + cy) + w * (w1 * c1 + w2 * c2);
  }
  out.lower = out.upper = out.value;
  return out;
}

double FdSolver::update_at(const FieldState& st, int k) const {
  return st.values[grid_->interior()[k]] + dt_ * gtp_laplacian(st, k).value;
}

void FdSolver::step(FieldState& st) const {
  const auto& g = *grid_;
  const auto& in = g.interior();
  std::vector<double> next(in.size());
  StepRecord rec;
  rec.dt = dt_;
  for (size_t k = 0; k < in.size(); ++k) {
    const LaplacianValue L = gtp_laplacian(st, static_cast<int>(k));
    next[k] = st.values[in[k]] + dt_ * L.value;
    rec.cfl = std::max(rec.cfl, dt_ * L.coefficient_sum);
    if (L.critical) ++rec.critical_nodes;
  }
  const double t_new = st.t + dt_;
  for (size_t k = 0; k < in.size(); ++k) {
    if (opt_.check_invariants && next[k] < st.values[in[k]] - 1e-14) st.time_monotone = false;
    st.values[in[k]] = next[k];
  }
  refresh_boundary(st, t_new);
  if (opt_.check_invariants) {
    const double tol = 1e-12 * std::max(1.0, st.data_hi - st.data_lo);
    for (size_t k = 0; k < in.size(); ++k)
      if (next[k] < st.data_lo - tol || next[k] > st.data_hi + tol) st.max_principle_held = false;
  }
  st.t = t_new;
  st.dt = dt_;
  ++st.steps;
  rec.t = t_new;
  st.cfl_trace.push_back(rec);
}

FieldState FdSolver::solve_to(double T) const {
  if (!(T > 0)) throw DomainError("solve_to: T must be > 0");
  FieldState s = initial_state();
  while (s.t < T * (1 - 1e-12)) step(s);
  return s;
}

FieldState solve_to(std::shared_ptr<const Grid2D> grid, const PExponent& p, const BoundaryData& data, double T,
                    const SolverOptions& opt) {
  return FdSolver(std::move(grid), p, data, opt).solve_to(T);
}

FdErrorReport validate_against_reference(const Grid2D& grid, const FieldState& state,
                                         const std::function<double(const Eigen::Vector2d&)>& reference) {
  FdErrorReport r;
  double sum = 0.0;
  for (int n : grid.interior()) {
    const Eigen::Vector2d x = grid.position(n);
    const double e = std::abs(state.values[n] - reference(x));
    if (e > r.sup) {
      r.sup = e;
      r.argmax = x;
    }
    sum += e * e;
    ++r.nodes;
  }
  r.l2 = std::sqrt(sum * grid.h() * grid.h());
  return r;
}

FdErrorReport validate_against_reference(const Grid2D& grid, const FieldState& state, const ScalarField& reference) {
  const double t = state.t;
  return validate_against_reference(grid, state, [&](const Eigen::Vector2d& x) {
    Point z(2);
    z << x.x(), x.y();
    return reference.value(z, t);
  });
}

double refinement_ratio(const FdErrorReport& coarse, const FdErrorReport& fine) {
  if (fine.sup == 0.0) return coarse.sup == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return coarse.sup / fine.sup;
}

double interpolate(const Grid2D& grid, const FieldState& state, const Eigen::Vector2d& x, double exterior_value) {
  const Eigen::Vector2d o = grid.position(0);
  const double fx = (x.x() - o.x()) / grid.h(), fy = (x.y() - o.y()) / grid.h();
  const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
  if (i < 0 || j < 0 || i + 1 >= grid.nx() || j + 1 >= grid.ny()) return exterior_value;
  const double a = fx - i, b = fy - j;
  auto v = [&](int ii, int jj) {
    const double u = state.values[grid.index(ii, jj)];
    return std::isnan(u) ? exterior_value : u;
  };
  return (1 - a) * (1 - b) * v(i, j) + a * (1 - b) * v(i + 1, j) + (1 - a) * b * v(i, j + 1) + a * b * v(i + 1, j + 1);
}

void write_csv(const Grid2D& grid, const FieldState& state, std::ostream& os) {
  const auto old = os.precision(17);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      if (i) os << ',';
      const double u = state.values[grid.index(i, j)];
      if (std::isnan(u))
        os << "nan";
      else
        os << u;
    }
    os << '\n';
  }
  os.precision(old);
}

void write_binary(const Grid2D& grid, const FieldState& state, std::ostream& os) {
  put<std::uint64_t>(os, static_cast<std::uint64_t>(grid.nx()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(grid.ny()));
  put<double>(os, grid.h());
  put<double>(os, state.t);
  for (double u : state.values) put<double>(os, u);
}

GridDump read_binary(std::istream& is) {
  GridDump d;
  d.nx = get<std::uint64_t>(is);
  d.ny = get<std::uint64_t>(is);
  d.h = get<double>(is);
  d.t = get<double>(is);
  if (d.nx == 0 || d.ny == 0 || d.nx * d.ny > (1ull << 32)) throw NumericalError("read_binary: bad dimensions");
  d.values.resize(d.nx * d.ny);
  for (auto& v : d.values) v = get<double>(is);
  return d;
}

}  // namespace gtp
