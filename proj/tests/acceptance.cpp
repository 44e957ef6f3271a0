// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <boost/math/quadrature/exp_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gtp/asymptotics.hpp"
#include "gtp/closed_form.hpp"
#include "gtp/geometry.hpp"
#include "gtp/pde_fd.hpp"
#include "gtp/specfun.hpp"

using namespace gtp;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Point axis_point(int N, double x) {
  Point p = Point::Zero(N);
  p[0] = x;
  return p;
}

std::vector<double> geometric(double t0, double t1, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = t0 * std::pow(t1 / t0, static_cast<double>(i) / (count - 1));
  return g;
}

// 1: erfc moment at q = 2 against the Gamma closed form
void ac1(Outcome& o) {
  double worst = 0;
  for (int N = 2; N <= 7; ++N) {
    const double closed = (N - 1) * std::tgamma((N - 1) / 4.0) / (2 * std::sqrt(kPi) * (N + 1));
    worst = std::max(worst, std::abs(erfc_moment(N, 2.0) - closed));
  }
  o.detail << "max |moment - closed form| over N=2..7 = " << worst;
  o.require(worst <= 1e-8, "tolerance 1e-8");
}

// 2: N = 3, p = 2 elliptic solution against R sinh(a r) / (r sinh(a R)), a = sqrt(2)/eps
void ac2(Outcome& o) {
  double worst = 0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const BallElliptic u(PExponent::finite(2), 1.0, 3, eps);
    const double a = std::sqrt(2.0) / eps;
    for (int i = 0; i < 20; ++i) {
      const double r = i / 19.0;
      // log of the closed form, stable for large a
      const double log_closed =
          r == 0 ? std::log(a) - a - std::log1p(-std::exp(-2 * a)) + std::log(2.0)
                 : a * (r - 1) + std::log1p(-std::exp(-2 * a * r)) - std::log1p(-std::exp(-2 * a)) - std::log(r);
      const double rel = std::abs(std::expm1(u.radial_log_value(r) - log_closed));
      worst = std::max(worst, rel);
    }
  }
  o.detail << "max relative error at 20 radii, eps in {0.2,0.1,0.05} = " << worst;
  o.require(worst <= 1e-10, "tolerance 1e-10");
}

// 3: eps^-2 int_0^inf e^{-t/eps^2} u(x,t) dt equals the elliptic solution
void ac3(Outcome& o) {
  const auto p = PExponent::finite(2);
  const BallParabolic u(p, 1.0, 3);
  boost::math::quadrature::exp_sinh<double> es;
  double worst = 0;
  for (double eps : {0.1, 0.05}) {
    const BallElliptic e(p, 1.0, 3, eps);
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
      const double le = e.radial_log_value(r);
      // scale by the elliptic value so the integrand is O(1)
      const double I = es.integrate(
          [&](double t) {
            if (t <= 0) return 0.0;
            return std::exp(-t / (eps * eps) + u.radial_log_value(r, t) - le) / (eps * eps);
          },
          1e-12);
      worst = std::max(worst, std::abs(I - 1.0));
    }
  }
  o.detail << "max relative gap of the numeric transform = " << worst;
  o.require(worst <= 1e-4, "tolerance 1e-4");
}

// 4: sup_r |eps log u + sqrt(p') (1 - r)| decreases with eps and ends below 5e-3
void ac4(Outcome& o) {
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
  for (auto p : {PExponent::finite(1.5), PExponent::finite(2), PExponent::finite(3), PExponent::infinity()}) {
    std::vector<double> sup;
    for (double e : eps) {
      const BallElliptic u(p, 1.0, 2, e);
      double s = 0;
      for (int i = 0; i <= 64; ++i) {
        const double r = i / 64.0;
        s = std::max(s, std::abs(e * u.radial_log_value(r) + std::sqrt(p.conj()) * (1 - r)));
      }
      sup.push_back(s);
    }
    bool mono = true;
    for (size_t i = 1; i < sup.size(); ++i) mono = mono && sup[i] < sup[i - 1];
    o.detail << " p=" << p.str() << ": final=" << sup.back() << (mono ? " monotone" : " NOT monotone") << ";";
    o.require(mono, "monotone at p=" + p.str());
    o.require(sup.back() < 5e-3, "final < 5e-3 at p=" + p.str());
  }
}

// 5: half-space residual inside [4t log(c int_0^inf e^{-b s - p' s^2/4} ds), 0] for x_1 <= delta
void ac5(Outcome& o) {
  boost::math::quadrature::exp_sinh<double> es;
  const std::vector<double> dists = {0.1, 0.25, 0.5, 1.0};
  const double delta = 1.0;
  int points = 0;
  double worst_upper = -kInf, worst_lower = -kInf, worst_literal = -kInf, worst_closed = 0;
  for (auto p : {PExponent::finite(1.5), PExponent::finite(2), PExponent::finite(3), PExponent::infinity()}) {
    const auto u = half_space_solution(p, 2);
    const double pc = p.conj();
    for (int k = 0; k < 12; ++k) {
      const double t = std::pow(0.5, k);
      const double b = pc * delta / (2 * std::sqrt(t));
      const double J = es.integrate([&](double s) { return std::exp(-b * s - pc * s * s / 4); });
      const double tight = 4 * t * std::log(std::sqrt(pc / kPi) * J);
      const double literal = 4 * t * std::log(std::sqrt(pc / (4 * kPi)) * J);
      worst_closed = std::max(worst_closed, std::abs(tight - half_space_residual_lower(p, delta, t)));
      for (double d : dists) {
        const double r = varadhan_residual(*u, axis_point(2, d), t);
        worst_upper = std::max(worst_upper, r);
        worst_lower = std::max(worst_lower, tight - r);
        worst_literal = std::max(worst_literal, literal - r);
        ++points;
      }
    }
  }
  o.detail << points << " points; max residual=" << worst_upper << "; max(lower - residual)=" << worst_lower
           << "; with the literal constant " << worst_literal << "; library bracket vs quadrature " << worst_closed;
  o.require(worst_upper <= 0, "residual <= 0");
  o.require(worst_lower <= 1e-12, "residual >= quadrature lower bound");
  o.require(worst_literal <= 1e-12, "residual >= literal lower bound");
  o.require(worst_closed <= 1e-10, "library bracket matches quadrature");
}

// 6: rate of the ball residual at distance 0.5
void ac6(Outcome& o) {
  const auto ts = geometric(1e-2, 1e-4, 5);
  for (auto p : {PExponent::finite(3), PExponent::infinity()}) {
    const auto u = ball_parabolic(p, 1.0, 2);
    std::vector<double> r;
    for (double t : ts) r.push_back(varadhan_residual(*u, axis_point(2, 0.5), t));
    const auto tl = rate_fit(ts, r, RateModel::TLogInvT), tt = rate_fit(ts, r, RateModel::T);
    o.detail << " p=" << p.str() << ": fit residual t log(1/t)=" << tl.relative_residual
             << " t=" << tt.relative_residual << ";";
    if (p.is_infinite())
      o.require(tt.relative_residual < tl.relative_residual, "model t beats t log(1/t) at p=inf");
    else
      o.require(tl.relative_residual <= 0.1, "t log(1/t) fit within 10% at p=3");
  }
}

struct ContentConfig {
  int N;
  PExponent p;
};

const std::vector<ContentConfig>& content_configs() {
  static const std::vector<ContentConfig> c = {{2, PExponent::finite(2)},
                                               {2, PExponent::finite(3)},
                                               {3, PExponent::finite(2)},
                                               {2, PExponent::infinity()}};
  return c;
}

TouchingBallConfig ball_contact(int N) { return validate_touching_ball(Domain::ball(1.0, N), axis_point(N, 0.5), 0.5, 2000); }

// 7: extrapolated t^{-(N+1)/4} content against the limit
void ac7(Outcome& o) {
  const auto ts = geometric(1e-2, 1e-4, 3);
  for (const auto& c : content_configs()) {
    const auto u = ball_parabolic(c.p, 1.0, c.N);
    const auto tb = ball_contact(c.N);
    const double expect_pi = std::pow(0.5, c.N - 1);
    o.require(std::abs(tb.pi_gamma - expect_pi) <= 1e-12, "Pi = 2^{1-N}");
    const auto rep = heat_content_report(*u, tb, ts);
    o.detail << " (N=" << c.N << ",p=" << c.p.str() << ") gap=" << rep.relative_gap << ";";
    o.require(rep.relative_gap <= 0.02, "2% at N=" + std::to_string(c.N) + ", p=" + c.p.str());
  }
}

// 8: scaled q-means, the midrange limit and the q = 2 constant
void ac8(Outcome& o) {
  const auto ts = geometric(1e-2, 1e-4, 3);
  for (const auto& c : content_configs()) {
    const auto u = ball_parabolic(c.p, 1.0, c.N);
    const auto tb = ball_contact(c.N);
    o.detail << " (N=" << c.N << ",p=" << c.p.str() << ")";
    for (double q : {1.5, 2.0, 3.0}) {
      const auto rep = q_mean_report(*u, tb, q, ts);
      o.detail << " q=" << q << ":" << rep.relative_gap;
      o.require(rep.relative_gap <= 0.05, "5% at q=" + std::to_string(q));
    }
    const auto s = sample_ball(*u, tb, 1e-4);
    const double mu = q_mean(s, kInf).mu;
    o.detail << " mu_inf(1e-4)=" << mu << ";";
    o.require(std::abs(mu - 0.5) / 0.5 <= 0.02, "mu_inf within 2% of 1/2");
  }
  double worst = 0;
  for (int N = 2; N <= 7; ++N)
    worst = std::max(worst, std::abs(qmean_constant(N) * erfc_moment(N, 2.0) / mean_value_constant(N) - 1));
  o.detail << " q=2 constant consistency=" << worst;
  o.require(worst <= 1e-10, "q=2 constant 1e-10");
}

// 9: parallel-area limit and the Monte Carlo path
void ac9(Outcome& o) {
  const auto ss = geometric(1e-2, 1e-2 / 64, 7);
  for (int N : {2, 3})
    for (bool half : {true, false}) {
      const Domain dom = half ? Domain::half_space(N) : Domain::ball(1.0, N);
      const auto tb = validate_touching_ball(dom, axis_point(N, half ? 0.5 : 0.5), 0.5, 2000);
      std::vector<double> m;
      for (double s : ss) m.push_back(std::pow(s, -0.5 * (N - 1)) * parallel_area(dom, tb, s).area);
      const auto rep = make_report("area", ss, m, parallel_area_limit(N, 0.5, tb.pi_gamma));
      MonteCarloOptions mc;
      mc.seed = 2024 + N;
      const double s = 0.05;
      const auto a = parallel_area(dom, tb, s), b = parallel_area(dom, tb, s, AreaMethod::MonteCarlo, mc);
      const double z = std::abs(a.area - b.area) / b.std_error;
      o.detail << " " << (half ? "half-space" : "ball") << " N=" << N << ": gap=" << rep.relative_gap
               << " mc=" << z << "sigma;";
      o.require(rep.relative_gap <= 0.01, "1% limit");
      o.require(z <= 3, "Monte Carlo 3 sigma");
    }
}

// 10: finite-difference solver on the unit disk
void ac10(Outcome& o) {
  const double T = 0.05;
  auto unit = [](double c) { return BoundaryData([c](const Eigen::Vector2d&, double) { return c; }); };
  for (auto p : {PExponent::finite(2), PExponent::finite(3), PExponent::infinity()}) {
    const auto g = std::make_shared<const Grid2D>(Domain::ball(1.0, 2), 1.0 / 128);
    const auto st = solve_to(g, p, unit(1.0), T);
    const auto err = validate_against_reference(*g, st, *ball_parabolic(p, 1.0, 2));
    o.detail << " p=" << p.str() << ": sup=" << err.sup << ";";
    o.require(err.sup <= 0.02, "sup error at p=" + p.str());
    o.require(st.max_principle_held && st.time_monotone, "invariants at p=" + p.str());
  }
  const auto p3 = PExponent::finite(3);
  std::vector<FdErrorReport> reps;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const auto g = std::make_shared<const Grid2D>(Domain::ball(1.0, 2), h);
    const auto st = solve_to(g, p3, unit(1.0), T);
    reps.push_back(validate_against_reference(*g, st, *ball_parabolic(p3, 1.0, 2)));
  }
  const double ratio = refinement_ratio(reps[0], reps[1]);
  o.detail << " refinement ratio p=3 (1/32->1/64)=" << ratio << ";";
  o.require(ratio >= 1.5, "refinement ratio");
  // variable data in [0.5, 2] between the two constant runs
  for (auto p : {PExponent::finite(3), PExponent::infinity()}) {
    const auto g = std::make_shared<const Grid2D>(Domain::ball(1.0, 2), 1.0 / 64);
    BoundaryData wavy = [](const Eigen::Vector2d& y, double) {
      return 1.25 + 0.75 * std::sin(3 * std::atan2(y.y(), y.x()));
    };
    const auto lo = solve_to(g, p, unit(0.5), T), mid = solve_to(g, p, wavy, T), hi = solve_to(g, p, unit(2.0), T);
    double viol = 0;
    for (int n : g->interior()) viol = std::max({viol, lo.values[n] - mid.values[n], mid.values[n] - hi.values[n]});
    o.detail << " sandwich violation p=" << p.str() << "=" << viol << ";";
    o.require(viol <= 0 && mid.max_principle_held, "sandwich at p=" + p.str());
  }
}

// 11: Weingarten functional
void ac11(Outcome& o) {
  const auto c = weingarten_check(Domain::ball(1.0, 2), 0.3, 1024);
  const auto e = weingarten_check(Domain::ellipse(2.0, 1.0), 0.3, 4096);
  // curvature of the (2,1) ellipse ranges over [1/4, 2]
  const double lo = 1 - 0.3 * 2.0, hi = 1 - 0.3 * 0.25;
  const double gap = std::max(std::abs(e.min_pi - lo) / lo, std::abs(e.max_pi - hi) / hi);
  o.detail << "circle: " << c.verdict << " deviation=" << c.deviation << "; ellipse: " << e.verdict
           << " range=[" << e.min_pi << ", " << e.max_pi << "] gap=" << gap;
  o.require(c.verdict == "constant" && c.deviation <= 1e-9, "circle constant");
  o.require(e.verdict == "nonconstant" && gap <= 0.01, "ellipse range");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AC1 moment identity", ac1},        {"AC2 elliptic reduction", ac2}, {"AC3 Laplace consistency", ac3},
      {"AC4 elliptic eps sweep", ac4},     {"AC5 half-space bracket", ac5}, {"AC6 residual rate", ac6},
      {"AC7 heat content", ac7},           {"AC8 q-means", ac8},            {"AC9 parallel area", ac9},
      {"AC10 finite differences", ac10},   {"AC11 Weingarten check", ac11}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
