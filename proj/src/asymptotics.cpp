#include "gtp/asymptotics.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "gtp/errors.hpp"
#include "gtp/specfun.hpp"
#include "json.hpp"

namespace gtp {

namespace {
constexpr double kPi = std::numbers::pi;

void require_dim(int N) {
  if (N < 2) throw DomainError("dimension must be >= 2");
}
}  // namespace

double heat_content_constant(int N) {
  require_dim(N);
  return std::pow(2.0, 0.5 * (N + 3)) * std::pow(kPi, 0.5 * (N - 1)) / ((N + 1) * std::tgamma(0.25 * (N + 1)));
}

double mean_value_constant(int N) {
  require_dim(N);
  return std::pow(2.0, 0.5 * (N + 1)) / std::sqrt(kPi) * N / (N + 1.0) * std::tgamma(0.5 * N) /
         std::tgamma(0.25 * (N + 1));
}

double barrier_qmean_constant(int N) {
  require_dim(N);
  const double g = std::tgamma(0.5 * (N + 1));
  return std::pow(2.0, -0.5 * (N + 1)) * std::tgamma(N + 1.0) / (g * g);
}

double qmean_constant(int N) {
  require_dim(N);
  const double g = std::tgamma(0.5 * (N + 1));
  return std::tgamma(N + 1.0) / (g * g);
}

double heat_content_limit(int N, const PExponent& p, double R, double pi_gamma) {
  if (!(pi_gamma > 0)) throw DomainError("heat_content_limit: pi_gamma must be > 0");
  return heat_content_constant(N) * std::pow(R, 0.5 * (N - 1)) /
         (std::pow(p.conj(), 0.25 * (N + 1)) * std::sqrt(pi_gamma));
}

double heat_content_limit_from_moment(int N, const PExponent& p, double R, double pi_gamma) {
  const double xi_scale = 2.0 / std::sqrt(p.conj());
  return parallel_area_limit(N, R, pi_gamma) * std::pow(xi_scale, 0.5 * (N + 1)) * erfc_moment(N, 2.0);
}

QMeanLimit q_mean_limit(int N, const PExponent& p, double q, double R, double pi_gamma) {
  (void)R;
  if (!(q > 1.0)) throw DomainError("q_mean_limit: q must exceed 1");
  if (!(pi_gamma > 0)) throw DomainError("q_mean_limit: pi_gamma must be > 0");
  if (std::isinf(q)) return {0.5, 0.0};
  const double base = qmean_constant(N) * erfc_moment(N, q) /
                      (std::pow(p.conj(), 0.25 * (N + 1)) * std::sqrt(pi_gamma));
  return {std::pow(base, 1.0 / (q - 1.0)), 0.25 * (N + 1) / (q - 1.0)};
}

QMeanLimit q_mean_limit_from_barrier(int N, const PExponent& p, double q, double R, double pi_gamma) {
  if (!(q > 1.0)) throw DomainError("q_mean_limit: q must exceed 1");
  if (std::isinf(q)) return {0.5, 0.0};
  // mu ~ {c M / sqrt(Pi)}^{1/(q-1)} (xi/R)^{(N+1)/(2(q-1))}, xi = 2 sqrt(t/p')
  const double base = barrier_qmean_constant(N) * erfc_moment(N, q) / std::sqrt(pi_gamma);
  const double e = 0.5 * (N + 1) / (q - 1.0);
  // (xi/R)^e = (4/p')^{e/2} (t/R^2)^{e/2}
  const double value = std::pow(base, 1.0 / (q - 1.0)) * std::pow(4.0 / p.conj(), 0.5 * e);
  (void)R;
  return {value, 0.5 * e};
}

namespace {

void add_coarea_half(const ScalarField& field, const Domain& domain, const TouchingBallConfig& cfg, double t,
                     bool upper, const BallGridOptions& opt, const QuadratureRule& gl, BallSample& out) {
  const double R = cfg.radius;
  const double smax = std::sqrt(R);
  const double hw = smax / opt.panels;
  for (int k = 0; k < opt.panels; ++k) {
    const double a = k * hw;
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
      const double sig = a + 0.5 * hw * (1.0 + gl.nodes[i]);
      const double s = upper ? 2 * R - sig * sig : sig * sig;
      const double area = parallel_area(domain, cfg, s).area;
      const double w = 0.5 * hw * gl.weights[i] * 2.0 * sig * area;
      out.weights.push_back(w);
      out.distances.push_back(s);
      out.values.push_back(field.profile_log_value(s, t));
    }
  }
}

}  // namespace

BallSample sample_ball(const ScalarField& field, const TouchingBallConfig& cfg, double t, const BallGridOptions& opt) {
  if (!field.domain()) throw DomainError("sample_ball: field has no domain");
  if (opt.panels < 1 || opt.order < 1) throw DomainError("sample_ball: grid sizes must be positive");
  const Domain& domain = *field.domain();
  const int N = domain.dim();
  const double R = cfg.radius;
  BallSample out;
  out.volume = ball_volume(N, R);
  const QuadratureRule gl = gauss_legendre(opt.order);
  if (field.has_distance_profile() && has_analytic_parallel_area(domain)) {
    add_coarea_half(field, domain, cfg, t, false, opt, gl, out);
    add_coarea_half(field, domain, cfg, t, true, opt, gl, out);
  } else if (N == 2 || N == 3) {
    const int nr = std::max(8, opt.panels * opt.order / 4);
    const QuadratureRule gr = gauss_legendre(std::min(nr, 256));
    const int rpanels = std::max(1, nr / static_cast<int>(gr.nodes.size()));
    const int nth = 2 * nr;
    const int ncos = N == 3 ? std::max(16, nr / 4) : 1;
    const QuadratureRule gc = gauss_legendre(ncos);
    Point z(N);
    for (int pr = 0; pr < rpanels; ++pr) {
      const double r0 = R * pr / rpanels, r1 = R * (pr + 1) / rpanels;
      for (size_t i = 0; i < gr.nodes.size(); ++i) {
        const double r = r0 + 0.5 * (r1 - r0) * (1.0 + gr.nodes[i]);
        const double wr = 0.5 * (r1 - r0) * gr.weights[i];
        for (int j = 0; j < nth; ++j) {
          const double th = 2 * kPi * j / nth;
          if (N == 2) {
            z[0] = cfg.center[0] + r * std::cos(th);
            z[1] = cfg.center[1] + r * std::sin(th);
            out.weights.push_back(wr * r * 2 * kPi / nth);
            out.distances.push_back(domain.boundary_distance(z));
            out.values.push_back(field.log_value(z, t));
          } else {
            for (size_t c = 0; c < gc.nodes.size(); ++c) {
              const double ct = gc.nodes[c], st = std::sqrt(1 - ct * ct);
              z[0] = cfg.center[0] + r * st * std::cos(th);
              z[1] = cfg.center[1] + r * st * std::sin(th);
              z[2] = cfg.center[2] + r * ct;
              out.weights.push_back(wr * r * r * gc.weights[c] * 2 * kPi / nth);
              out.distances.push_back(domain.boundary_distance(z));
              out.values.push_back(field.log_value(z, t));
            }
          }
        }
      }
    }
  } else {
    throw DomainError("sample_ball: tensor grid supports N = 2, 3 only");
  }
  for (auto& v : out.values) v = std::exp(v);
  return out;
}

HeatContentResult heat_content_traced(const ScalarField& field, const TouchingBallConfig& cfg, double t,
                                      const HeatContentOptions& opt) {
  if (!(t > 0)) throw DomainError("heat_content: t must be > 0");
  HeatContentResult res;
  double prev = std::numeric_limits<double>::quiet_NaN();
  const double vol = ball_volume(static_cast<int>(cfg.center.size()), cfg.radius);
  for (int panels = opt.initial_panels; panels <= opt.max_panels; panels *= 2) {
    BallGridOptions g;
    g.panels = panels;
    const BallSample s = sample_ball(field, cfg, t, g);
    double sum = 0.0;
    for (size_t i = 0; i < s.values.size(); ++i) sum += s.weights[i] * s.values[i];
    res.trace.emplace_back(panels, sum);
    if (!std::isnan(prev) && std::abs(sum - prev) <= opt.rel_tol * std::abs(sum) + 1e-15 * vol) {
      res.value = sum;
      return res;
    }
    prev = sum;
  }
  std::ostringstream os;
  os.precision(17);
  os << "heat_content: quadrature did not converge; trace:";
  for (auto& [n, v] : res.trace) os << " (" << n << ", " << v << ")";
  throw NumericalError(os.str());
}

double heat_content(const ScalarField& field, const TouchingBallConfig& cfg, double t,
                    const HeatContentOptions& opt) {
  return heat_content_traced(field, cfg, t, opt).value;
}

QMeanResult q_mean(const std::vector<double>& values, const std::vector<double>& weights, double q) {
  if (values.empty()) throw DomainError("q_mean: empty sample");
  if (values.size() != weights.size()) throw DomainError("q_mean: values and weights differ in size");
  if (!(q > 1.0)) throw DomainError("q_mean: q must exceed 1");
  QMeanResult r;
  r.q = q;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (std::isinf(q)) {
    r.mu = 0.5 * (lo + hi);
    return r;
  }
  auto F = [&](double mu) {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - mu;
      if (d != 0.0) s += weights[i] * std::copysign(std::pow(std::abs(d), q - 1.0), d);
    }
    return s;
  };
  if (q == 2.0) {
    double sw = 0.0, su = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      sw += weights[i];
      su += weights[i] * values[i];
    }
    r.mu = su / sw;
    r.residual = std::abs(F(r.mu));
    return r;
  }
  if (lo == hi) {
    r.mu = lo;
    return r;
  }
  const double flo = F(lo), fhi = F(hi);
  if (!(flo >= 0.0 && fhi <= 0.0)) throw NumericalError("q_mean: residual not monotone on [min, max]");
  std::uintmax_t it = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
  auto br = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi, tol, it);
  // pick the bracket end with the smaller residual
  const double fa = std::abs(F(br.first)), fb = std::abs(F(br.second));
  r.mu = fa <= fb ? br.first : br.second;
  r.residual = std::min(fa, fb);
  r.iterations = static_cast<int>(it);
  return r;
}

QMeanResult q_mean(const BallSample& sample, double q) { return q_mean(sample.values, sample.weights, q); }

double varadhan_residual(const ScalarField& field, const Point& x, double t) {
  if (!field.domain()) throw DomainError("varadhan_residual: field has no domain");
  if (!(t > 0)) throw DomainError("varadhan_residual: t must be > 0");
  const double d = distance_to_boundary(*field.domain(), x);
  return 4.0 * t * field.log_value(x, t) + field.p().conj() * d * d;
}

double half_space_residual_lower(const PExponent& p, double delta, double t) {
  // sqrt(p'/pi) int_0^inf exp(-b s - p' s^2/4) ds = erfcx(sqrt(p') delta / (2 sqrt t))
  const double sigma = std::sqrt(p.conj()) * delta / (2.0 * std::sqrt(t));
  return 4.0 * t * std::log(erfcx(sigma));
}

std::string to_string(RateModel m) {
  switch (m) {
    case RateModel::TLogInvT: return "t_log_inv_t";
    case RateModel::T: return "t";
    case RateModel::SqrtT: return "sqrt_t";
  }
  return "?";
}

double rate_model_value(RateModel m, double t) {
  switch (m) {
    case RateModel::TLogInvT: return t * std::log(1.0 / t);
    case RateModel::T: return t;
    case RateModel::SqrtT: return std::sqrt(t);
  }
  return 0.0;
}

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& r, RateModel model) {
  if (t.size() != r.size()) throw DomainError("rate_fit: size mismatch");
  if (t.size() < 3) throw DomainError("rate_fit: need at least 3 points");
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0)) throw DomainError("rate_fit: times must be positive");
    for (size_t j = 0; j < i; ++j)
      if (t[i] == t[j]) throw DomainError("rate_fit: degenerate design (repeated times)");
  }
  double smm = 0, srm = 0, srr = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double m = rate_model_value(model, t[i]);
    smm += m * m;
    srm += r[i] * m;
    srr += r[i] * r[i];
  }
  RateFit f;
  f.model = model;
  f.C = srm / smm;
  double res = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double e = r[i] - f.C * rate_model_value(model, t[i]);
    res += e * e;
  }
  f.relative_residual = srr > 0 ? std::sqrt(res / srr) : 0.0;
  return f;
}

WeingartenResult weingarten_check(const Domain& domain, double R, int n) {
  if (!(R > 0)) throw DomainError("weingarten_check: R must be > 0");
  const auto pts = domain.boundary_samples(n);
  WeingartenResult w;
  w.min_pi = std::numeric_limits<double>::infinity();
  w.max_pi = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int count = 0;
  for (const auto& y : pts) {
    const auto ci = curvatures_and_pi(domain, y, R);
    if (ci.condition_violated) {
      w.violations.push_back(y);
      continue;
    }
    sum += ci.pi_gamma;
    ++count;
    if (ci.pi_gamma < w.min_pi) {
      w.min_pi = ci.pi_gamma;
      w.argmin = y;
    }
    if (ci.pi_gamma > w.max_pi) {
      w.max_pi = ci.pi_gamma;
      w.argmax = y;
    }
  }
  if (count == 0) {
    w.verdict = "curvature_condition_violated";
    return w;
  }
  w.deviation = w.max_pi - w.min_pi;
  const double mean = sum / count;
  w.verdict = w.deviation <= 1e-6 * std::abs(mean) ? "constant" : "nonconstant";
  return w;
}

double richardson_sqrt_t(const std::vector<double>& t, const std::vector<double>& s) {
  if (t.size() != s.size() || t.size() < 3) throw DomainError("richardson: need three points");
  const size_t n = t.size();
  double x[3], y[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = std::sqrt(t[n - 3 + i]);
    y[i] = s[n - 3 + i];
  }
  double L = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
    L += w * y[i];
  }
  return L;
}

AsymptoticReport make_report(std::string name, std::vector<double> t_grid, std::vector<double> measured,
                             double target) {
  if (t_grid.size() != measured.size() || t_grid.empty()) throw DomainError("report: size mismatch");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i - 1])) throw DomainError("report: t grid must be strictly decreasing");
  for (double m : measured)
    if (!std::isfinite(m)) throw NumericalError("report: non-finite measurement");
  AsymptoticReport r;
  r.name = std::move(name);
  r.target = target;
  const size_t n = t_grid.size();
  if (n >= 3) {
    r.extrapolated = richardson_sqrt_t(t_grid, measured);
    const double d1 = measured[n - 2] - measured[n - 3];
    const double d2 = measured[n - 1] - measured[n - 2];
    r.fitted_rate = (d1 != 0 && d2 != 0) ? std::log(std::abs(d1 / d2)) / std::log(t_grid[n - 3] / t_grid[n - 2])
                                         : 0.0;
  } else {
    r.extrapolated = measured.back();
  }
  r.relative_gap = std::abs(r.extrapolated - target) / std::abs(target);
  r.t_grid = std::move(t_grid);
  r.measured = std::move(measured);
  return r;
}

std::string AsymptoticReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["t_grid"] = t_grid;
  j["measured"] = measured;
  j["target"] = target;
  j["fitted_rate"] = fitted_rate;
  j["extrapolated"] = extrapolated;
  j["relative_gap"] = relative_gap;
  return j.dump(2);
}

std::string AsymptoticReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "name,t,measured,target,extrapolated,relative_gap\n";
  for (size_t i = 0; i < t_grid.size(); ++i)
    os << name << ',' << t_grid[i] << ',' << measured[i] << ',' << target << ',' << extrapolated << ','
       << relative_gap << '\n';
  return os.str();
}

std::vector<double> geometric_grid(double t0, double ratio, int count) {
  if (!(t0 > 0) || !(ratio > 0 && ratio < 1) || count < 1) throw DomainError("geometric_grid: bad parameters");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = t0 * std::pow(ratio, i);
  return g;
}

std::vector<double> parallel_map(const std::vector<double>& grid, const std::function<double(double)>& f) {
  const size_t n = grid.size();
  std::vector<double> out(n, 0.0);
  std::vector<std::exception_ptr> errs(n);
  const size_t workers = std::max<size_t>(1, std::min<size_t>(n, std::thread::hardware_concurrency()));
  auto run = [&](size_t k) {
    for (size_t i = k; i < n; i += workers) {
      try {
        out[i] = f(grid[i]);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> th;
    for (size_t k = 0; k < workers; ++k) th.emplace_back(run, k);
    for (auto& x : th) x.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

AsymptoticReport heat_content_report(const ScalarField& field, const TouchingBallConfig& cfg,
                                     const std::vector<double>& t_grid) {
  const int N = static_cast<int>(cfg.center.size());
  auto m = parallel_map(t_grid, [&](double t) { return std::pow(t, -0.25 * (N + 1)) * heat_content(field, cfg, t); });
  const double target = heat_content_limit(N, field.p(), cfg.radius, cfg.pi_gamma);
  return make_report("heat_content", t_grid, std::move(m), target);
}

AsymptoticReport q_mean_report(const ScalarField& field, const TouchingBallConfig& cfg, double q,
                               const std::vector<double>& t_grid) {
  const int N = static_cast<int>(cfg.center.size());
  const QMeanLimit lim = q_mean_limit(N, field.p(), q, cfg.radius, cfg.pi_gamma);
  const double R2 = cfg.radius * cfg.radius;
  auto m = parallel_map(t_grid, [&](double t) {
    const BallSample s = sample_ball(field, cfg, t);
    return std::pow(R2 / t, lim.exponent) * q_mean(s, q).mu;
  });
  std::ostringstream name;
  name << "q_mean_q" << (std::isinf(q) ? std::string("inf") : std::to_string(q));
  return make_report(name.str(), t_grid, std::move(m), lim.value);
}

double erfc_shift_on_ball(const ScalarField& field, const TouchingBallConfig& cfg, double t,
                          const BallGridOptions& opt) {
  const BallSample s = sample_ball(field, cfg, t, opt);
  const double pc = field.p().conj();
  double worst = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i) {
    const double lu = std::log(s.values[i]);
    if (!std::isfinite(lu)) continue;
    const double v = VTransform::from_log(field.p(), std::min(lu, 0.0), t);
    worst = std::max(worst, std::abs(v - s.distances[i]));
  }
  return worst * std::sqrt(pc / (4.0 * t));
}

}  // namespace gtp
