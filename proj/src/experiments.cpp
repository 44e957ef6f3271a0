#include "gtp/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gtp/asymptotics.hpp"
#include "gtp/closed_form.hpp"
#include "gtp/errors.hpp"
#include "gtp/geometry.hpp"
#include "gtp/pde_fd.hpp"

#ifndef GTP_GIT_REVISION
#define GTP_GIT_REVISION "unknown"
#endif

namespace gtp {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

double tol_or(const ExperimentConfig& c, double fallback) { return c.tolerance >= 0 ? c.tolerance : fallback; }

Check check_le(std::string name, double value, double tol) { return {std::move(name), value, tol, value <= tol}; }

FieldPtr exact_field(const ExperimentConfig& c) {
  if (c.domain.kind == "half_space") return half_space_solution(c.p, c.N);
  if (c.domain.kind == "ball") return ball_parabolic(c.p, c.domain.radius, c.N);
  throw ConfigError("no closed-form solution for domain kind '" + c.domain.kind + "'", c.line_of("domain.kind"));
}

TouchingBallConfig touching(const ExperimentConfig& c, const Domain& d) {
  try {
    return validate_touching_ball(d, c.touching_center(), c.R);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("touching ball: ") + e.what(), c.line_of("problem.R"));
  }
}

json report_json(const AsymptoticReport& r) { return json::parse(r.to_json()); }

ExperimentOutcome run_varadhan(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const Domain dom = c.build_domain();
  const FieldPtr u = exact_field(c);
  const auto ts = c.t_grid();
  const bool half = c.domain.kind == "half_space";
  double delta = 0.0;
  for (double d : c.distances) delta = std::max(delta, d);

  std::ostringstream csv;
  csv << "distance,t,residual,bracket_lower\n";
  json rows = json::array();
  double worst_above = -std::numeric_limits<double>::infinity();
  double worst_below = 0.0;
  for (double d : c.distances) {
    Point x = Point::Zero(c.N);
    x[0] = half ? d : c.domain.radius - d;
    std::vector<double> r;
    for (double t : ts) {
      const double res = varadhan_residual(*u, x, t);
      const double lo = half ? half_space_residual_lower(c.p, delta, t) : std::numeric_limits<double>::quiet_NaN();
      r.push_back(res);
      csv << num(d) << ',' << num(t) << ',' << num(res) << ',' << num(lo) << '\n';
      worst_above = std::max(worst_above, res);
      if (half) worst_below = std::max(worst_below, lo - res);
    }
    json fits = json::object();
    RateFit best;
    best.relative_residual = std::numeric_limits<double>::infinity();
    for (RateModel m : {RateModel::TLogInvT, RateModel::T, RateModel::SqrtT}) {
      const RateFit f = rate_fit(ts, r, m);
      fits[to_string(m)] = {{"C", jnum(f.C)}, {"relative_residual", jnum(f.relative_residual)}};
      if (f.relative_residual < best.relative_residual) best = f;
    }
    rows.push_back({{"distance", d}, {"residuals", r}, {"fits", fits}, {"best_model", to_string(best.model)}});
    if (!half) {
      const double rl = rate_fit(ts, r, RateModel::TLogInvT).relative_residual;
      const double rt = rate_fit(ts, r, RateModel::T).relative_residual;
      if (c.p.is_infinite()) {
        out.checks.push_back({"model_t_beats_t_log_inv_t@d=" + num(d), rt - rl, 0.0, rt < rl});
      } else {
        out.checks.push_back(check_le("t_log_inv_t_fit_residual@d=" + num(d), rl, tol_or(c, 0.1)));
      }
    }
  }
  if (half) {
    out.checks.push_back(check_le("max_residual", worst_above, 0.0));
    out.checks.push_back(check_le("max_bracket_violation", worst_below, 1e-12));
  }
  out.data = {{"t_grid", ts}, {"points", rows}};
  if (half) out.data["bracket_delta"] = delta;
  out.csv = csv.str();
  return out;
}

ExperimentOutcome run_heat_content(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const Domain dom = c.build_domain();
  const TouchingBallConfig tb = touching(c, dom);
  const FieldPtr u = exact_field(c);
  const AsymptoticReport rep = heat_content_report(*u, tb, c.t_grid());
  out.checks.push_back(check_le("relative_gap", rep.relative_gap, tol_or(c, 0.02)));
  out.data = report_json(rep);
  out.data["pi_gamma"] = tb.pi_gamma;
  out.data["limit_from_moment"] = heat_content_limit_from_moment(c.N, c.p, c.R, tb.pi_gamma);
  out.csv = rep.to_csv();
  return out;
}

ExperimentOutcome run_qmean(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const Domain dom = c.build_domain();
  const TouchingBallConfig tb = touching(c, dom);
  const FieldPtr u = exact_field(c);
  const auto ts = c.t_grid();
  json reps = json::array();
  std::string csv;
  for (double q : c.q) {
    AsymptoticReport rep = q_mean_report(*u, tb, q, ts);
    if (std::isinf(q)) {
      rep.extrapolated = rep.measured.back();
      rep.relative_gap = std::abs(rep.extrapolated - rep.target) / rep.target;
      out.checks.push_back(check_le("mu_inf_gap_at_smallest_t", rep.relative_gap, tol_or(c, 0.02)));
    } else {
      out.checks.push_back(check_le("relative_gap_q=" + num(q), rep.relative_gap, tol_or(c, 0.05)));
    }
    reps.push_back(report_json(rep));
    std::string block = rep.to_csv();
    if (!csv.empty()) block = block.substr(block.find('\n') + 1);
    csv += block;
  }
  const double lhs = qmean_constant(c.N) * erfc_moment(c.N, 2.0);
  const double rhs = mean_value_constant(c.N);
  const double gap = std::abs(lhs - rhs) / rhs;
  out.checks.push_back(check_le("q2_constant_vs_mean_value_constant", gap, 1e-10));
  out.data = {{"reports", reps}, {"pi_gamma", tb.pi_gamma}};
  out.csv = csv;
  return out;
}

ExperimentOutcome run_geometry(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const Domain dom = c.build_domain();
  json data = json::object();
  std::string csv = "name,s,measured,target,extrapolated,relative_gap\n";
  if (c.domain.kind == "half_space" || c.domain.kind == "ball" || c.domain.kind == "ellipse") {
    const TouchingBallConfig tb = touching(c, dom);
    const auto ss = c.t_grid();
    const double e = 0.5 * (c.N - 1);
    const bool analytic = has_analytic_parallel_area(dom);
    MonteCarloOptions mc;
    mc.seed = c.seed;
    std::vector<double> m;
    for (double s : ss) m.push_back(std::pow(s, -e) * parallel_area(dom, tb, s, AreaMethod::Auto, mc).area);
    const AsymptoticReport rep = make_report("parallel_area", ss, m, parallel_area_limit(c.N, c.R, tb.pi_gamma));
    const std::string body = rep.to_csv();
    csv = body;
    data["report"] = report_json(rep);
    data["pi_gamma"] = tb.pi_gamma;
    data["analytic"] = analytic;
    if (analytic) {
      out.checks.push_back(check_le("lemma_limit_gap", rep.relative_gap, tol_or(c, 0.01)));
      // Pi recovered from the extrapolated limit
      const double pi_from_limit = std::pow(parallel_area_limit(c.N, c.R, 1.0) / rep.extrapolated, 2);
      const double sign_gap = std::abs(pi_from_limit - tb.pi_gamma) / tb.pi_gamma;
      out.checks.push_back(check_le("curvature_sign_consistency", sign_gap, 0.02));
      data["pi_from_limit"] = pi_from_limit;
      const double s = ss.front();
      const ParallelArea a = parallel_area(dom, tb, s);
      const ParallelArea b = parallel_area(dom, tb, s, AreaMethod::MonteCarlo, mc);
      const double z = std::abs(a.area - b.area) / std::max(b.std_error, 1e-300);
      out.checks.push_back(check_le("monte_carlo_sigmas", z, 3.0));
      data["monte_carlo"] = {{"s", s}, {"analytic", a.area}, {"estimate", b.area}, {"std_error", b.std_error}};
    } else {
      data["note"] = "Monte Carlo areas; no analytic limit check";
    }
  }
  if (dom.bounded() && c.N == 2) {
    const WeingartenResult w = weingarten_check(dom, c.R, 2048);
    data["weingarten"] = {{"min_pi", w.min_pi}, {"max_pi", w.max_pi}, {"deviation", w.deviation},
                          {"verdict", w.verdict}, {"violations", w.violations.size()}};
    out.checks.push_back({"curvature_condition", static_cast<double>(w.violations.size()), 0.0, w.violations.empty()});
  }
  out.data = data;
  out.csv = csv;
  return out;
}

ExperimentOutcome run_elliptic(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const double rho = c.domain.radius;
  const double sp = std::sqrt(c.p.conj());
  const int nr = 64;
  std::ostringstream csv;
  csv << "eps,sup_residual\n";
  std::vector<double> sups;
  for (double eps : c.eps) {
    const BallElliptic u(c.p, rho, c.N, eps);
    double sup = 0.0;
    for (int i = 0; i <= nr; ++i) {
      const double r = rho * i / nr;
      sup = std::max(sup, std::abs(eps * u.radial_log_value(r) + sp * (rho - r)));
    }
    sups.push_back(sup);
    csv << num(eps) << ',' << num(sup) << '\n';
  }
  bool mono = true;
  for (size_t i = 1; i < sups.size(); ++i)
    if ((c.eps[i] < c.eps[i - 1]) != (sups[i] < sups[i - 1])) mono = false;
  out.checks.push_back({"monotone_in_eps", mono ? 0.0 : 1.0, 0.0, mono});
  out.checks.push_back(check_le("final_sup_residual", sups.back(), tol_or(c, 5e-3)));
  out.data = {{"eps", c.eps}, {"sup_residual", sups}};
  out.csv = csv.str();
  return out;
}

ExperimentOutcome run_fd(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const Domain dom = c.build_domain();
  auto grid = std::make_shared<const Grid2D>(dom, c.h);
  SolverOptions opt;
  opt.dt = c.dt;
  const bool constant = c.data_low == c.data_high;
  const double lo = c.data_low, hi = c.data_high;
  BoundaryData data = [lo, hi](const Eigen::Vector2d& y, double) {
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::sin(3.0 * std::atan2(y.y(), y.x()));
  };
  std::unique_ptr<FdSolver> solver;
  try {
    solver = std::make_unique<FdSolver>(grid, c.p, data, opt);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), c.line_of("fd.dt"));
  }
  const FieldState st = solver->solve_to(c.T);
  double cfl = 0.0;
  int crit = 0;
  for (const auto& r : st.cfl_trace) {
    cfl = std::max(cfl, r.cfl);
    crit = std::max(crit, r.critical_nodes);
  }
  json d = {{"nx", grid->nx()},      {"ny", grid->ny()},   {"h", grid->h()},
            {"t", st.t},             {"dt", st.dt},        {"steps", st.steps},
            {"max_cfl", cfl},        {"max_critical_nodes", crit},
            {"max_principle", st.max_principle_held}, {"time_monotone", st.time_monotone}};
  out.checks.push_back({"max_principle", st.max_principle_held ? 0.0 : 1.0, 0.0, st.max_principle_held});
  if (constant) {
    out.checks.push_back({"time_monotone", st.time_monotone ? 0.0 : 1.0, 0.0, st.time_monotone});
    if (c.domain.kind == "ball") {
      const auto ref = ball_parabolic(c.p, c.domain.radius, 2);
      const double scale = lo;
      const FdErrorReport e = validate_against_reference(
          *grid, st, [&](const Eigen::Vector2d& x) {
            Point z(2);
            z << x.x(), x.y();
            return scale * ref->value(z, st.t);
          });
      d["sup_error"] = e.sup;
      d["l2_error"] = e.l2;
      out.checks.push_back(check_le("sup_error_vs_series", e.sup, tol_or(c, 0.02)));
    }
  } else {
    FdSolver s_lo(grid, c.p, [lo](const Eigen::Vector2d&, double) { return lo; }, opt);
    FdSolver s_hi(grid, c.p, [hi](const Eigen::Vector2d&, double) { return hi; }, opt);
    const FieldState a = s_lo.solve_to(c.T), b = s_hi.solve_to(c.T);
    double viol = 0.0;
    for (int n : grid->interior())
      viol = std::max({viol, a.values[n] - st.values[n], st.values[n] - b.values[n]});
    d["sandwich_violation"] = viol;
    out.checks.push_back(check_le("boundary_data_sandwich", viol, 0.0));
  }
  std::ostringstream csv, bin;
  write_csv(*grid, st, csv);
  write_binary(*grid, st, bin);
  out.files.emplace_back("fd.bin", bin.str());
  out.data = d;
  out.csv = csv.str();
  return out;
}

ExperimentOutcome run_constants(const ExperimentConfig& c) {
  ExperimentOutcome out;
  const int N = c.N;
  std::ostringstream csv;
  csv << "name,value\n";
  json d = json::object();
  auto put = [&](const std::string& k, double v) {
    d[k] = jnum(v);
    csv << k << ',' << num(v) << '\n';
  };
  put("heat_content_constant", heat_content_constant(N));
  put("mean_value_constant", mean_value_constant(N));
  put("barrier_qmean_constant", barrier_qmean_constant(N));
  put("qmean_constant", qmean_constant(N));
  put("heat_content_exponent", 0.25 * (N + 1));
  put("heat_content_limit", heat_content_limit(N, c.p, c.R, c.pi_gamma));
  put("heat_content_limit_from_moment", heat_content_limit_from_moment(N, c.p, c.R, c.pi_gamma));
  put("parallel_area_limit", parallel_area_limit(N, c.R, c.pi_gamma));
  put("p_conj", c.p.conj());
  for (double q : c.q) {
    const std::string tag = "q=" + num(q);
    const QMeanLimit a = q_mean_limit(N, c.p, q, c.R, c.pi_gamma);
    put("q_mean_limit@" + tag, a.value);
    put("q_mean_exponent@" + tag, a.exponent);
    if (!std::isinf(q)) {
      put("erfc_moment@" + tag, erfc_moment(N, q));
      const QMeanLimit b = q_mean_limit_from_barrier(N, c.p, q, c.R, c.pi_gamma);
      out.checks.push_back(
          check_le("barrier_form_agreement@" + tag, std::abs(a.value - b.value) / a.value, 1e-10));
    }
  }
  const double mv = qmean_constant(N) * erfc_moment(N, 2.0);
  out.checks.push_back(
      check_le("q2_constant_vs_mean_value_constant", std::abs(mv - mean_value_constant(N)) / mean_value_constant(N),
               1e-10));
  const double h1 = heat_content_limit(N, c.p, c.R, c.pi_gamma);
  const double h2 = heat_content_limit_from_moment(N, c.p, c.R, c.pi_gamma);
  out.checks.push_back(check_le("heat_content_dual_path", std::abs(h1 - h2) / h1, 1e-10));
  out.data = d;
  out.csv = csv.str();
  return out;
}

}  // namespace

bool ExperimentOutcome::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string git_revision() { return GTP_GIT_REVISION; }

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentOutcome out;
  const auto& e = cfg.experiment;
  if (e == "varadhan") out = run_varadhan(cfg);
  else if (e == "heat-content") out = run_heat_content(cfg);
  else if (e == "qmean") out = run_qmean(cfg);
  else if (e == "geometry") out = run_geometry(cfg);
  else if (e == "elliptic") out = run_elliptic(cfg);
  else if (e == "fd") out = run_fd(cfg);
  else out = run_constants(cfg);
  out.name = e;
  return out;
}

int run_and_write(const ExperimentConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentOutcome out = run_experiment(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << body;
  };
  json checks = json::array();
  for (const auto& c : out.checks)
    checks.push_back({{"name", c.name}, {"value", jnum(c.value)}, {"tolerance", jnum(c.tolerance)}, {"pass", c.pass}});
  json meta = {{"experiment", out.name}, {"git_revision", git_revision()}, {"wall_time_s", wall},
               {"seed", cfg.seed},       {"config", emit_config(cfg)}};
  json full = {{"meta", meta}, {"data", out.data}, {"checks", checks}};
  write(out.name + ".csv", out.csv);
  write(out.name + ".json", full.dump(2) + "\n");
  for (const auto& [name, bytes] : out.files) write(name, bytes);
  const int code = out.pass() ? kExitPass : kExitTolerance;
  json summary = {{"experiment", out.name}, {"pass", out.pass()}, {"exit_code", code}, {"checks", checks},
                  {"git_revision", git_revision()}, {"wall_time_s", wall}};
  write("summary.json", summary.dump(2) + "\n");
  for (const auto& c : out.checks)
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << num(c.value) << " tol=" << num(c.tolerance) << '\n';
  return code;
}

}  // namespace gtp
