#include "gtp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gtp/asymptotics.hpp"
#include "gtp/errors.hpp"

namespace gtp {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s;
}

double to_double(const std::string& s, int line) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'", line);
  }
  if (used != s.size()) throw ConfigError("trailing characters in number '" + s + "'", line);
  return v;
}

long long to_int(const std::string& s, int line) {
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + s + "'", line);
  }
  if (used != s.size()) throw ConfigError("expected an integer, got '" + s + "'", line);
  return v;
}

std::uint64_t to_u64(const std::string& s, int line) {
  if (s.empty() || s[0] == '-') throw ConfigError("expected an unsigned integer, got '" + s + "'", line);
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an unsigned integer, got '" + s + "'", line);
  }
  if (used != s.size()) throw ConfigError("expected an unsigned integer, got '" + s + "'", line);
  return v;
}

std::vector<double> to_list(const std::string& s, int line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list entry", line);
    out.push_back(to_double(item, line));
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      ".experiment",      ".seed",          ".out",           "domain.kind",    "domain.radius",
      "domain.a",         "domain.b",       "domain.m",       "problem.p",      "problem.N",
      "problem.R",        "problem.center", "problem.pi_gamma", "problem.distances", "time.t0",
      "time.ratio",       "time.count",     "qmean.q",        "elliptic.eps",   "fd.h",
      "fd.T",             "fd.dt",          "fd.data_low",    "fd.data_high",   "check.tolerance"};
  return keys;
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  auto same_list = [](const std::vector<double>& x, const std::vector<double>& y) { return x == y; };
  return experiment == o.experiment && seed == o.seed && out_dir == o.out_dir && domain == o.domain && p == o.p &&
         N == o.N && R == o.R && same_list(center, o.center) && pi_gamma == o.pi_gamma &&
         same_list(distances, o.distances) && t0 == o.t0 && ratio == o.ratio && count == o.count &&
         same_list(q, o.q) && same_list(eps, o.eps) && h == o.h && T == o.T && dt == o.dt &&
         data_low == o.data_low && data_high == o.data_high && tolerance == o.tolerance;
}

int ExperimentConfig::line_of(const std::string& key) const {
  auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"varadhan", "heat-content", "qmean",    "geometry",
                                                 "elliptic", "fd",           "constants"};
  return names;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> sections = {"domain", "problem", "time", "qmean", "elliptic", "fd", "check"};
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    const std::string full = section + "." + key;
    if (!known_keys().count(full))
      throw ConfigError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"), line);
    if (c.lines.count(full)) throw ConfigError("duplicate key '" + key + "'", line);
    if (val.empty()) throw ConfigError("missing value for '" + key + "'", line);
    c.lines[full] = line;

    if (full == ".experiment") c.experiment = val;
    else if (full == ".seed") c.seed = to_u64(val, line);
    else if (full == ".out") c.out_dir = val;
    else if (full == "domain.kind") c.domain.kind = val;
    else if (full == "domain.radius") c.domain.radius = to_double(val, line);
    else if (full == "domain.a") c.domain.a = to_double(val, line);
    else if (full == "domain.b") c.domain.b = to_double(val, line);
    else if (full == "domain.m") c.domain.m = to_double(val, line);
    else if (full == "problem.p") {
      try {
        c.p = PExponent::parse(val);
      } catch (const std::exception& e) {
        throw ConfigError(e.what(), line);
      }
    } else if (full == "problem.N") {
      const long long n = to_int(val, line);
      if (n < 2 || n > 64) throw ConfigError("N must lie in [2, 64]", line);
      c.N = static_cast<int>(n);
    } else if (full == "problem.R") c.R = to_double(val, line);
    else if (full == "problem.center") c.center = to_list(val, line);
    else if (full == "problem.pi_gamma") c.pi_gamma = to_double(val, line);
    else if (full == "problem.distances") c.distances = to_list(val, line);
    else if (full == "time.t0") c.t0 = to_double(val, line);
    else if (full == "time.ratio") c.ratio = to_double(val, line);
    else if (full == "time.count") {
      const long long n = to_int(val, line);
      if (n < 1 || n > 100000) throw ConfigError("count out of range", line);
      c.count = static_cast<int>(n);
    } else if (full == "qmean.q") c.q = to_list(val, line);
    else if (full == "elliptic.eps") c.eps = to_list(val, line);
    else if (full == "fd.h") c.h = to_double(val, line);
    else if (full == "fd.T") c.T = to_double(val, line);
    else if (full == "fd.dt") c.dt = to_double(val, line);
    else if (full == "fd.data_low") c.data_low = to_double(val, line);
    else if (full == "fd.data_high") c.data_high = to_double(val, line);
    else if (full == "check.tolerance") c.tolerance = to_double(val, line);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "experiment = " << c.experiment << "\n";
  os << "seed = " << c.seed << "\n";
  os << "out = " << c.out_dir << "\n\n";
  os << "[domain]\n";
  os << "kind = " << c.domain.kind << "\n";
  os << "radius = " << fmt(c.domain.radius) << "\n";
  os << "a = " << fmt(c.domain.a) << "\n";
  os << "b = " << fmt(c.domain.b) << "\n";
  os << "m = " << fmt(c.domain.m) << "\n\n";
  os << "[problem]\n";
  os << "p = " << c.p.str() << "\n";
  os << "N = " << c.N << "\n";
  os << "R = " << fmt(c.R) << "\n";
  if (!c.center.empty()) os << "center = " << fmt_list(c.center) << "\n";
  os << "pi_gamma = " << fmt(c.pi_gamma) << "\n";
  if (!c.distances.empty()) os << "distances = " << fmt_list(c.distances) << "\n";
  os << "\n[time]\n";
  os << "t0 = " << fmt(c.t0) << "\n";
  os << "ratio = " << fmt(c.ratio) << "\n";
  os << "count = " << c.count << "\n\n";
  if (!c.q.empty()) os << "[qmean]\nq = " << fmt_list(c.q) << "\n\n";
  if (!c.eps.empty()) os << "[elliptic]\neps = " << fmt_list(c.eps) << "\n\n";
  os << "[fd]\n";
  os << "h = " << fmt(c.h) << "\n";
  os << "T = " << fmt(c.T) << "\n";
  os << "dt = " << fmt(c.dt) << "\n";
  os << "data_low = " << fmt(c.data_low) << "\n";
  os << "data_high = " << fmt(c.data_high) << "\n\n";
  os << "[check]\n";
  os << "tolerance = " << fmt(c.tolerance) << "\n";
  return os.str();
}

Domain ExperimentConfig::build_domain() const {
  const auto& k = domain.kind;
  if (k == "half_space") return Domain::half_space(N);
  if (k == "ball") return Domain::ball(domain.radius, N);
  if (k == "ellipse") return Domain::ellipse(domain.a, domain.b);
  if (k == "superellipse") return Domain::superellipse(domain.a, domain.b, domain.m);
  throw ConfigError("unknown domain kind '" + k + "'", line_of("domain.kind"));
}

std::vector<double> ExperimentConfig::t_grid() const { return geometric_grid(t0, ratio, count); }

Point ExperimentConfig::touching_center() const {
  Point x = Point::Zero(N);
  if (!center.empty()) {
    if (static_cast<int>(center.size()) != N)
      throw ConfigError("center must have N coordinates", line_of("problem.center"));
    for (int i = 0; i < N; ++i) x[i] = center[i];
    return x;
  }
  const auto& k = domain.kind;
  if (k == "half_space") x[0] = R;
  else if (k == "ball") x[0] = domain.radius - R;
  else x[0] = domain.a - R;
  return x;
}

void validate_config(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'", c.line_of(".experiment"));
  auto need = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(msg, c.line_of(key));
  };
  const auto& k = c.domain.kind;
  need(k == "half_space" || k == "ball" || k == "ellipse" || k == "superellipse", "domain.kind",
       "domain kind must be half_space, ball, ellipse or superellipse");
  need(c.domain.radius > 0 && std::isfinite(c.domain.radius), "domain.radius", "radius must be positive");
  need(c.domain.a > 0 && c.domain.b > 0 && std::isfinite(c.domain.a) && std::isfinite(c.domain.b), "domain.a",
       "semi-axes must be positive");
  need(c.domain.m >= 2 && std::isfinite(c.domain.m), "domain.m", "superellipse exponent must be >= 2");
  need(c.N >= 2, "problem.N", "N must be >= 2");
  if (k == "ellipse" || k == "superellipse") need(c.N == 2, "problem.N", "planar domains need N = 2");
  need(c.R > 0 && std::isfinite(c.R), "problem.R", "R must be positive");
  need(c.pi_gamma > 0 && std::isfinite(c.pi_gamma), "problem.pi_gamma", "pi_gamma must be positive");
  for (double d : c.distances) need(d >= 0 && std::isfinite(d), "problem.distances", "distances must be >= 0");
  need(c.t0 > 0 && std::isfinite(c.t0), "time.t0", "t0 must be positive");
  need(c.ratio > 0 && c.ratio < 1, "time.ratio", "ratio must lie in (0, 1)");
  need(c.count >= 1, "time.count", "count must be >= 1");
  for (double q : c.q) need(q > 1, "qmean.q", "every q must exceed 1");
  for (double e : c.eps) need(e > 0 && std::isfinite(e), "elliptic.eps", "every eps must be positive");
  need(c.h > 0 && std::isfinite(c.h), "fd.h", "h must be positive");
  need(c.T > 0 && std::isfinite(c.T), "fd.T", "T must be positive");
  need(c.dt >= 0 && std::isfinite(c.dt), "fd.dt", "dt must be >= 0");
  need(c.data_low > 0 && c.data_low <= c.data_high && std::isfinite(c.data_high), "fd.data_low",
       "boundary data needs 0 < data_low <= data_high");
  need(std::isfinite(c.tolerance), "check.tolerance", "tolerance must be finite");

  const auto& e = c.experiment;
  if (e == "varadhan") {
    need(k == "half_space" || k == "ball", "domain.kind", "varadhan needs a half_space or ball domain");
    need(c.count >= 3, "time.count", "rate fits need at least 3 times");
    need(!c.distances.empty(), "problem.distances", "varadhan needs distances");
    if (k == "ball")
      for (double d : c.distances)
        need(d <= c.domain.radius, "problem.distances", "distance exceeds the ball radius");
  }
  if (e == "heat-content" || e == "qmean" || e == "geometry") {
    if (e != "geometry") need(k == "half_space" || k == "ball", "domain.kind", e + " needs a half_space or ball domain");
    need(c.count >= 3, "time.count", "extrapolation needs at least 3 times");
    if (k == "ball") need(c.R < c.domain.radius, "problem.R", "R must be smaller than the ball radius");
    if (k == "ball" && (e != "geometry")) need(c.N <= 3, "problem.N", "ball content quadrature supports N = 2, 3");
  }
  if (e == "qmean") need(!c.q.empty(), "qmean.q", "qmean needs at least one q");
  if (e == "elliptic") {
    need(k == "ball", "domain.kind", "elliptic needs a ball domain");
    need(!c.eps.empty(), "elliptic.eps", "elliptic needs eps values");
  }
  if (e == "fd") {
    need(k != "half_space", "domain.kind", "fd needs a bounded planar domain");
    need(c.N == 2, "problem.N", "fd solves in two dimensions");
    need(c.h < 0.5 * std::min({c.domain.radius, c.domain.a, c.domain.b}), "fd.h", "h too coarse for the domain");
  }
}

}  // namespace gtp
