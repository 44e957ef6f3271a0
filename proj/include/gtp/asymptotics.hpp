#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gtp/closed_form.hpp"
#include "gtp/geometry.hpp"

namespace gtp {

// Named constants of the content and q-mean asymptotics.
double heat_content_constant(int N);    // 2^{(N+3)/2} pi^{(N-1)/2} / ((N+1) Gamma((N+1)/4))
double mean_value_constant(int N);      // 2^{(N+1)/2} N Gamma(N/2) / (sqrt(pi) (N+1) Gamma((N+1)/4))
double barrier_qmean_constant(int N);   // 2^{-(N+1)/2} N! / Gamma((N+1)/2)^2
double qmean_constant(int N);           // N! / Gamma((N+1)/2)^2

double heat_content_limit(int N, const PExponent& p, double R, double pi_gamma);
// Same limit assembled from the area limit and the erfc moment.
double heat_content_limit_from_moment(int N, const PExponent& p, double R, double pi_gamma);

struct QMeanLimit {
  double value = 0.5;
  double exponent = 0.0;  // power of R^2/t
};
QMeanLimit q_mean_limit(int N, const PExponent& p, double q, double R, double pi_gamma);
// Limit assembled through the barrier-scale constant and xi = 2 sqrt(t/p').
QMeanLimit q_mean_limit_from_barrier(int N, const PExponent& p, double q, double R, double pi_gamma);

// Weighted sample of a field on the touching ball.
struct BallSample {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<double> distances;  // boundary distance of each node
  double volume = 0.0;
};

struct BallGridOptions {
  int panels = 64;  // per half of the distance range
  int order = 16;
};

// Co-area grid when the field has a distance profile and the area is analytic,
// otherwise a polar/spherical tensor grid.
BallSample sample_ball(const ScalarField& field, const TouchingBallConfig& config, double t,
                       const BallGridOptions& opt = {});

struct HeatContentOptions {
  int initial_panels = 8;
  int max_panels = 512;
  double rel_tol = 1e-10;
};

struct HeatContentResult {
  double value = 0.0;
  std::vector<std::pair<int, double>> trace;  // (panels, value)
};

HeatContentResult heat_content_traced(const ScalarField& field, const TouchingBallConfig& config, double t,
                                      const HeatContentOptions& opt = {});
double heat_content(const ScalarField& field, const TouchingBallConfig& config, double t,
                    const HeatContentOptions& opt = {});

struct QMeanResult {
  double mu = 0.0;
  double q = 2.0;
  double residual = 0.0;
  int iterations = 0;
};

// q = infinity is passed as std::numeric_limits<double>::infinity().
QMeanResult q_mean(const std::vector<double>& values, const std::vector<double>& weights, double q);
QMeanResult q_mean(const BallSample& sample, double q);

double varadhan_residual(const ScalarField& field, const Point& x, double t);
// Lower end of the bracket for the half-space residual when x_1 <= delta.
double half_space_residual_lower(const PExponent& p, double delta, double t);

enum class RateModel { TLogInvT, T, SqrtT };
std::string to_string(RateModel m);
double rate_model_value(RateModel m, double t);

struct RateFit {
  RateModel model = RateModel::TLogInvT;
  double C = 0.0;
  double relative_residual = 0.0;  // ||r - C m|| / ||r||
};
RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& r, RateModel model);

struct WeingartenResult {
  double min_pi = 0.0;
  double max_pi = 0.0;
  double deviation = 0.0;  // max - min
  std::string verdict;     // "constant" or "nonconstant"
  Point argmin;
  Point argmax;
  std::vector<Point> violations;  // samples with R kappa >= 1
};
WeingartenResult weingarten_check(const Domain& domain, double R, int n);

// Three-point extrapolation to t = 0 in the variable sqrt(t).
double richardson_sqrt_t(const std::vector<double>& t, const std::vector<double>& s);

struct AsymptoticReport {
  std::string name;
  std::vector<double> t_grid;
  std::vector<double> measured;
  double target = 0.0;
  double fitted_rate = 0.0;
  double extrapolated = 0.0;
  double relative_gap = 0.0;

  std::string to_json() const;
  std::string to_csv() const;
};

AsymptoticReport make_report(std::string name, std::vector<double> t_grid, std::vector<double> measured,
                             double target);

std::vector<double> geometric_grid(double t0, double ratio, int count);

// Maps f over the grid on worker threads; results keep grid order.
std::vector<double> parallel_map(const std::vector<double>& grid, const std::function<double(double)>& f);

AsymptoticReport heat_content_report(const ScalarField& field, const TouchingBallConfig& config,
                                     const std::vector<double>& t_grid);
AsymptoticReport q_mean_report(const ScalarField& field, const TouchingBallConfig& config, double q,
                               const std::vector<double>& t_grid);

// Largest |v - d| sqrt(p'/(4t)) over the sample nodes of the ball.
double erfc_shift_on_ball(const ScalarField& field, const TouchingBallConfig& config, double t,
                          const BallGridOptions& opt = {});

}  // namespace gtp
