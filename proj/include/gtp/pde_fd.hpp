#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gtp/closed_form.hpp"
#include "gtp/geometry.hpp"
#include "gtp/specfun.hpp"

namespace gtp {

// Boundary data h(y, t) at a boundary point y.
using BoundaryData = std::function<double(const Eigen::Vector2d&, double)>;

// One side of a second difference: a lattice node, or the boundary crossing
// at fraction s of the lattice step.
struct Arm {
  std::int32_t target = 0;  // node index if >= 0, else -(crossing index + 1)
  double s = 1.0;
};

// Value at a near-boundary node: linear along the inward normal between the
// boundary datum at the projection and a bilinear sample one step inside.
struct NormalStencil {
  std::int32_t corner[4] = {0, 0, 0, 0};
  double weight[4] = {0, 0, 0, 0};
  double theta = 0.0;  // weight of the inner sample
};

// Uniform lattice x = (i h, j h) covering a bounded 2D domain. Nodes within
// snap * h of the boundary are slaved to the boundary data by NormalStencil.
class Grid2D {
 public:
  enum class NodeType : std::uint8_t { Exterior, Boundary, Interior };

  Grid2D(Domain domain, double h, double snap = 0.5, int stencil_radius = 3);

  const Domain& domain() const { return domain_; }
  double h() const { return h_; }
  double snap() const { return snap_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }
  int index(int i, int j) const { return j * nx_ + i; }
  int i_of(int node) const { return node % nx_; }
  int j_of(int node) const { return node / nx_; }
  Eigen::Vector2d position(int node) const;
  NodeType type(int node) const { return types_[node]; }

  const std::vector<int>& interior() const { return interior_; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  // Projection of each boundary node onto the boundary.
  const std::vector<Eigen::Vector2d>& boundary_projections() const { return projections_; }
  const std::vector<NormalStencil>& normal_stencils() const { return normal_; }
  // Boundary crossings referenced by arms.
  const std::vector<Eigen::Vector2d>& crossings() const { return crossings_; }

  // Lattice directions: the first four are (1,0), (0,1), (1,1), (1,-1);
  // the rest are the primitive vectors with coordinates up to stencil_radius.
  const std::vector<Eigen::Vector2i>& directions() const { return directions_; }
  int stencil_radius() const { return radius_; }
  // Arms of interior node k (position in interior()) along direction d.
  const Arm& arm(int k, int d, bool forward) const {
    return arms_[(static_cast<size_t>(k) * directions_.size() + d) * 2 + (forward ? 0 : 1)];
  }

 private:
  Domain domain_;
  double h_;
  double snap_;
  int radius_;
  int nx_ = 0, ny_ = 0;
  int i0_ = 0, j0_ = 0;
  std::vector<NodeType> types_;
  std::vector<int> interior_;
  std::vector<int> boundary_nodes_;
  std::vector<Eigen::Vector2d> projections_;
  std::vector<NormalStencil> normal_;
  std::vector<Eigen::Vector2d> crossings_;
  std::vector<Eigen::Vector2i> directions_;
  std::vector<Arm> arms_;
};

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double cfl = 0.0;  // max over nodes of dt * (sum of stencil coefficients)
  int critical_nodes = 0;
};

struct FieldState {
  std::vector<double> values;    // per node; NaN at exterior nodes
  std::vector<double> crossing;  // boundary values at grid.crossings()
  double t = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::vector<StepRecord> cfl_trace;
  bool max_principle_held = true;
  bool time_monotone = true;
  // range of initial and boundary data seen so far
  double data_lo = 0.0;
  double data_hi = 0.0;
};

struct LaplacianValue {
  double value = 0.0;
  // relaxed lower and upper values, equal to value at non-critical nodes
  double lower = 0.0;
  double upper = 0.0;
  bool critical = false;
  double coefficient_sum = 0.0;
};

struct SolverOptions {
  double dt = 0.0;  // 0 selects safety * (largest stable step)
  double safety = 0.9;
  double gradient_threshold = -1.0;  // negative selects h
  bool check_invariants = true;
};

class FdSolver {
 public:
  FdSolver(std::shared_ptr<const Grid2D> grid, PExponent p, BoundaryData data, SolverOptions opt = {});

  const Grid2D& grid() const { return *grid_; }
  const PExponent& p() const { return p_; }
  double dt() const { return dt_; }
  // Largest step keeping the explicit update monotone.
  double dt_limit() const { return dt_limit_; }

  FieldState initial_state() const;
  // Nodal and crossing values from a function (for operator checks).
  FieldState sample_state(const std::function<double(const Eigen::Vector2d&)>& f, double t = 0.0) const;

  // Discrete operator at interior node k (index into grid().interior()).
  LaplacianValue gtp_laplacian(const FieldState& state, int k) const;
  // Explicit value after one step at interior node k.
  double update_at(const FieldState& state, int k) const;

  void step(FieldState& state) const;
  // State at the first step time >= T.
  FieldState solve_to(double T) const;

 private:
  void refresh_boundary(FieldState& state, double t) const;
  std::shared_ptr<const Grid2D> grid_;
  PExponent p_;
  BoundaryData data_;
  SolverOptions opt_;
  double c_iso_ = 0.0;  // A = c_iso I + c_dir e e^T
  double c_dir_ = 0.0;
  bool wide_ = false;
  std::vector<double> dir_angle_;  // angles of the wide directions in [0, pi)
  std::vector<int> dir_order_;
  double eps_g_ = 0.0;
  double dt_limit_ = 0.0;
  double dt_ = 0.0;
};

FieldState solve_to(std::shared_ptr<const Grid2D> grid, const PExponent& p, const BoundaryData& data, double T,
                    const SolverOptions& opt = {});

struct FdErrorReport {
  double sup = 0.0;
  double l2 = 0.0;
  int nodes = 0;
  Eigen::Vector2d argmax = Eigen::Vector2d::Zero();
};

FdErrorReport validate_against_reference(const Grid2D& grid, const FieldState& state, const ScalarField& reference);
FdErrorReport validate_against_reference(const Grid2D& grid, const FieldState& state,
                                         const std::function<double(const Eigen::Vector2d&)>& reference);
// sup-error ratio between a run at h and one at h/2.
double refinement_ratio(const FdErrorReport& coarse, const FdErrorReport& fine);

// Bilinear interpolation; exterior corners take exterior_value.
double interpolate(const Grid2D& grid, const FieldState& state, const Eigen::Vector2d& x, double exterior_value);

void write_csv(const Grid2D& grid, const FieldState& state, std::ostream& os);
void write_binary(const Grid2D& grid, const FieldState& state, std::ostream& os);

struct GridDump {
  std::uint64_t nx = 0, ny = 0;
  double h = 0.0, t = 0.0;
  std::vector<double> values;  // row-major, j outer
};
GridDump read_binary(std::istream& is);

}  // namespace gtp
