#pragma once
// Uniform grids on (0,1)^d, d in {1,2}, with zero Dirichlet boundary, and the
// nodal/edge fields that live on them.

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace nlab {

using Vector = Eigen::VectorXd;
using Point = std::array<double, 2>;  // second coordinate unused in 1D

inline constexpr int kBoundary = -1;

// Oriented edge between two neighbouring nodes along one axis. Either end may
// be kBoundary, standing for an implicit zero-valued boundary node.
struct Edge {
  int tail;
  int head;
  int axis;
  Point midpoint;
};

class Grid {
 public:
  static constexpr int kMaxNodesPerAxis1D = 4096;
  static constexpr int kMaxNodesPerAxis2D = 256;

  Grid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  int num_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // h^dim, the measure of one edge cell.
  double cell_weight() const noexcept { return cell_weight_; }

  // Nodal quadrature weights: h per axis, with the boundary half-cells lumped
  // onto the first and last interior node (1.5h). They sum to exactly 1.
  const Vector& quadrature_weights() const noexcept { return quad_; }
  const Vector& axis_weights() const noexcept { return axis_quad_; }

  // Node index of axis indices (1-based per axis, as on the grid lines).
  int index(int i, int j = 1) const noexcept { return (j - 1) * n_ + (i - 1); }
  int nearest_node(const Point& x) const;

  // True when both grids discretize the same space.
  bool same_space(const Grid& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  int dim_;
  int n_;
  double h_;
  double cell_weight_;
  std::vector<Point> nodes_;
  std::vector<Edge> edges_;
  Vector quad_;
  Vector axis_quad_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Throws std::invalid_argument for dim not in {1,2}, n < 1, or n above the
// per-dimension cap.
GridPtr make_grid(int dim, int n);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

// A member of the discrete W^{1,p}_0: one finite value per interior node,
// zero on the boundary by construction.
class GridFunction {
 public:
  GridFunction(GridPtr grid, Vector values);

  static GridFunction zero(GridPtr grid);
  static GridFunction constant(GridPtr grid, double c);
  static GridFunction sample(GridPtr grid, const std::function<double(const Point&)>& f);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const noexcept { return static_cast<int>(values_.size()); }

  // Multilinear interpolation at an arbitrary point; boundary nodes count as 0.
  double interpolate(const Point& x) const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction operator*(double s) const;

 private:
  GridPtr grid_;
  Vector values_;
};

inline GridFunction operator*(double s, const GridFunction& u) { return u * s; }

// Forward differences, one entry per edge.
class EdgeField {
 public:
  EdgeField(GridPtr grid, Vector values);
  const Grid& grid() const noexcept { return *grid_; }
  const Vector& values() const noexcept { return values_; }
  double operator[](int e) const { return values_[e]; }

 private:
  GridPtr grid_;
  Vector values_;
};

// Interpolation stencil of a point: up to 4 (node, weight) pairs with nodes
// inside the grid. Weights on boundary nodes are dropped.
struct Stencil {
  std::array<int, 4> node{};
  std::array<double, 4> weight{};
  int size = 0;
};

Stencil interpolation_stencil(const Grid& grid, const Point& x);

}  // namespace nlab
