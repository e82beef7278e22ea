#include "nlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlab {

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("make_grid: dim must be 1 or 2, got " + std::to_string(dim));
  if (n < 1) throw std::invalid_argument("make_grid: n must be >= 1");
  const int cap = dim == 1 ? kMaxNodesPerAxis1D : kMaxNodesPerAxis2D;
  if (n > cap)
    throw std::invalid_argument("make_grid: n=" + std::to_string(n) + " exceeds cap " +
                                std::to_string(cap) + " for dim " + std::to_string(dim));

  h_ = 1.0 / static_cast<double>(n + 1);
  cell_weight_ = dim == 1 ? h_ : h_ * h_;

  axis_quad_ = Vector::Constant(n, h_);
  if (n == 1) {
    axis_quad_[0] = 1.0;
  } else {
    axis_quad_[0] = 1.5 * h_;
    axis_quad_[n - 1] = 1.5 * h_;
  }

  const int rows = dim == 1 ? 1 : n;
  nodes_.reserve(static_cast<std::size_t>(n) * rows);
  quad_.resize(static_cast<Eigen::Index>(n) * rows);
  for (int j = 1; j <= rows; ++j) {
    for (int i = 1; i <= n; ++i) {
      const int idx = index(i, j);
      nodes_.push_back(Point{i * h_, dim == 1 ? 0.0 : j * h_});
      quad_[idx] = axis_quad_[i - 1] * (dim == 1 ? 1.0 : axis_quad_[j - 1]);
    }
  }

  auto node_or_boundary = [&](int i, int j) {
    if (i < 1 || i > n || j < 1 || j > n) return kBoundary;
    return index(i, j);
  };
  if (dim == 1) {
    for (int i = 0; i <= n; ++i)
      edges_.push_back(Edge{i == 0 ? kBoundary : i - 1, i == n ? kBoundary : i, 0,
                            Point{(i + 0.5) * h_, 0.0}});
  } else {
    for (int j = 1; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        edges_.push_back(Edge{node_or_boundary(i, j), node_or_boundary(i + 1, j), 0,
                              Point{(i + 0.5) * h_, j * h_}});
    for (int i = 1; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        edges_.push_back(Edge{node_or_boundary(i, j), node_or_boundary(i, j + 1), 1,
                              Point{i * h_, (j + 0.5) * h_}});
  }
}

int Grid::nearest_node(const Point& x) const {
  auto axis = [&](double c) {
    const int i = static_cast<int>(std::lround(c / h_));
    return std::clamp(i, 1, n_);
  };
  return dim_ == 1 ? index(axis(x[0])) : index(axis(x[0]), axis(x[1]));
}

GridPtr make_grid(int dim, int n) { return std::make_shared<const Grid>(dim, n); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_space(b))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

}  // namespace

GridFunction::GridFunction(GridPtr grid, Vector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("GridFunction: null grid");
  if (values_.size() != grid_->num_nodes())
    throw std::invalid_argument("GridFunction: expected " +
                                std::to_string(grid_->num_nodes()) + " values, got " +
                                std::to_string(values_.size()));
  require_finite(values_, "GridFunction");
}

GridFunction GridFunction::zero(GridPtr grid) {
  const int n = grid->num_nodes();
  return GridFunction(std::move(grid), Vector::Zero(n));
}

GridFunction GridFunction::constant(GridPtr grid, double c) {
  const int n = grid->num_nodes();
  return GridFunction(std::move(grid), Vector::Constant(n, c));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(const Point&)>& f) {
  Vector v(grid->num_nodes());
  for (int i = 0; i < grid->num_nodes(); ++i) v[i] = f(grid->nodes()[i]);
  return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::interpolate(const Point& x) const {
  const Stencil s = interpolation_stencil(*grid_, x);
  double r = 0.0;
  for (int k = 0; k < s.size; ++k) r += s.weight[k] * values_[s.node[k]];
  return r;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_grid(*grid_, o.grid(), "GridFunction +");
  return GridFunction(grid_, values_ + o.values_);
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_grid(*grid_, o.grid(), "GridFunction -");
  return GridFunction(grid_, values_ - o.values_);
}

GridFunction GridFunction::operator*(double s) const { return GridFunction(grid_, values_ * s); }

EdgeField::EdgeField(GridPtr grid, Vector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->num_edges())
    throw std::invalid_argument("EdgeField: size does not match edge count");
  require_finite(values_, "EdgeField");
}

Stencil interpolation_stencil(const Grid& grid, const Point& x) {
  const int n = grid.n();
  const double h = grid.h();
  // Axis cell and local coordinate; node indices 0 and n+1 are boundary.
  auto locate = [&](double c, int& lo, double& t) {
    const double s = std::clamp(c, 0.0, 1.0) / h;
    lo = std::min(static_cast<int>(std::floor(s)), n);
    t = s - lo;
  };
  Stencil st;
  int i0 = 0;
  double tx = 0.0;
  locate(x[0], i0, tx);
  if (grid.dim() == 1) {
    const std::array<std::pair<int, double>, 2> cand{{{i0, 1.0 - tx}, {i0 + 1, tx}}};
    for (auto [i, w] : cand) {
      if (i >= 1 && i <= n && w != 0.0) {
        st.node[st.size] = grid.index(i);
        st.weight[st.size] = w;
        ++st.size;
      }
    }
    return st;
  }
  int j0 = 0;
  double ty = 0.0;
  locate(x[1], j0, ty);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int i = i0 + a;
      const int j = j0 + b;
      const double w = (a ? tx : 1.0 - tx) * (b ? ty : 1.0 - ty);
      if (i >= 1 && i <= n && j >= 1 && j <= n && w != 0.0) {
        st.node[st.size] = grid.index(i, j);
        st.weight[st.size] = w;
        ++st.size;
      }
    }
  }
  return st;
}

}  // namespace nlab
