#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace saddle {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

enum class DomainKind { Disk, STQuadrant };

enum class NodeKind : std::uint8_t { Interior = 0, DirichletBoundary = 1, Exterior = 2 };

/// Uniform tensor grid with a node classification.
///
/// Disk: n x n nodes on [-R, R]^2, n odd so that the origin and both axes are
/// nodes; coordinates are (i - c) h with c = (n-1)/2, exactly antisymmetric.
///
/// STQuadrant: the (s,t) quarter plane [0,R]^2 of a 2m-dimensional problem whose
/// fields depend only on s = |(x_1..x_m)| and t = |(x_{m+1}..x_{2m})|.
///
/// Both kinds carry the same finite-volume weights: a(i) is the 1D cell measure
/// of node i and b(i) the conductance of the edge (i, i+1), so the discrete
/// Laplacian and the discrete energy are adjoint to each other. For the disk
/// a = h and b = 1/h; in (s,t) a(i) = ((s+h/2)^m - (s-h/2)^m)/m (half cell on
/// the axis) and b(i) = s_{i+1/2}^{m-1}/h.
class GridSpec {
 public:
  static std::shared_ptr<const GridSpec> disk(double R, int n);
  static std::shared_ptr<const GridSpec> st_quadrant(double R, int n, int m);

  DomainKind domain() const { return domain_; }
  double R() const { return R_; }
  int n() const { return n_; }
  double h() const { return h_; }
  /// Cone dimension parameter; 1 for the planar disk.
  int m() const { return m_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * n_ + i;
  }
  double coord(int i) const { return coords_[i]; }
  Point2 node(int i, int j) const { return {coords_[i], coords_[j]}; }
  /// Index of the node at the origin for Disk grids.
  int center() const { return (n_ - 1) / 2; }

  NodeKind kind(std::size_t idx) const { return mask_[idx]; }
  NodeKind kind(int i, int j) const { return mask_[index(i, j)]; }
  std::span<const NodeKind> mask() const { return mask_; }

  std::span<const double> cell_measure() const { return cell_; }
  std::span<const double> edge_conductance() const { return edge_; }
  /// Coefficients of the 1D operator at node i towards i+1 and i-1.
  std::span<const double> coeff_plus() const { return cplus_; }
  std::span<const double> coeff_minus() const { return cminus_; }

  /// Measure of node (i,j) without the angular constant.
  double node_measure(int i, int j) const { return cell_[i] * cell_[j]; }
  /// Angular constant multiplying every integral: 1 (disk) or |S^{m-1}|^2.
  double measure_constant() const { return measure_constant_; }
  /// Largest diagonal entry of the negative discrete Laplacian.
  double max_diagonal() const { return max_diag_; }

  bool same_as(const GridSpec& other) const;

 private:
  GridSpec() = default;
  void build_weights();

  DomainKind domain_ = DomainKind::Disk;
  double R_ = 0.0;
  int n_ = 0;
  double h_ = 0.0;
  int m_ = 1;
  double measure_constant_ = 1.0;
  double max_diag_ = 0.0;
  std::vector<double> coords_;
  std::vector<NodeKind> mask_;
  std::vector<double> cell_, edge_, cplus_, cminus_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Grid function. Values are stored at every node, row-major with j (x_2 or t)
/// the slow index; Exterior values are carried but never read by stencils.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_->size(), fill) {}

  const GridSpec& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& at(int i, int j) { return values_[grid_->index(i, j)]; }
  double at(int i, int j) const { return values_[grid_->index(i, j)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

struct FieldPair {
  ScalarField u;
  ScalarField v;

  const GridSpec& grid() const { return u.grid(); }
};

void check_same_grid(const ScalarField& a, const ScalarField& b);

/// Five-point Laplacian at Interior nodes; `out` is left untouched elsewhere.
void laplacian_disk(const ScalarField& fld, ScalarField& out);

/// Reduced Laplacian d_ss + d_tt + (m-1)(d_s/s + d_t/t) at Interior nodes, in
/// conservative form; on the axes it becomes m d_ss (resp. m d_tt).
void laplacian_st(const ScalarField& fld, int m, ScalarField& out);

namespace detail {

/// One axis of the tensor stencil. Written so that the s-term at (i,j) and the
/// t-term at (j,i) are the same floating-point expression, which keeps the
/// exchange symmetries bit-exact.
inline double axis_term(double cp, double cm, double plus, double minus, double c) {
  return cp * (plus - c) + cm * (minus - c);
}

inline double stencil(const GridSpec& g, const double* f, int i, int j) {
  const int n = g.n();
  const std::size_t idx = g.index(i, j);
  const double c = f[idx];
  const auto cp = g.coeff_plus();
  const auto cm = g.coeff_minus();
  const double west = i > 0 ? f[idx - 1] : c;
  const double south = j > 0 ? f[idx - n] : c;
  const double ls = axis_term(cp[i], cm[i], f[idx + 1], west, c);
  const double lt = axis_term(cp[j], cm[j], f[idx + n], south, c);
  return ls + lt;
}

}  // namespace detail

}  // namespace saddle
