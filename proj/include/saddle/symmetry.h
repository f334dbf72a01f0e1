#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "saddle/grid.h"

namespace saddle {

enum class SymmetryMode { Planar, Cone };

/// Result of folding a point into the closed fundamental sector.
struct Folded {
  Point2 point;    // in the closed sector, x2 >= 0
  int parity = 1;  // sign picked up by the odd reflections
};

/// Dihedral symmetry of a planar saddle-type configuration (k lines through
/// the origin), or the exchange s <-> t of the 2m-dimensional cone setting.
///
/// In planar mode the lines are l_i = R^i(l_0), l_0: x2 = tan(pi/2k) x1, and the
/// fundamental sector is S_k = {alpha x1 > |x2|}. Together with the mirror
/// x2 -> -x2 the reflections T_i generate a dihedral group of order 4k; its
/// elements either preserve each component (even) or swap u and v (odd).
class SymmetrySpec {
 public:
  /// Throws ConfigError for k < 2: the k = 1 sector is a half-plane and
  /// tan(pi/2) is undefined; see domain_wall_profile().
  static SymmetrySpec planar(int k);
  static SymmetrySpec cone(int m);

  SymmetryMode mode() const { return mode_; }
  int k() const { return k_; }
  int m() const { return m_; }
  double alpha() const { return alpha_; }
  /// True when the group maps Cartesian grid nodes to grid nodes (k = 2, cone).
  bool grid_exact() const { return mode_ == SymmetryMode::Cone || k_ == 2; }

  Point2 reflect(int i, Point2 x) const;
  /// Planar: alpha x1 > |x2|. Cone, with x = (s,t): s > t.
  bool in_sector(Point2 x) const;
  /// +1 where u dominates, -1 where v dominates, 0 on the nodal lines.
  int sector_sign(Point2 x) const;
  Folded fold(Point2 x) const;
  /// Euclidean distance to the nearest nodal line (planar) or to {s = t} (cone).
  double distance_to_lines(Point2 x) const;

  /// The explicit profile w_k: min{M, (alpha x1 - |x2|)/sqrt2} on the sector,
  /// extended by odd reflections. Cone mode uses the (s,t) profile
  /// sign(s-t) min{M, |s-t|/sqrt2}.
  double building_block(Point2 x, double M) const;

  /// Group element acting on the plane: rotation by j pi/k, or the mirror
  /// across the line at angle j pi/(2k). `odd` elements exchange u and v.
  struct Element {
    bool mirror = false;
    int j = 0;
    bool odd = false;
  };
  std::vector<Element> elements() const;
  Point2 apply(const Element& g, Point2 x) const;

 private:
  SymmetrySpec() = default;

  SymmetryMode mode_ = SymmetryMode::Planar;
  int k_ = 0;
  int m_ = 0;
  double alpha_ = 0.0;
};

/// k = 1 preset: the one-dimensional wall min{M, |x1|/sqrt2} with sign of x1.
double domain_wall_profile(double x1, double M);

/// Projection onto the symmetric class: averages over the group so that
/// v = u o T_i for all i and u is even in x2 (planar), or v(s,t) = u(t,s)
/// (cone). Only Interior nodes are changed. Grid-exact (and order-independent
/// bit for bit) when spec.grid_exact(); otherwise bilinear interpolation.
FieldPair symmetrize_pair(const SymmetrySpec& spec, const FieldPair& pair);

/// max over the generators of |v - u o T_i| and |u - u o mirror| on Interior
/// nodes. Exact comparisons for grid-exact specs, interpolated otherwise.
double symmetry_residual(const SymmetrySpec& spec, const FieldPair& pair);

/// Bilinear interpolation of a Disk-grid field at an arbitrary point.
double interpolate(const ScalarField& f, Point2 x);

/// Bilinear stencil of a point: interpolate(f, x) = sum of w[c] * f[index[c]].
struct InterpolationStencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
};
InterpolationStencil interpolation_stencil(const GridSpec& grid, Point2 x);

/// Node permutation for a group element on a grid-exact grid: image[idx] is the
/// index of g(node idx). Only valid when spec.grid_exact().
std::vector<std::size_t> node_image(const SymmetrySpec& spec, const GridSpec& grid,
                                    const SymmetrySpec::Element& g);

}  // namespace saddle
