#include "saddle/symmetry.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "saddle/errors.h"

namespace saddle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Order-independent mean: sorting first makes the result invariant under any
// permutation of the inputs, which is what keeps projected fields exactly
// symmetric.
// Pairwise summation: for a power-of-two count of equal values every partial
// sum is exact, so already-symmetric fields are left bit-for-bit unchanged.
double pairwise_sum(const double* vals, std::size_t count) {
  if (count == 1) return vals[0];
  const std::size_t half = count / 2;
  return pairwise_sum(vals, half) + pairwise_sum(vals + half, count - half);
}

double sorted_mean(double* vals, std::size_t count) {
  std::sort(vals, vals + count);
  return pairwise_sum(vals, count) / static_cast<double>(count);
}

}  // namespace

SymmetrySpec SymmetrySpec::planar(int k) {
  if (k < 2) {
    throw ConfigError(
        "planar symmetry needs k >= 2: for k = 1 the sector degenerates to a "
        "half-plane (alpha = tan(pi/2) is undefined); use the 1D domain-wall preset");
  }
  SymmetrySpec s;
  s.mode_ = SymmetryMode::Planar;
  s.k_ = k;
  s.alpha_ = k == 2 ? 1.0 : std::tan(kPi / (2.0 * k));
  return s;
}

SymmetrySpec SymmetrySpec::cone(int m) {
  if (m < 2) throw ConfigError("saddle solutions in R^{2m} require m >= 2");
  SymmetrySpec s;
  s.mode_ = SymmetryMode::Cone;
  s.m_ = m;
  s.alpha_ = 1.0;
  return s;
}

Point2 SymmetrySpec::reflect(int i, Point2 x) const {
  if (mode_ != SymmetryMode::Planar)
    throw UnsupportedModeError("reflect is defined for planar symmetry only");
  if (i < 0 || i >= k_) throw ConfigError("reflection index out of range");
  if (k_ == 2) {
    if (i == 0) return {x.x2, x.x1};
    return {-x.x2, -x.x1};
  }
  const double two_psi = (2 * i + 1) * kPi / k_;
  const double c = std::cos(two_psi), s = std::sin(two_psi);
  return {c * x.x1 + s * x.x2, s * x.x1 - c * x.x2};
}

bool SymmetrySpec::in_sector(Point2 x) const {
  if (mode_ == SymmetryMode::Cone) return x.x1 > x.x2;
  return alpha_ * x.x1 > std::abs(x.x2);
}

Folded SymmetrySpec::fold(Point2 x) const {
  if (mode_ == SymmetryMode::Cone) {
    if (x.x1 >= x.x2) return {x, 1};
    return {{x.x2, x.x1}, -1};
  }
  const double b = std::abs(x.x2);
  if (k_ == 2) {
    const double a = std::abs(x.x1);
    if (a >= b) return {{a, b}, 1};
    return {{b, a}, -1};
  }
  const double width = kPi / k_;
  const double theta = std::atan2(b, x.x1);
  int j = static_cast<int>(std::floor((theta + 0.5 * width) / width));
  j = std::clamp(j, 0, k_);
  const double c = std::cos(j * width), s = std::sin(j * width);
  const Point2 r{c * x.x1 + s * b, -s * x.x1 + c * b};
  return {{r.x1, std::abs(r.x2)}, j % 2 == 0 ? 1 : -1};
}

double SymmetrySpec::distance_to_lines(Point2 x) const {
  if (mode_ == SymmetryMode::Cone) return std::abs(x.x1 - x.x2) * kInvSqrt2;
  const Folded f = fold(x);
  const double r = std::hypot(f.point.x1, f.point.x2);
  const double theta = std::atan2(f.point.x2, f.point.x1);
  return r * std::sin(std::max(kPi / (2.0 * k_) - theta, 0.0));
}

int SymmetrySpec::sector_sign(Point2 x) const {
  if (mode_ == SymmetryMode::Cone) return x.x1 > x.x2 ? 1 : (x.x1 < x.x2 ? -1 : 0);
  const Folded f = fold(x);
  const double d = alpha_ * f.point.x1 - f.point.x2;
  const double tol = k_ == 2 ? 0.0 : 1e-12 * std::max(1.0, f.point.x1);
  return d > tol ? f.parity : 0;
}

double SymmetrySpec::building_block(Point2 x, double M) const {
  if (mode_ == SymmetryMode::Cone) {
    const double d = x.x1 - x.x2;
    if (d == 0.0) return 0.0;
    const double v = std::min(M, std::abs(d) * kInvSqrt2);
    return d > 0.0 ? v : -v;
  }
  const Folded f = fold(x);
  const double d = alpha_ * f.point.x1 - f.point.x2;
  if (!(d > 0.0)) return 0.0;
  return f.parity * std::min(M, d * kInvSqrt2);
}

std::vector<SymmetrySpec::Element> SymmetrySpec::elements() const {
  std::vector<Element> out;
  if (mode_ == SymmetryMode::Cone) {
    out.push_back({false, 0, false});
    out.push_back({true, 0, true});
    return out;
  }
  for (int j = 0; j < 2 * k_; ++j) out.push_back({false, j, j % 2 == 1});
  for (int j = 0; j < 2 * k_; ++j) out.push_back({true, j, j % 2 == 1});
  return out;
}

Point2 SymmetrySpec::apply(const Element& g, Point2 x) const {
  if (mode_ == SymmetryMode::Cone) return g.mirror ? Point2{x.x2, x.x1} : x;
  if (k_ == 2) {
    // exact integer-like action of D4
    Point2 y = x;
    if (!g.mirror) {
      for (int r = 0; r < g.j; ++r) y = {-y.x2, y.x1};
      return y;
    }
    switch (g.j) {
      case 0: return {x.x1, -x.x2};
      case 1: return {x.x2, x.x1};
      case 2: return {-x.x1, x.x2};
      default: return {-x.x2, -x.x1};
    }
  }
  const double angle = g.j * kPi / k_;
  const double c = std::cos(angle), s = std::sin(angle);
  if (!g.mirror) return {c * x.x1 - s * x.x2, s * x.x1 + c * x.x2};
  return {c * x.x1 + s * x.x2, s * x.x1 - c * x.x2};
}

double domain_wall_profile(double x1, double M) {
  if (x1 == 0.0) return 0.0;
  const double v = std::min(M, std::abs(x1) * kInvSqrt2);
  return x1 > 0.0 ? v : -v;
}

std::vector<std::size_t> node_image(const SymmetrySpec& spec, const GridSpec& grid,
                                    const SymmetrySpec::Element& g) {
  if (!spec.grid_exact()) throw UnsupportedModeError("group does not act on this grid");
  const int n = grid.n();
  std::vector<std::size_t> img(grid.size());
  if (spec.mode() == SymmetryMode::Cone) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) img[grid.index(i, j)] = g.mirror ? grid.index(j, i) : grid.index(i, j);
    return img;
  }
  const int c = grid.center();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int a = i - c, b = j - c;
      if (!g.mirror) {
        for (int r = 0; r < g.j; ++r) {
          const int t = a;
          a = -b;
          b = t;
        }
      } else {
        switch (g.j) {
          case 0: b = -b; break;
          case 1: std::swap(a, b); break;
          case 2: a = -a; break;
          default: {
            const int t = a;
            a = -b;
            b = -t;
          }
        }
      }
      img[grid.index(i, j)] = grid.index(a + c, b + c);
    }
  }
  return img;
}

InterpolationStencil interpolation_stencil(const GridSpec& g, Point2 x) {
  const int n = g.n();
  const double h = g.h();
  auto locate = [&](double coord, int& i0, double& w) {
    double s = (coord - g.coord(0)) / h;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    i0 = std::min(static_cast<int>(std::floor(s)), n - 2);
    w = s - i0;
  };
  int i0 = 0, j0 = 0;
  double wx = 0.0, wy = 0.0;
  locate(x.x1, i0, wx);
  locate(x.x2, j0, wy);
  InterpolationStencil st;
  st.index = {g.index(i0, j0), g.index(i0 + 1, j0), g.index(i0, j0 + 1),
              g.index(i0 + 1, j0 + 1)};
  st.weight = {(1 - wy) * (1 - wx), (1 - wy) * wx, wy * (1 - wx), wy * wx};
  return st;
}

double interpolate(const ScalarField& f, Point2 x) {
  const InterpolationStencil st = interpolation_stencil(f.grid(), x);
  double s = 0.0;
  for (int c = 0; c < 4; ++c) s += st.weight[c] * f[st.index[c]];
  return s;
}

FieldPair symmetrize_pair(const SymmetrySpec& spec, const FieldPair& pair) {
  check_same_grid(pair.u, pair.v);
  const GridSpec& g = pair.grid();
  if ((spec.mode() == SymmetryMode::Cone) != (g.domain() == DomainKind::STQuadrant))
    throw ShapeError("symmetry mode does not match the grid domain");
  FieldPair out = pair;
  const int n = g.n();
  const auto elems = spec.elements();
  const std::size_t order = elems.size();

  if (spec.grid_exact()) {
    std::vector<std::vector<std::size_t>> images;
    images.reserve(order);
    for (const auto& e : elems) images.push_back(node_image(spec, g, e));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
      std::array<double, 8> bu{}, bv{};
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j);
        if (g.kind(idx) != NodeKind::Interior) continue;
        for (std::size_t e = 0; e < order; ++e) {
          const std::size_t q = images[e][idx];
          bu[e] = elems[e].odd ? pair.v[q] : pair.u[q];
          bv[e] = elems[e].odd ? pair.u[q] : pair.v[q];
        }
        out.u[idx] = sorted_mean(bu.data(), order);
        out.v[idx] = sorted_mean(bv.data(), order);
      }
    }
    return out;
  }

#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    std::vector<double> bu(order), bv(order);
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior) continue;
      const Point2 x = g.node(i, j);
      for (std::size_t e = 0; e < order; ++e) {
        const Point2 y = spec.apply(elems[e], x);
        const double uy = interpolate(pair.u, y), vy = interpolate(pair.v, y);
        bu[e] = elems[e].odd ? vy : uy;
        bv[e] = elems[e].odd ? uy : vy;
      }
      out.u[idx] = sorted_mean(bu.data(), order);
      out.v[idx] = sorted_mean(bv.data(), order);
    }
  }
  return out;
}

double symmetry_residual(const SymmetrySpec& spec, const FieldPair& pair) {
  check_same_grid(pair.u, pair.v);
  const GridSpec& g = pair.grid();
  const int n = g.n();
  double worst = 0.0;
  if (spec.mode() == SymmetryMode::Cone) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (g.kind(i, j) == NodeKind::Interior)
          worst = std::max(worst, std::abs(pair.v.at(i, j) - pair.u.at(j, i)));
    return worst;
  }
  const int c = g.center();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (g.kind(i, j) != NodeKind::Interior) continue;
      const double u = pair.u.at(i, j), v = pair.v.at(i, j);
      worst = std::max(worst, std::abs(u - pair.u.at(i, 2 * c - j)));
      if (spec.k() == 2) {
        const int a = i - c, b = j - c;
        worst = std::max(worst, std::abs(v - pair.u.at(b + c, a + c)));
        worst = std::max(worst, std::abs(v - pair.u.at(-b + c, -a + c)));
      } else {
        const Point2 x = g.node(i, j);
        for (int r = 0; r < spec.k(); ++r)
          worst = std::max(worst, std::abs(v - interpolate(pair.u, spec.reflect(r, x))));
      }
    }
  }
  return worst;
}

}  // namespace saddle
