#include "saddle/grid.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "saddle/errors.h"

namespace saddle {

namespace {

double unit_sphere_area(int m) {
  // |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

}  // namespace

std::shared_ptr<const GridSpec> GridSpec::disk(double R, int n) {
  if (!(R > 0.0)) throw ConfigError("disk radius must be positive");
  if (n < 17) throw ConfigError("disk grid needs at least 17 points per axis");
  if (n % 2 == 0) throw ConfigError("disk grid needs an odd number of points per axis");

  auto g = std::shared_ptr<GridSpec>(new GridSpec());
  g->domain_ = DomainKind::Disk;
  g->R_ = R;
  g->n_ = n;
  g->m_ = 1;
  g->h_ = 2.0 * R / (n - 1);
  const int c = (n - 1) / 2;
  g->coords_.resize(n);
  for (int i = 0; i < n; ++i) g->coords_[i] = (i - c) * g->h_;

  const double R2 = R * R;
  const double inner = (R - 0.5 * g->h_) * (R - 0.5 * g->h_);
  auto r2 = [&](int i, int j) {
    const double a = g->coords_[i], b = g->coords_[j];
    return a * a + b * b;
  };
  auto inside = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < n && j < n && r2(i, j) <= R2;
  };

  g->mask_.assign(g->size(), NodeKind::Exterior);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (r2(i, j) < inner && inside(i + 1, j) && inside(i - 1, j) &&
          inside(i, j + 1) && inside(i, j - 1)) {
        g->mask_[g->index(i, j)] = NodeKind::Interior;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      auto& k = g->mask_[g->index(i, j)];
      if (k == NodeKind::Interior) continue;
      auto interior = [&](int a, int b) {
        return a >= 0 && b >= 0 && a < n && b < n &&
               g->mask_[g->index(a, b)] == NodeKind::Interior;
      };
      if (r2(i, j) <= R2 || interior(i + 1, j) || interior(i - 1, j) ||
          interior(i, j + 1) || interior(i, j - 1)) {
        k = NodeKind::DirichletBoundary;
      }
    }
  }
  g->build_weights();
  return g;
}

std::shared_ptr<const GridSpec> GridSpec::st_quadrant(double R, int n, int m) {
  if (!(R > 0.0)) throw ConfigError("radius must be positive");
  if (n < 9) throw ConfigError("(s,t) grid needs at least 9 points per axis");
  if (m < 2) throw ConfigError("cone mode requires m >= 2");

  auto g = std::shared_ptr<GridSpec>(new GridSpec());
  g->domain_ = DomainKind::STQuadrant;
  g->R_ = R;
  g->n_ = n;
  g->m_ = m;
  g->h_ = R / (n - 1);
  g->coords_.resize(n);
  for (int i = 0; i < n; ++i) g->coords_[i] = i * g->h_;

  const double R2 = R * R;
  const double inner = (R - 0.5 * g->h_) * (R - 0.5 * g->h_);
  auto r2 = [&](int i, int j) {
    const double a = g->coords_[i], b = g->coords_[j];
    return a * a + b * b;
  };
  // the axes are reflection planes, so only the +1 neighbours can leave the domain
  auto inside = [&](int i, int j) { return i < n && j < n && r2(i, j) <= R2; };

  g->mask_.assign(g->size(), NodeKind::Exterior);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (r2(i, j) < inner && inside(i + 1, j) && inside(i, j + 1)) {
        g->mask_[g->index(i, j)] = NodeKind::Interior;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      auto& k = g->mask_[g->index(i, j)];
      if (k == NodeKind::Interior) continue;
      auto interior = [&](int a, int b) {
        return a >= 0 && b >= 0 && a < n && b < n &&
               g->mask_[g->index(a, b)] == NodeKind::Interior;
      };
      if (r2(i, j) <= R2 || interior(i - 1, j) || interior(i, j - 1)) {
        k = NodeKind::DirichletBoundary;
      }
    }
  }
  g->measure_constant_ = unit_sphere_area(m) * unit_sphere_area(m);
  g->build_weights();
  return g;
}

void GridSpec::build_weights() {
  const int n = n_;
  const double h = h_;
  cell_.assign(n, h);
  edge_.assign(n, 0.0);
  if (domain_ == DomainKind::Disk) {
    for (int i = 0; i + 1 < n; ++i) edge_[i] = 1.0 / h;
  } else {
    const int m = m_;
    cell_[0] = std::pow(0.5 * h, m) / m;
    for (int i = 1; i < n; ++i) {
      const double s = coords_[i];
      cell_[i] = (std::pow(s + 0.5 * h, m) - std::pow(s - 0.5 * h, m)) / m;
    }
    for (int i = 0; i + 1 < n; ++i) {
      edge_[i] = std::pow(coords_[i] + 0.5 * h, m - 1) / h;
    }
  }
  cplus_.assign(n, 0.0);
  cminus_.assign(n, 0.0);
  double max_axis = 0.0;
  for (int i = 0; i < n; ++i) {
    if (domain_ == DomainKind::Disk) {
      cplus_[i] = 1.0 / (h * h);
      cminus_[i] = 1.0 / (h * h);
    } else {
      cplus_[i] = i + 1 < n ? edge_[i] / cell_[i] : 0.0;
      cminus_[i] = i > 0 ? edge_[i - 1] / cell_[i] : 0.0;
    }
    max_axis = std::max(max_axis, cplus_[i] + cminus_[i]);
  }
  max_diag_ = 2.0 * max_axis;
}

bool GridSpec::same_as(const GridSpec& other) const {
  return domain_ == other.domain_ && n_ == other.n_ && R_ == other.R_ && m_ == other.m_;
}

void check_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_as(b.grid()))
    throw ShapeError("fields live on different grids");
}

namespace {

void apply_stencil(const ScalarField& fld, ScalarField& out) {
  const GridSpec& g = fld.grid();
  const int n = g.n();
  const double* f = fld.values().data();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (g.kind(i, j) != NodeKind::Interior) continue;
      out.at(i, j) = detail::stencil(g, f, i, j);
    }
  }
}

}  // namespace

void laplacian_disk(const ScalarField& fld, ScalarField& out) {
  check_same_grid(fld, out);
  if (fld.grid().domain() != DomainKind::Disk)
    throw ShapeError("laplacian_disk needs a Disk grid");
  apply_stencil(fld, out);
}

void laplacian_st(const ScalarField& fld, int m, ScalarField& out) {
  if (m < 2) throw ConfigError("reduced Laplacian requires m >= 2");
  check_same_grid(fld, out);
  if (fld.grid().domain() != DomainKind::STQuadrant)
    throw ShapeError("laplacian_st needs an STQuadrant grid");
  if (fld.grid().m() != m) throw ConfigError("m does not match the grid's cone dimension");
  apply_stencil(fld, out);
}

}  // namespace saddle
