#include <doctest.h>

#include <cmath>
#include <numbers>

#include "saddle/errors.h"
#include "saddle/grid.h"

using namespace saddle;

TEST_CASE("disk grid construction") {
  CHECK_THROWS_AS(GridSpec::disk(5.0, 16), ConfigError);
  CHECK_THROWS_AS(GridSpec::disk(5.0, 15), ConfigError);
  CHECK_THROWS_AS(GridSpec::disk(-1.0, 17), ConfigError);
  const GridPtr g = GridSpec::disk(2.0, 17);
  CHECK(g->h() == 0.25);
  CHECK(g->center() == 8);
  CHECK(g->node(8, 8).x1 == 0.0);
  for (int i = 0; i < 17; ++i) CHECK(g->coord(i) == -g->coord(16 - i));
  CHECK(g->kind(8, 8) == NodeKind::Interior);
  CHECK(g->kind(0, 0) == NodeKind::Exterior);
  CHECK(g->kind(16, 8) == NodeKind::DirichletBoundary);
  CHECK(g->max_diagonal() == doctest::Approx(4.0 / (0.25 * 0.25)));
}

TEST_CASE("disk mask: every Interior neighbour exists and is not Exterior") {
  const GridPtr g = GridSpec::disk(5.0, 41);
  const int n = g->n();
  int inside = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (g->kind(i, j) != NodeKind::Exterior) ++inside;
      if (g->kind(i, j) != NodeKind::Interior) continue;
      for (auto [a, b] : {std::pair{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}}) {
        REQUIRE(a >= 0);
        REQUIRE(a < n);
        CHECK(g->kind(a, b) != NodeKind::Exterior);
      }
      // symmetric under the full square group
      CHECK(g->kind(n - 1 - i, j) == NodeKind::Interior);
      CHECK(g->kind(j, i) == NodeKind::Interior);
    }
  // the non-Exterior nodes cover roughly the closed disk
  CHECK(inside * g->h() * g->h() == doctest::Approx(std::numbers::pi * 25.0).epsilon(0.05));
}

TEST_CASE("five-point Laplacian is exact on quadratics") {
  const GridPtr g = GridSpec::disk(3.0, 31);
  ScalarField f(g), out(g, -7.0);
  for (int j = 0; j < g->n(); ++j)
    for (int i = 0; i < g->n(); ++i) {
      const Point2 x = g->node(i, j);
      f.at(i, j) = 3 * x.x1 * x.x1 - x.x2 * x.x2 + 2 * x.x1 * x.x2 + x.x1;
    }
  laplacian_disk(f, out);
  for (int j = 0; j < g->n(); ++j)
    for (int i = 0; i < g->n(); ++i) {
      if (g->kind(i, j) == NodeKind::Interior) {
        CHECK(out.at(i, j) == doctest::Approx(4.0).epsilon(1e-10));
      } else {
        CHECK(out.at(i, j) == -7.0);
      }
    }
}

TEST_CASE("reduced Laplacian matches the 2m-dimensional Laplacian") {
  for (int m : {2, 3}) {
    const GridPtr g = GridSpec::st_quadrant(4.0, 41, m);
    ScalarField f(g), out(g);
    for (int j = 0; j < g->n(); ++j)
      for (int i = 0; i < g->n(); ++i) {
        const Point2 x = g->node(i, j);
        f.at(i, j) = x.x1 * x.x1 + 2 * x.x2 * x.x2;
      }
    laplacian_st(f, m, out);
    // Lap(|x'|^2) = 2m in R^m, so Lap(s^2 + 2 t^2) = 6m, including the axes
    for (int j = 0; j < g->n(); ++j)
      for (int i = 0; i < g->n(); ++i)
        if (g->kind(i, j) == NodeKind::Interior)
          CHECK(out.at(i, j) == doctest::Approx(6.0 * m).epsilon(1e-9));
  }
}

TEST_CASE("reduced Laplacian on a smooth radial function") {
  // u = exp(-(s^2+t^2)) in R^4: Lap u = (4 r^2 - 8) u with r^2 = s^2 + t^2
  const int m = 2;
  double worst_coarse = 0.0, worst_fine = 0.0;
  for (int n : {41, 81}) {
    const GridPtr g = GridSpec::st_quadrant(4.0, n, m);
    ScalarField f(g), out(g);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Point2 x = g->node(i, j);
        f.at(i, j) = std::exp(-(x.x1 * x.x1 + x.x2 * x.x2));
      }
    laplacian_st(f, m, out);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (g->kind(i, j) != NodeKind::Interior) continue;
        const Point2 x = g->node(i, j);
        const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
        worst = std::max(worst, std::abs(out.at(i, j) - (4 * r2 - 8) * f.at(i, j)));
      }
    (n == 41 ? worst_coarse : worst_fine) = worst;
  }
  CHECK(worst_fine < 0.3 * worst_coarse);  // second order
}

TEST_CASE("(s,t) grid weights") {
  const GridPtr g = GridSpec::st_quadrant(2.0, 17, 2);
  CHECK(g->measure_constant() == doctest::Approx(4 * std::numbers::pi * std::numbers::pi));
  const auto a = g->cell_measure();
  double total = 0.0;
  for (int i = 0; i < g->n(); ++i) total += a[i];
  // cells tile [0, R + h/2] with density s^{m-1}
  CHECK(total == doctest::Approx(0.5 * std::pow(2.0 + 0.5 * g->h(), 2)));
  CHECK(g->max_diagonal() == doctest::Approx(4 * 2 / (g->h() * g->h())));
  CHECK_THROWS_AS(GridSpec::st_quadrant(2.0, 17, 1), ConfigError);
  CHECK_THROWS_AS(GridSpec::st_quadrant(2.0, 7, 2), ConfigError);
}

TEST_CASE("operator errors") {
  const GridPtr d = GridSpec::disk(2.0, 17);
  const GridPtr d2 = GridSpec::disk(2.0, 21);
  const GridPtr st = GridSpec::st_quadrant(2.0, 17, 2);
  ScalarField a(d), b(d2), c(st), c2(st);
  CHECK_THROWS_AS(laplacian_disk(a, b), ShapeError);
  CHECK_THROWS_AS(laplacian_disk(c, c2), ShapeError);
  CHECK_THROWS_AS(laplacian_st(a, 2, a), ShapeError);
  CHECK_THROWS_AS(laplacian_st(c, 1, c2), ConfigError);
  CHECK_THROWS_AS(laplacian_st(c, 3, c2), ConfigError);
  CHECK_THROWS_AS(check_same_grid(a, b), ShapeError);
}
