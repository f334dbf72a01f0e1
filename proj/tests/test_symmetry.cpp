#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "saddle/errors.h"
#include "saddle/flow.h"
#include "saddle/symmetry.h"

using namespace saddle;

namespace {

bool near(Point2 a, Point2 b, double tol = 1e-12) {
  return std::abs(a.x1 - b.x1) <= tol && std::abs(a.x2 - b.x2) <= tol;
}

}  // namespace

TEST_CASE("k = 1 is rejected with a degenerate-sector message") {
  try {
    SymmetrySpec::planar(1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("half-plane") != std::string::npos);
  }
  CHECK_THROWS_AS(SymmetrySpec::cone(1), ConfigError);
  CHECK(domain_wall_profile(3.0, 1.0) == 1.0);
  CHECK(domain_wall_profile(-0.5, 1.0) == doctest::Approx(-0.5 / std::sqrt(2.0)));
}

TEST_CASE("k = 2 reflections are exact") {
  const SymmetrySpec s = SymmetrySpec::planar(2);
  CHECK(s.alpha() == 1.0);
  const Point2 x{0.75, -2.5};
  CHECK(near(s.reflect(0, x), {-2.5, 0.75}, 0.0));
  CHECK(near(s.reflect(1, x), {2.5, -0.75}, 0.0));
  CHECK_THROWS_AS(s.reflect(2, x), ConfigError);
  CHECK_THROWS_AS(SymmetrySpec::cone(2).reflect(0, x), UnsupportedModeError);
}

TEST_CASE("reflections are involutions fixing their lines") {
  for (int k : {2, 3, 4, 5}) {
    const SymmetrySpec s = SymmetrySpec::planar(k);
    for (int i = 0; i < k; ++i) {
      const Point2 x{1.3, -0.4};
      CHECK(near(s.reflect(i, s.reflect(i, x)), x));
      const double psi = (2 * i + 1) * std::numbers::pi / (2 * k);
      const Point2 on{2.0 * std::cos(psi), 2.0 * std::sin(psi)};
      CHECK(near(s.reflect(i, on), on));
    }
  }
}

TEST_CASE("group elements act as a group of order 4k") {
  for (int k : {2, 3, 5}) {
    const SymmetrySpec s = SymmetrySpec::planar(k);
    const auto els = s.elements();
    CHECK(els.size() == static_cast<std::size_t>(4 * k));
    const Point2 x{0.9, 0.2};
    int odd = 0;
    for (const auto& g : els) {
      const Point2 y = s.apply(g, x);
      CHECK(std::hypot(y.x1, y.x2) == doctest::Approx(std::hypot(x.x1, x.x2)));
      // odd elements swap the components, so the sector sign flips
      CHECK(s.sector_sign(y) == (g.odd ? -1 : 1) * s.sector_sign(x));
      odd += g.odd;
    }
    CHECK(odd == 2 * k);
  }
}

TEST_CASE("sector membership and folding") {
  const SymmetrySpec s2 = SymmetrySpec::planar(2);
  CHECK(s2.in_sector({2.0, 1.0}));
  CHECK_FALSE(s2.in_sector({1.0, 1.0}));
  CHECK(s2.sector_sign({-3.0, 1.0}) == 1);
  CHECK(s2.sector_sign({1.0, 3.0}) == -1);
  CHECK(s2.sector_sign({2.0, -2.0}) == 0);
  const SymmetrySpec s3 = SymmetrySpec::planar(3);
  CHECK(s3.alpha() == doctest::Approx(std::tan(std::numbers::pi / 6)));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 200; ++t) {
    const Point2 x{u(rng), u(rng)};
    const Folded f = s3.fold(x);
    CHECK(f.point.x2 >= 0.0);
    CHECK(s3.alpha() * f.point.x1 >= f.point.x2 - 1e-12);
    CHECK(std::hypot(f.point.x1, f.point.x2) == doctest::Approx(std::hypot(x.x1, x.x2)));
  }
  const SymmetrySpec c = SymmetrySpec::cone(2);
  CHECK(c.in_sector({2.0, 1.0}));
  CHECK(c.sector_sign({1.0, 2.0}) == -1);
  CHECK(c.distance_to_lines({3.0, 1.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(s2.distance_to_lines({3.0, 0.0}) == doctest::Approx(3.0 / std::sqrt(2.0)));
}

TEST_CASE("building block") {
  const SymmetrySpec s2 = SymmetrySpec::planar(2);
  CHECK(s2.building_block({3.0, 0.0}, 1.0) == 1.0);
  CHECK(s2.building_block({0.0, 3.0}, 1.0) == -1.0);
  CHECK(s2.building_block({0.5, 0.25}, 1.0) == doctest::Approx(0.25 / std::sqrt(2.0)));
  CHECK(s2.building_block({1.5, 1.5}, 1.0) == 0.0);
  CHECK_FALSE(std::signbit(s2.building_block({-1.5, 1.5}, 1.0)));
  for (int k : {3, 4, 6}) {
    const SymmetrySpec s = SymmetrySpec::planar(k);
    for (int i = 0; i < k; ++i) {
      const double psi = (2 * i + 1) * std::numbers::pi / (2 * k);
      CHECK(std::abs(s.building_block({4 * std::cos(psi), 4 * std::sin(psi)}, 1.0)) < 1e-12);
    }
    // odd across each line
    const Point2 x{1.1, 0.3};
    for (int i = 0; i < k; ++i)
      CHECK(s.building_block(s.reflect(i, x), 1.0) ==
            doctest::Approx(-s.building_block(x, 1.0)).epsilon(1e-12));
  }
  const SymmetrySpec c = SymmetrySpec::cone(2);
  CHECK(c.building_block({2.0, 2.0}, 1.0) == 0.0);
  CHECK(c.building_block({0.0, 5.0}, 1.0) == -1.0);
}

TEST_CASE("grid-exact symmetrization") {
  const GridPtr g = GridSpec::disk(3.0, 25);
  const SymmetrySpec s = SymmetrySpec::planar(2);
  const BistableModel m = BistableModel::cubic(2.0);
  FieldPair p = init_state(g, s, m);
  CHECK(symmetry_residual(s, p) == 0.0);
  // node images are permutations
  for (const auto& e : s.elements()) {
    auto img = node_image(s, *g, e);
    std::vector<int> hit(g->size(), 0);
    for (auto q : img) hit[q]++;
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < g->size(); ++i)
    if (g->kind(i) == NodeKind::Interior) {
      p.u[i] = u(rng);
      p.v[i] = u(rng);
    }
  CHECK(symmetry_residual(s, p) > 0.1);
  const FieldPair q = symmetrize_pair(s, p);
  CHECK(symmetry_residual(s, q) == 0.0);
  const FieldPair r = symmetrize_pair(s, q);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(r.u[i] == q.u[i]);
    CHECK(r.v[i] == q.v[i]);
  }
  CHECK_THROWS_AS(symmetrize_pair(SymmetrySpec::cone(2), p), ShapeError);
}

TEST_CASE("cone symmetrization is exact") {
  const GridPtr g = GridSpec::st_quadrant(4.0, 17, 2);
  const SymmetrySpec s = SymmetrySpec::cone(2);
  FieldPair p{ScalarField(g), ScalarField(g)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < g->size(); ++i) {
    p.u[i] = u(rng);
    p.v[i] = u(rng);
  }
  const FieldPair q = symmetrize_pair(s, p);
  CHECK(symmetry_residual(s, q) == 0.0);
}

TEST_CASE("interpolated symmetrization for k = 3 reduces the residual") {
  const GridPtr g = GridSpec::disk(4.0, 81);
  const SymmetrySpec s = SymmetrySpec::planar(3);
  const BistableModel m = BistableModel::cubic(2.0);
  const FieldPair p = init_state(g, s, m);
  // the building block is symmetric; the grid only sees it through interpolation
  CHECK(symmetry_residual(s, p) < 0.05);
  CHECK(interpolate(p.u, g->node(30, 41)) == doctest::Approx(p.u.at(30, 41)));
  const FieldPair q = symmetrize_pair(s, p);
  CHECK(symmetry_residual(s, q) < symmetry_residual(s, p));
}
