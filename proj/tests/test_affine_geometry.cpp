#include "doctest.h"

#include <cmath>
#include <complex>

#include "tzlab/affine_geometry.hpp"
#include "tzlab/errors.hpp"
#include "tzlab/exact_solutions.hpp"
#include "tzlab/grid.hpp"
#include "tzlab/matrix.hpp"

using namespace tzlab;

namespace {

GridSpec square(double lo, double hi, int n) {
    GridSpec s;
    s.u0 = lo;
    s.u1 = hi;
    s.v0 = lo;
    s.v1 = hi;
    s.nu = n;
    s.nv = n;
    return s;
}

// Planar graph X = (u, v, 0): tangents and position are everywhere linearly
// dependent with the origin, so det(X_u, X_v, X) vanishes identically.
ImmersionGrid planar_immersion(const GridSpec& s) {
    ImmersionGrid im;
    im.lambda = 1.0;
    im.X = Grid<Vec3c>(s);
    im.h = Grid<cdouble>(s);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            im.X.at(i, j) = Vec3c(s.u(i), s.v(j), 0.0);
    return im;
}

// Unit round sphere patch with the finite-difference conformal factor
// attached as its h; even with that best-possible h the structure equation
// X_uv = h X fails by O(1), because the mixed derivative of the round sphere
// is not radial.
ImmersionGrid euclidean_sphere_patch(const GridSpec& s) {
    ImmersionGrid im;
    im.lambda = 1.0;
    im.X = Grid<Vec3c>(s);
    im.h = Grid<cdouble>(s);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const double u = s.u(i), v = s.v(j);
            im.X.at(i, j) = Vec3c(std::cos(u) * std::cos(v),
                                  std::sin(u) * std::cos(v), std::sin(v));
        }
    const Grid<double> cf = conformal_factor(im);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            im.h.at(i, j) = cf.at(i, j);
            im.h.set_mask(i, j, cf.ok(i, j));
        }
    return im;
}

double grid_max(const Grid<double>& g) {
    double m = 0.0;
    for (int j = 0; j < g.spec.nv; ++j)
        for (int i = 0; i < g.spec.nu; ++i)
            if (g.ok(i, j)) m = std::max(m, std::abs(g.at(i, j)));
    return m;
}

double normal_position_gap(const ImmersionGrid& X) {
    const Grid<Vec3c> xi = affine_normal(X);
    double gap = 0.0;
    for (int j = 0; j < X.X.spec.nv; ++j)
        for (int i = 0; i < X.X.spec.nu; ++i) {
            if (!xi.ok(i, j)) continue;
            const Vec3c d = xi.at(i, j) - X.X.at(i, j);
            gap = std::max(gap, max_abs(d));
        }
    return gap;
}

} // namespace

TEST_CASE("conformal factor of the standard sphere converges to one") {
    const double lam = 1.3;
    const double d21 =
        max_deviation(conformal_factor(vacuum_immersion(square(-1.0, 1.0, 21), lam)), 1.0);
    const double d41 =
        max_deviation(conformal_factor(vacuum_immersion(square(-1.0, 1.0, 41), lam)), 1.0);
    CHECK(d21 < 2e-3);
    CHECK(d41 < d21 / 3.0);
}

TEST_CASE("affine normal of the standard sphere approximates the position") {
    const double lam = 1.3;
    const double g21 = normal_position_gap(vacuum_immersion(square(-1.0, 1.0, 21), lam));
    const double g41 = normal_position_gap(vacuum_immersion(square(-1.0, 1.0, 41), lam));
    CHECK(g21 < 2e-2);
    CHECK(g41 < 5e-3);
    const double ratio = g21 / g41;
    CHECK(ratio > 3.0);
    CHECK(ratio < 4.5);

    // the mixed stencil leaves the boundary ring undefined
    const Grid<Vec3c> xi = affine_normal(vacuum_immersion(square(-1.0, 1.0, 21), lam));
    CHECK(!xi.ok(0, 0));
    CHECK(!xi.ok(20, 7));
    CHECK(xi.ok(10, 10));
}

TEST_CASE("structure-equation residual of the standard sphere is second order") {
    const double lam = 0.9;
    const double r21 = shape_residual(vacuum_immersion(square(-1.0, 1.0, 21), lam));
    const double r41 = shape_residual(vacuum_immersion(square(-1.0, 1.0, 41), lam));
    CHECK(r21 < 2e-2);
    const double ratio = r21 / r41;
    CHECK(ratio > 3.0);
    CHECK(ratio < 4.5);
}

TEST_CASE("planar surface: zero factor, degenerate frame, exact zero residual") {
    const GridSpec s = square(0.5, 1.5, 11);
    const ImmersionGrid im = planar_immersion(s);

    CHECK(grid_max(conformal_factor(im)) < 1e-14);
    CHECK(shape_residual(im) < 1e-14); // X_uv and hX both vanish identically
    CHECK_THROWS_AS((void)affine_normal(im), ZeroH);
    CHECK_THROWS_AS((void)curvatures(im), ZeroH);
    CHECK_THROWS_AS((void)fubini_pick(im), FrameDegenerate);
}

TEST_CASE("cubic-form coefficients of the standard sphere track the parameter") {
    const double lam = 1.3;
    const double a = lam * lam * lam;
    const FubiniPick f21 = fubini_pick(vacuum_immersion(square(-1.0, 1.0, 21), lam));
    const FubiniPick f41 = fubini_pick(vacuum_immersion(square(-1.0, 1.0, 41), lam));

    // the coefficients are constants of the parametrization, recovered to far
    // below the stencil truncation because the frame translates exactly
    CHECK(max_deviation(f21.aJ, a) < 1e-6);
    CHECK(max_deviation(f21.bJ, 1.0 / a) < 1e-8);
    CHECK(max_deviation(f41.aJ, a) < 1e-8);
    CHECK(max_deviation(f41.bJ, 1.0 / a) < 1e-10);

    // the position component of the second derivatives converges to zero
    const double r21 = grid_max(f21.residual);
    const double r41 = grid_max(f41.residual);
    CHECK(r21 < 1e-2);
    CHECK(r41 < r21 / 3.0);
    CHECK(r41 > r21 / 5.0);
}

TEST_CASE("affine curvatures of the standard sphere both equal one") {
    const double lam = 1.3;
    const Curvatures c21 = curvatures(vacuum_immersion(square(-1.0, 1.0, 21), lam));
    const Curvatures c41 = curvatures(vacuum_immersion(square(-1.0, 1.0, 41), lam));
    CHECK(max_deviation(c21.H, 1.0) < 1e-4);
    CHECK(max_deviation(c21.K, 1.0) < 1e-4);
    CHECK(max_deviation(c41.H, 1.0) < max_deviation(c21.H, 1.0) / 3.0);
    CHECK(max_deviation(c41.K, 1.0) < max_deviation(c21.K, 1.0) / 3.0);
}

TEST_CASE("Euclidean round sphere fails the structure equation by O(1)") {
    const ImmersionGrid im = euclidean_sphere_patch(square(0.2, 1.0, 21));
    CHECK(shape_residual(im) > 0.1);
}

TEST_CASE("bundled invariants agree with the individually computed ones") {
    const GridSpec s = square(-1.0, 1.0, 11);
    const ImmersionGrid im = vacuum_immersion(s, 1.3);
    const BlaschkeData b = blaschke_data(im);

    const Grid<double> cf = conformal_factor(im);
    const FubiniPick fp = fubini_pick(im);
    const Curvatures c = curvatures(im);
    CHECK(b.shape_residual == shape_residual(im));
    CHECK(b.h.at(5, 5) == cf.at(5, 5));
    CHECK(b.aJ.at(5, 5) == fp.aJ.at(5, 5));
    CHECK(b.bJ.at(5, 5) == fp.bJ.at(5, 5));
    CHECK(b.H.at(5, 5) == c.H.at(5, 5));
    CHECK(b.K.at(5, 5) == c.K.at(5, 5));
    CHECK(b.xi.ok(5, 5));
    CHECK(!b.aJ.ok(0, 0));
}

TEST_CASE("largest-deviation helper skips masked nodes") {
    GridSpec s;
    s.nu = 3;
    s.nv = 3;
    s.u0 = 0.0;
    s.u1 = 1.0;
    s.v0 = 0.0;
    s.v1 = 1.0;
    Grid<double> g(s, 2.0);
    g.at(1, 1) = 2.5;
    g.at(2, 2) = 100.0;
    g.set_mask(2, 2, false);
    CHECK(max_deviation(g, 2.0) == 0.5);
}
