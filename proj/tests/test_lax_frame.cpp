#include "doctest.h"

#include <cmath>
#include <complex>

#include "tzlab/errors.hpp"
#include "tzlab/exact_solutions.hpp"
#include "tzlab/lax_frame.hpp"
#include "tzlab/loopalgebra.hpp"
#include "tzlab/matrix.hpp"

using namespace tzlab;

namespace {

double diff(const Mat3c& a, const Mat3c& b) { return max_abs(Mat3c(a - b)); }

GridSpec unit_square(int n) {
    GridSpec s;
    s.u0 = 0.0;
    s.u1 = 1.0;
    s.v0 = 0.0;
    s.v1 = 1.0;
    s.nu = n;
    s.nv = n;
    return s;
}

double frame_error_vs_closed_form(int n, cdouble lambda) {
    const SolutionField f = vacuum_field(unit_square(n));
    const FrameGrid fg = integrate_frame(f, lambda);
    double m = 0.0;
    for (int j = 0; j < fg.spec().nv; ++j)
        for (int i = 0; i < fg.spec().nu; ++i)
            m = std::max(m, diff(fg.F.at(i, j),
                                 vacuum_frame(fg.spec().u(i), fg.spec().v(j), lambda)));
    return m;
}

} // namespace

TEST_CASE("connection matrices of the flat solution are the cyclic pair") {
    const SolutionField f = vacuum_field(unit_square(5));
    const auto& sc = structure();
    const auto [U, V] = connection_matrices(f, 0.3, 0.7, 2.0);
    CHECK(diff(U, Mat3c(2.0 * sc.N)) < 1e-15);
    CHECK(diff(V, Mat3c(0.5 * sc.N * sc.N)) < 1e-15);

    // generic h: frozen entries of both matrices
    const SolutionField g = make_analytic_field(
        unit_square(5), [](double u, double v) { return 1.0 + u * v; },
        [](double, double v) { return v; }, [](double u, double) { return u; });
    const double u = 0.5, v = 0.25, h = 1.0 + u * v, wu = v / h;
    const cdouble lam(1.3, 0.0);
    const auto [Ug, Vg] = connection_matrices(g, u, v, lam);
    Mat3c Ue = Mat3c::Zero(), Ve = Mat3c::Zero();
    Ue(0, 0) = wu;
    Ue(1, 1) = -wu;
    Ue(0, 2) = lam;
    Ue(1, 0) = lam;
    Ue(2, 1) = lam;
    Ve(0, 1) = 1.0 / (h * h);
    Ve(1, 2) = h;
    Ve(2, 0) = h;
    Ve /= lam;
    CHECK(diff(Ug, Ue) < 1e-15);
    CHECK(diff(Vg, Ve) < 1e-15);
}

TEST_CASE("connection construction rejects degenerate input") {
    const SolutionField f = vacuum_field(unit_square(5));
    CHECK_THROWS_AS(connection_matrices(f, 0.5, 0.5, 0.0), ZeroLambda);

    const SolutionField bad = make_analytic_field(
        unit_square(5), [](double u, double) { return u - 0.5; },
        [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
    CHECK_THROWS_AS(connection_matrices(bad, 0.25, 0.5, 1.0), NonPositiveH);
    CHECK_THROWS_AS(integrate_frame(bad, 1.0), NonPositiveH);
    CHECK_THROWS_AS(integrate_frame(vacuum_field(unit_square(5)), 0.0), ZeroLambda);

    SolutionField masked = vacuum_field(unit_square(5));
    masked.h.set_mask(2, 2, false);
    CHECK_THROWS_AS(integrate_frame(masked, 1.0), BadArgument);
}

TEST_CASE("integrated frame matches the closed form and converges at order 4") {
    const cdouble lambda(1.3, 0.0);
    const double e33 = frame_error_vs_closed_form(33, lambda);
    const double e17 = frame_error_vs_closed_form(17, lambda);
    CHECK(e33 < 1e-6);
    CHECK(e17 / e33 >= 12.0);

    const FrameGrid fg = integrate_frame(vacuum_field(unit_square(33)), lambda);
    CHECK(fg.path_residual < 1e-8);
    double det_err = 0.0;
    for (int j = 0; j < fg.spec().nv; ++j)
        for (int i = 0; i < fg.spec().nu; ++i)
            det_err = std::max(det_err,
                               std::abs(fg.F.at(i, j).determinant() - cdouble(1.0)));
    CHECK(det_err < 1e-8);

    // complex spectral value integrates just as well
    const cdouble mu(0.8, 0.6);
    CHECK(frame_error_vs_closed_form(33, mu) < 1e-6);
}

TEST_CASE("integration starts from the identity at a shifted basepoint") {
    GridSpec s;
    s.u0 = 0.3;
    s.u1 = 1.3;
    s.v0 = -0.2;
    s.v1 = 0.8;
    s.nu = 17;
    s.nv = 17;
    const cdouble lambda(1.1, 0.0);
    const FrameGrid fg = integrate_frame(vacuum_field(s), lambda);
    CHECK(diff(fg.F.at(0, 0), Mat3c::Identity()) == 0.0);
    CHECK(fg.bu == s.u0);
    CHECK(fg.bv == s.v0);
    double m = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            m = std::max(m, diff(fg.F.at(i, j),
                                 vacuum_frame(s.u(i) - s.u0, s.v(j) - s.v0, lambda)));
    CHECK(m < 1e-5);
}

TEST_CASE("scalar solutions recover the exponential on the symmetric line") {
    const GridSpec s = unit_square(9);
    const cdouble alpha(1.1, 0.0);
    const FrameGrid fg = vacuum_family(s).at(alpha);
    const ScalarSolution ss = scalar_solution(ProjLine(1.0, 1.0, 1.0), fg);
    CHECK(std::abs(ss.gamma - alpha * alpha * alpha) < 1e-15);
    double m = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const double u = s.u(i), v = s.v(j);
            const cdouble phi = std::exp(alpha * u + v / alpha);
            m = std::max(m, std::abs(ss.phi.at(i, j) - phi));
            m = std::max(m, std::abs(ss.phi_u.at(i, j) - alpha * phi));
            m = std::max(m, std::abs(ss.phi_v.at(i, j) - phi / alpha));
        }
    CHECK(m < 1e-13);
}

TEST_CASE("scalar solutions on a generic line match the exponential basis") {
    const GridSpec s = unit_square(9);
    const double a = 0.6, b = 1.7;
    const cdouble alpha(1.1, 0.0);
    const cdouble om = std::pow(epsilon6(), 2);
    const cdouble c0 = (a + b + 1.0) / 3.0;
    const cdouble c1 = (a * om * om + b * om + 1.0) / 3.0;
    const cdouble c2 = std::conj(c1);

    const ScalarSolution ss =
        scalar_solution(ProjLine(a, b, 1.0), vacuum_family(s).at(alpha));
    double m = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const double u = s.u(i), v = s.v(j);
            m = std::max(m, std::abs(ss.phi.at(i, j) -
                                     vacuum_scalar(u, v, alpha, c0, c1, c2)));
            m = std::max(m, std::abs(ss.phi_u.at(i, j) -
                                     vacuum_scalar_du(u, v, alpha, c0, c1, c2)));
            m = std::max(m, std::abs(ss.phi_v.at(i, j) -
                                     vacuum_scalar_dv(u, v, alpha, c0, c1, c2)));
        }
    CHECK(m < 1e-13);
}

TEST_CASE("scalar solutions require real poles and affine lines") {
    const GridSpec s = unit_square(5);
    const FrameFamily fam = vacuum_family(s);
    CHECK_THROWS_AS(scalar_solution(ProjLine(1.0, 1.0, 1.0), fam.at(cdouble(1.0, 0.5))),
                    BadArgument);
    CHECK_THROWS_AS(scalar_solution(ProjLine(1.0, 2.0, 0.0), fam.at(cdouble(1.0))),
                    BadArgument);
}

TEST_CASE("the flat solution annihilates both residuals exactly") {
    const SolutionField f = vacuum_field(unit_square(11));
    const Grid<double> r = tzitzeica_residual(f);
    double m = 0.0;
    for (int j = 0; j < f.spec.nv; ++j)
        for (int i = 0; i < f.spec.nu; ++i)
            if (r.ok(i, j)) m = std::max(m, std::abs(r.at(i, j)));
    CHECK(m == 0.0);
    CHECK(zero_curvature_residual(f, cdouble(1.3, 0.0)) == 0.0);
    CHECK(zero_curvature_residual(f, cdouble(0.4, 0.9)) == 0.0);
}

TEST_CASE("non-solutions are rejected by both residuals") {
    const SolutionField f = make_analytic_field(
        unit_square(21), [](double u, double) { return 1.0 + u * u; },
        [](double u, double) { return 2.0 * u; }, [](double, double) { return 0.0; });
    const Grid<double> r = tzitzeica_residual(f);
    double m = 0.0;
    for (int j = 0; j < f.spec.nv; ++j)
        for (int i = 0; i < f.spec.nu; ++i)
            if (r.ok(i, j)) m = std::max(m, std::abs(r.at(i, j)));
    CHECK(m > 0.1);
    CHECK(zero_curvature_residual(f, cdouble(1.3, 0.0)) > 0.01);

    GridSpec tiny; // bypasses spec validation to exercise the stencil guard
    tiny.u0 = 0.0;
    tiny.u1 = 1.0;
    tiny.v0 = 0.0;
    tiny.v1 = 1.0;
    tiny.nu = 2;
    tiny.nv = 2;
    CHECK_THROWS_AS(tzitzeica_residual(vacuum_field(tiny)), BadArgument);
    CHECK_THROWS_AS(zero_curvature_residual(vacuum_field(tiny), cdouble(1.0)),
                    BadArgument);
}

TEST_CASE("curvature residual of a genuine solution converges to zero") {
    // window where the profile stays near 1, so the h^-2 entries of the
    // connection do not amplify the stencil error
    const SolitonParams p = make_soliton(1.3, -M_PI / 6.0, 10.0 / std::sqrt(3.0),
                                         1.0 / std::sqrt(3.0));
    GridSpec s;
    s.u0 = 0.5;
    s.u1 = 1.5;
    s.v0 = 0.5;
    s.v1 = 1.5;
    s.nu = 21;
    s.nv = 21;
    const double r21 = zero_curvature_residual(one_soliton_field(s, p), cdouble(0.9, 0.0));
    s.nu = 41;
    s.nv = 41;
    const double r41 = zero_curvature_residual(one_soliton_field(s, p), cdouble(0.9, 0.0));
    CHECK(r21 < 5e-3);
    CHECK(r41 < r21);
    CHECK(r21 / r41 > 2.5);
    CHECK(r21 / r41 < 5.0);
}

TEST_CASE("family evaluation agrees with re-integration") {
    const GridSpec s = unit_square(33);
    const cdouble lambda(0.8, 0.0);
    const FrameGrid closed = vacuum_family(s).at(lambda);
    const FrameGrid numeric = family_from_field(vacuum_field(s)).at(lambda);
    double m = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) m = std::max(m, diff(closed.F.at(i, j), numeric.F.at(i, j)));
    CHECK(m < 1e-6);
}

TEST_CASE("frame surfaces carry exact tangents in the gauged columns") {
    const GridSpec s = unit_square(17);
    const double lambda = 1.2;
    const ImmersionGrid im = surface_from_frame(vacuum_family(s).at(lambda));
    CHECK(im.has_exact_tangents());
    const Mat3c A = vacuum_column_map().cast<cdouble>();
    double m = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const double u = s.u(i), v = s.v(j);
            m = std::max(m, max_abs(Vec3c(im.X.at(i, j) -
                                          A * vacuum_surface(u, v, lambda).cast<cdouble>())));
            m = std::max(m, max_abs(Vec3c(im.Xu.at(i, j) -
                                          A * vacuum_surface_du(u, v, lambda).cast<cdouble>())));
            m = std::max(m, max_abs(Vec3c(im.Xv.at(i, j) -
                                          A * vacuum_surface_dv(u, v, lambda).cast<cdouble>())));
        }
    CHECK(m < 1e-12);
    CHECK(im.max_imag() < 1e-14);

    // attached conformal factor is the finite-difference determinant, so it
    // approaches the exact value 1 at second order in the interior
    double hin = 0.0;
    for (int j = 1; j + 1 < s.nv; ++j)
        for (int i = 1; i + 1 < s.nu; ++i)
            hin = std::max(hin, std::abs(im.h.at(i, j) - cdouble(1.0)));
    CHECK(hin < 0.05);
}
