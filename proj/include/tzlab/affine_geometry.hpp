#pragma once

// Equiaffine invariants of an immersed surface grid: Blaschke conformal
// factor, affine normal, cubic-form coefficients, and affine curvatures.
// Every invariant here is extracted by finite differences of the position
// grid alone, even when the immersion carries analytic tangents; that makes
// the module an independent check on surfaces produced elsewhere.

#include <cmath>
#include <utility>

#include "tzlab/errors.hpp"
#include "tzlab/fd.hpp"
#include "tzlab/grid.hpp"
#include "tzlab/lax_frame.hpp"
#include "tzlab/matrix.hpp"

namespace tzlab {

namespace detail {

// Frame matrix [X_u X_v X] at one node, with a degeneracy guard relative to
// the column norms.
inline Mat3c frame_columns(const Vec3c& xu, const Vec3c& xv, const Vec3c& x) {
    Mat3c m;
    m.col(0) = xu;
    m.col(1) = xv;
    m.col(2) = x;
    const double scale = xu.norm() * xv.norm() * x.norm();
    if (std::abs(m.determinant()) < 1e-10 * scale)
        throw FrameDegenerate("tangents and position are linearly dependent");
    return m;
}

} // namespace detail

// det(X_u, X_v, X) from centered differences of the position grid. Real part
// only: imaginary content of a nominally real surface is measurement noise
// for the invariants extracted here.
inline Grid<double> conformal_factor(const ImmersionGrid& X) {
    Grid<Vec3c> xu = fd_du(X.X);
    Grid<Vec3c> xv = fd_dv(X.X);
    const GridSpec& s = X.X.spec;
    Grid<double> h(s);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            if (!xu.ok(i, j) || !xv.ok(i, j)) {
                h.set_mask(i, j, false);
                continue;
            }
            Mat3c m;
            m.col(0) = xu.at(i, j);
            m.col(1) = xv.at(i, j);
            m.col(2) = X.X.at(i, j);
            h.at(i, j) = std::real(m.determinant());
        }
    return h;
}

// Affine normal xi = X_uv / h with h the finite-difference conformal factor.
// Defined on the interior (the mixed stencil) where |h| clears a relative
// floor; for a proper sphere centered at the origin, xi approximates X.
inline Grid<Vec3c> affine_normal(const ImmersionGrid& X) {
    Grid<Vec3c> xuv = fd_duv(X.X);
    Grid<double> h = conformal_factor(X);
    const GridSpec& s = X.X.spec;
    double hmax = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            if (h.ok(i, j)) hmax = std::max(hmax, std::abs(h.at(i, j)));
    if (hmax == 0.0) throw ZeroH("conformal factor vanishes on the whole grid");
    Grid<Vec3c> xi(s);
    int live = 0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const bool ok = xuv.ok(i, j) && h.ok(i, j) &&
                            std::abs(h.at(i, j)) > 1e-12 * hmax;
            xi.set_mask(i, j, ok);
            if (!ok) continue;
            xi.at(i, j) = xuv.at(i, j) / h.at(i, j);
            ++live;
        }
    if (live == 0) throw ZeroH("conformal factor vanishes at every interior node");
    return xi;
}

// Max interior norm of X_uv - h X with the h the surface carries. Second
// order small exactly when the position grid and its attached conformal
// factor satisfy the structure equation.
inline double shape_residual(const ImmersionGrid& X) {
    Grid<Vec3c> xuv = fd_duv(X.X);
    const GridSpec& s = X.X.spec;
    double worst = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            if (!xuv.ok(i, j) || !X.h.ok(i, j)) continue;
            Vec3c r = xuv.at(i, j) - X.h.at(i, j) * X.X.at(i, j);
            worst = std::max(worst, max_abs(r));
        }
    return worst;
}

// Cubic-form coefficients and the decomposition residual, per node: expand
// X_uu and X_vv in the frame [X_u X_v X]; the X_v coefficient of X_uu scaled
// by h is aJ, the X_u coefficient of X_vv scaled by h is bJ, and the X
// coefficients (which vanish on an affine sphere in asymptotic coordinates)
// are returned as the residual.
struct FubiniPick {
    Grid<double> aJ;
    Grid<double> bJ;
    Grid<double> residual;
};

inline FubiniPick fubini_pick(const ImmersionGrid& X) {
    Grid<Vec3c> xu = fd_du(X.X);
    Grid<Vec3c> xv = fd_dv(X.X);
    Grid<Vec3c> xuu = fd_duu(X.X);
    Grid<Vec3c> xvv = fd_dvv(X.X);
    Grid<double> h = conformal_factor(X);
    const GridSpec& s = X.X.spec;
    FubiniPick out{Grid<double>(s), Grid<double>(s), Grid<double>(s)};
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const bool ok =
                xuu.ok(i, j) && xvv.ok(i, j) && xu.ok(i, j) && xv.ok(i, j) && h.ok(i, j);
            out.aJ.set_mask(i, j, ok);
            out.bJ.set_mask(i, j, ok);
            out.residual.set_mask(i, j, ok);
            if (!ok) continue;
            Mat3c m = detail::frame_columns(xu.at(i, j), xv.at(i, j), X.X.at(i, j));
            Eigen::PartialPivLU<Mat3c> lu(m);
            Vec3c cu = lu.solve(xuu.at(i, j));
            Vec3c cv = lu.solve(xvv.at(i, j));
            out.aJ.at(i, j) = std::real(h.at(i, j) * cu(1));
            out.bJ.at(i, j) = std::real(h.at(i, j) * cv(0));
            out.residual.at(i, j) = std::max(std::abs(cu(2)), std::abs(cv(2)));
        }
    return out;
}

// Affine mean and Gauss curvature from the shape operator: expand the
// derivatives of the affine normal in the tangent frame, S = -d(xi) in the
// (X_u, X_v) basis up to sign convention xi_w = S_{1w} X_u + S_{2w} X_v.
// A proper sphere with xi = X gives S = I, hence H = K = 1.
struct Curvatures {
    Grid<double> H;
    Grid<double> K;
};

inline Curvatures curvatures(const ImmersionGrid& X) {
    Grid<Vec3c> xi = affine_normal(X);
    Grid<Vec3c> xiu = fd_du(xi);
    Grid<Vec3c> xiv = fd_dv(xi);
    Grid<Vec3c> xu = fd_du(X.X);
    Grid<Vec3c> xv = fd_dv(X.X);
    const GridSpec& s = X.X.spec;
    Curvatures out{Grid<double>(s), Grid<double>(s)};
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const bool ok =
                xiu.ok(i, j) && xiv.ok(i, j) && xu.ok(i, j) && xv.ok(i, j);
            out.H.set_mask(i, j, ok);
            out.K.set_mask(i, j, ok);
            if (!ok) continue;
            Mat3c m = detail::frame_columns(xu.at(i, j), xv.at(i, j), X.X.at(i, j));
            Eigen::PartialPivLU<Mat3c> lu(m);
            Vec3c su = lu.solve(xiu.at(i, j));
            Vec3c sv = lu.solve(xiv.at(i, j));
            const double s11 = std::real(su(0)), s21 = std::real(su(1));
            const double s12 = std::real(sv(0)), s22 = std::real(sv(1));
            out.H.at(i, j) = 0.5 * (s11 + s22);
            out.K.at(i, j) = s11 * s22 - s12 * s21;
        }
    return out;
}

// One-call bundle of every invariant this module extracts.
struct BlaschkeData {
    Grid<double> h;
    Grid<Vec3c> xi;
    Grid<double> aJ;
    Grid<double> bJ;
    Grid<double> H;
    Grid<double> K;
    double shape_residual = 0.0;
};

inline BlaschkeData blaschke_data(const ImmersionGrid& X) {
    BlaschkeData out{conformal_factor(X), affine_normal(X),
                     Grid<double>(X.X.spec), Grid<double>(X.X.spec),
                     Grid<double>(X.X.spec), Grid<double>(X.X.spec),
                     shape_residual(X)};
    FubiniPick fp = fubini_pick(X);
    out.aJ = std::move(fp.aJ);
    out.bJ = std::move(fp.bJ);
    Curvatures c = curvatures(X);
    out.H = std::move(c.H);
    out.K = std::move(c.K);
    return out;
}

// Largest unmasked |g - c| over the grid; convenience for constancy checks.
inline double max_deviation(const Grid<double>& g, double c) {
    double worst = 0.0;
    const GridSpec& s = g.spec;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            if (g.ok(i, j)) worst = std::max(worst, std::abs(g.at(i, j) - c));
    return worst;
}

} // namespace tzlab
