#ifndef TZLAB_LAX_FRAME_HPP
#define TZLAB_LAX_FRAME_HPP

#include <cmath>
#include <functional>
#include <utility>

#include "tzlab/errors.hpp"
#include "tzlab/fd.hpp"
#include "tzlab/grid.hpp"
#include "tzlab/loopalgebra.hpp"
#include "tzlab/matrix.hpp"

namespace tzlab {

// Conformal factor of a solution on a rectangular grid. Analytic fields carry
// closed-form evaluators with exact partials; grid fields fall back to
// second-order finite differences (tabulated once) plus bilinear interpolation
// between nodes.
struct SolutionField {
    GridSpec spec;
    Grid<double> h;
    std::function<double(double, double)> h_fn, hu_fn, hv_fn;
    Grid<double> hu_g, hv_g;

    bool analytic() const { return static_cast<bool>(h_fn); }

    double h_at(double u, double v) const {
        return analytic() ? h_fn(u, v) : bilinear(h, u, v);
    }
    double hu_at(double u, double v) const {
        return hu_fn ? hu_fn(u, v) : bilinear(hu_g, u, v);
    }
    double hv_at(double u, double v) const {
        return hv_fn ? hv_fn(u, v) : bilinear(hv_g, u, v);
    }
};

inline SolutionField make_analytic_field(const GridSpec& spec,
                                         std::function<double(double, double)> h,
                                         std::function<double(double, double)> hu,
                                         std::function<double(double, double)> hv) {
    SolutionField f;
    f.spec = spec;
    f.h = Grid<double>(spec);
    f.h_fn = std::move(h);
    f.hu_fn = std::move(hu);
    f.hv_fn = std::move(hv);
    for (int j = 0; j < spec.nv; ++j)
        for (int i = 0; i < spec.nu; ++i) f.h.at(i, j) = f.h_fn(spec.u(i), spec.v(j));
    return f;
}

inline SolutionField make_grid_field(const Grid<double>& h) {
    SolutionField f;
    f.spec = h.spec;
    f.h = h;
    f.hu_g = fd_du(h);
    f.hv_g = fd_dv(h);
    return f;
}

// Extended frame sampled on a grid at one spectral value; F = I at the
// basepoint. The seed conformal factor travels with the frame because the
// gauged columns are (X_u/lambda, lambda X_v/h, X).
struct FrameGrid {
    cdouble lambda{};
    Grid<Mat3c> F;
    Grid<double> h;
    double bu = 0.0, bv = 0.0;
    double path_residual = 0.0; // corner mismatch of the two integration orders

    const GridSpec& spec() const { return F.spec; }
};

// Scalar solution of the linear system at gamma = alpha^3, with exact first
// partials recovered from the frame row identity
// l F = (phi_u/alpha, alpha phi_v/h, phi).
struct ScalarSolution {
    GridSpec spec;
    cdouble alpha{};
    cdouble gamma{};
    Grid<cdouble> phi, phi_u, phi_v;
};

// Surface member of the associated family with its attached conformal factor.
// Exact tangent grids are attached when the construction provides them;
// consumers fall back to finite differences otherwise.
struct ImmersionGrid {
    cdouble lambda{};
    Grid<Vec3c> X;
    Grid<cdouble> h;
    Grid<Vec3c> Xu, Xv;

    bool has_exact_tangents() const { return !Xu.data.empty(); }
    double max_imag() const {
        double m = 0.0;
        for (int j = 0; j < X.spec.nv; ++j)
            for (int i = 0; i < X.spec.nu; ++i) {
                if (!X.ok(i, j)) continue;
                m = std::max(m, X.at(i, j).imag().cwiseAbs().maxCoeff());
            }
        return m;
    }
};

// Flat-connection coefficient matrices at one point:
//   U = [[w_u, 0, lambda], [lambda, -w_u, 0], [0, lambda, 0]],
//   V = (1/lambda) [[0, h^-2, 0], [0, 0, h], [h, 0, 0]],  w_u = h_u/h.
inline std::pair<Mat3c, Mat3c> connection_matrices(const SolutionField& f,
                                                   double u, double v,
                                                   cdouble lambda) {
    if (std::abs(lambda) < 1e-15) throw ZeroLambda("spectral parameter must be nonzero");
    const double h = f.h_at(u, v);
    if (h <= 0.0)
        throw NonPositiveH("frame gauge requires h > 0 at the evaluation point");
    const double wu = f.hu_at(u, v) / h;
    Mat3c U = Mat3c::Zero(), V = Mat3c::Zero();
    U(0, 0) = wu;
    U(1, 1) = -wu;
    U(0, 2) = lambda;
    U(1, 0) = lambda;
    U(2, 1) = lambda;
    V(0, 1) = 1.0 / (h * h);
    V(1, 2) = h;
    V(2, 0) = h;
    V /= lambda;
    return {U, V};
}

namespace detail {

// One classical 4th-order step for F' = F * A(t).
template <class Rhs>
Mat3c rk4_step(const Mat3c& F, double t, double step, const Rhs& rhs) {
    const Mat3c k1 = F * rhs(t);
    const Mat3c k2 = (F + 0.5 * step * k1) * rhs(t + 0.5 * step);
    const Mat3c k3 = (F + 0.5 * step * k2) * rhs(t + 0.5 * step);
    const Mat3c k4 = (F + step * k3) * rhs(t + step);
    return F + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace detail

// Integrate F^-1 F_u = U, F^-1 F_v = V from F(u0, v0) = I: first along the
// bottom row in u, then up each u-column in v (columns are independent and run
// in parallel). Also integrates the transposed order to the far corner and
// records the mismatch as path_residual.
inline FrameGrid integrate_frame(const SolutionField& f, cdouble lambda) {
    if (std::abs(lambda) < 1e-15) throw ZeroLambda("spectral parameter must be nonzero");
    const GridSpec& s = f.spec;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            if (!f.h.ok(i, j))
                throw BadArgument("frame integration requires an unmasked field");
            if (f.h.at(i, j) <= 0.0)
                throw NonPositiveH("frame integration requires h > 0 on the grid");
        }

    FrameGrid fg;
    fg.lambda = lambda;
    fg.F = Grid<Mat3c>(s, Mat3c::Identity());
    fg.h = f.h;
    fg.bu = s.u0;
    fg.bv = s.v0;

    const double du = s.du(), dv = s.dv();
    const auto Uat = [&](double u, double v) {
        return connection_matrices(f, u, v, lambda).first;
    };
    const auto Vat = [&](double u, double v) {
        return connection_matrices(f, u, v, lambda).second;
    };

    for (int i = 0; i + 1 < s.nu; ++i)
        fg.F.at(i + 1, 0) = detail::rk4_step(
            fg.F.at(i, 0), s.u(i), du, [&](double t) { return Uat(t, s.v0); });

    parallel_rows(s.nu, [&](int i) {
        for (int j = 0; j + 1 < s.nv; ++j)
            fg.F.at(i, j + 1) = detail::rk4_step(
                fg.F.at(i, j), s.v(j), dv, [&](double t) { return Vat(s.u(i), t); });
    });

    // Transposed order to the far corner for the path-independence report.
    Mat3c G = Mat3c::Identity();
    for (int j = 0; j + 1 < s.nv; ++j)
        G = detail::rk4_step(G, s.v(j), dv, [&](double t) { return Vat(s.u0, t); });
    for (int i = 0; i + 1 < s.nu; ++i)
        G = detail::rk4_step(G, s.u(i), du,
                             [&](double t) { return Uat(t, s.v1); });
    fg.path_residual = max_abs(Mat3c(G - fg.F.at(s.nu - 1, s.nv - 1)));
    return fg;
}

// Third frame column as the surface; exact tangents from the first two
// columns; attached h recovered as det(X_u, X_v, X) by finite differences.
inline ImmersionGrid surface_from_frame(const FrameGrid& fg) {
    const GridSpec& s = fg.spec();
    ImmersionGrid im;
    im.lambda = fg.lambda;
    im.X = Grid<Vec3c>(s, Vec3c::Zero());
    im.h = Grid<cdouble>(s);
    im.Xu = Grid<Vec3c>(s, Vec3c::Zero());
    im.Xv = Grid<Vec3c>(s, Vec3c::Zero());
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const Mat3c& F = fg.F.at(i, j);
            im.X.at(i, j) = F.col(2);
            im.Xu.at(i, j) = fg.lambda * F.col(0);
            im.Xv.at(i, j) = (fg.h.at(i, j) / fg.lambda) * F.col(1);
        }
    const Grid<Vec3c> xu = fd_du(im.X), xv = fd_dv(im.X);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            Mat3c m;
            m.col(0) = xu.at(i, j);
            m.col(1) = xv.at(i, j);
            m.col(2) = im.X.at(i, j);
            im.h.at(i, j) = m.determinant();
        }
    return im;
}

// Row identity l F = (phi_u/alpha, alpha phi_v/h, phi) at real alpha.
inline ScalarSolution scalar_solution(const ProjLine& l, const FrameGrid& fg) {
    if (std::abs(fg.lambda) < 1e-15) throw ZeroLambda("scalar pole must be nonzero");
    if (std::abs(fg.lambda.imag()) > 1e-12 * std::max(1.0, std::abs(fg.lambda)))
        throw BadArgument("scalar solutions are defined for frames at real poles");
    if (!l.affine()) throw BadArgument("line must be normalized to (a, b, 1)");
    const GridSpec& s = fg.spec();
    const cdouble alpha = fg.lambda.real();
    ScalarSolution ss;
    ss.spec = s;
    ss.alpha = alpha;
    ss.gamma = alpha * alpha * alpha;
    ss.phi = Grid<cdouble>(s);
    ss.phi_u = Grid<cdouble>(s);
    ss.phi_v = Grid<cdouble>(s);
    const RowVec3c row0 = l.rep.transpose();
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const RowVec3c row = row0 * fg.F.at(i, j);
            ss.phi.at(i, j) = row(2);
            ss.phi_u.at(i, j) = alpha * row(0);
            ss.phi_v.at(i, j) = (fg.h.at(i, j) / alpha) * row(1);
        }
    return ss;
}

// Interior residual of h_uv h - h_u h_v - h^3 + 1 by central differences.
inline Grid<double> tzitzeica_residual(const SolutionField& f) {
    if (f.spec.nu < 3 || f.spec.nv < 3)
        throw BadArgument("residual stencil needs at least a 3x3 grid");
    const Grid<double> hu = fd_du(f.h), hv = fd_dv(f.h), huv = fd_duv(f.h);
    Grid<double> res(f.spec);
    for (int j = 0; j < f.spec.nv; ++j)
        for (int i = 0; i < f.spec.nu; ++i) {
            const bool usable = huv.ok(i, j) && hu.ok(i, j) && hv.ok(i, j);
            res.set_mask(i, j, usable);
            if (!usable) continue;
            const double h = f.h.at(i, j);
            res.at(i, j) =
                huv.at(i, j) * h - hu.at(i, j) * hv.at(i, j) - (h * h * h - 1.0);
        }
    return res;
}

// Max interior norm of the flatness defect V_u - U_v + [U, V] (central
// differences of the connection across nodes).
inline double zero_curvature_residual(const SolutionField& f, cdouble lambda) {
    const GridSpec& s = f.spec;
    if (s.nu < 3 || s.nv < 3)
        throw BadArgument("residual stencil needs at least a 3x3 grid");
    Grid<Mat3c> U(s, Mat3c::Zero()), V(s, Mat3c::Zero());
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const auto uv = connection_matrices(f, s.u(i), s.v(j), lambda);
            U.at(i, j) = uv.first;
            V.at(i, j) = uv.second;
        }
    const Grid<Mat3c> Uv = fd_dv(U), Vu = fd_du(V);
    double r = 0.0;
    for (int j = 1; j + 1 < s.nv; ++j)
        for (int i = 1; i + 1 < s.nu; ++i) {
            const Mat3c& a = U.at(i, j);
            const Mat3c& b = V.at(i, j);
            r = std::max(r, max_abs(Mat3c(Vu.at(i, j) - Uv.at(i, j) + a * b - b * a)));
        }
    return r;
}

// A frame family answers for F(u, v, lambda) at arbitrary spectral values:
// closed-form sources evaluate directly, grid sources re-integrate.
struct FrameFamily {
    SolutionField field;
    std::function<Mat3c(double, double, cdouble)> eval;
    double bu = 0.0, bv = 0.0;

    FrameGrid at(cdouble lambda) const {
        if (!eval) return integrate_frame(field, lambda);
        const GridSpec& s = field.spec;
        FrameGrid fg;
        fg.lambda = lambda;
        fg.F = Grid<Mat3c>(s, Mat3c::Identity());
        fg.h = field.h;
        fg.bu = bu;
        fg.bv = bv;
        for (int j = 0; j < s.nv; ++j)
            for (int i = 0; i < s.nu; ++i) fg.F.at(i, j) = eval(s.u(i), s.v(j), lambda);
        return fg;
    }
};

inline FrameFamily family_from_field(const SolutionField& f) {
    FrameFamily fam;
    fam.field = f;
    fam.bu = f.spec.u0;
    fam.bv = f.spec.v0;
    return fam;
}

} // namespace tzlab

#endif // TZLAB_LAX_FRAME_HPP
