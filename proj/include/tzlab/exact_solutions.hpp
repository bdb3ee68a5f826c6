#ifndef TZLAB_EXACT_SOLUTIONS_HPP
#define TZLAB_EXACT_SOLUTIONS_HPP

#include <cmath>
#include <complex>

#include "tzlab/errors.hpp"
#include "tzlab/lax_frame.hpp"
#include "tzlab/loopalgebra.hpp"
#include "tzlab/matrix.hpp"

namespace tzlab {

// ---------------------------------------------------------------------------
// Vacuum solution h == 1 and its closed-form frame/surface/scalar family.
// Asymptotic phases: s = lambda*u + v/lambda, t = lambda*u - v/lambda.
// ---------------------------------------------------------------------------

inline void require_nonzero_lambda(cdouble lambda) {
    if (std::abs(lambda) < 1e-15)
        throw ZeroLambda("family parameter must be nonzero");
}

// Surface of revolution X0 = (e^{-s/2} cos(rt), e^{-s/2} sin(rt), (2/(3 sqrt 3)) e^s)
// with rt = sqrt(3) t / 2.
inline Vec3d vacuum_surface(double u, double v, double lambda) {
    require_nonzero_lambda(lambda);
    const double s = lambda * u + v / lambda;
    const double t = lambda * u - v / lambda;
    const double rt = std::sqrt(3.0) / 2.0 * t;
    const double e = std::exp(-0.5 * s);
    return Vec3d(e * std::cos(rt), e * std::sin(rt),
                 2.0 / (3.0 * std::sqrt(3.0)) * std::exp(s));
}

inline Vec3d vacuum_surface_du(double u, double v, double lambda) {
    require_nonzero_lambda(lambda);
    const double s = lambda * u + v / lambda;
    const double t = lambda * u - v / lambda;
    const double rt = std::sqrt(3.0) / 2.0 * t;
    const double e = std::exp(-0.5 * s);
    const double c = std::cos(rt), sn = std::sin(rt);
    const double r3 = std::sqrt(3.0);
    return Vec3d(e * (-0.5 * lambda * c - r3 / 2.0 * lambda * sn),
                 e * (-0.5 * lambda * sn + r3 / 2.0 * lambda * c),
                 2.0 / (3.0 * r3) * lambda * std::exp(s));
}

inline Vec3d vacuum_surface_dv(double u, double v, double lambda) {
    require_nonzero_lambda(lambda);
    const double s = lambda * u + v / lambda;
    const double t = lambda * u - v / lambda;
    const double rt = std::sqrt(3.0) / 2.0 * t;
    const double e = std::exp(-0.5 * s);
    const double c = std::cos(rt), sn = std::sin(rt);
    const double r3 = std::sqrt(3.0);
    return Vec3d(e * (-c / (2.0 * lambda) + r3 / (2.0 * lambda) * sn),
                 e * (-sn / (2.0 * lambda) - r3 / (2.0 * lambda) * c),
                 2.0 / (3.0 * r3) * std::exp(s) / lambda);
}

// exp(lambda u N + lambda^{-1} v N^2) through the circulant eigenbasis of N:
// F = f0 I + f1 N + f2 N^2 with
// f_m = (1/3) [e^s + 2 e^{-s/2} cos(sqrt(3) t / 2 - 2 pi m / 3)].
inline Mat3c vacuum_frame(double u, double v, cdouble lambda) {
    require_nonzero_lambda(lambda);
    const cdouble s = lambda * u + v / lambda;
    const cdouble t = lambda * u - v / lambda;
    const cdouble es = std::exp(s);
    const cdouble eh = std::exp(-0.5 * s);
    const cdouble rt = std::sqrt(3.0) / 2.0 * t;
    cdouble f[3];
    for (int m = 0; m < 3; ++m)
        f[m] = (es + 2.0 * eh * std::cos(rt - 2.0 * M_PI * m / 3.0)) / 3.0;
    const auto& sc = structure();
    return f[0] * Mat3c::Identity() + f[1] * sc.N + f[2] * sc.N * sc.N;
}

inline SolutionField vacuum_field(const GridSpec& spec) {
    return make_analytic_field(
        spec, [](double, double) { return 1.0; },
        [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
}

inline FrameFamily vacuum_family(const GridSpec& spec) {
    FrameFamily fam;
    fam.field = vacuum_field(spec);
    fam.eval = [](double u, double v, cdouble lambda) {
        return vacuum_frame(u, v, lambda);
    };
    fam.bu = 0.0;
    fam.bv = 0.0;
    return fam;
}

inline ImmersionGrid vacuum_immersion(const GridSpec& spec, double lambda) {
    require_nonzero_lambda(lambda);
    ImmersionGrid im;
    im.lambda = lambda;
    im.X = Grid<Vec3c>(spec, Vec3c::Zero());
    im.h = Grid<cdouble>(spec, cdouble(1.0));
    im.Xu = Grid<Vec3c>(spec, Vec3c::Zero());
    im.Xv = Grid<Vec3c>(spec, Vec3c::Zero());
    for (int j = 0; j < spec.nv; ++j)
        for (int i = 0; i < spec.nu; ++i) {
            const double u = spec.u(i), v = spec.v(j);
            im.X.at(i, j) = vacuum_surface(u, v, lambda).cast<cdouble>();
            im.Xu.at(i, j) = vacuum_surface_du(u, v, lambda).cast<cdouble>();
            im.Xv.at(i, j) = vacuum_surface_dv(u, v, lambda).cast<cdouble>();
        }
    return im;
}

// Constant map sending X0(u, v) to the third column of the vacuum frame at the
// same (u, v, lambda); unit determinant.
inline Mat3c vacuum_column_map() {
    const double r3 = std::sqrt(3.0);
    Mat3c A;
    A << -1.0 / 3.0, r3 / 3.0, r3 / 2.0,
         -1.0 / 3.0, -r3 / 3.0, r3 / 2.0,
         2.0 / 3.0, 0.0, r3 / 2.0;
    return A;
}

// General scalar solution c0 R(l1) + c1 R(eps^2 l1) + c2 R(eps^4 l1) with
// R(z) = exp(z u + v / z); all three terms share gamma = l1^3.
inline cdouble vacuum_scalar(double u, double v, cdouble lambda1, cdouble c0,
                             cdouble c1, cdouble c2) {
    require_nonzero_lambda(lambda1);
    const cdouble e2 = epsilon6() * epsilon6();
    const cdouble z0 = lambda1, z1 = e2 * lambda1, z2 = e2 * e2 * lambda1;
    return c0 * std::exp(z0 * u + v / z0) + c1 * std::exp(z1 * u + v / z1) +
           c2 * std::exp(z2 * u + v / z2);
}

inline cdouble vacuum_scalar_du(double u, double v, cdouble lambda1, cdouble c0,
                                cdouble c1, cdouble c2) {
    require_nonzero_lambda(lambda1);
    const cdouble e2 = epsilon6() * epsilon6();
    const cdouble z0 = lambda1, z1 = e2 * lambda1, z2 = e2 * e2 * lambda1;
    return c0 * z0 * std::exp(z0 * u + v / z0) +
           c1 * z1 * std::exp(z1 * u + v / z1) +
           c2 * z2 * std::exp(z2 * u + v / z2);
}

inline cdouble vacuum_scalar_dv(double u, double v, cdouble lambda1, cdouble c0,
                                cdouble c1, cdouble c2) {
    require_nonzero_lambda(lambda1);
    const cdouble e2 = epsilon6() * epsilon6();
    const cdouble z0 = lambda1, z1 = e2 * lambda1, z2 = e2 * e2 * lambda1;
    return c0 / z0 * std::exp(z0 * u + v / z0) +
           c1 / z1 * std::exp(z1 * u + v / z1) +
           c2 / z2 * std::exp(z2 * u + v / z2);
}

inline ScalarSolution vacuum_scalar_solution(const GridSpec& spec, cdouble lambda1,
                                             cdouble c0, cdouble c1, cdouble c2) {
    require_nonzero_lambda(lambda1);
    ScalarSolution ss;
    ss.spec = spec;
    ss.alpha = lambda1;
    ss.gamma = lambda1 * lambda1 * lambda1;
    ss.phi = Grid<cdouble>(spec);
    ss.phi_u = Grid<cdouble>(spec);
    ss.phi_v = Grid<cdouble>(spec);
    for (int j = 0; j < spec.nv; ++j)
        for (int i = 0; i < spec.nu; ++i) {
            const double u = spec.u(i), v = spec.v(j);
            ss.phi.at(i, j) = vacuum_scalar(u, v, lambda1, c0, c1, c2);
            ss.phi_u.at(i, j) = vacuum_scalar_du(u, v, lambda1, c0, c1, c2);
            ss.phi_v.at(i, j) = vacuum_scalar_dv(u, v, lambda1, c0, c1, c2);
        }
    return ss;
}

// ---------------------------------------------------------------------------
// One-soliton solution and surface family. Soliton phases:
// s1 = l1 u + v / l1, t1 = l1 u - v / l1, C = sqrt(3) t1 / 2 + theta0.
// ---------------------------------------------------------------------------

struct SolitonParams {
    double lambda1 = 0.0;
    double theta0 = 0.0;
    double c0 = 0.0;
    double rho0 = 1.0;

    double beta0() const { return c0 / (2.0 * rho0); }
};

inline SolitonParams make_soliton(double lambda1, double theta0, double c0,
                                  double rho0) {
    if (lambda1 == 0.0) throw ZeroLambda("soliton parameter lambda1 must be nonzero");
    if (!(rho0 > 0.0)) throw BadArgument("soliton amplitude rho0 must be positive");
    return SolitonParams{lambda1, theta0, c0, rho0};
}

namespace detail {

struct SolitonPoint {
    double h, hu, hv;   // conformal factor and exact partials
    double bracket;     // denominator bracket beta0 e^{3 s1/2} + cos C
    double cosC;        // cosine of the soliton phase
};

inline SolitonPoint soliton_eval(double u, double v, const SolitonParams& p) {
    const double l1 = p.lambda1;
    const double s1 = l1 * u + v / l1;
    const double t1 = l1 * u - v / l1;
    const double r3 = std::sqrt(3.0);
    const double C = r3 / 2.0 * t1 + p.theta0;
    const double b0 = p.beta0();
    const double E = std::exp(1.5 * s1);
    const double cC = std::cos(C), sC = std::sin(C);

    const double n = 6.0 * b0 * E * cC + 1.5;
    const double D = b0 * E + cC;

    // u-partials: s1_u = l1, t1_u = l1; v-partials: s1_v = 1/l1, t1_v = -1/l1.
    const double n_u = 3.0 * b0 * E * l1 * (3.0 * cC - r3 * sC);
    const double n_v = 3.0 * b0 * E / l1 * (3.0 * cC + r3 * sC);
    const double D_u = 1.5 * l1 * b0 * E - r3 / 2.0 * l1 * sC;
    const double D_v = 1.5 / l1 * b0 * E + r3 / (2.0 * l1) * sC;

    SolitonPoint out;
    out.bracket = D;
    out.cosC = cC;
    out.h = 1.0 - n / (D * D);
    out.hu = -(n_u * D - 2.0 * n * D_u) / (D * D * D);
    out.hv = -(n_v * D - 2.0 * n * D_v) / (D * D * D);
    return out;
}

inline bool soliton_bracket_ok(const SolitonPoint& sp, const SolitonParams& p,
                               double u, double v) {
    const double l1 = p.lambda1;
    const double s1 = l1 * u + v / l1;
    const double scale = std::max(1.0, std::abs(p.beta0()) * std::exp(1.5 * s1));
    return std::abs(sp.bracket) > 1e-6 * scale;
}

} // namespace detail

inline double one_soliton_h(double u, double v, const SolitonParams& p) {
    return detail::soliton_eval(u, v, p).h;
}

inline bool one_soliton_valid(double u, double v, const SolitonParams& p) {
    return detail::soliton_bracket_ok(detail::soliton_eval(u, v, p), p, u, v);
}

// Analytic field with exact partials; nodes on the singular lines are masked.
inline SolutionField one_soliton_field(const GridSpec& spec, const SolitonParams& p) {
    SolutionField f = make_analytic_field(
        spec, [p](double u, double v) { return detail::soliton_eval(u, v, p).h; },
        [p](double u, double v) { return detail::soliton_eval(u, v, p).hu; },
        [p](double u, double v) { return detail::soliton_eval(u, v, p).hv; });
    for (int j = 0; j < spec.nv; ++j)
        for (int i = 0; i < spec.nu; ++i)
            if (!one_soliton_valid(spec.u(i), spec.v(j), p))
                f.h.set_mask(i, j, false);
    return f;
}

// Phase-shifted copies of the vacuum surface entering the soliton correction
// term: same s-profile, rotational phase advanced by a constant.
inline Vec3d phase_shifted_vacuum(double u, double v, double lambda, double theta) {
    require_nonzero_lambda(lambda);
    const double s = lambda * u + v / lambda;
    const double t = lambda * u - v / lambda;
    const double rt = std::sqrt(3.0) / 2.0 * t + theta;
    const double e = std::exp(-0.5 * s);
    return Vec3d(e * std::cos(rt), e * std::sin(rt),
                 2.0 / (3.0 * std::sqrt(3.0)) * std::exp(s));
}

// Closed-form one-soliton surface family (pure-cosine case beta0 = 0):
// X1 = [(l^3 - l1^3) X0
//       + l l1 (sqrt(3) tan(C) (l W43 + l1 W23) + l W43 - l1 W23)]
//      / (l^3 + l1^3)
// where W43, W23 are the vacuum surface with phase shifts 4pi/3 and 2pi/3.
inline Vec3d one_soliton_surface(double u, double v, double lambda,
                                 const SolitonParams& p) {
    require_nonzero_lambda(lambda);
    if (std::abs(p.beta0()) > 1e-12)
        throw BadArgument("closed-form soliton surface requires beta0 = 0");
    const double l = lambda, l1 = p.lambda1;
    const double l3 = l * l * l, l13 = l1 * l1 * l1;
    if (std::abs(l3 + l13) <= 1e-9 * (std::abs(l3) + std::abs(l13)))
        throw PoleCollision("surface family undefined at lambda^3 = -lambda1^3");
    const double r3 = std::sqrt(3.0);
    const double t1 = l1 * u - v / l1;
    const double C = r3 / 2.0 * t1 + p.theta0;
    const Vec3d X0 = vacuum_surface(u, v, l);
    const Vec3d W43 = phase_shifted_vacuum(u, v, l, 4.0 * M_PI / 3.0);
    const Vec3d W23 = phase_shifted_vacuum(u, v, l, 2.0 * M_PI / 3.0);
    const Vec3d corr = r3 * std::tan(C) * (l * W43 + l1 * W23) + l * W43 - l1 * W23;
    return ((l3 - l13) * X0 + l * l1 * corr) / (l3 + l13);
}

inline ImmersionGrid one_soliton_immersion(const GridSpec& spec, double lambda,
                                           const SolitonParams& p) {
    ImmersionGrid im;
    im.lambda = lambda;
    im.X = Grid<Vec3c>(spec, Vec3c::Zero());
    im.h = Grid<cdouble>(spec);
    for (int j = 0; j < spec.nv; ++j)
        for (int i = 0; i < spec.nu; ++i) {
            const double u = spec.u(i), v = spec.v(j);
            const auto sp = detail::soliton_eval(u, v, p);
            if (!detail::soliton_bracket_ok(sp, p, u, v) ||
                std::abs(sp.cosC) <= 1e-6) {
                im.X.set_mask(i, j, false);
                im.h.set_mask(i, j, false);
                continue;
            }
            im.X.at(i, j) = one_soliton_surface(u, v, lambda, p).cast<cdouble>();
            im.h.at(i, j) = sp.h;
        }
    return im;
}

// ---------------------------------------------------------------------------
// Cubic surface identity x^3 + y^3 + z^3 - 3xyz = 1.
// ---------------------------------------------------------------------------

inline cdouble cubic_residual(const Vec3c& p) {
    const cdouble x = p(0), y = p(1), z = p(2);
    return x * x * x + y * y * y + z * z * z - 3.0 * x * y * z - 1.0;
}

inline double cubic_residual(const Vec3d& p) {
    return cubic_residual(Vec3c(p.cast<cdouble>())).real();
}

} // namespace tzlab

#endif // TZLAB_EXACT_SOLUTIONS_HPP
