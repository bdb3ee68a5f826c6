#ifndef TZLAB_TRANSFORMS_HPP
#define TZLAB_TRANSFORMS_HPP

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tzlab/errors.hpp"
#include "tzlab/exact_solutions.hpp"
#include "tzlab/lax_frame.hpp"
#include "tzlab/loopalgebra.hpp"
#include "tzlab/rational_elements.hpp"
#include "tzlab/verification.hpp"

namespace tzlab {

// Pointwise line field produced by transporting a line across the grid, with
// the open-condition flag (line off the degeneracy cone) per node.
struct TildeLineField {
    Grid<Vec3c> rep;
    Grid<std::uint8_t> open;

    bool open_at(int i, int j) const { return open.at(i, j) != 0; }
    ProjLine line(int i, int j) const { return ProjLine(rep.at(i, j)); }
};

namespace detail {

// Components (phi, phi_u, phi_v) of the scalar carried by the frame row
// l F = (phi_u/alpha, alpha phi_v/h, phi).
struct ScalarRow {
    cdouble phi, phi_u, phi_v;
};

inline ScalarRow scalar_row(const RowVec3c& l, const Mat3c& F, cdouble alpha,
                            cdouble h) {
    const RowVec3c r = l * F;
    return {r(2), alpha * r(0), (h / alpha) * r(1)};
}

inline void require_real_element(const SimpleElement& e) {
    if (!claims_tau_reality(e))
        throw BadArgument("dressing requires a real pole and a real line");
}

inline void check_masked_budget(const Grid<std::uint8_t>& open, double cap,
                                const char* what) {
    int bad = 0, first_i = -1, first_j = -1;
    const GridSpec& s = open.spec;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            if (open.at(i, j) == 0) {
                ++bad;
                if (first_i < 0) {
                    first_i = i;
                    first_j = j;
                }
            }
    if (bad == 0) return;
    const double frac = static_cast<double>(bad) / s.count();
    if (frac > cap) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s fails at %d of %d nodes (first at i=%d, j=%d)", what,
                      bad, s.count(), first_i, first_j);
        throw OpenConditionViolated(buf);
    }
}

inline double grid_scale(const Grid<cdouble>& g) {
    double m = 0.0;
    for (int j = 0; j < g.spec.nv; ++j)
        for (int i = 0; i < g.spec.nu; ++i)
            if (g.ok(i, j)) m = std::max(m, std::abs(g.at(i, j)));
    return m;
}

} // namespace detail

// Result of the classical transformation: the new solution and the new
// family member at the same spectral value.
struct ClassicalResult {
    SolutionField h1;
    ImmersionGrid X1;
};

// h1 = h - 2 (ln phi)_uv computed through phi_uv = h phi as
// h1 = 2 phi_u phi_v / phi^2 - h;
// X1 = [(g - g1) h X - 2 g (ln phi)_u X_v + 2 g1 (ln phi)_v X_u] / [(g + g1) h]
// with g = lambda^3 of the member and g1 of the scalar.
inline ClassicalResult classical_transform(const SolutionField& hf,
                                           const ImmersionGrid& X,
                                           const ScalarSolution& phi) {
    const GridSpec& s = hf.spec;
    const cdouble g = X.lambda * X.lambda * X.lambda;
    const cdouble g1 = phi.gamma;
    if (std::abs(g + g1) <= 1e-9 * (std::abs(g) + std::abs(g1)))
        throw GammaCollision("transformation undefined at gamma = -gamma1");

    const Grid<Vec3c> Xu = X.has_exact_tangents() ? X.Xu : fd_du(X.X);
    const Grid<Vec3c> Xv = X.has_exact_tangents() ? X.Xv : fd_dv(X.X);

    double phimax = detail::grid_scale(phi.phi);
    Grid<double> h1(s);
    Grid<Vec3c> X1(s, Vec3c::Zero());
    Grid<cdouble> h1c(s);
    int usable = 0;
    double max_imag = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const bool ok = hf.h.ok(i, j) && X.X.ok(i, j) && Xu.ok(i, j) &&
                            Xv.ok(i, j) &&
                            std::abs(phi.phi.at(i, j)) >= 1e-8 * phimax;
            if (!ok) {
                h1.set_mask(i, j, false);
                X1.set_mask(i, j, false);
                h1c.set_mask(i, j, false);
                continue;
            }
            ++usable;
            const cdouble p = phi.phi.at(i, j);
            const cdouble lu = phi.phi_u.at(i, j) / p;
            const cdouble lv = phi.phi_v.at(i, j) / p;
            const double h = hf.h.at(i, j);
            const cdouble h1v = 2.0 * lu * lv - h;
            max_imag = std::max(max_imag, std::abs(h1v.imag()));
            h1.at(i, j) = h1v.real();
            h1c.at(i, j) = h1v;
            X1.at(i, j) = ((g - g1) * h * X.X.at(i, j) -
                           2.0 * g * lu * Xv.at(i, j) +
                           2.0 * g1 * lv * Xu.at(i, j)) /
                          ((g + g1) * h);
        }
    if (usable == 0) throw AllMasked("scalar solution vanishes on the whole grid");
    if (max_imag > 1e-9 * std::max(1.0, detail::grid_scale(h1c)))
        throw NonRealOutput("transformed conformal factor has a nonreal part");

    ClassicalResult out;
    out.h1 = make_grid_field(h1);
    out.X1.lambda = X.lambda;
    out.X1.X = X1;
    out.X1.h = h1c;
    return out;
}

// Dual surface X* = (X_u x X_v) / h, the family member at -gamma.
inline ImmersionGrid dual_surface(const SolutionField& hf, const ImmersionGrid& X) {
    const GridSpec& s = hf.spec;
    const Grid<Vec3c> Xu = X.has_exact_tangents() ? X.Xu : fd_du(X.X);
    const Grid<Vec3c> Xv = X.has_exact_tangents() ? X.Xv : fd_dv(X.X);
    ImmersionGrid out;
    out.lambda = -X.lambda;
    out.X = Grid<Vec3c>(s, Vec3c::Zero());
    out.h = Grid<cdouble>(s);
    int usable = 0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const double h = hf.h.at(i, j);
            const bool ok = hf.h.ok(i, j) && X.X.ok(i, j) && Xu.ok(i, j) &&
                            Xv.ok(i, j) && std::abs(h) > 1e-12;
            if (!ok) {
                out.X.set_mask(i, j, false);
                out.h.set_mask(i, j, false);
                continue;
            }
            ++usable;
            out.X.at(i, j) = Xu.at(i, j).cross(Xv.at(i, j)) / cdouble(h);
            out.h.at(i, j) = h;
        }
    if (usable == 0) throw ZeroH("conformal factor vanishes at every node");
    return out;
}

// Closed-form dressed surface. Rank1 is the classical transformation with
// gamma1 = alpha^3 (scalar at alpha, pole excluded at lambda^3 = -alpha^3).
// Rank2 consumes the scalar at -alpha (gamma1 = -alpha^3) and differs from
// the rank-1 surface of pole -alpha by the constant factor
// (lambda^3 - alpha^3)/(lambda^3 + alpha^3), giving
// Xt = X - [2 g (ln q)_u X_v + 2 a3 (ln q)_v X_u] / [(g + a3) h], q = phi at -alpha;
// its excluded value is lambda^3 = -alpha^3 as well.
inline ImmersionGrid dressed_surface_closed_form(const ImmersionGrid& X,
                                                 const SolutionField& hf,
                                                 const ScalarSolution& phi,
                                                 double alpha, double lambda,
                                                 Kind kind) {
    const GridSpec& s = hf.spec;
    const double a3 = alpha * alpha * alpha;
    const cdouble want = (kind == Kind::Rank1) ? cdouble(a3) : cdouble(-a3);
    if (std::abs(phi.gamma - want) > 1e-9 * (std::abs(phi.gamma) + std::abs(want)))
        throw BadArgument(kind == Kind::Rank1
                              ? "rank-1 closed form needs the scalar at +alpha"
                              : "rank-2 closed form needs the scalar at -alpha");
    if (std::abs(X.lambda - cdouble(lambda)) > 1e-12 * std::max(1.0, std::abs(lambda)))
        throw BadArgument("surface grid must belong to the requested lambda");
    const double g = lambda * lambda * lambda;
    if (std::abs(g + a3) <= 1e-9 * (std::abs(g) + std::abs(a3)))
        throw PoleCollision("dressed family undefined at lambda^3 = -alpha^3");

    const Grid<Vec3c> Xu = X.has_exact_tangents() ? X.Xu : fd_du(X.X);
    const Grid<Vec3c> Xv = X.has_exact_tangents() ? X.Xv : fd_dv(X.X);
    const double phimax = detail::grid_scale(phi.phi);

    ImmersionGrid out;
    out.lambda = lambda;
    out.X = Grid<Vec3c>(s, Vec3c::Zero());
    out.h = Grid<cdouble>(s);
    int usable = 0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const bool ok = hf.h.ok(i, j) && X.X.ok(i, j) && Xu.ok(i, j) &&
                            Xv.ok(i, j) &&
                            std::abs(phi.phi.at(i, j)) >= 1e-8 * phimax;
            if (!ok) {
                out.X.set_mask(i, j, false);
                out.h.set_mask(i, j, false);
                continue;
            }
            ++usable;
            const cdouble p = phi.phi.at(i, j);
            const cdouble lu = phi.phi_u.at(i, j) / p;
            const cdouble lv = phi.phi_v.at(i, j) / p;
            const double h = hf.h.at(i, j);
            out.h.at(i, j) = 2.0 * lu * lv - h;
            if (kind == Kind::Rank1) {
                out.X.at(i, j) = ((g - a3) * h * X.X.at(i, j) -
                                  2.0 * g * lu * Xv.at(i, j) +
                                  2.0 * a3 * lv * Xu.at(i, j)) /
                                 ((g + a3) * h);
            } else {
                out.X.at(i, j) = X.X.at(i, j) -
                                 (2.0 * g * lu * Xv.at(i, j) +
                                  2.0 * a3 * lv * Xu.at(i, j)) /
                                     ((g + a3) * h);
            }
        }
    if (usable == 0) throw AllMasked("scalar solution vanishes on the whole grid");
    return out;
}

// Shared machinery of the two dressing actions: transports the line, builds
// the pointwise undressed element, forms G = F k^{-1} and Ftilde = e G, and
// attaches the exact tangents lambda G col0 and (h/lambda) G col1.
struct DressingResult {
    FrameGrid ftilde;
    TildeLineField lines;
    ImmersionGrid Xhat;
};

namespace detail {

inline DressingResult dress_common(const SimpleElement& e, const FrameGrid& fg,
                                   const FrameGrid& fg_alpha, double mask_cap) {
    if (std::abs(fg_alpha.lambda - e.alpha) >
        1e-12 * std::max(1.0, std::abs(e.alpha)))
        throw BadArgument("second frame grid must be sampled at the element pole");
    const GridSpec& s = fg.spec();
    const cdouble lambda = fg.lambda;
    const cdouble alpha = e.alpha;
    Mat3c elam;
    try {
        elam = evaluate(e, lambda);
        evaluate_inverse(e, lambda);
    } catch (const AtPole&) {
        throw PoleCollision(
            "lambda lies on a pole of the dressing element or of its inverse");
    }
    const auto& sc = structure();

    DressingResult out;
    out.lines.rep = Grid<Vec3c>(s, Vec3c::Zero());
    out.lines.open = Grid<std::uint8_t>(s, 1);
    out.ftilde.lambda = lambda;
    out.ftilde.F = Grid<Mat3c>(s, Mat3c::Identity());
    out.ftilde.h = Grid<double>(s);
    out.ftilde.bu = fg.bu;
    out.ftilde.bv = fg.bv;
    out.Xhat.lambda = lambda;
    out.Xhat.X = Grid<Vec3c>(s, Vec3c::Zero());
    out.Xhat.h = Grid<cdouble>(s);
    out.Xhat.Xu = Grid<Vec3c>(s, Vec3c::Zero());
    out.Xhat.Xv = Grid<Vec3c>(s, Vec3c::Zero());

    const RowVec3c l0 = e.line.rep.transpose();
    parallel_rows(s.nv, [&](int j) {
        for (int i = 0; i < s.nu; ++i) {
            const Mat3c& Fa = fg_alpha.F.at(i, j);
            Vec3c lt;
            if (e.kind == Kind::Rank1) {
                const RowVec3c r = l0 * Fa;
                lt = Vec3c(r(0), r(1), r(2));
            } else {
                // Kernel line of residueA * F(alpha) * P; equals l F(-alpha).
                const Mat3c M = e.residueA() * Fa * sc.P;
                Eigen::JacobiSVD<Mat3c> svd(M, Eigen::ComputeFullV);
                const auto& sv = svd.singularValues();
                if (sv(1) < 1e-8 * sv(0))
                    throw DegenerateKernel(
                        "kernel of residue * frame * P is not one-dimensional");
                lt = svd.matrixV().col(2);
            }
            out.lines.rep.at(i, j) = lt;
            if (cone_contains(lt)) out.lines.open.at(i, j) = 0;
        }
    });
    detail::check_masked_budget(out.lines.open, mask_cap, "open condition");

    // Scalar at the pole carried by the frame row (rank 2 reads the row of
    // F(-alpha) = P F(alpha)^{-t} P, the scalar of the dual-side pole).
    parallel_rows(s.nv, [&](int j) {
        for (int i = 0; i < s.nu; ++i) {
            if (!out.lines.open_at(i, j)) {
                out.ftilde.F.set_mask(i, j, false);
                out.Xhat.X.set_mask(i, j, false);
                out.Xhat.h.set_mask(i, j, false);
                out.Xhat.Xu.set_mask(i, j, false);
                out.Xhat.Xv.set_mask(i, j, false);
                out.ftilde.h.at(i, j) = fg.h.at(i, j);
                continue;
            }
            const double h = fg.h.at(i, j);
            ScalarRow srow;
            if (e.kind == Kind::Rank1) {
                srow = scalar_row(l0, fg_alpha.F.at(i, j), alpha, h);
            } else {
                const Mat3c Fm =
                    sc.P * inverse_checked(fg_alpha.F.at(i, j)).transpose() * sc.P;
                srow = scalar_row(l0, Fm, -alpha, h);
            }
            const cdouble hhat = 2.0 * srow.phi_u * srow.phi_v /
                                     (srow.phi * srow.phi) -
                                 h;

            const SimpleElement k{e.kind, alpha, ProjLine(out.lines.rep.at(i, j))};
            const Mat3c G = fg.F.at(i, j) * evaluate_inverse(k, lambda);
            out.ftilde.F.at(i, j) = elam * G;
            out.ftilde.h.at(i, j) = hhat.real();
            out.Xhat.X.at(i, j) = G.col(2);
            out.Xhat.h.at(i, j) = hhat;
            out.Xhat.Xu.at(i, j) = lambda * G.col(0);
            out.Xhat.Xv.at(i, j) = (hhat / lambda) * G.col(1);
        }
    });
    return out;
}

} // namespace detail

// Rank-1 dressing: line transport ltilde = l F(.,.;alpha), undressing by the
// pointwise element, surface Xhat = (F k^{-1}) col3 with attached
// hhat = 2 phi_u phi_v / phi^2 - h from the scalar at alpha.
// Complex poles sit behind allow_complex; reality is then reported, not assumed.
inline DressingResult dress_rank1(const SimpleElement& e, const FrameGrid& fg,
                                  const FrameGrid& fg_alpha,
                                  double mask_cap = 0.20,
                                  bool allow_complex = false) {
    if (e.kind != Kind::Rank1) throw BadArgument("element must be of rank 1");
    if (!allow_complex) detail::require_real_element(e);
    return detail::dress_common(e, fg, fg_alpha, mask_cap);
}

struct Rank2DressingResult {
    FrameGrid ftilde;
    TildeLineField lines;
    ImmersionGrid Xtilde;
};

// Rank-2 dressing: tilde line from the kernel of residueA * F(alpha) * P,
// scalar taken at -alpha; produces the dual-type transformed surface.
inline Rank2DressingResult dress_rank2(const SimpleElement& e, const FrameGrid& fg,
                                       const FrameGrid& fg_alpha,
                                       double mask_cap = 0.20) {
    if (e.kind != Kind::Rank2) throw BadArgument("element must be of rank 2");
    detail::require_real_element(e);
    DressingResult r = detail::dress_common(e, fg, fg_alpha, mask_cap);
    return Rank2DressingResult{std::move(r.ftilde), std::move(r.lines),
                               std::move(r.Xhat)};
}

// Discrete contour residue of an analytic matrix function: trapezoidal
// quadrature of (1/2 pi i) * integral of f on a circle. Near-zero output
// certifies analyticity at the center.
inline double contour_residue_norm(const std::function<Mat3c(cdouble)>& f,
                                   cdouble center, double radius = 1e-3,
                                   int npts = 8) {
    Mat3c acc = Mat3c::Zero();
    for (int k = 0; k < npts; ++k) {
        const double th = 2.0 * M_PI * k / npts;
        const cdouble dir(std::cos(th), std::sin(th));
        acc += f(center + radius * dir) * (radius * dir);
    }
    return max_abs(Mat3c(acc / static_cast<double>(npts)));
}

// Dressed-frame value at one point and arbitrary spectral value, for residue
// verification: g(z) F(u,v,z) k(z)^{-1} with the node's transported line.
inline Mat3c dressed_frame_value(const SimpleElement& e, const FrameFamily& fam,
                                 const ProjLine& ltilde, double u, double v,
                                 cdouble z) {
    if (!fam.eval)
        throw BadArgument("pointwise dressed-frame values need a closed-form family");
    const SimpleElement k{e.kind, e.alpha, ltilde};
    return evaluate(e, z) * fam.eval(u, v, z) * evaluate_inverse(k, z);
}

// Both dressing orders of two rank-1 elements, their exchanged-factor
// elements, and the group identity residual at the sample points.
inline VerificationReport permutability_check(const FrameFamily& fam,
                                              const SimpleElement& g1,
                                              const SimpleElement& g2,
                                              cdouble lambda,
                                              std::vector<cdouble> samples = {},
                                              double tol_grid = 1e-7,
                                              double tol_identity = 1e-10) {
    const PermutedPair pp = permute_factorize(g1, g2);
    const GridSpec& s = fam.field.spec;
    const cdouble a1 = g1.alpha, a2 = g2.alpha;

    const FrameGrid f_l = fam.at(lambda);
    const FrameGrid f_a1 = fam.at(a1);
    const FrameGrid f_a2 = fam.at(a2);

    if (samples.empty()) {
        const double base = 0.3 * std::min(std::abs(a1), std::abs(a2));
        for (int k = 0; k < 12; ++k) {
            const double th = 2.0 * M_PI * k / 12.0 + 0.1;
            const double r = base * (1.0 + 0.8 * k / 11.0);
            samples.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    double rid = 0.0;
    for (cdouble z : samples)
        rid = std::max(rid, max_abs(Mat3c(evaluate(pp.tilde2, z) * evaluate(g1, z) -
                                          evaluate(pp.tilde1, z) * evaluate(g2, z))));

    // One order: dress by ga first, then by the exchanged element gb~ whose
    // line transports through the once-dressed frame.
    const auto route = [&](const SimpleElement& ga, const FrameGrid& f_a,
                           const SimpleElement& gb_t, cdouble b_pole,
                           const FrameGrid& f_b, Grid<cdouble>& h2out,
                           Grid<Vec3c>& X2out) {
        const RowVec3c la = ga.line.rep.transpose();
        const RowVec3c lb = gb_t.line.rep.transpose();
        for (int j = 0; j < s.nv; ++j)
            for (int i = 0; i < s.nu; ++i) {
                const double h = fam.field.h.at(i, j);
                const auto row1 = detail::scalar_row(la, f_a.F.at(i, j), ga.alpha, h);
                const cdouble h1 =
                    2.0 * row1.phi_u * row1.phi_v / (row1.phi * row1.phi) - h;
                const SimpleElement k1{Kind::Rank1, ga.alpha,
                                       ProjLine(Vec3c((la * f_a.F.at(i, j)).transpose()))};
                // Once-dressed frame at the second pole.
                const Mat3c F1b = evaluate(ga, b_pole) * f_b.F.at(i, j) *
                                  evaluate_inverse(k1, b_pole);
                const auto row2 = detail::scalar_row(lb, F1b, b_pole, h1);
                h2out.at(i, j) =
                    2.0 * row2.phi_u * row2.phi_v / (row2.phi * row2.phi) - h1;
                const SimpleElement k2{Kind::Rank1, b_pole,
                                       ProjLine(Vec3c((lb * F1b).transpose()))};
                X2out.at(i, j) = (f_l.F.at(i, j) * evaluate_inverse(k1, lambda) *
                                  evaluate_inverse(k2, lambda))
                                     .col(2);
            }
    };

    Grid<cdouble> h12(s), h21(s);
    Grid<Vec3c> X12(s, Vec3c::Zero()), X21(s, Vec3c::Zero());
    route(g1, f_a1, pp.tilde2, a2, f_a2, h12, X12);
    route(g2, f_a2, pp.tilde1, a1, f_a1, h21, X21);

    double rh = 0.0, rx = 0.0;
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            rh = std::max(rh, std::abs(h12.at(i, j) - h21.at(i, j)));
            rx = std::max(rx, max_abs(Vec3c(X12.at(i, j) - X21.at(i, j))));
        }

    VerificationReport rep;
    rep.add("exchange-identity", rid, tol_identity);
    rep.add("h-order-independence", rh, tol_grid);
    rep.add("surface-order-independence", rx, tol_grid);
    return rep;
}

// Breather result: real solution and real surface obtained from two conjugate
// complex dressing steps.
struct BreatherResult {
    SolutionField hB;
    ImmersionGrid XB;
    double max_imag = 0.0;
};

inline BreatherResult dress_breather(const LoopProduct& f, const FrameFamily& fam,
                                     double lambda, double mask_cap = 0.20,
                                     double reality_tol = 1e-9) {
    if (!f.breather || f.factors.size() != 2)
        throw BadArgument("expected a breather product of two factors");
    const SimpleElement& gstep1 = f.factors[1]; // pole alpha, line l
    const SimpleElement& gstep2 = f.factors[0]; // pole conj(alpha), line l*
    const cdouble alpha = gstep1.alpha;
    const cdouble alphab = gstep2.alpha;
    const GridSpec& s = fam.field.spec;

    const FrameGrid f_l = fam.at(lambda);
    const FrameGrid f_a = fam.at(alpha);
    const FrameGrid f_ab = fam.at(alphab);

    const RowVec3c l1 = gstep1.line.rep.transpose();
    const RowVec3c l2 = gstep2.line.rep.transpose();

    Grid<double> hB(s);
    Grid<cdouble> hBc(s);
    Grid<Vec3c> XB(s, Vec3c::Zero());
    Grid<std::uint8_t> open(s, 1);
    double worst_imag = 0.0;

    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            const double h = fam.field.h.at(i, j);
            const RowVec3c r1 = l1 * f_a.F.at(i, j);
            const Vec3c lt1(r1(0), r1(1), r1(2));
            if (cone_contains(lt1)) {
                open.at(i, j) = 0;
                continue;
            }
            const auto row1 = detail::scalar_row(l1, f_a.F.at(i, j), alpha, h);
            const cdouble h1 =
                2.0 * row1.phi_u * row1.phi_v / (row1.phi * row1.phi) - h;
            const SimpleElement k1{Kind::Rank1, alpha, ProjLine(lt1)};

            const Mat3c F1b = evaluate(gstep1, alphab) * f_ab.F.at(i, j) *
                              evaluate_inverse(k1, alphab);
            const RowVec3c r2 = l2 * F1b;
            const Vec3c lt2(r2(0), r2(1), r2(2));
            if (cone_contains(lt2)) {
                open.at(i, j) = 0;
                continue;
            }
            const auto row2 = detail::scalar_row(l2, F1b, alphab, h1);
            const cdouble hBv =
                2.0 * row2.phi_u * row2.phi_v / (row2.phi * row2.phi) - h1;
            const SimpleElement k2{Kind::Rank1, alphab, ProjLine(lt2)};
            const Vec3c Xv = (f_l.F.at(i, j) * evaluate_inverse(k1, lambda) *
                              evaluate_inverse(k2, lambda))
                                 .col(2);
            worst_imag = std::max(worst_imag, std::abs(hBv.imag()));
            worst_imag = std::max(worst_imag, Xv.imag().cwiseAbs().maxCoeff());
            hB.at(i, j) = hBv.real();
            hBc.at(i, j) = hBv;
            XB.at(i, j) = Xv;
        }

    detail::check_masked_budget(open, mask_cap, "breather open condition");
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            if (open.at(i, j) == 0) {
                hB.set_mask(i, j, false);
                hBc.set_mask(i, j, false);
                XB.set_mask(i, j, false);
            }
    if (worst_imag > reality_tol)
        throw NonRealOutput("breather output is not real to tolerance");

    BreatherResult out;
    out.hB = make_grid_field(hB);
    out.XB.lambda = lambda;
    out.XB.X = XB;
    out.XB.h = hBc;
    out.max_imag = worst_imag;
    return out;
}

} // namespace tzlab

#endif // TZLAB_TRANSFORMS_HPP
