#ifndef TZLAB_RATIONAL_ELEMENTS_HPP
#define TZLAB_RATIONAL_ELEMENTS_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "tzlab/loopalgebra.hpp"
#include "tzlab/matrix.hpp"
#include "tzlab/verification.hpp"

namespace tzlab {

enum class Kind { Rank1, Rank2 };

// Simple rational loop-group element: identity plus a first-order pole triple
// at alpha, eps^2 alpha, eps^4 alpha, determined by (kind, alpha, line).
struct SimpleElement {
    Kind kind = Kind::Rank1;
    cdouble alpha{};
    ProjLine line;

    int rank() const { return kind == Kind::Rank1 ? 1 : 2; }

    // Residue at alpha divided by 2*alpha.
    Mat3c residueA() const {
        const cdouble a = line.a(), b = line.b();
        const cdouble d = 2.0 * a * b - 1.0;
        Mat3c A;
        if (kind == Kind::Rank1) {
            A << a * b / d, b * b / d, b / d,
                 a * a,     a * b,     a,
                 a,         b,         1.0;
        } else {
            A << (a * b - 1.0) / d, -b * b / d,        b / d,
                 a * a,             1.0 - a * b,       -a,
                 -a,                b,                 0.0;
        }
        return A / 3.0;
    }
};

namespace detail {

inline void validate_line(const ProjLine& l) {
    if (cone_contains(l))
        throw ConeLine("line lies on the degeneracy cone (2ab = 1 or third component 0)");
    if (!l.affine())
        throw ConeLine("line has no representative with third component 1");
}

// Relative pole-proximity criterion; scale-free in lambda and alpha.
inline bool near_cubed(cdouble lambda_cubed, cdouble alpha_cubed) {
    return std::abs(lambda_cubed - alpha_cubed) <=
           1e-9 * (std::abs(lambda_cubed) + std::abs(alpha_cubed));
}

} // namespace detail

inline SimpleElement make_rank1(cdouble alpha, const ProjLine& l) {
    if (alpha == cdouble(0.0)) throw ZeroPole("pole must be nonzero");
    detail::validate_line(l);
    return SimpleElement{Kind::Rank1, alpha, l};
}

inline SimpleElement make_rank2(cdouble alpha, const ProjLine& l) {
    if (alpha == cdouble(0.0)) throw ZeroPole("pole must be nonzero");
    detail::validate_line(l);
    return SimpleElement{Kind::Rank2, alpha, l};
}

// g(lambda) = I + 2 M(lambda) / (lambda^3 - alpha^3), with M the rank-specific
// polynomial matrix in lambda.
inline Mat3c evaluate(const SimpleElement& e, cdouble lambda) {
    const cdouble al = e.alpha;
    const cdouble l3 = lambda * lambda * lambda;
    const cdouble a3 = al * al * al;
    if (detail::near_cubed(l3, a3))
        throw AtPole("evaluation point coincides with a pole of the element");
    const cdouble a = e.line.a(), b = e.line.b();
    const cdouble d = 2.0 * a * b - 1.0;
    const cdouble l2 = lambda * lambda;
    const cdouble al2 = al * al;
    Mat3c M;
    if (e.kind == Kind::Rank1) {
        M << a3 * a * b / d, al * l2 * b * b / d, al2 * lambda * b / d,
             al2 * lambda * a * a, a3 * a * b, al * l2 * a,
             al * l2 * a, al2 * lambda * b, a3;
    } else {
        M << a3 * (a * b - 1.0) / d, -al * l2 * b * b / d, al2 * lambda * b / d,
             al2 * lambda * a * a, a3 * (1.0 - a * b), -al * l2 * a,
             -al * l2 * a, al2 * lambda * b, 0.0;
    }
    return Mat3c::Identity() + 2.0 * M / (l3 - a3);
}

// Inverse in closed form via the mu-condition: g^{-1}(lambda) = P g(-lambda)^t P.
inline Mat3c evaluate_inverse(const SimpleElement& e, cdouble lambda) {
    const auto& sc = structure();
    return sc.P * evaluate(e, -lambda).transpose() * sc.P;
}

// det g = [(lambda^3 + alpha^3)/(lambda^3 - alpha^3)]^rank.
inline cdouble det_at(const SimpleElement& e, cdouble lambda) {
    const cdouble l3 = lambda * lambda * lambda;
    const cdouble a3 = e.alpha * e.alpha * e.alpha;
    if (detail::near_cubed(l3, a3))
        throw AtPole("determinant evaluated at a pole");
    const cdouble ratio = (l3 + a3) / (l3 - a3);
    return e.kind == Kind::Rank1 ? ratio : ratio * ratio;
}

// Ordered product of simple elements; factors[0] is the leftmost matrix.
struct LoopProduct {
    std::vector<SimpleElement> factors;
    bool breather = false;
};

inline Mat3c evaluate(const LoopProduct& p, cdouble lambda) {
    Mat3c g = Mat3c::Identity();
    for (const auto& f : p.factors) g = g * evaluate(f, lambda);
    return g;
}

inline Mat3c evaluate_inverse(const LoopProduct& p, cdouble lambda) {
    const auto& sc = structure();
    return sc.P * evaluate(p, -lambda).transpose() * sc.P;
}

inline cdouble det_at(const LoopProduct& p, cdouble lambda) {
    cdouble d = 1.0;
    for (const auto& f : p.factors) d *= det_at(f, lambda);
    return d;
}

// Transport a row line by the inverse of the other element at this pole.
inline ProjLine transported_line(const ProjLine& l, const SimpleElement& other,
                                 cdouble at) {
    const RowVec3c row = l.rep.transpose() * evaluate_inverse(other, at);
    return ProjLine(Vec3c(row(0), row(1), row(2)));
}

struct PermutedPair {
    SimpleElement tilde1; // pole alpha1, line l1 * g2(alpha1)^{-1}
    SimpleElement tilde2; // pole alpha2, line l2 * g1(alpha2)^{-1}
};

// Permutability: returns elements with exchanged pole order satisfying
// g_{a2,l2~} g_{a1,l1} = g_{a1,l1~} g_{a2,l2}.
inline PermutedPair permute_factorize(const SimpleElement& g1,
                                      const SimpleElement& g2) {
    if (g1.kind != Kind::Rank1 || g2.kind != Kind::Rank1)
        throw BadArgument("permutability factorization requires rank-1 elements");
    const cdouble a13 = g1.alpha * g1.alpha * g1.alpha;
    const cdouble a23 = g2.alpha * g2.alpha * g2.alpha;
    if (detail::near_cubed(a13, a23) || detail::near_cubed(a13, -a23))
        throw PoleCollision("pole cubes coincide up to sign");
    const ProjLine lt1 = transported_line(g1.line, g2, g1.alpha);
    const ProjLine lt2 = transported_line(g2.line, g1, g2.alpha);
    return PermutedPair{make_rank1(g1.alpha, lt1), make_rank1(g2.alpha, lt2)};
}

// Breather: product g_{conj(alpha), l*} g_{alpha, l} with
// l* = conj(l) * g_{alpha,l}(conj(alpha))^{-1}; tau-real by construction.
inline LoopProduct make_breather(cdouble alpha, const ProjLine& l) {
    if (alpha == cdouble(0.0)) throw ZeroPole("pole must be nonzero");
    const double arg = std::arg(alpha);
    const double third = M_PI / 3.0, sixth = M_PI / 6.0;
    if (!(arg > 1e-12 && arg < third - 1e-12) || std::abs(arg - sixth) < 1e-12)
        throw BadArgument("breather pole argument must lie in (0,pi/6) or (pi/6,pi/3)");
    const SimpleElement g = make_rank1(alpha, l);
    const ProjLine lstar =
        transported_line(ProjLine(Vec3c(l.rep.conjugate())), g, std::conj(alpha));
    LoopProduct p;
    p.factors = {make_rank1(std::conj(alpha), lstar), g};
    p.breather = true;
    return p;
}

namespace detail {

inline bool claims_tau_reality(const SimpleElement& e) {
    return std::abs(std::imag(e.alpha)) <
               1e-12 * std::max(1.0, std::abs(e.alpha)) &&
           e.line.is_real();
}

inline bool claims_tau_reality(const LoopProduct& p) {
    if (p.breather) return true;
    for (const auto& f : p.factors)
        if (!claims_tau_reality(f)) return false;
    return true;
}

} // namespace detail

// Residuals of the three loop-group symmetries over the sample points:
//   nu:  Q g(lambda) Q^{-1} = g(eps^4 lambda)
//   mu:  P = g(lambda) P g(-lambda)^t
//   tau: conj(g(conj(lambda))) = g(lambda)   (only for tau-real elements)
template <class E>
VerificationReport verify_reality(const E& e, const std::vector<cdouble>& samples,
                                  double tol = 1e-10) {
    const auto& sc = structure();
    const cdouble eps4 = std::pow(epsilon6(), 4);
    double rnu = 0.0, rmu = 0.0, rtau = 0.0;
    for (cdouble lambda : samples) {
        const Mat3c g = evaluate(e, lambda);
        rnu = std::max(rnu, max_abs(Mat3c(sc.Q * g * inverse_checked(sc.Q) -
                                          evaluate(e, eps4 * lambda))));
        rmu = std::max(rmu, max_abs(Mat3c(sc.P - g * sc.P *
                                          evaluate(e, -lambda).transpose())));
        if (detail::claims_tau_reality(e)) {
            rtau = std::max(rtau, max_abs(Mat3c(
                       evaluate(e, std::conj(lambda)).conjugate() - g)));
        }
    }
    VerificationReport rep;
    rep.add("nu-equivariance", rnu, tol);
    rep.add("mu-unitarity", rmu, tol);
    if (detail::claims_tau_reality(e)) rep.add("tau-reality", rtau, tol);
    return rep;
}

} // namespace tzlab

#endif // TZLAB_RATIONAL_ELEMENTS_HPP
