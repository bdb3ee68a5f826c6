#ifndef TZLAB_LOOPALGEBRA_HPP
#define TZLAB_LOOPALGEBRA_HPP

#include <cmath>
#include <complex>

#include "tzlab/matrix.hpp"

namespace tzlab {

// Sixth root of unity driving the order-6 twist.
inline cdouble epsilon6() {
    return std::exp(cdouble(0.0, M_PI / 3.0));
}

// Structure constants of the twisted loop group.
struct StructureConstants {
    cdouble eps;  // e^{i pi/3}
    Mat3c T;      // twist conjugator, T = eps^2 * Q * P
    Mat3c P;      // index-swap permutation (1 <-> 2)
    Mat3c Q;      // diag(eps^4, eps^2, 1)
    Mat3c N;      // cyclic permutation, N^3 = I

    StructureConstants() {
        eps = epsilon6();
        T.setZero();
        T(0, 1) = 1.0;
        T(1, 0) = -eps;
        T(2, 2) = eps * eps;
        P.setZero();
        P(0, 1) = 1.0;
        P(1, 0) = 1.0;
        P(2, 2) = 1.0;
        Q.setZero();
        Q(0, 0) = std::pow(eps, 4);
        Q(1, 1) = eps * eps;
        Q(2, 2) = 1.0;
        N.setZero();
        N(0, 2) = 1.0;
        N(1, 0) = 1.0;
        N(2, 1) = 1.0;
    }
};

inline const StructureConstants& structure() {
    static const StructureConstants sc;
    return sc;
}

// Entrywise complex conjugation.
inline Mat3c tau(const Mat3c& m) { return m.conjugate(); }

// Order-6 group automorphism  g -> T (g^t)^{-1} T^{-1}.
inline Mat3c sigma_group(const Mat3c& m) {
    const auto& sc = structure();
    return sc.T * inverse_checked(m.transpose()) * inverse_checked(sc.T);
}

// Linearization at the identity:  A -> -T A^t T^{-1}.
inline Mat3c sigma_algebra(const Mat3c& a) {
    const auto& sc = structure();
    return -sc.T * a.transpose() * inverse_checked(sc.T);
}

// Order-3 inner piece  g -> Q g Q^{-1}.
inline Mat3c nu(const Mat3c& m) {
    const auto& sc = structure();
    return sc.Q * m * inverse_checked(sc.Q);
}

// Order-2 outer piece  g -> P (g^t)^{-1} P;  sigma_group = nu o mu.
inline Mat3c mu(const Mat3c& m) {
    const auto& sc = structure();
    return sc.P * inverse_checked(m.transpose()) * sc.P;
}

// Component of a trace-free matrix in the eps^j eigenspace of sigma_algebra:
// M_j = (1/6) sum_k eps^{-jk} sigma^k(M).
inline Mat3c eigenspace_project(const Mat3c& m, int j) {
    if (j < 0 || j > 5) throw BadArgument("eigenspace index must be 0..5");
    const double scale = std::max(1.0, max_abs(m));
    if (std::abs(m.trace()) > 1e-9 * scale)
        throw NonTraceFree("eigenspace projection requires a trace-free matrix");
    const cdouble eps = epsilon6();
    Mat3c acc = Mat3c::Zero();
    Mat3c cur = m;
    for (int k = 0; k < 6; ++k) {
        acc += std::pow(eps, -j * k) * cur;
        cur = sigma_algebra(cur);
    }
    return acc / 6.0;
}

// Projective line spanned by (a, b, c); normalized to third component 1
// whenever that component is nonzero.
struct ProjLine {
    Vec3c rep;

    ProjLine() : rep(Vec3c::Zero()) {}
    explicit ProjLine(const Vec3c& r) : rep(r) {
        if (max_abs(rep) == 0.0) throw BadArgument("zero vector is not a line");
        normalize();
    }
    ProjLine(cdouble a, cdouble b, cdouble c) : ProjLine(Vec3c(a, b, c)) {}

    void normalize() {
        const double scale = max_abs(rep);
        if (std::abs(rep(2)) > 1e-14 * scale) rep /= rep(2);
    }
    cdouble a() const { return rep(0); }
    cdouble b() const { return rep(1); }
    cdouble c() const { return rep(2); }
    bool affine() const { return std::abs(rep(2) - cdouble(1.0)) < 1e-12; }
    bool is_real(double tol = 1e-12) const {
        return rep.imag().cwiseAbs().maxCoeff() < tol;
    }
    // Equality as lines: representatives proportional within tolerance.
    bool same_line(const ProjLine& o, double tol = 1e-10) const {
        const Vec3c x = rep / rep.cwiseAbs().maxCoeff();
        const Vec3c y = o.rep / o.rep.cwiseAbs().maxCoeff();
        // cross-ratio test: x x y = 0 componentwise
        const Vec3c cr(x(1) * y(2) - x(2) * y(1), x(2) * y(0) - x(0) * y(2),
                       x(0) * y(1) - x(1) * y(0));
        return max_abs(cr) < tol;
    }
};

// Degeneracy cone: 2 z1 z2 = z3^2 or z3 = 0, scale-invariant test.
inline bool cone_contains(const Vec3c& z, double tol = 1e-10) {
    const double n = std::sqrt(std::norm(z(0)) + std::norm(z(1)) + std::norm(z(2)));
    if (n == 0.0) return true;
    if (std::abs(z(2)) <= tol * n) return true;
    return std::abs(2.0 * z(0) * z(1) - z(2) * z(2)) <= tol * n * n;
}

inline bool cone_contains(const ProjLine& l, double tol = 1e-10) {
    return cone_contains(l.rep, tol);
}

} // namespace tzlab

#endif // TZLAB_LOOPALGEBRA_HPP
