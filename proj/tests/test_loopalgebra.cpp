#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "tzlab/errors.hpp"
#include "tzlab/loopalgebra.hpp"
#include "tzlab/matrix.hpp"

using namespace tzlab;

namespace {

Mat3c random_complex_matrix(unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Mat3c m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = cdouble(dist(gen), dist(gen));
    return m;
}

Mat3c random_traceless(unsigned seed) {
    Mat3c m = random_complex_matrix(seed);
    const cdouble third = m.trace() / 3.0;
    for (int i = 0; i < 3; ++i) m(i, i) -= third;
    return m;
}

double diff(const Mat3c& a, const Mat3c& b) { return max_abs(Mat3c(a - b)); }

} // namespace

TEST_CASE("sixth root of unity") {
    const cdouble eps = epsilon6();
    CHECK(std::abs(eps - cdouble(0.5, std::sqrt(3.0) / 2.0)) < 1e-15);
    CHECK(std::abs(std::pow(eps, 6) - 1.0) < 1e-14);
    CHECK(std::abs(std::pow(eps, 3) + 1.0) < 1e-14);
    CHECK(std::abs(eps * eps - cdouble(-0.5, std::sqrt(3.0) / 2.0)) < 1e-15);
}

TEST_CASE("structure constants have the frozen entries") {
    const auto& sc = structure();
    const cdouble eps = epsilon6();

    Mat3c T;
    T << 0, 1, 0, -eps, 0, 0, 0, 0, eps * eps;
    CHECK(diff(sc.T, T) < 1e-15);

    Mat3c P;
    P << 0, 1, 0, 1, 0, 0, 0, 0, 1;
    CHECK(diff(sc.P, P) < 1e-15);

    Mat3c Q;
    Q << std::pow(eps, 4), 0, 0, 0, eps * eps, 0, 0, 0, 1;
    CHECK(diff(sc.Q, Q) < 1e-15);

    Mat3c N;
    N << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    CHECK(diff(sc.N, N) < 1e-15);

    // T factors through the inner and outer pieces.
    CHECK(diff(sc.T, Mat3c(eps * eps * sc.Q * sc.P)) < 1e-15);
}

TEST_CASE("cyclic matrix identities") {
    const auto& sc = structure();
    CHECK(diff(Mat3c(sc.N * sc.N * sc.N), Mat3c::Identity()) < 1e-15);
    CHECK(diff(Mat3c(sc.N.transpose()), Mat3c(sc.N * sc.N)) < 1e-15);
    CHECK(diff(Mat3c(sc.P * sc.N * sc.P), Mat3c(sc.N * sc.N)) < 1e-15);
    // Q cubes to the identity, so Q^2 is its inverse.
    CHECK(diff(Mat3c(sc.Q * sc.Q * sc.Q), Mat3c::Identity()) < 1e-14);
}

TEST_CASE("group automorphism has order 6 and splits as inner times outer") {
    const Mat3c g = Mat3c::Identity() + 0.2 * random_complex_matrix(7);
    Mat3c cur = g;
    for (int k = 0; k < 6; ++k) cur = sigma_group(cur);
    CHECK(diff(cur, g) < 1e-12);

    CHECK(diff(sigma_group(g), nu(mu(g))) < 1e-13);

    // mu is an involution, nu has order 3.
    CHECK(diff(mu(mu(g)), g) < 1e-13);
    CHECK(diff(nu(nu(nu(g))), g) < 1e-13);
}

TEST_CASE("algebra automorphism has order 6 and fixes the brackets") {
    const Mat3c a = random_traceless(11);
    const Mat3c b = random_traceless(12);
    Mat3c cur = a;
    for (int k = 0; k < 6; ++k) cur = sigma_algebra(cur);
    CHECK(diff(cur, a) < 1e-13);

    // automorphism property: sigma[a,b] = [sigma a, sigma b]
    const Mat3c lhs = sigma_algebra(Mat3c(a * b - b * a));
    const Mat3c sa = sigma_algebra(a), sb = sigma_algebra(b);
    CHECK(diff(lhs, Mat3c(sa * sb - sb * sa)) < 1e-13);
}

TEST_CASE("entrywise conjugation") {
    const Mat3c a = random_complex_matrix(3);
    CHECK(diff(tau(a), a.conjugate()) == 0.0);
    CHECK(diff(tau(tau(a)), a) == 0.0);
}

TEST_CASE("eigenspace projections decompose a traceless matrix") {
    const cdouble eps = epsilon6();
    const Mat3c m = random_traceless(21);
    Mat3c sum = Mat3c::Zero();
    for (int j = 0; j < 6; ++j) {
        const Mat3c mj = eigenspace_project(m, j);
        sum += mj;
        CHECK(diff(sigma_algebra(mj), Mat3c(std::pow(eps, j) * mj)) < 1e-13);
    }
    CHECK(diff(sum, m) < 1e-13);
}

TEST_CASE("eigenspace projection rejects bad input") {
    const Mat3c m = random_traceless(22);
    CHECK_THROWS_AS(eigenspace_project(m, -1), BadArgument);
    CHECK_THROWS_AS(eigenspace_project(m, 6), BadArgument);
    CHECK_THROWS_AS(eigenspace_project(Mat3c(Mat3c::Identity()), 0), NonTraceFree);
}

TEST_CASE("cyclic generator sits in the expected eigenspaces") {
    const auto& sc = structure();
    const Mat3c N2 = sc.N * sc.N;
    Mat3c H = Mat3c::Zero();
    H(0, 0) = 1.0;
    H(1, 1) = -1.0;

    // N carries spectral degree +1, N^2 degree -1, the diagonal part degree 0.
    CHECK(diff(eigenspace_project(sc.N, 1), sc.N) < 1e-14);
    CHECK(max_abs(eigenspace_project(sc.N, 5)) < 1e-14);
    CHECK(diff(eigenspace_project(N2, 5), N2) < 1e-14);
    CHECK(max_abs(eigenspace_project(N2, 1)) < 1e-14);
    CHECK(diff(eigenspace_project(H, 0), H) < 1e-14);
}

TEST_CASE("projective lines normalize to affine representatives") {
    const ProjLine l(cdouble(2.0), cdouble(4.0), cdouble(2.0));
    CHECK(std::abs(l.a() - 1.0) < 1e-15);
    CHECK(std::abs(l.b() - 2.0) < 1e-15);
    CHECK(std::abs(l.c() - 1.0) < 1e-15);
    CHECK(l.affine());
    CHECK(l.is_real());

    const ProjLine at_infinity(cdouble(1.0), cdouble(2.0), cdouble(0.0));
    CHECK(!at_infinity.affine());

    CHECK_THROWS_AS(ProjLine(Vec3c(Vec3c::Zero())), BadArgument);
}

TEST_CASE("line equality ignores complex rescaling") {
    const ProjLine l1(cdouble(1.0), cdouble(2.0), cdouble(0.0));
    const ProjLine l2(cdouble(0.0, 2.0), cdouble(0.0, 4.0), cdouble(0.0));
    CHECK(l1.same_line(l2));
    CHECK(l2.same_line(l1));
    CHECK(l1.is_real());
    CHECK(!l2.is_real());

    const ProjLine l3(cdouble(1.0), cdouble(2.0), cdouble(1.0));
    CHECK(!l1.same_line(l3));

    // affine normalization already identifies proportional affine lines
    const ProjLine l4(cdouble(0.3, 0.6), cdouble(-0.8, -1.6), cdouble(1.0, 2.0));
    const ProjLine l5(cdouble(0.3), cdouble(-0.8), cdouble(1.0));
    CHECK(l4.same_line(l5));
    CHECK(l4.is_real());
}

TEST_CASE("degeneracy cone membership") {
    // 2ab = c^2
    CHECK(cone_contains(ProjLine(cdouble(1.0), cdouble(0.5), cdouble(1.0))));
    // c = 0
    CHECK(cone_contains(ProjLine(cdouble(1.0), cdouble(0.0), cdouble(0.0))));
    CHECK(cone_contains(Vec3c(0.0, 0.0, 0.0)));
    // generic lines are off the cone
    CHECK(!cone_contains(ProjLine(cdouble(1.0), cdouble(1.0), cdouble(1.0))));
    CHECK(!cone_contains(ProjLine(cdouble(0.6), cdouble(1.7), cdouble(1.0))));
    // scale invariance of the test
    CHECK(cone_contains(Vec3c(1e6, 0.5e6, 1e6)));
    CHECK(!cone_contains(Vec3c(1e6, 1e6, 1e6)));
}
