#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "uteich/core.hpp"

using namespace uteich;

namespace {

PowerSeries poly(std::initializer_list<cplx> c) { return {0.0, CVec(c)}; }

// (a f + b) / (c f + d) as a series about f.center.
PowerSeries moebius_after(const MoebiusTransform& T, const PowerSeries& f, int order) {
    PowerSeries num{f.center, CVec(order + 1, 0.0)}, den{f.center, CVec(order + 1, 0.0)};
    for (int j = 0; j <= order; ++j) {
        cplx fj = j < int(f.c.size()) ? f.c[j] : 0.0;
        num.c[j] = T.a * fj;
        den.c[j] = T.c * fj;
    }
    num.c[0] += T.b;
    den.c[0] += T.d;
    return series_mul(num, series_inv(den, order), order);
}

// phi o psi about psi.center, truncated.
PowerSeries compose(const PowerSeries& phi, const PowerSeries& psi, int order) {
    PowerSeries outer = phi.recentred(psi.c[0]);
    PowerSeries inner = psi;
    inner.c[0] = 0.0;
    PowerSeries acc{psi.center, CVec(order + 1, 0.0)}, power{psi.center, {1.0}};
    for (size_t j = 0; j < outer.c.size(); ++j) {
        for (int i = 0; i <= order && i < int(power.c.size()); ++i) acc.c[i] += outer.c[j] * power.c[i];
        power = series_mul(power, inner, order);
    }
    return acc;
}

cplx cross_ratio(cplx a, cplx b, cplx c, cplx d) { return (a - c) * (b - d) / ((a - d) * (b - c)); }

} // namespace

TEST_CASE("schwarzian of the identity and of Moebius maps vanishes") {
    PowerSeries s = schwarzian(poly({0.0, 1.0}), 6);
    for (auto c : s.c) CHECK(std::abs(c) < 1e-15);

    MoebiusTransform T = MoebiusTransform::make({1.0, 0.5}, {0.2, -0.1}, {0.3, 0.1}, {1.0, 0.0});
    PowerSeries id{cplx(0.4, 0.1), {cplx(0.4, 0.1), 1.0}};
    PowerSeries m = moebius_after(T, id, 12);
    PowerSeries sm = schwarzian(m, 8);
    for (auto c : sm.c) CHECK(std::abs(c) < 1e-10);
}

TEST_CASE("schwarzian of z^2 is -3/(2z^2) on |z| = 2") {
    PowerSeries f = poly({0.0, 0.0, 1.0});
    for (int j = 0; j < 8; ++j) {
        cplx z0 = std::polar(2.0, 2 * kPi * j / 8);
        PowerSeries s = schwarzian(f.recentred(z0), 2);
        CHECK(std::abs(s.c[0] - (-1.5 / (z0 * z0))) < 1e-12);
    }
    CHECK_THROWS_AS(schwarzian(f, 2), SingularDerivative);
}

TEST_CASE("schwarzian is invariant under post-composition with Moebius maps") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        PowerSeries f{0.0, {0.0, 1.0, {U(rng), U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}}};
        cplx z0(U(rng) * 0.4, U(rng) * 0.4);
        PowerSeries fc = f.recentred(z0);
        MoebiusTransform T = MoebiusTransform::make({1.0, U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}, {1.0, U(rng)});
        PowerSeries s1 = schwarzian(fc, 4), s2 = schwarzian(moebius_after(T, fc, 10), 4);
        for (int j = 0; j <= 4; ++j) CHECK(std::abs(s1.c[j] - s2.c[j]) < 1e-9);
    }
}

TEST_CASE("schwarzian chain rule on compositions") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    for (int trial = 0; trial < 20; ++trial) {
        PowerSeries phi{0.0, {0.0, 1.0, U(rng), U(rng), U(rng)}};
        PowerSeries psi{0.0, {0.0, 1.0, U(rng), U(rng)}};
        cplx x0(U(rng), 0.0);
        PowerSeries psic = psi.recentred(x0);
        PowerSeries comp = compose(phi, psic, 10);
        cplx lhs = schwarzian(comp, 0).c[0];
        cplx y0 = psic.c[0];
        cplx rhs = schwarzian(phi.recentred(y0), 0).c[0] * psic.c[1] * psic.c[1] + schwarzian(psic, 0).c[0];
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
}

TEST_CASE("circle function evaluation, membership and Parseval") {
    CircleFunction f(3);
    f.set(-2, {0.3, 0.1});
    f.set(1, {0.5, -0.2});
    f.set(3, 0.7);
    double x = 0.37;
    cplx direct = cplx(0.3, 0.1) * std::polar(1.0, -2 * x) + cplx(0.5, -0.2) * std::polar(1.0, x) +
                  0.7 * std::polar(1.0, 3 * x);
    CHECK(std::abs(f.eval(x) - direct) < 1e-15);
    CHECK_FALSE(f.in_hplus());
    CHECK_FALSE(f.in_hminus());
    CHECK(CircleFunction::monomial(-3).in_hminus());
    CHECK(CircleFunction::monomial(0).in_hplus());

    CVec s = f.samples(64);
    double mean = 0;
    for (auto v : s) mean += std::norm(v);
    CHECK(std::abs(std::sqrt(mean / 64) - f.l2_norm()) < 1e-12);

    CircleFunction r = f + f.conj_reflect();
    CHECK(r.is_real());
    auto back = CircleFunction::from_samples(r.samples(16), 3);
    for (int k = -3; k <= 3; ++k) CHECK(std::abs(back.coeff(k) - r.coeff(k)) < 1e-14);
}

TEST_CASE("circle function JSON round trip keeps key order") {
    CircleFunction f(1);
    f.set(-1, {1.0, 2.0});
    f.set(1, {-0.5, 0.0});
    auto j = f.to_json();
    CHECK(j.dump() == R"({"N":1,"coeffs":[[1.0,2.0],[0.0,0.0],[-0.5,0.0]]})");
    auto g = CircleFunction::from_json(nlohmann::json::parse(j.dump()));
    CHECK(g.coeff(-1) == cplx(1.0, 2.0));
}

TEST_CASE("moebius_fixing_triple") {
    const cplx I(0, 1);
    auto M = moebius_fixing_triple(cplx(-1), -I, cplx(1), cplx(-1), -I, cplx(1));
    CHECK(std::abs(M.b) < 1e-12);
    CHECK(std::abs(M.c) < 1e-12);
    CHECK(std::abs(M.a * M.a - 1.0) < 1e-12);
    CHECK(std::abs(M.det() - 1.0) < 1e-12);

    auto inf = SpherePoint::infinity();
    auto M2 = moebius_fixing_triple(cplx(0), cplx(1), inf, cplx(0), cplx(1), inf);
    CHECK(std::abs(M2.b) < 1e-12);
    CHECK(std::abs(M2.c) < 1e-12);
    CHECK(M2.apply(inf).inf);

    auto M3 = moebius_fixing_triple(cplx(-1), -I, cplx(1), -I, cplx(1), cplx(-1));
    CHECK(std::abs(M3(-1.0) + I) < 1e-12);
    CHECK(std::abs(M3(-I) - 1.0) < 1e-12);
    CHECK(std::abs(M3(1.0) + 1.0) < 1e-12);
    CHECK(std::abs(M3.det() - 1.0) < 1e-12);
    // Not the rotation z -> iz, which sends 1 to i.
    CHECK(std::abs(M3(1.0) - I) > 0.5);
    cplx z4(0.3, 0.2);
    CHECK(std::abs(cross_ratio(-1.0, -I, 1.0, z4) - cross_ratio(M3(-1.0), M3(-I), M3(1.0), M3(z4))) < 1e-12);

    CHECK_THROWS_AS(moebius_fixing_triple(cplx(1), cplx(1), cplx(2), cplx(0), cplx(1), cplx(2)), DegenerateTriple);
}

TEST_CASE("moebius composition is the matrix product") {
    auto A = MoebiusTransform::make(2.0, 1.0, 1.0, 1.0);
    auto B = MoebiusTransform::make({1, 1}, 0.0, 0.5, 1.0);
    cplx z(0.2, -0.7);
    CHECK(std::abs(A.compose(B)(z) - A(B(z))) < 1e-14);
    CHECK(std::abs(A.inverse()(A(z)) - z) < 1e-14);
}

TEST_CASE("wp_norm examples") {
    CHECK(std::abs(wp_norm_monomial({0.0, 0.0, 1.0}) - std::sqrt(6.0)) < 1e-14);
    CHECK(std::abs(wp_norm(TangentVector::basis(2, 8)) - 1.0) < 1e-14);
    TangentVector v(8);
    v.set(2, 1.0);
    v.set(3, 1.0);
    CHECK(std::abs(wp_norm(v) - std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("identify_tangent_cotangent examples and inverse") {
    auto q2 = identify_tangent_cotangent(TangentVector::basis(2, 6));
    CHECK(std::abs(q2.b.coeff(0) - 2 * std::sqrt(3.0)) < 1e-14);
    auto q3 = identify_tangent_cotangent(TangentVector::basis(3, 6));
    CHECK(std::abs(q3.b.coeff(1) - std::sqrt(48.0)) < 1e-13);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> G;
    TangentVector v(16);
    for (int k = 2; k <= 16; ++k) v.set(k, {G(rng), G(rng)});
    auto back = identify_cotangent_tangent(identify_tangent_cotangent(v), 16);
    for (int k = 2; k <= 16; ++k) CHECK(std::abs(back.get(k) - v.get(k)) < 1e-12);

    QuadraticDifferential bad;
    bad.b = CircleFunction::monomial(-1);
    CHECK_THROWS_AS(identify_cotangent_tangent(bad, 8), InverseUndefined);

    // dx^2 form round trip.
    auto qx = identify_tangent_cotangent(v).to_dx2();
    auto back2 = identify_cotangent_tangent(qx, 16);
    for (int k = 2; k <= 16; ++k) CHECK(std::abs(back2.get(k) - v.get(k)) < 1e-12);
}

TEST_CASE("wp_inner_quadratic against direct 2-D quadrature") {
    // int_0^1 (1-r^2)^2 r^{2n+1} dr = 1/((n+1)(n+2)(n+3)); n = 1 gives 1/24.
    CHECK(std::abs(wp_inner_quadratic(poly({0.0, 1.0}), poly({0.0, 1.0})) - 1.0 / 24) < 1e-15);
    CHECK(std::abs(wp_inner_quadratic(poly({1.0}), poly({1.0})) - 1.0 / 6) < 1e-15);
    CHECK(std::abs(wp_inner_quadratic(poly({0.0, 1.0}), poly({0.0, 0.0, 1.0}))) < 1e-15);

    // (1/2pi) int (1-r^2)^2 f1 conj(f2) dA with a polar midpoint/trapezoid grid.
    PowerSeries f1{0.0, {0.3, {0.1, 0.2}, -0.4}}, f2{0.0, {{0.0, 1.0}, 0.5, 0.25}};
    const int nr = 4000, nt = 64;
    cplx acc(0);
    for (int i = 0; i < nr; ++i) {
        double r = (i + 0.5) / nr;
        for (int j = 0; j < nt; ++j) {
            cplx z = std::polar(r, 2 * kPi * j / nt);
            acc += (1 - r * r) * (1 - r * r) * f1.eval(z) * std::conj(f2.eval(z)) * r;
        }
    }
    acc *= (1.0 / nr) * (2 * kPi / nt) / (2 * kPi);
    CHECK(std::abs(acc - wp_inner_quadratic(f1, f2)) < 1e-7);
}

TEST_CASE("WP pairing constant calibrated on e_2 is the same for every k") {
    for (int k = 2; k <= 16; ++k) {
        TangentVector e = TangentVector::basis(k, 16);
        auto q = identify_tangent_cotangent(e);
        PowerSeries s{0.0, {}};
        for (int j = 0; j <= q.b.N(); ++j) s.c.push_back(q.b.coeff(j));
        double ratio = wp_inner_quadratic(s, s).real() / std::pow(wp_norm(e), 2);
        CHECK(std::abs(ratio - kWpPairingConstant) < 1e-12);
    }
}

TEST_CASE("radial integral identities") {
    for (int n = 1; n <= 12; ++n) {
        CHECK(std::abs(radial_moment_2(n) - radial_closed_2(n)) < 1e-14);
        CHECK(std::abs(radial_moment_3(n) - radial_closed_3(n)) < 1e-14);
    }
    CHECK(std::abs(radial_closed_3(1) - 1.0 / 8) < 1e-16);
    CHECK(std::abs(radial_closed_2(1) - 1.0 / 24) < 1e-16);
}

TEST_CASE("quasisymmetry constant") {
    CHECK(quasisymmetry_constant([](double x) { return x; }) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quasisymmetry_constant([](double x) { return 2 * x; }) == doctest::Approx(1.0).epsilon(1e-12));
    auto h = [](double x) { return x + 0.1 * std::sin(x); };
    double k = quasisymmetry_constant(h);
    CHECK(k > 1.0);
    CHECK(k < 1.5);
    // Brute-force oracle on a denser grid.
    double dense = 1.0;
    for (int i = 0; i < 2048; ++i) {
        double x = 2 * kPi * i / 2048;
        for (int j = 0; j < 512; ++j) {
            double t = 1e-3 * std::pow(kPi / 1e-3, j / 511.0);
            double r = (h(x + t) - h(x)) / (h(x) - h(x - t));
            dense = std::max({dense, r, 1 / r});
        }
    }
    CHECK(k <= dense + 1e-12);
    CHECK(dense - k < 1e-2);
    CHECK_THROWS_AS(quasisymmetry_constant([](double x) { return x + 2 * std::sin(x); }), NonMonotone);
}
