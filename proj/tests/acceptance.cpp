// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "uteich/kdv.hpp"
#include "uteich/parallel.hpp"

using namespace uteich;

namespace {

const cplx I1(0, 1);

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

MonomialField mono(int m, int n, int D = 12) {
    MonomialField h(D);
    h.add(m, n, 1.0);
    return h;
}

BeltramiCoefficient single_mode(double eps, int D = 48) {
    TangentVector t(2);
    t.set(2, eps);
    return BeltramiCoefficient::from_tangent(t, D);
}

GrTangent diag(int N, std::initializer_list<double> s) {
    GrTangent g{CMat::Zero(N, N), std::nullopt};
    int k = 0;
    for (double v : s) g.psi(k, k) = v, ++k;
    return g;
}

GrTangent entry(int N, int r, int c) {
    GrTangent g{CMat::Zero(N, N), std::nullopt};
    g.psi(r, c) = 1.0;
    return g;
}

CircleFunction cosine(int k, double a) {
    CircleFunction f(k);
    f.set(k, a / 2);
    f.set(-k, a / 2);
    return f;
}

KdVState sampled(const CircleFunction& u, int M, KdVConvention c) {
    KdVState s;
    s.convention = c;
    s.u.resize(M);
    for (int j = 0; j < M; ++j) s.u[j] = u.eval(2 * kPi * j / M).real();
    return s;
}

Outcome transform_oracle() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<cplx> pts;
    for (int i = 0; i < 10; ++i) {
        pts.push_back(std::polar(0.05 + 0.85 * U(rng), 2 * kPi * U(rng)));
        pts.push_back(std::polar(1.1 + 2.0 * U(rng), 2 * kPi * U(rng)));
    }
    std::vector<std::pair<int, int>> mn;
    for (int m = 0; m <= 6; ++m)
        for (int n = 0; m + n <= 6; ++n) mn.push_back({m, n});
    std::vector<double> err(mn.size());
    parallel_for(static_cast<int>(mn.size()), [&](int i) {
        auto h = mono(mn[i].first, mn[i].second);
        auto P = cauchy_transform_P(h);
        auto T = beurling_transform_T(h);
        for (cplx z : pts) {
            err[i] = std::max(err[i], std::abs(P.eval(z) - quadrature_oracle_P(h, z)));
            err[i] = std::max(err[i], std::abs(T.eval(z) - quadrature_oracle_T(h, z)));
        }
    });
    double e = *std::max_element(err.begin(), err.end());
    return {e < 1e-6, fmt("%zu monomials x 20 points, max |closed - quadrature| = %.2e", mn.size(), e)};
}

Outcome t_isometry() {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> G;
    std::uniform_int_distribution<int> deg(0, 10);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        MonomialField h(12);
        int d = deg(rng);
        for (int m = 0; m <= d; ++m)
            for (int n = 0; m + n <= d; ++n) h.add(m, n, {G(rng), G(rng)});
        worst = std::max(worst, std::abs(l2_norm_plane(beurling_transform_T(h)) - l2_norm_disc(h)));
    }
    return {worst < 1e-10, fmt("50 fields, max | ||Th|| - ||h|| | = %.2e", worst)};
}

Outcome radial_identities() {
    // the two closed forms exactly as stated
    double e2 = 0, e3 = 0;
    for (int n = 1; n <= 12; ++n) {
        e2 = std::max(e2, std::abs(radial_moment_2(n) - 1.0 / (2.0 * (n + 1) * (n + 2) * (n + 3))));
        e3 = std::max(e3, std::abs(radial_moment_3(n) - 3.0 / (double(n) * (n + 1) * (n + 2) * (n + 3))));
    }
    return {e2 < 1e-14 && e3 < 1e-14,
            fmt("(1-r^2)^2 identity max err %.2e (computed 1/24 vs stated 1/48 at n=1); (1-r^2)^3 identity max err %.2e", e2, e3)};
}

Outcome hs_decay() {
    GraphOptions go;
    go.cap = 240;
    const int N = 17;  // columns n = 1..16, rows j = 1..17
    auto W = graph_from_mu(single_mode(0.1), N, go);
    // C fitted on n, j <= 8, then checked on all n, j <= 16
    double C = 0;
    for (int n = 1; n <= 8; ++n)
        for (int j = 1; j <= 8; ++j) C = std::max(C, std::abs(W.W(j - 1, n)) * n * j);
    double worst = 0;
    for (int n = 1; n <= 16; ++n)
        for (int j = 1; j <= 16; ++j) worst = std::max(worst, std::abs(W.W(j - 1, n)) * n * j / C);
    auto hs = hs_norm(W);
    return {worst <= 1 + 1e-9 && hs.tailRatio < 0.1,
            fmt("C = %.4e, max |W| nj / C = %.3f, sum |v^(n)|^2 = %.3e, tail ratio %.2e", C, worst,
                hs.frobenius * hs.frobenius, hs.tailRatio)};
}

Outcome hminus_membership() {
    auto mu = single_mode(0.1, 240);
    double worst = 0;
    for (int n = 1; n <= 16; ++n) {
        auto v = boundary_v_n(mu, n);
        for (int k = 0; k <= v.N(); ++k) worst = std::max(worst, std::abs(v.coeff(k)));
    }
    return {worst < 1e-10, fmt("n = 1..16, max |a_k| for k >= 0: %.2e", worst)};
}

Outcome curvature_bound() {
    double mx = -1e300;
    for (int N : {8, 16, 32})
        for (double k : curvature_sweep(N, 200, 100 + N)) mx = std::max(mx, k);
    double r1 = sectional_curvature(entry(8, 2, 5)) + 2.0;
    double ep = sectional_curvature(diag(8, {1, 1})) + 1.75;
    return {mx < -1.5 && std::abs(r1) < 1e-12 && std::abs(ep) < 1e-12,
            fmt("max K over 600 directions %.6f, rank-1 err %.1e, equal-pair err %.1e", mx, std::abs(r1), std::abs(ep))};
}

Outcome cartan_consistency() {
    const int N = 3;
    std::vector<std::vector<GrTangent>> bases = {
        {entry(N, 0, 0), entry(N, 1, 1)},
        {diag(N, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), entry(N, 2, 0)},
    };
    double worst = 0, rank1 = 0;
    for (const auto& b : bases)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) {
                        double e = std::abs(cartan_second_order(i, j, k, l, b) + curvature_component(i, j, k, l, b));
                        worst = std::max(worst, e);
                        if (&b == &bases[0] && i == j && j == k && k == l) rank1 = std::max(rank1, e);
                    }
    return {worst < 1e-3, fmt("max |r_ijkl + R_ijkl| = %.3e over rank<=2 bases (rank-1 diagonal: %.1e)", worst, rank1)};
}

Outcome unit_speed() {
    double dev = 0, block = 0;
    for (const auto& psi : {entry(6, 1, 3), diag(6, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), diag(6, {0.8, 0.6})})
        for (double r : {0.0, 0.5, 1.0, 1.5, 2.0})
            for (double a : {0.0, 2.1, 4.4}) {
                cplx s = std::polar(r, a);
                for (double th : {0.0, 1.1, 2.7}) dev = std::max(dev, std::abs(tangent_norm_along(psi, s, th) - 1.0));
                auto b = block_As(psi, s);
                block = std::max({block, b.inverseError, b.intertwining1, b.intertwining2});
            }
    return {dev <= 1e-6 && block < 1e-12, fmt("max | ||gamma'|| - 1 | = %.2e for |s| <= 2, block identities %.2e", dev, block)};
}

Outcome welding_roundtrip() {
    auto mu = single_mode(1e-2);
    auto rec = welding_map(mu);
    MuFromPhiOptions o;
    o.nr = o.nt = 256;
    auto back = mu_from_phi(rec.sigma, o);
    double err = sup_norm_disc(back.mu.field.with_cap(64) - mu.field.with_cap(64));
    return {err < 1e-3 && rec.tripleError < 1e-8, fmt("sup |mu - mu'| = %.2e, triple error %.2e", err, rec.tripleError)};
}

Outcome ahlfors_weill() {
    CircleFunction phi(4);
    phi.set(-4, 0.1);
    auto a = ahlfors_weill_map(phi);
    return {a.schwarzianError < 1e-6, fmt("max |S[F] - phi| over 100 samples = %.2e", a.schwarzianError)};
}

Outcome reference_kdv() {
    auto u0 = cosine(1, 0.1);
    for (int k = 2; k <= 3; ++k) {
        auto c = cosine(k, 0.05 / k);
        CircleFunction s(3);
        for (int m = -3; m <= 3; ++m) s.set(m, u0.coeff(m) + c.coeff(m));
        u0 = s;
    }
    auto tr = kdv_reference_solve(sampled(u0, 256, KdVConvention::kdv6uux), 1.0, 1e-3);

    // linear regime: u_t = u_xxx gives e^{ikx} e^{-ik^3 t}
    const int M = 64;
    const double t = 0.04, amp = 1e-10;
    CircleFunction lin(4);
    for (int k = 1; k <= 4; ++k) lin.set(k, amp), lin.set(-k, amp);
    auto lt = kdv_reference_solve(sampled(lin, M, KdVConvention::kdv6uux), t, 1e-4);
    CVec s0(lt.frames.front().u.begin(), lt.frames.front().u.end()), s1(lt.frames.back().u.begin(), lt.frames.back().u.end());
    CVec f0 = fft(s0), f1 = fft(s1);
    double phase = 0;
    for (int k = 1; k <= 4; ++k) {
        double w = -std::arg(f1[k] / f0[k]) / t;
        phase = std::max(phase, std::abs(w - k * k * k) / (k * k * k));
    }
    return {tr.massDrift < 1e-12 && tr.energyDrift < 1e-8 && phase < 1e-8,
            fmt("mass drift %.2e, energy drift %.2e (t = 1, M = 256), phase rel err %.2e", tr.massDrift, tr.energyDrift, phase)};
}

Outcome pipeline() {
    const double eps = 1e-2, tEnd = 0.05, h0 = 4e-3;
    auto u0 = cosine(2, eps);
    GeodesicKdVOptions o;
    o.K = 4;
    o.weldN = 256;
    std::vector<double> maxRes;
    GeodesicKdVResult last;
    for (double h : {h0, h0 / 2, h0 / 4}) {
        last = geodesic_to_kdv(u0, tEnd, h, o);
        maxRes.push_back(*std::max_element(last.residual.begin(), last.residual.end()));
    }
    double r1 = maxRes[0] / maxRes[1], r2 = maxRes[1] / maxRes[2];
    bool a = r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5;

    const int M = 256;
    double gap = 0;
    for (size_t i = 0; i < last.times.size(); ++i) {
        double t = last.times[i];
        KdVState s = sampled(u0, M, KdVConvention::kdv6uux);
        KdVState ref = t > 0 ? kdv_reference_solve(s, t / 2, 1e-4).frames.back() : s;
        double d = 0, n = 0;
        for (int j = 0; j < M; ++j) {
            double q = last.q[i].eval(2 * kPi * j / M).real();
            d += (q - ref.u[j]) * (q - ref.u[j]);
            n += ref.u[j] * ref.u[j];
        }
        gap = std::max(gap, std::sqrt(d / n));
    }
    bool b = gap <= 1e-2;
    return {a && b, fmt("(a) residual %.3e %.3e %.3e, ratios %.3f %.3f [%s]; (b) max relative gap %.3e [%s]", maxRes[0],
                        maxRes[1], maxRes[2], r1, r2, a ? "pass" : "FAIL", gap, b ? "pass" : "FAIL")};
}

Outcome equivariance() {
    auto mu = BeltramiCoefficient::from_g({cplx(0.01 / std::sqrt(6.0))}, 64);
    auto rec = welding_map(mu);
    auto phi = DiffeoOfCircle::from_lift([](double x) { return x + 0.01 * std::sin(2 * x); }, 512);
    GraphOptions go;
    go.cap = 160;
    const int N = 12;
    auto lhs = graph_from_mu(mu_from_phi(rec.sigma.compose(phi).normalized()).mu, N, go);
    auto rhs = right_translate(graph_from_mu(mu, 2 * N, go), phi, N);
    double d = (lhs.W - rhs.W).norm();
    double control = (lhs.W - graph_from_mu(mu, N, go).W).norm();
    return {d < 1e-3, fmt("||graph(sigma o phi) - R_phi graph(sigma)||_F = %.2e (untranslated: %.2e)", d, control)};
}

Outcome cocycles() {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> G;
    auto laurent = [&] {
        CircleFunction f(4);
        for (int k = -4; k <= 4; ++k) f.set(k, cplx(G(rng), G(rng)));
        return f;
    };
    double anti = 0, jac = 0, coc = 0, bott = 0;
    for (int trial = 0; trial < 10; ++trial) {
        VirasoroElement a{G(rng), laurent()}, b{G(rng), laurent()}, c{G(rng), laurent()};
        auto ab = virasoro_bracket(a, b), ba = virasoro_bracket(b, a);
        anti = std::max(anti, std::abs(ab.central + ba.central));
        for (int k = -ab.field.N(); k <= ab.field.N(); ++k) anti = std::max(anti, std::abs(ab.field.coeff(k) + ba.field.coeff(k)));
        auto j1 = virasoro_bracket(a, virasoro_bracket(b, c)), j2 = virasoro_bracket(b, virasoro_bracket(c, a)),
             j3 = virasoro_bracket(c, virasoro_bracket(a, b));
        int n = std::max({j1.field.N(), j2.field.N(), j3.field.N()});
        for (int k = -n; k <= n; ++k) jac = std::max(jac, std::abs(j1.field.coeff(k) + j2.field.coeff(k) + j3.field.coeff(k)));
        coc = std::max(coc, std::abs(j1.central + j2.central + j3.central));
    }
    std::uniform_real_distribution<double> U(-1, 1);
    auto diffeo = [&] {
        double a = 0.15 * U(rng), b = 0.1 * U(rng), c = 0.05 * U(rng), p = 3 * U(rng);
        return DiffeoOfCircle::from_lift([=](double x) { return x + a * std::sin(x + p) + b * std::cos(2 * x) + c * std::sin(3 * x); }, 256);
    };
    for (int trial = 0; trial < 10; ++trial) {
        auto f = diffeo(), g = diffeo(), h = diffeo();
        double l = bott_cocycle(f.compose(g), h) + bott_cocycle(f, g);
        double r = bott_cocycle(f, g.compose(h)) + bott_cocycle(g, h);
        bott = std::max(bott, std::abs(l - r));
    }
    double worst = std::max({anti, jac, coc, bott});
    return {worst < 1e-8, fmt("antisymmetry %.1e, Jacobi %.1e, c0 cocycle %.1e, Bott group law %.1e", anti, jac, coc, bott)};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds, 0 = none
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all = {
        {1, "transform oracle equivalence", 60, transform_oracle},
        {2, "T isometry", 0, t_isometry},
        {3, "radial identities", 0, radial_identities},
        {4, "Hilbert-Schmidt decay", 120, hs_decay},
        {5, "H_- membership", 0, hminus_membership},
        {6, "curvature bound", 60, curvature_bound},
        {7, "Cartan consistency", 0, cartan_consistency},
        {8, "unit-speed geodesics", 0, unit_speed},
        {9, "welding round trip", 300, welding_roundtrip},
        {10, "Ahlfors-Weill", 0, ahlfors_weill},
        {11, "reference KdV", 60, reference_kdv},
        {12, "pipeline cross-validation", 900, pipeline},
        {13, "equivariance", 0, equivariance},
        {14, "cocycle suite", 0, cocycles},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool inTime = c.budget == 0 || secs < c.budget;
        bool pass = o.pass && inTime;
        failed += !pass;
        std::printf("%s %2d %s: %s (%.1fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    inTime ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, all.size());
    return failed ? 1 : 0;
}
