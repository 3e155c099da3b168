#include "uteich/kdv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "uteich/fft.hpp"
#include "uteich/parallel.hpp"

namespace uteich {

namespace {

const cplx I1(0, 1);

CircleFunction add(const CircleFunction& a, const CircleFunction& b, cplx sa = 1.0, cplx sb = 1.0) {
    int N = std::max(a.N(), b.N());
    CircleFunction r(N);
    for (int k = -N; k <= N; ++k) r.set(k, sa * a.coeff(k) + sb * b.coeff(k));
    return r;
}

void require_positive(double d, const char* what) {
    if (!(d > 0)) throw NonDiffeomorphism(std::string(what) + "' = " + std::to_string(d));
}

} // namespace

// ==== Virasoro algebra ====

cplx cocycle_c0(const CircleFunction& f, const CircleFunction& g) {
    cplx s = 0;
    for (int m = -f.N(); m <= f.N(); ++m) {
        double w = double(m) * (m - 1) * (m - 2);
        if (w != 0) s += w * f.coeff(m) * g.coeff(2 - m);
    }
    return s;
}

CircleFunction multiply(const CircleFunction& a, const CircleFunction& b) {
    int N = a.N() + b.N();
    int n = 3 * N + 3;  // > 2N+1: the product is exact
    CVec sa = coeffs_to_samples(a.coeffs(), n), sb = coeffs_to_samples(b.coeffs(), n);
    for (int j = 0; j < n; ++j) sa[j] *= sb[j];
    return CircleFunction::from_samples(sa, N);
}

CircleFunction vector_field_bracket(const CircleFunction& f, const CircleFunction& g) {
    return add(multiply(f, g.d_dz()), multiply(f.d_dz(), g), 1.0, -1.0);
}

VirasoroElement virasoro_bracket(const VirasoroElement& a, const VirasoroElement& b) {
    return VirasoroElement{cocycle_c0(a.field, b.field), vector_field_bracket(a.field, b.field)};
}

CircleFunction vector_field_x_to_z(const CircleFunction& fx) {
    CircleFunction r(fx.N() + 1);
    for (int k = -fx.N(); k <= fx.N(); ++k) r.set(k + 1, I1 * fx.coeff(k));
    return r;
}

CircleFunction vector_field_z_to_x(const CircleFunction& fz) {
    CircleFunction r(fz.N() + 1);
    for (int k = -fz.N(); k <= fz.N(); ++k) r.set(k - 1, -I1 * fz.coeff(k));
    return r;
}

double bott_cocycle(const DiffeoOfCircle& s1, const DiffeoOfCircle& s2) {
    int L = 4 * std::max(s1.n(), s2.n());
    CircleFunction d2 = s2.displacement().d_dx().d_dx();
    double sum = 0;
    for (int j = 0; j < L; ++j) {
        double x = 2 * kPi * j / L;
        double a = s2.derivative(x), b = s1.derivative(s2(x));
        require_positive(a, "s2");
        require_positive(b, "s1");
        sum += std::log(a * b) * d2.eval(x).real() / a;
    }
    return sum * 2 * kPi / L;
}

VirasoroDualElement coadjoint_action(const CircleFunction& xi, const VirasoroDualElement& dual) {
    const CircleFunction& b = dual.quad;
    CircleFunction x1 = xi.d_dx();
    CircleFunction out = add(xi.d_dx().d_dx().d_dx(), multiply(x1, b), 0.5 * dual.central, 2.0);
    out = add(out, multiply(xi, b.d_dx()));
    return VirasoroDualElement{dual.central, out};
}

CircleFunction euler_vector_field(const CircleFunction& q) {
    return add(q.d_dx().d_dx().d_dx(), multiply(q, q.d_dx()), 0.5, 3.0);
}

CircleFunction kirillov_h(const DiffeoOfCircle& phi) {
    int n = phi.n(), N = n / 2 - 1;
    const CircleFunction& u = phi.displacement();
    // third-order resolution of the displacement
    double tail = 0, total = 0;
    for (int k = -u.N(); k <= u.N(); ++k) {
        double w = std::pow(std::abs(k), 3) * std::abs(u.coeff(k));
        total += w;
        if (2 * std::abs(k) > u.N()) tail += w;
    }
    if (tail > 1e-8 * std::max(1.0, total)) throw AssumptionViolated("phi not resolved to third order");
    CircleFunction u1 = u.d_dx(), u2 = u1.d_dx(), u3 = u2.d_dx();
    DiffeoOfCircle inv = phi.inverse();
    CVec s(n);
    for (int j = 0; j < n; ++j) {
        double y = inv.lift_sample(j);
        double p1 = 1.0 + u1.eval(y).real(), p2 = u2.eval(y).real(), p3 = u3.eval(y).real();
        require_positive(p1, "phi");
        double r = p2 / p1;
        s[j] = p3 / p1 - 1.5 * r * r + 0.5 * (p1 * p1 - 1.0);
    }
    return CircleFunction::from_samples(s, N);
}

HillResult hill_roundtrip(const CircleFunction& q, int steps) {
    const int sub = 8;
    double h = 2 * kPi / steps, dh = h / sub;
    auto qa = [&](double x) { return q.eval(x).real(); };
    // state (eta1, eta1', eta2, eta2')
    using S4 = std::array<double, 4>;
    auto rhs = [&](double x, const S4& y) { double qq = qa(x); return S4{y[1], -qq * y[0], y[3], -qq * y[2]}; };
    S4 y{1, 0, 0, 1};
    std::vector<S4> path{y};
    HillResult res;
    double W0 = y[1] * y[2] - y[0] * y[3];
    for (int j = 0; j < steps; ++j)
        for (int k = 0; k < sub; ++k) {
            double x = j * h + k * dh;
            S4 k1 = rhs(x, y), t;
            for (int c = 0; c < 4; ++c) t[c] = y[c] + 0.5 * dh * k1[c];
            S4 k2 = rhs(x + 0.5 * dh, t);
            for (int c = 0; c < 4; ++c) t[c] = y[c] + 0.5 * dh * k2[c];
            S4 k3 = rhs(x + 0.5 * dh, t);
            for (int c = 0; c < 4; ++c) t[c] = y[c] + dh * k3[c];
            S4 k4 = rhs(x + dh, t);
            for (int c = 0; c < 4; ++c) y[c] += dh / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
            if (k == sub - 1) {
                path.push_back(y);
                double W = y[1] * y[2] - y[0] * y[3];
                res.wronskianDrift = std::max(res.wronskianDrift, std::abs(W - W0));
                double scale = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
                if (res.wronskianDrift > 1e-6 || std::abs(W) < 1e-12 * scale)
                    throw WronskianCollapse("Wronskian drift " + std::to_string(res.wronskianDrift));
            }
        }
    // f = eta1 / (eta2 + i eta1) is a Moebius image of eta1/eta2 with a nonvanishing denominator.
    std::vector<cplx> f(path.size());
    for (size_t j = 0; j < path.size(); ++j) f[j] = path[j][0] / cplx(path[j][2], path[j][0]);
    static const double c1[] = {-1.0 / 60, 9.0 / 60, -45.0 / 60, 0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
    static const double c2[] = {2.0 / 180, -27.0 / 180, 270.0 / 180, -490.0 / 180, 270.0 / 180, -27.0 / 180, 2.0 / 180};
    static const double c3[] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
    for (int j = 4; j + 4 <= steps; ++j) {
        cplx d1 = 0, d2 = 0, d3 = 0;
        for (int o = -3; o <= 3; ++o) {
            d1 += c1[o + 3] * f[j + o];
            d2 += c2[o + 3] * f[j + o];
        }
        for (int o = -4; o <= 4; ++o) d3 += c3[o + 4] * f[j + o];
        d1 /= h;
        d2 /= h * h;
        d3 /= h * h * h;
        cplx S = schwarzian_value(d1, d2, d3);
        res.residual = std::max(res.residual, std::abs(0.5 * S - qa(j * h)));
    }
    return res;
}

// ==== reference solver ====

std::string convention_tag(KdVConvention c) {
    return c == KdVConvention::kdv6uux ? "kdv-6uux" : "euler-arnold-3qqx";
}

KdVConvention parse_convention(const std::string& tag) {
    if (tag == "kdv-6uux") return KdVConvention::kdv6uux;
    if (tag == "euler-arnold-3qqx") return KdVConvention::eulerArnold3qqx;
    throw ConfigInvalid("unknown convention '" + tag + "'");
}

double KdVState::mass() const {
    double s = 0;
    for (double v : u) s += v;
    return s * 2 * kPi / M();
}

double KdVState::energy() const {
    double s = 0;
    for (double v : u) s += v * v;
    return s * 2 * kPi / M();
}

std::string KdVTrajectory::to_csv() const {
    std::string out = "convention,t,x,u\r\n";
    char buf[128];
    for (const auto& f : frames) {
        std::string tag = convention_tag(f.convention);
        for (int j = 0; j < f.M(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\r\n", f.time, 2 * kPi * j / f.M(), f.u[j]);
            out += tag;
            out += buf;
        }
    }
    return out;
}

KdVTrajectory kdv_reference_solve(const KdVState& u0, double tEnd, double dt, const KdVOptions& opt) {
    const int M = u0.M();
    if (M < 4 || M % 2) throw std::invalid_argument("M must be even and >= 4");
    const bool six = u0.convention == KdVConvention::kdv6uux;
    const double lin = six ? 1.0 : 0.5, nl = six ? 3.0 : 1.5;  // u_t = lin u_xxx + nl (u^2)_x
    double umax = 0;
    for (double v : u0.u) umax = std::max(umax, std::abs(v));
    if (dt * (M / 2) * 2 * nl * umax > opt.cfl)
        throw AssumptionViolated("dt above the nonlinear stability guard dt * kmax * c * max|u0| <= " +
                                 std::to_string(opt.cfl));

    std::vector<double> k(M);
    for (int j = 0; j < M; ++j) k[j] = (j < M / 2) ? j : (j == M / 2 ? 0 : j - M);
    const int Mp = 3 * M / 2;

    auto nonlinear = [&](const CVec& uh) {
        CVec pad(Mp, 0.0);
        for (int j = 0; j < M; ++j) {
            if (j == M / 2) continue;
            pad[(j < M / 2) ? j : j + Mp - M] = uh[j];
        }
        CVec us = ifft_raw(pad);
        for (auto& v : us) v = cplx(v.real() * v.real(), 0.0);
        CVec sq = fft(us);
        CVec out(M);
        for (int j = 0; j < M; ++j) {
            cplx c = (j == M / 2) ? 0.0 : sq[(j < M / 2) ? j : j + Mp - M] / double(Mp);
            out[j] = nl * I1 * k[j] * c;
        }
        return out;
    };

    CVec uh(M);
    {
        CVec s(u0.u.begin(), u0.u.end());
        CVec f = fft(s);
        for (int j = 0; j < M; ++j) uh[j] = f[j] / double(M);
        uh[M / 2] = 0;
    }
    // linear symbol lin (ik)^3
    CVec E(M), E2(M);
    for (int j = 0; j < M; ++j) {
        cplx L = lin * std::pow(I1 * k[j], 3);
        E[j] = std::exp(L * (dt / 2));
        E2[j] = std::exp(L * dt);
    }
    auto to_state = [&](double t) {
        CVec s = ifft_raw(uh);
        KdVState st;
        st.time = t;
        st.convention = u0.convention;
        st.u.resize(M);
        for (int j = 0; j < M; ++j) st.u[j] = s[j].real();
        return st;
    };

    KdVTrajectory tr;
    KdVState first = to_state(u0.time);
    tr.frames.push_back(first);
    const double mass0 = first.mass(), energy0 = first.energy();
    int nsteps = static_cast<int>(std::ceil(tEnd / dt - 1e-9));
    double h = tEnd / std::max(nsteps, 1);
    if (nsteps > 0 && std::abs(h - dt) > 1e-12 * dt) {
        for (int j = 0; j < M; ++j) {
            cplx L = lin * std::pow(I1 * k[j], 3);
            E[j] = std::exp(L * (h / 2));
            E2[j] = std::exp(L * h);
        }
    }
    CVec a, b, c, d, tmp(M);
    for (int n = 1; n <= nsteps; ++n) {
        a = nonlinear(uh);
        for (int j = 0; j < M; ++j) tmp[j] = E[j] * (uh[j] + 0.5 * h * a[j]);
        b = nonlinear(tmp);
        for (int j = 0; j < M; ++j) tmp[j] = E[j] * uh[j] + 0.5 * h * b[j];
        c = nonlinear(tmp);
        for (int j = 0; j < M; ++j) tmp[j] = E2[j] * uh[j] + h * E[j] * c[j];
        d = nonlinear(tmp);
        for (int j = 0; j < M; ++j)
            uh[j] = E2[j] * uh[j] + h / 6 * (E2[j] * a[j] + 2.0 * E[j] * (b[j] + c[j]) + d[j]);

        double mass = 2 * kPi * uh[0].real(), energy = 0, peak = 0;
        for (int j = 0; j < M; ++j) {
            energy += std::norm(uh[j]);
            peak += std::abs(uh[j]);  // bound on max |u|
        }
        energy *= 2 * kPi;
        if (!std::isfinite(peak) || peak > opt.blowup)
            throw Blowup("max|u| bound " + std::to_string(peak) + " at t = " + std::to_string(u0.time + n * h));
        tr.massDrift = std::max(tr.massDrift, std::abs(mass - mass0));
        tr.energyDrift = std::max(tr.energyDrift, std::abs(energy - energy0) / std::max(energy0, 1e-300));
        if (n == nsteps || (opt.outputEvery > 0 && n % opt.outputEvery == 0)) tr.frames.push_back(to_state(u0.time + n * h));
    }
    return tr;
}

// ==== identification and the welding pipeline ====

TangentVector profile_to_tangent(const CircleFunction& u, int K) {
    TangentVector t(K);
    for (int k = 2; k <= K; ++k) t.set(k, -u.coeff(k) / std::sqrt(2.0 * k * (k * k - 1.0)));
    return t;
}

CircleFunction tangent_to_profile(const TangentVector& t) {
    CircleFunction u(t.K());
    for (int k = 2; k <= t.K(); ++k) {
        cplx c = -std::sqrt(2.0 * k * (k * k - 1.0)) * t.get(k);
        u.set(k, c);
        u.set(-k, std::conj(c));
    }
    return u;
}

TangentVector velocity_to_tangent(const CircleFunction& v, int K) {
    TangentVector t(K);
    for (int k = 2; k <= K; ++k) t.set(k, v.coeff(k) * std::pow(k * (k * k - 1.0), 1.5) / (2.0 * I1));
    return t;
}

CircleFunction tangent_to_velocity(const TangentVector& t) {
    CircleFunction v(t.K());
    for (int k = 2; k <= t.K(); ++k) {
        cplx c = 2.0 * I1 * t.get(k) / std::pow(k * (k * k - 1.0), 1.5);
        v.set(k, c);
        v.set(-k, std::conj(c));
    }
    return v;
}

namespace {

// Lift samples and derivative of the welding along tau -> exp(tau t0), cached per tau.
class WeldingPath {
public:
    WeldingPath(TangentVector t0, const GeodesicKdVOptions& opt) : t0_(std::move(t0)), opt_(opt) {}

    void prefetch(std::vector<double> taus) {
        std::vector<double> todo;
        for (double t : taus)
            if (!cache_.count(t) && std::find(todo.begin(), todo.end(), t) == todo.end()) todo.push_back(t);
        std::vector<DiffeoOfCircle> out(todo.size());
        parallel_for(static_cast<int>(todo.size()), [&](int i) { out[i] = compute(todo[i]); });
        for (size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], out[i]);
    }
    const DiffeoOfCircle& at(double tau) {
        auto it = cache_.find(tau);
        if (it == cache_.end()) it = cache_.emplace(tau, compute(tau)).first;
        return it->second;
    }

private:
    DiffeoOfCircle compute(double tau) const {
        TangentVector t = t0_;
        double amp = 0;
        for (auto& c : t.t) {
            c *= tau;
            amp = std::max(amp, std::abs(c));
        }
        if (amp == 0.0) return DiffeoOfCircle::identity(opt_.weldN);
        WeldingOptions wo;
        wo.n = opt_.weldN;
        return welding_map(BeltramiCoefficient::from_tangent(t, 96), wo).sigma;
    }

    TangentVector t0_;
    GeodesicKdVOptions opt_;
    std::map<double, DiffeoOfCircle> cache_;
};

std::vector<double> stencil(double t, double h) { return {t - h, t - h / 2, t + h / 2, t + h}; }

CircleFunction q_from_path(WeldingPath& path, double t, double h, int K) {
    const DiffeoOfCircle &gm = path.at(t - h), &gp = path.at(t + h);
    const DiffeoOfCircle &hm = path.at(t - h / 2), &hp = path.at(t + h / 2);
    const DiffeoOfCircle& g = path.at(t);
    int n = g.n();
    CVec v(n);
    for (int j = 0; j < n; ++j) {
        double D1 = (gp.lift_sample(j) - gm.lift_sample(j)) / (2 * h);
        double D2 = (hp.lift_sample(j) - hm.lift_sample(j)) / h;
        double gdot = (4 * D2 - D1) / 3;
        v[j] = gdot / g.derivative(g.x(j));
    }
    CircleFunction vf = CircleFunction::from_samples(v, n / 2 - 1);
    return tangent_to_profile(velocity_to_tangent(vf, K));
}

} // namespace

CircleFunction geodesic_q(const CircleFunction& u0, double t, double h, const GeodesicKdVOptions& opt) {
    WeldingPath path(profile_to_tangent(u0, opt.K), opt);
    auto s = stencil(t, h);
    s.push_back(t);
    path.prefetch(s);
    return q_from_path(path, t, h, opt.K);
}

GeodesicKdVResult geodesic_to_kdv(const CircleFunction& u0, double tEnd, double h, const GeodesicKdVOptions& opt) {
    WeldingPath path(profile_to_tangent(u0, opt.K), opt);
    GeodesicKdVResult r;
    int ns = std::max(opt.samples, 2);
    std::vector<double> taus;
    for (int i = 0; i < ns; ++i) {
        double t = tEnd * i / (ns - 1);
        r.times.push_back(t);
        for (double c : {t - h, t, t + h}) {
            taus.push_back(c);
            for (double s : stencil(c, h)) taus.push_back(s);
        }
    }
    path.prefetch(taus);
    for (double t : r.times) {
        CircleFunction q = q_from_path(path, t, h, opt.K);
        CircleFunction qt = add(q_from_path(path, t + h, h, opt.K), q_from_path(path, t - h, h, opt.K), 0.5 / h, -0.5 / h);
        double res = add(qt, euler_vector_field(q), 1.0, -1.0).l2_norm();
        if (!(res <= opt.ceiling)) throw ResidualDiverged("residual " + std::to_string(res) + " at t = " + std::to_string(t));
        r.q.push_back(q);
        r.residual.push_back(res);
    }
    r.h = h;
    return r;
}

nlohmann::ordered_json GeodesicKdVResult::report() const {
    nlohmann::ordered_json j;
    j["convention"] = convention_tag(KdVConvention::eulerArnold3qqx);
    j["h"] = h;
    auto arr = nlohmann::ordered_json::array();
    for (size_t i = 0; i < times.size(); ++i) {
        nlohmann::ordered_json s;
        s["t"] = times[i];
        s["residual"] = residual[i];
        s["q_l2"] = q[i].l2_norm();
        arr.push_back(s);
    }
    j["samples"] = arr;
    return j;
}

} // namespace uteich
