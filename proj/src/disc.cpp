#include "uteich/disc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace uteich {

// ==== MonomialField ====

void MonomialField::add(int m, int n, cplx c) {
    if (m < 0 || n < 0) throw std::invalid_argument("MonomialField: negative exponent");
    if (m + n > D_)
        throw DegreeOverflow("term z^" + std::to_string(m) + " zbar^" + std::to_string(n) +
                             " exceeds degree cap " + std::to_string(D_));
    c_[m * (D_ + 1) + n] += c;
}

void MonomialField::set(int m, int n, cplx c) {
    if (m < 0 || n < 0) throw std::invalid_argument("MonomialField: negative exponent");
    if (m + n > D_) throw DegreeOverflow("set beyond degree cap " + std::to_string(D_));
    c_[m * (D_ + 1) + n] = c;
}

int MonomialField::degree() const {
    int best = -1;
    for (int m = 0; m <= D_; ++m)
        for (int n = 0; m + n <= D_; ++n)
            if (c_[m * (D_ + 1) + n] != cplx(0)) best = std::max(best, m + n);
    return best;
}

void MonomialField::prune(double tol) {
    for (auto& c : c_)
        if (std::abs(c) < tol) c = 0;
}

MonomialField MonomialField::with_cap(int D) const {
    MonomialField r(D);
    for (const auto& t : terms()) r.add(t.m, t.n, t.c);
    return r;
}

cplx MonomialField::eval(cplx z) const {
    const int deg = degree();
    if (deg < 0) return 0;
    cplx zb = std::conj(z), s(0);
    for (int m = deg; m >= 0; --m) {
        cplx row(0);
        for (int n = deg - m; n >= 0; --n) row = row * zb + c_[m * (D_ + 1) + n];
        s = s * z + row;
    }
    return s;
}

MonomialField MonomialField::dz() const {
    MonomialField r(D_);
    for (const auto& t : terms())
        if (t.m > 0) r.add(t.m - 1, t.n, double(t.m) * t.c);
    return r;
}

MonomialField MonomialField::dzbar() const {
    MonomialField r(D_);
    for (const auto& t : terms())
        if (t.n > 0) r.add(t.m, t.n - 1, double(t.n) * t.c);
    return r;
}

MonomialField MonomialField::operator+(const MonomialField& o) const {
    MonomialField r = with_cap(std::max(D_, o.D_));
    r += o;
    return r;
}

MonomialField MonomialField::operator-(const MonomialField& o) const { return *this + o * cplx(-1); }

MonomialField MonomialField::operator*(cplx s) const {
    MonomialField r = *this;
    for (auto& c : r.c_) c *= s;
    return r;
}

MonomialField& MonomialField::operator+=(const MonomialField& o) {
    for (const auto& t : o.terms()) add(t.m, t.n, t.c);
    return *this;
}

MonomialField MonomialField::mul(const MonomialField& o) const {
    MonomialField r(std::max(D_, o.D_));
    auto a = terms(), b = o.terms();
    for (const auto& x : a)
        for (const auto& y : b) r.add(x.m + y.m, x.n + y.n, x.c * y.c);
    return r;
}

std::vector<MonomialField::Term> MonomialField::terms() const {
    std::vector<Term> out;
    for (int m = 0; m <= D_; ++m)
        for (int n = 0; m + n <= D_; ++n) {
            cplx c = c_[m * (D_ + 1) + n];
            if (c != cplx(0)) out.push_back({m, n, c});
        }
    return out;
}

nlohmann::ordered_json MonomialField::to_json() const {
    nlohmann::ordered_json j;
    j["D"] = D_;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : terms())
        if (std::abs(t.c) >= 1e-15) arr.push_back({t.m, t.n, t.c.real(), t.c.imag()});
    j["terms"] = arr;
    return j;
}

MonomialField MonomialField::from_json(const nlohmann::json& j) {
    MonomialField f(j.at("D").get<int>());
    for (const auto& t : j.at("terms"))
        f.add(t.at(0).get<int>(), t.at(1).get<int>(), cplx(t.at(2).get<double>(), t.at(3).get<double>()));
    return f;
}

CircleFunction PiecewiseField::trace_inside() const {
    CircleFunction r(inside.D());
    for (const auto& t : inside.terms()) r.set(t.m - t.n, r.coeff(t.m - t.n) + t.c);
    return r;
}

// ==== Beltrami coefficients ====

double sup_norm_disc(const MonomialField& f, int nr, int nt) {
    double best = 0;
    for (int i = 0; i <= nr; ++i) {
        double r = double(i) / nr;
        for (int j = 0; j < (i == 0 ? 1 : nt); ++j) best = std::max(best, std::abs(f.eval(std::polar(r, 2 * kPi * j / nt))));
    }
    return best;
}

BeltramiCoefficient BeltramiCoefficient::zero(int D) {
    BeltramiCoefficient mu;
    mu.field = MonomialField(D);
    return mu;
}

BeltramiCoefficient BeltramiCoefficient::from_g(const CVec& g, int D) {
    BeltramiCoefficient mu;
    mu.g = g;
    mu.field = MonomialField(D);
    // (1 - z zbar)^2 = 1 - 2 z zbar + z^2 zbar^2
    for (size_t k = 0; k < g.size(); ++k) {
        if (g[k] == cplx(0)) continue;
        int kk = static_cast<int>(k);
        mu.field.add(0, kk, g[k]);
        mu.field.add(1, kk + 1, -2.0 * g[k]);
        mu.field.add(2, kk + 2, g[k]);
    }
    // On each circle |z| = r the modulus is (1-r^2)^2 |g(r e^{-i theta})|.
    double best = 0;
    const int nr = 200, nt = 256;
    for (int i = 0; i < nr; ++i) {
        double r = double(i) / nr, w = (1 - r * r) * (1 - r * r);
        for (int j = 0; j < nt; ++j) {
            cplx zb = std::polar(r, -2 * kPi * j / nt), s(0);
            for (size_t k = g.size(); k-- > 0;) s = s * zb + g[k];
            best = std::max(best, w * std::abs(s));
        }
    }
    mu.supNorm = best;
    return mu;
}

BeltramiCoefficient BeltramiCoefficient::from_tangent(const TangentVector& t, int D) {
    CVec g(std::max(t.K() - 1, 1), cplx(0));
    for (int k = 2; k <= t.K(); ++k) g[k - 2] = t.monomial_coeff(k);
    return from_g(g, D);
}

BeltramiCoefficient BeltramiCoefficient::from_field(const MonomialField& f) {
    BeltramiCoefficient mu;
    mu.field = f;
    mu.supNorm = sup_norm_disc(f);
    return mu;
}

// ==== P and T ====

PiecewiseField cauchy_transform_P(const MonomialField& h) {
    PiecewiseField out{MonomialField(h.D() + 1), CircleFunction(h.D() + 1)};
    for (const auto& t : h.terms()) {
        cplx c = t.c / double(t.n + 1);
        out.inside.add(t.m, t.n + 1, c);
        int d = t.m - t.n - 1;
        if (d < 0)
            out.outside.set(d, out.outside.coeff(d) + c);
        else
            out.inside.add(d, 0, -c);
    }
    return out;
}

PiecewiseField beurling_transform_T(const MonomialField& h) {
    PiecewiseField out{MonomialField(h.D()), CircleFunction(h.D() + 2)};
    for (const auto& t : h.terms()) {
        cplx c = t.c / double(t.n + 1);
        if (t.m > 0) out.inside.add(t.m - 1, t.n + 1, double(t.m) * c);
        int d = t.m - t.n - 1;
        if (d < 0)
            out.outside.set(d - 1, out.outside.coeff(d - 1) + double(d) * c);
        else if (d > 0)
            out.inside.add(d - 1, 0, -double(d) * c);
    }
    return out;
}

double l2_norm_disc(const MonomialField& h) {
    // Terms only pair within the same angular frequency m - n.
    std::map<int, std::vector<std::pair<int, cplx>>> byFreq;
    for (const auto& t : h.terms()) byFreq[t.m - t.n].push_back({t.m + t.n, t.c});
    double s = 0;
    for (const auto& [f, list] : byFreq)
        for (const auto& a : list)
            for (const auto& b : list) s += (a.second * std::conj(b.second)).real() * 2 * kPi / (a.first + b.first + 2);
    return std::sqrt(std::max(s, 0.0));
}

double l2_norm_plane(const PiecewiseField& f) {
    double s = std::pow(l2_norm_disc(f.inside), 2);
    for (int k = -f.outside.N(); k <= f.outside.N(); ++k) {
        cplx c = f.outside.coeff(k);
        if (c == cplx(0)) continue;
        if (k >= -1) return std::numeric_limits<double>::infinity();
        int j = -k;
        s += std::norm(c) * kPi / (j - 1);
    }
    return std::sqrt(s);
}

MonomialField mu_multiply(const BeltramiCoefficient& mu, const MonomialField& h) {
    MonomialField r(h.D());
    auto a = mu.field.terms(), b = h.terms();
    for (const auto& x : a)
        for (const auto& y : b) r.add(x.m + y.m, x.n + y.n, x.c * y.c);
    return r;
}

// ==== Neumann series and w^(n) ====

NeumannResult neumann_series_detail(const BeltramiCoefficient& mu, int n, const NeumannOptions& opt) {
    if (mu.supNorm >= 1.0) throw NonContractive("sup|mu| = " + std::to_string(mu.supNorm));
    if (n < 1) throw std::invalid_argument("neumann_series: n >= 1 required");
    const int D = mu.field.D();
    MonomialField seed(D);
    seed.add(n - 1, 0, double(n));
    MonomialField phi = mu_multiply(mu, seed);
    NeumannResult res{phi, {l2_norm_disc(phi)}};
    for (int it = 1; it < opt.maxIter; ++it) {
        if (res.termNorms.back() < opt.tol) return res;
        phi = mu_multiply(mu, beurling_transform_T(phi).inside);
        phi.prune(0.0);
        res.sum += phi;
        res.termNorms.push_back(l2_norm_disc(phi));
    }
    if (res.termNorms.back() < opt.tol) return res;
    throw NoConvergence("last term norm " + std::to_string(res.termNorms.back()) + " after " +
                        std::to_string(opt.maxIter) + " terms");
}

MonomialField neumann_series(const BeltramiCoefficient& mu, int n, double tol, int maxIter) {
    return neumann_series_detail(mu, n, {tol, maxIter}).sum;
}

WSolution solution_w_n(const BeltramiCoefficient& mu, int n, const NeumannOptions& opt) {
    WSolution sol;
    const int D = mu.field.D();
    MonomialField zn(D + 1);
    zn.add(n, 0, 1.0);
    CircleFunction znOut(std::max(n, D + 1));
    znOut.set(n, 1.0);
    if (n == 0 || mu.field.is_zero()) {
        sol.w = {zn, znOut};
    } else {
        NeumannResult nr = neumann_series_detail(mu, n, opt);
        sol.termNorms = nr.termNorms;
        PiecewiseField p = cauchy_transform_P(nr.sum);
        sol.w = {zn + p.inside, znOut + p.outside};
    }
    // Exact residual; the product needs room for deg(mu) extra.
    int cap = sol.w.inside.D() + mu.field.D() + 2;
    MonomialField dbar = sol.w.inside.dzbar().with_cap(cap);
    MonomialField dw = sol.w.inside.dz().with_cap(cap);
    MonomialField res = dbar - mu.field.with_cap(cap).mul(dw);
    sol.residualL2 = l2_norm_disc(res);
    sol.boundaryMean = std::abs(sol.w.trace_inside().coeff(0));
    return sol;
}

CircleFunction boundary_v_n(const BeltramiCoefficient& mu, int n, const NeumannOptions& opt) {
    if (n == 0 || mu.field.is_zero()) return CircleFunction(1);
    MonomialField h = neumann_series_detail(mu, n, opt).sum;
    return cauchy_transform_P(h).trace_inside();
}

double beltrami_residual_grid(const BeltramiCoefficient& mu, const PiecewiseField& w, int nr, int nt) {
    MonomialField dbar = w.inside.dzbar(), dw = w.inside.dz();
    double best = 0;
    for (int i = 0; i < nr; ++i) {
        double r = (i + 0.5) / nr;
        for (int j = 0; j < nt; ++j) {
            cplx z = std::polar(r, 2 * kPi * j / nt);
            best = std::max(best, std::abs(dbar.eval(z) - mu.field.eval(z) * dw.eval(z)));
        }
    }
    return best;
}

// ==== Quadrature oracle ====

namespace {

struct TermEval {
    std::vector<MonomialField::Term> terms;
    int maxM = 0, maxN = 0;
    explicit TermEval(const MonomialField& h) : terms(h.terms()) {
        for (const auto& t : terms) {
            maxM = std::max(maxM, t.m);
            maxN = std::max(maxN, t.n);
        }
    }
    cplx operator()(cplx z) const {
        thread_local CVec pz, pzb;
        pz.assign(maxM + 1, 1.0);
        pzb.assign(maxN + 1, 1.0);
        cplx zb = std::conj(z);
        for (int i = 1; i <= maxM; ++i) pz[i] = pz[i - 1] * z;
        for (int i = 1; i <= maxN; ++i) pzb[i] = pzb[i - 1] * zb;
        cplx s(0);
        for (const auto& t : terms) s += t.c * pz[t.m] * pzb[t.n];
        return s;
    }
};

double ray_length(cplx zeta, double alpha) {
    // |zeta + rho e^{i alpha}| = 1, rho > 0.
    double b = (std::conj(zeta) * std::polar(1.0, alpha)).real();
    return -b + std::sqrt(b * b + 1.0 - std::norm(zeta));
}

void check_guard(cplx zeta, const QuadratureOptions& opt) {
    double guard = 2 * kPi / std::min(opt.nr, opt.nt);
    if (std::abs(std::abs(zeta) - 1.0) < guard)
        throw SingularityTooClose("|zeta| within " + std::to_string(guard) + " of the unit circle");
}

// Polar GL x trapezoid over the disc for a smooth integrand.
template <class F>
cplx disc_integral(F&& f, const QuadratureOptions& opt) {
    std::vector<double> x, w;
    gauss_legendre(opt.nr, 0.0, 1.0, x, w);
    cplx s(0);
    for (int j = 0; j < opt.nt; ++j) {
        cplx e = std::polar(1.0, 2 * kPi * j / opt.nt);
        for (int i = 0; i < opt.nr; ++i) s += w[i] * x[i] * f(x[i] * e);
    }
    return s * (2 * kPi / opt.nt);
}

} // namespace

cplx quadrature_oracle_P(const MonomialField& h, cplx zeta, const QuadratureOptions& opt) {
    check_guard(zeta, opt);
    TermEval H(h);
    if (H.terms.empty()) return 0;
    if (std::abs(zeta) > 1.0) return -disc_integral([&](cplx z) { return H(z) / (z - zeta); }, opt) / kPi;
    // Polar coordinates about zeta: the kernel 1/(z-zeta) cancels the Jacobian rho.
    std::vector<double> x, w;
    gauss_legendre(opt.nr, 0.0, 1.0, x, w);
    cplx s(0);
    for (int j = 0; j < opt.nt; ++j) {
        double a = 2 * kPi * j / opt.nt;
        cplx e = std::polar(1.0, a);
        double L = ray_length(zeta, a);
        cplx ray(0);
        for (int i = 0; i < opt.nr; ++i) ray += w[i] * H(zeta + L * x[i] * e);
        s += ray * L * std::conj(e);
    }
    return -s * (2 * kPi / opt.nt) / kPi;
}

cplx quadrature_oracle_T(const MonomialField& h, cplx zeta, const QuadratureOptions& opt) {
    check_guard(zeta, opt);
    TermEval H(h);
    if (H.terms.empty()) return 0;
    if (std::abs(zeta) > 1.0)
        return -disc_integral([&](cplx z) { return H(z) / ((z - zeta) * (z - zeta)); }, opt) / kPi;
    std::vector<double> x, w;
    gauss_legendre(opt.nr, 0.0, 1.0, x, w);
    const cplx h0 = H(zeta);
    cplx s(0);
    for (int j = 0; j < opt.nt; ++j) {
        double a = 2 * kPi * j / opt.nt;
        cplx e = std::polar(1.0, a);
        double L = ray_length(zeta, a);
        cplx ray(0);
        for (int i = 0; i < opt.nr; ++i) {
            double rho = L * x[i];
            ray += w[i] * (H(zeta + rho * e) - h0) / rho;
        }
        // Principal value: the constant part contributes h(zeta) log L(alpha).
        s += (ray * L + h0 * std::log(L)) * std::conj(e * e);
    }
    return -s * (2 * kPi / opt.nt) / kPi;
}

} // namespace uteich
