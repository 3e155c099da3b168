#include "uteich/welding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace uteich {

namespace {

const cplx I(0.0, 1.0);

double wrap_pi(double a) { return std::remainder(a, 2 * kPi); }

// Periodic part of a lift sampled on the uniform grid, as Fourier coefficients.
CircleFunction periodic_part(const DVec& u) {
    CVec s(u.begin(), u.end());
    int n = static_cast<int>(u.size());
    return CircleFunction::from_samples(s, (n - 1) / 2);
}

double real_eval(const CircleFunction& f, double x) { return f.eval(x).real(); }

double real_deriv(const CircleFunction& f, double x) {
    cplx z = std::polar(1.0, x), s(0);
    for (int k = -f.N(); k <= f.N(); ++k)
        if (k != 0) s += cplx(0, k) * f.coeff(k) * std::pow(z, k);
    return s.real();
}

// Unwraps phases in place so consecutive entries differ by less than pi.
void unwrap(DVec& a) {
    for (size_t j = 1; j < a.size(); ++j) a[j] = a[j - 1] + wrap_pi(a[j] - a[j - 1]);
}

} // namespace

// ==== MonotoneCubic ====

MonotoneCubic::MonotoneCubic(DVec x, DVec y) : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need matching samples");
    DVec del(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        double h = x_[i + 1] - x_[i];
        if (!(h > 0)) throw NonMonotone("MonotoneCubic: abscissae must increase");
        del[i] = (y_[i + 1] - y_[i]) / h;
    }
    d_[0] = del[0];
    d_[n - 1] = del[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0) continue;
        double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
    }
}

double MonotoneCubic::operator()(double t) const {
    size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
    i = std::clamp<size_t>(i, 1, x_.size() - 1) - 1;
    double h = x_[i + 1] - x_[i], s = (t - x_[i]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

// ==== DiffeoOfCircle ====

DiffeoOfCircle::DiffeoOfCircle(const DVec& uSamples) : u_(uSamples) {
    const int m = n();
    if (m < 4) throw std::invalid_argument("DiffeoOfCircle: need at least 4 samples");
    for (int j = 0; j < m; ++j) {
        double next = j + 1 < m ? lift_sample(j + 1) : lift_sample(0) + 2 * kPi;
        if (!(next > lift_sample(j))) throw NonMonotone("lift not strictly increasing at sample " + std::to_string(j));
    }
    uhat_ = periodic_part(u_);
}

DiffeoOfCircle DiffeoOfCircle::from_lift(const std::function<double(double)>& psi, int n) {
    DVec u(n);
    for (int j = 0; j < n; ++j) {
        double x = 2 * kPi * j / n;
        u[j] = psi(x) - x;
    }
    return DiffeoOfCircle(u);
}

DVec DiffeoOfCircle::lift_samples() const {
    DVec s(n());
    for (int j = 0; j < n(); ++j) s[j] = lift_sample(j);
    return s;
}

double DiffeoOfCircle::operator()(double x) const { return x + real_eval(uhat_, x); }
double DiffeoOfCircle::derivative(double x) const { return 1.0 + real_deriv(uhat_, x); }

DiffeoOfCircle DiffeoOfCircle::inverse() const {
    DVec v(n());
    // Monotone interpolation of the sample pairs gives a safe starting point.
    DVec xs, ys;
    for (int j = -1; j <= n(); ++j) {
        int jj = (j + n()) % n();
        double shift = 2 * kPi * ((j < 0) ? -1 : (j >= n() ? 1 : 0));
        xs.push_back(lift_sample(jj) + shift);
        ys.push_back(x(jj) + shift);
    }
    MonotoneCubic guess(xs, ys);
    for (int j = 0; j < n(); ++j) {
        double target = x(j);
        double a = guess(target);
        for (int it = 0; it < 50; ++it) {
            double step = ((*this)(a) - target) / derivative(a);
            a -= step;
            if (std::abs(step) < 1e-15) break;
        }
        v[j] = a - target;
    }
    return DiffeoOfCircle(v);
}

DiffeoOfCircle DiffeoOfCircle::compose(const DiffeoOfCircle& inner) const {
    DVec v(n());
    for (int j = 0; j < n(); ++j) v[j] = (*this)(inner(x(j))) - x(j);
    return DiffeoOfCircle(v);
}

MoebiusTransform DiffeoOfCircle::normalizer() const {
    auto e = [&](double t) { return std::polar(1.0, (*this)(t)); };
    return moebius_fixing_triple(e(kPi), e(1.5 * kPi), e(0.0), cplx(-1.0), -I, cplx(1.0));
}

DiffeoOfCircle DiffeoOfCircle::normalized() const {
    MoebiusTransform m = normalizer();
    DVec d(n());
    for (int j = 0; j < n(); ++j) {
        cplx e = std::polar(1.0, lift_sample(j));
        d[j] = std::arg(m(e) / e);
    }
    unwrap(d);
    DVec v(n());
    for (int j = 0; j < n(); ++j) v[j] = u_[j] + d[j];
    // The normalised lift fixes 0 exactly; pick that branch.
    double shift = 2 * kPi * std::round(v[0] / (2 * kPi));
    for (auto& t : v) t -= shift;
    return DiffeoOfCircle(v);
}

double DiffeoOfCircle::triple_error() const {
    double e = 0;
    for (double t : {kPi, 1.5 * kPi, 0.0}) e = std::max(e, std::abs(wrap_pi((*this)(t) - t)));
    return e;
}

double DiffeoOfCircle::sup_distance_to_identity() const {
    double e = 0;
    for (double v : u_) e = std::max(e, std::abs(v));
    return e;
}

double DiffeoOfCircle::quasisymmetry() const {
    return quasisymmetry_constant([this](double x) { return (*this)(x); });
}

// ==== PlanarMap and dilatation ====

cplx PlanarMap::point(int i, int j) const {
    double a = a0 + i * da, b = b0 + j * db;
    return grid == Grid::cartesian ? cplx(a, b) : std::polar(a, b);
}

PlanarMap PlanarMap::sample_polar(const std::function<cplx(cplx)>& f, int nr, int nt, double r0, double r1) {
    PlanarMap m;
    m.grid = Grid::polar;
    m.n1 = nr;
    m.n2 = nt;
    m.a0 = r0;
    m.da = nr > 1 ? (r1 - r0) / (nr - 1) : 0.0;
    m.b0 = 0;
    m.db = 2 * kPi / nt;
    m.w.resize(size_t(nr) * nt);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) m.at(i, j) = f(m.point(i, j));
    return m;
}

PlanarMap PlanarMap::sample_cartesian(const std::function<cplx(cplx)>& f, int nx, int ny, double x0, double x1,
                                      double y0, double y1) {
    PlanarMap m;
    m.n1 = nx;
    m.n2 = ny;
    m.a0 = x0;
    m.da = (x1 - x0) / (nx - 1);
    m.b0 = y0;
    m.db = (y1 - y0) / (ny - 1);
    m.w.resize(size_t(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) m.at(i, j) = f(m.point(i, j));
    return m;
}

bool PlanarMap::orientation_preserving() const {
    try {
        GridField mu = complex_dilatation(*this);
        return mu.sup < 1.0;
    } catch (const DegenerateJacobian&) {
        return false;
    }
}

GridField complex_dilatation(const PlanarMap& F) {
    GridField out;
    out.n1 = F.n1;
    out.n2 = F.n2;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.v.assign(F.w.size(), cplx(nan, nan));
    const bool polar = F.grid == PlanarMap::Grid::polar;
    for (int i = 1; i + 1 < F.n1; ++i) {
        for (int j = 0; j < F.n2; ++j) {
            int jm = j - 1, jp = j + 1;
            if (polar) {
                jm = (jm + F.n2) % F.n2;
                jp %= F.n2;
            } else if (j == 0 || j + 1 == F.n2) {
                continue;
            }
            cplx Fa = (F.at(i + 1, j) - F.at(i - 1, j)) / (2 * F.da);
            cplx Fb = (F.at(i, jp) - F.at(i, jm)) / (2 * F.db);
            cplx dz, dzb;
            if (polar) {
                double r = F.a0 + i * F.da, t = F.b0 + j * F.db;
                cplx e = std::polar(1.0, t);
                dz = 0.5 * std::conj(e) * (Fa - I * Fb / r);
                dzb = 0.5 * e * (Fa + I * Fb / r);
            } else {
                dz = 0.5 * (Fa - I * Fb);
                dzb = 0.5 * (Fa + I * Fb);
            }
            if (std::abs(dz) < 1e-10) throw DegenerateJacobian("|dF| below 1e-10 at grid node");
            cplx mu = dzb / dz;
            out.v[i * F.n2 + j] = mu;
            out.sup = std::max(out.sup, std::abs(mu));
        }
    }
    return out;
}

cplx dilatation_at(const std::function<cplx(cplx)>& F, cplx z, double h) {
    cplx Fx = (F(z + h) - F(z - h)) / (2 * h);
    cplx Fy = (F(z + I * h) - F(z - I * h)) / (2 * h);
    cplx dz = 0.5 * (Fx - I * Fy), dzb = 0.5 * (Fx + I * Fy);
    if (std::abs(dz) < 1e-10) throw DegenerateJacobian("|dF| below 1e-10");
    return dzb / dz;
}

PlanarMap beurling_ahlfors_extend(const std::function<double(double)>& h, const BAGrid& g) {
    // Monotonicity on every abscissa the quadrature will touch.
    const int nm = 4 * (g.nx + g.ny);
    double lo = g.x0 - g.y1, hi = g.x1 + g.y1, prev = h(lo);
    for (int k = 1; k <= nm; ++k) {
        double v = h(lo + (hi - lo) * k / nm);
        if (!(v > prev)) throw NonMonotone("boundary map not increasing");
        prev = v;
    }
    DVec t, w;
    gauss_legendre(g.quadNodes, 0.0, 1.0, t, w);
    auto f = [&](cplx z) {
        double x = z.real(), y = z.imag(), re = 0, im = 0;
        if (y == 0.0) return cplx(h(x), 0.0);
        for (size_t q = 0; q < t.size(); ++q) {
            double a = h(x + t[q] * y), b = h(x - t[q] * y);
            re += w[q] * 0.5 * (a + b);
            im += w[q] * (a - b);
        }
        return cplx(re, im);
    };
    return PlanarMap::sample_cartesian(f, g.nx, g.ny, g.x0, g.x1, g.y0, g.y1);
}

namespace {

// sin t / t, 2(1 - cos t)/t and their derivatives.
void ba_kernels(double t, double& S, double& C, double& dS, double& dC) {
    if (std::abs(t) < 1e-2) {
        double t2 = t * t;
        S = 1 - t2 / 6 + t2 * t2 / 120;
        dS = -t / 3 + t * t2 / 30;
        C = t - t * t2 / 12 + t * t2 * t2 / 360;
        dC = 1 - t2 / 4 + t2 * t2 / 72;
        return;
    }
    double s = std::sin(t), c = std::cos(t);
    S = s / t;
    dS = (t * c - s) / (t * t);
    C = 2 * (1 - c) / t;
    dC = 2 * s / t - 2 * (1 - c) / (t * t);
}

} // namespace

GridField ba_dilatation_disc(const DiffeoOfCircle& phi, int nr, int nt) {
    GridField out;
    out.n1 = nr;
    out.n2 = nt;
    out.v.assign(size_t(nr) * nt, cplx(0));
    const CircleFunction& a = phi.displacement();
    const int K = std::min(a.N(), nt / 2 - 1);
    for (int i = 0; i < nr; ++i) {
        double rho = (i + 0.5) / nr, y = -std::log(rho);
        // F(x+iy) = x + iy + sum a_k e^{ikx} (S(ky) + i * i C(ky)).
        CVec Fx(nt, cplx(0)), Fy(nt, cplx(0));
        Fx[0] = 1.0;
        Fy[0] = I;
        for (int k = -K; k <= K; ++k) {
            if (k == 0) continue;
            double S, C, dS, dC;
            ba_kernels(k * y, S, C, dS, dC);
            int idx = (k + nt) % nt;
            Fx[idx] += cplx(0, k) * a.coeff(k) * (S - C);
            Fy[idx] += double(k) * a.coeff(k) * (dS - dC);
        }
        CVec fx = ifft_raw(Fx), fy = ifft_raw(Fy);
        for (int j = 0; j < nt; ++j) {
            cplx kF = (fx[j] + I * fy[j]) / (fx[j] - I * fy[j]);
            // Pulling back through z = e^{i(x+iy)} multiplies by -e^{2i theta}.
            cplx k = -kF * std::polar(1.0, 4 * kPi * j / nt);
            out.v[i * nt + j] = k;
            out.sup = std::max(out.sup, std::abs(k));
        }
    }
    return out;
}

// ==== Grid Beurling transform ====

std::vector<cplx> grid_beurling_T(const std::vector<cplx>& h, int nr, int nt) {
    const double dr = 1.0 / nr;
    // Angular modes per radius.
    std::vector<CVec> modes(nr);
    for (int i = 0; i < nr; ++i) {
        CVec row(h.begin() + size_t(i) * nt, h.begin() + size_t(i + 1) * nt);
        modes[i] = fft(row);
        for (auto& c : modes[i]) c /= double(nt);
    }
    std::vector<CVec> outModes(nr, CVec(nt, cplx(0)));
    CVec f(nr), R(nr);
    auto rho = [&](int i) { return (i + 0.5) * dr; };
    for (int m = -nt / 2 + 2; m < nt / 2; ++m) {
        int src = (m + nt) % nt, dst = (m - 2 + nt) % nt;
        bool any = false;
        for (int i = 0; i < nr; ++i) {
            f[i] = modes[i][src];
            any = any || f[i] != cplx(0);
        }
        if (!any) continue;
        if (m <= 0) {
            // (1/rho) int_0^rho f (r/rho)^p dr, p = 1 - m, trapezoid from r = 0.
            const double p = 1 - m;
            cplx A = 0.5 * rho(0) * f[0];
            R[0] = A / rho(0);
            for (int i = 1; i < nr; ++i) {
                double q = std::pow(rho(i - 1) / rho(i), p);
                A = A * q + 0.5 * dr * (f[i - 1] * q + f[i]);
                R[i] = A / rho(i);
            }
        } else if (m >= 2) {
            // -(1/rho) int_rho^1 f (rho/r)^p dr, p = m - 1, f(1) taken as f at the last node.
            const double p = m - 1;
            const int L = nr - 1;
            double tail = 1.0 - rho(L);
            cplx B = 0.5 * tail * (f[L] + f[L] * std::pow(rho(L), p));
            R[L] = -B / rho(L);
            for (int i = L - 1; i >= 0; --i) {
                double q = std::pow(rho(i) / rho(i + 1), p);
                B = B * q + 0.5 * dr * (f[i] + f[i + 1] * q);
                R[i] = -B / rho(i);
            }
        } else {
            std::fill(R.begin(), R.end(), cplx(0));
        }
        for (int i = 0; i < nr; ++i) outModes[i][dst] += f[i] + 2.0 * (m - 1) * R[i];
    }
    std::vector<cplx> out(h.size());
    for (int i = 0; i < nr; ++i) {
        CVec row = ifft_raw(outModes[i]);
        std::copy(row.begin(), row.end(), out.begin() + size_t(i) * nt);
    }
    return out;
}

// ==== Normalised Beltrami solution ====

PlanarMap NormalizedSolution::sample(int nr, int nt, double rmax) const {
    return PlanarMap::sample_polar([this](cplx z) { return (*this)(z); }, nr, nt, 0.0, rmax);
}

NormalizedSolution beltrami_solve_normalized(const BeltramiCoefficient& mu, const NeumannOptions& opt) {
    NormalizedSolution s;
    WSolution ws = solution_w_n(mu, 1, opt);
    s.w = ws.w;
    const cplx p[3] = {-1.0, -I, 1.0};
    cplx q[3];
    for (int k = 0; k < 3; ++k) q[k] = s.w.outside.eval_z(p[k]);
    double sep = std::min({std::abs(q[0] - q[1]), std::abs(q[1] - q[2]), std::abs(q[0] - q[2])});
    if (sep < 1e-8) throw MoebiusDegenerate("images of -1, -i, 1 nearly collide");
    s.M = moebius_fixing_triple(q[0], q[1], q[2], p[0], p[1], p[2]);
    for (int k = 0; k < 3; ++k) s.tripleError = std::max(s.tripleError, std::abs(s.M(q[k]) - p[k]));
    // Post-composition scales the residual by |M'(w)|.
    MonomialField dbar = s.w.inside.dzbar(), dw = s.w.inside.dz();
    for (int i = 0; i < 32; ++i) {
        double r = (i + 0.5) / 32;
        for (int j = 0; j < 64; ++j) {
            cplx z = std::polar(r, 2 * kPi * j / 64);
            cplx res = dbar.eval(z) - mu.field.eval(z) * dw.eval(z);
            s.residual = std::max(s.residual, std::abs(s.M.derivative(s.w.inside.eval(z)) * res));
        }
    }
    return s;
}

// ==== Theodorsen ====

namespace {

struct Curve {
    CircleFunction g, dg;
    DVec delta;   // unwrapped arg(gamma(s) e^{-is}) on the grid
    int n;
    explicit Curve(const CircleFunction& c, int n_) : g(c), dg(c.d_dx()), n(n_) {
        delta.resize(n);
        for (int j = 0; j < n; ++j) {
            double s = 2 * kPi * j / n;
            delta[j] = std::arg(g.eval(s) * std::polar(1.0, -s));
        }
        unwrap(delta);
        if (std::abs(delta[n - 1] + wrap_pi(delta[0] - delta[n - 1]) - delta[0]) > 1e-9)
            throw NotStarShaped("argument does not return after one turn");
    }
    double delta_ref(double s) const {
        double t = s / (2 * kPi) * n, fl = std::floor(t), fr = t - fl;
        long j = static_cast<long>(fl);
        int a = static_cast<int>(((j % n) + n) % n), b = (a + 1) % n;
        return (1 - fr) * delta[a] + fr * delta[b];
    }
    double theta(double s) const {
        double d = std::arg(g.eval(s) * std::polar(1.0, -s));
        double ref = delta_ref(s);
        return s + ref + wrap_pi(d - ref);
    }
    double dtheta(double s) const { return (dg.eval(s) / g.eval(s)).imag(); }
    // Solve theta(s) = target near s0.
    double solve(double target, double s0) const {
        double s = s0;
        for (int it = 0; it < 60; ++it) {
            double step = (theta(s) - target) / dtheta(s);
            s -= step;
            if (std::abs(step) < 1e-15 * (1 + std::abs(s))) break;
        }
        return s;
    }
};

// Harmonic conjugate on the uniform grid: e^{ik a} -> -i sign(k) e^{ik a}.
DVec conjugate(const DVec& L) {
    const int n = static_cast<int>(L.size());
    CVec X = fft(CVec(L.begin(), L.end()));
    for (int k = 0; k < n; ++k) {
        int kk = k <= n / 2 ? k : k - n;
        if (kk == 0 || 2 * k == n) X[k] = 0;
        else X[k] *= cplx(0, kk > 0 ? -1.0 : 1.0);
    }
    CVec y = ifft_raw(X);
    DVec out(n);
    for (int j = 0; j < n; ++j) out[j] = y[j].real() / n;
    return out;
}

} // namespace

TheodorsenResult theodorsen_solve(const CircleFunction& curve, const TheodorsenOptions& opt) {
    const int n = opt.n;
    Curve C(curve, n);
    // Star-shapedness and the contraction condition |d log R / d theta| < 1.
    for (int j = 0; j < 4 * n; ++j) {
        double s = 2 * kPi * j / (4 * n);
        cplx gv = C.g.eval(s);
        if (std::abs(gv) < 1e-14) throw NotStarShaped("curve passes through the origin");
        cplx r = C.dg.eval(s) / gv;
        if (r.imag() <= 0) throw NotStarShaped("argument not increasing along the curve");
        if (std::abs(r.real() / r.imag()) >= 1.0)
            throw NotStarShaped("|d log R / d theta| >= 1; Theodorsen iteration not contractive");
    }
    TheodorsenResult res;
    DVec s(n), L(n);
    for (int j = 0; j < n; ++j) {
        double a = 2 * kPi * j / n;
        s[j] = C.solve(a, a - C.delta_ref(a));
    }
    double prevChange = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int it = 1; it <= opt.maxIter; ++it) {
        for (int j = 0; j < n; ++j) L[j] = std::log(std::abs(C.g.eval(s[j])));
        DVec K = conjugate(L);
        double change = 0;
        for (int j = 0; j < n; ++j) {
            double a = 2 * kPi * j / n;
            double sn = C.solve(a + K[j], s[j]);
            change = std::max(change, std::abs(sn - s[j]));
            s[j] = sn;
        }
        res.iterations = it;
        res.lastChange = change;
        if (!std::isfinite(change)) throw IterationDiverged("non-finite update");
        if (change < opt.tol) break;
        growth = change > prevChange ? growth + 1 : 0;
        if (growth >= 5) throw IterationDiverged("update grew for 5 consecutive sweeps");
        prevChange = change;
        if (it == opt.maxIter)
            throw IterationDiverged("no convergence after " + std::to_string(opt.maxIter) + " sweeps");
    }
    res.s = s;

    // Trig interpolant of s(alpha) - alpha.
    DVec v(n);
    for (int j = 0; j < n; ++j) v[j] = s[j] - 2 * kPi * j / n;
    CircleFunction vh = periodic_part(v);
    auto s_of = [&](double a) { return a + real_eval(vh, a); };
    auto ds_of = [&](double a) { return 1.0 + real_deriv(vh, a); };

    if (opt.normalization == TheodorsenOptions::Normalization::triple) {
        const cplx p[3] = {-1.0, -I, 1.0};
        const double th[3] = {kPi, 1.5 * kPi, 0.0};
        cplx e[3];
        for (int k = 0; k < 3; ++k) {
            double sk = C.solve(th[k], th[k] - C.delta_ref(th[k]));
            if (std::abs(C.g.eval(sk) - p[k]) > 1e-8)
                throw AssumptionViolated("curve does not pass through the normalisation triple");
            double a = sk;
            for (int it = 0; it < 60; ++it) {
                double step = (s_of(a) - sk) / ds_of(a);
                a -= step;
                if (std::abs(step) < 1e-15) break;
            }
            e[k] = std::polar(1.0, a);
        }
        res.m = moebius_fixing_triple(p[0], p[1], p[2], e[0], e[1], e[2]);
    }
    CVec tr(n);
    for (int j = 0; j < n; ++j) {
        double b = 2 * kPi * j / n;
        double a = std::arg(res.m(std::polar(1.0, b)));
        tr[j] = C.g.eval(s_of(a));
    }
    res.trace = CircleFunction::from_samples(tr, (n - 1) / 2);
    // f0 is holomorphic in D0; negative modes are rounding noise and would blow up inside.
    for (int k = 1; k <= res.trace.N(); ++k) res.trace.set(-k, 0.0);
    return res;
}

CircleFunction riemann_map_theodorsen(const CircleFunction& curve, const TheodorsenOptions& opt) {
    return theodorsen_solve(curve, opt).trace;
}

// ==== Welding ====

std::string WeldingRecord::to_csv(int samples) const {
    const int n = samples > 0 ? samples : sigma.n();
    std::ostringstream os;
    os << "theta,f0_re,f0_im,finf_re,finf_im,sigma\r\n";
    char buf[256];
    for (int j = 0; j < n; ++j) {
        double t = 2 * kPi * j / n;
        cplx a = f0.eval(t), b = finf.eval(t);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\r\n", t, a.real(), a.imag(), b.real(),
                      b.imag(), sigma(t));
        os << buf;
    }
    return os.str();
}

nlohmann::ordered_json WeldingRecord::diagnostics() const {
    nlohmann::ordered_json j;
    j["samples"] = sigma.n();
    j["theodorsen_iterations"] = theodorsenIterations;
    j["composition_error"] = compositionError;
    j["triple_error"] = tripleError;
    j["sigma_sup_displacement"] = sigma.sup_distance_to_identity();
    auto M = hydrodynamicToTriple;
    j["moebius"] = {{M.a.real(), M.a.imag()}, {M.b.real(), M.b.imag()}, {M.c.real(), M.c.imag()},
                    {M.d.real(), M.d.imag()}};
    return j;
}

WeldingRecord welding_map(const BeltramiCoefficient& mu, const WeldingOptions& opt) {
    const int n = opt.n;
    WeldingRecord rec;
    NormalizedSolution sol = beltrami_solve_normalized(mu, opt.neumann);
    rec.hydrodynamicToTriple = sol.M;
    CVec fs(n);
    for (int j = 0; j < n; ++j) fs[j] = sol.M(sol.w.outside.eval_z(std::polar(1.0, 2 * kPi * j / n)));
    rec.finf = CircleFunction::from_samples(fs, (n - 1) / 2);

    TheodorsenOptions to;
    to.n = n;
    TheodorsenResult th = theodorsen_solve(rec.finf, to);
    rec.theodorsenIterations = th.iterations;
    rec.f0 = th.trace;

    // sigma_hat = s^{-1}: monotone cubic guess, then Newton on the trig interpolant.
    DVec v(n), xs, ys;
    for (int j = 0; j < n; ++j) v[j] = th.s[j] - 2 * kPi * j / n;
    CircleFunction vh = periodic_part(v);
    for (int j = -2; j < n + 2; ++j) {
        int jj = ((j % n) + n) % n;
        double shift = 2 * kPi * std::floor(double(j) / n);
        xs.push_back(th.s[jj] + shift);
        ys.push_back(2 * kPi * jj / n + shift);
    }
    MonotoneCubic guess(xs, ys);
    MoebiusTransform mi = th.m.inverse();
    DVec sig(n);
    for (int j = 0; j < n; ++j) {
        double x = 2 * kPi * j / n, a = guess(x);
        for (int it = 0; it < 30; ++it) {
            double step = (a + real_eval(vh, a) - x) / (1.0 + real_deriv(vh, a));
            a -= step;
            if (std::abs(step) < 1e-15) break;
        }
        sig[j] = std::arg(mi(std::polar(1.0, a)));
    }
    unwrap(sig);
    double shift = 2 * kPi * std::round(sig[0] / (2 * kPi));
    for (int j = 0; j < n; ++j) sig[j] -= shift + 2 * kPi * j / n;
    rec.sigma = DiffeoOfCircle(sig);
    rec.tripleError = rec.sigma.triple_error();
    for (int j = 0; j < n; ++j) {
        double x = 2 * kPi * j / n;
        rec.compositionError = std::max(rec.compositionError, std::abs(rec.f0.eval(rec.sigma(x)) - fs[j]));
    }
    if (rec.compositionError > opt.consistencyTol)
        throw WeldingInconsistent("f0(sigma) and f_inf disagree by " + std::to_string(rec.compositionError));
    return rec;
}

// ==== mu_from_phi ====

MuFromPhiResult mu_from_phi(const DiffeoOfCircle& phi, const MuFromPhiOptions& opt) {
    if (phi.triple_error() > 1e-9) throw AssumptionViolated("phi does not fix -1, -i, 1");
    const int nr = opt.nr, nt = opt.nt;
    MuFromPhiResult res;
    GridField kappa = ba_dilatation_disc(phi, nr, nt);
    res.supKappa = kappa.sup;
    if (kappa.sup >= 1.0) throw NonContractive("Beurling-Ahlfors dilatation reaches 1");

    // h = kappa (1 + T h) by the Neumann series on the grid.
    std::vector<cplx> term = kappa.v, h = kappa.v;
    int k = 1;
    for (;; ++k) {
        double mx = 0;
        for (auto c : term) mx = std::max(mx, std::abs(c));
        if (mx < opt.tol) break;
        if (k >= opt.maxIter) throw NoConvergence("grid Neumann series did not converge");
        std::vector<cplx> t = grid_beurling_T(term, nr, nt);
        for (size_t q = 0; q < t.size(); ++q) {
            term[q] = kappa.v[q] * t[q];
            h[q] += term[q];
        }
    }
    res.neumannTerms = k;

    // b_j = 2 int_0^1 h_{1-j}(r) r^j dr.
    int K = opt.order;
    const int J = K + 2;
    std::vector<CVec> modes(nr);
    for (int i = 0; i < nr; ++i) {
        CVec row(h.begin() + size_t(i) * nt, h.begin() + size_t(i + 1) * nt);
        modes[i] = fft(row);
    }
    res.laurent.assign(J, cplx(0));
    const double dr = 1.0 / nr;
    for (int j = 1; j <= J; ++j) {
        int idx = ((1 - j) % nt + nt) % nt;
        auto g = [&](int i) { return modes[i][idx] / double(nt) * std::pow((i + 0.5) * dr, j); };
        cplx acc = 0.25 * dr * g(0);
        for (int i = 1; i < nr; ++i) acc += 0.5 * dr * (g(i - 1) + g(i));
        double tail = 1.0 - (nr - 0.5) * dr;
        acc += 0.5 * tail * (g(nr - 1) + modes[nr - 1][idx] / double(nt));
        res.laurent[j - 1] = 2.0 * acc;
    }

    // G(z) = f(1/z) = 1/z + sum b_j z^j; S[G] = S[1/G], 1/G = z / (1 + sum b_j z^{j+1}).
    const int order = K + 3;
    PowerSeries D{0.0, CVec(order + 1, cplx(0))};
    D.c[0] = 1.0;
    for (int j = 1; j + 1 <= order; ++j) D.c[j + 1] = res.laurent[j - 1];
    PowerSeries Dinv = series_inv(D, order);
    PowerSeries H{0.0, CVec(order + 1, cplx(0))};
    for (int j = 0; j < order; ++j) H.c[j + 1] = Dinv.c[j];
    PowerSeries S = schwarzian(H, K);
    CVec g(K + 1);
    for (int j = 0; j <= K; ++j) g[j] = -0.5 * S.c[j];
    while (g.size() > 1 && std::abs(g.back()) < opt.pruneTol) g.pop_back();
    K = static_cast<int>(g.size()) - 1;
    res.mu = BeltramiCoefficient::from_g(g, K + 4);
    res.supMu = res.mu.supNorm;

    for (int i = 0; i < 64; ++i) {
        double r = (i + 0.5) / 64;
        for (int j = 0; j < 128; ++j) {
            cplx z = std::polar(r, 2 * kPi * j / 128), gz(0);
            for (int q = K; q >= 0; --q) gz = gz * z + g[q];
            res.gBound = std::max(res.gBound, std::abs(gz));
            // (1-|z|^2)^2 |S[f](1/zbar)| = 2 |z|^4 |mu(z)|.
            res.nehari = std::max(res.nehari, 2 * std::pow(r, 4) * std::abs(res.mu.eval(z)));
        }
    }
    if (res.supMu >= 1.0) throw AssumptionViolated("sup |mu_phi| >= 1");
    return res;
}

// ==== Ahlfors-Weill ====

namespace {

// Dormand-Prince 5(4) for y' = f(t, y) on [t0, t1], y in C^4.
using State = std::array<cplx, 4>;

template <class F>
State dopri(F&& f, double t0, double t1, State y, double tol) {
    static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static const double a21 = 1. / 5, a31 = 3. / 40, a32 = 9. / 40, a41 = 44. / 45, a42 = -56. / 15,
                        a43 = 32. / 9, a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                        a54 = -212. / 729, a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                        a64 = 49. / 176, a65 = -5103. / 18656, a71 = 35. / 384, a73 = 500. / 1113,
                        a74 = 125. / 192, a75 = -2187. / 6784, a76 = 11. / 84;
    static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                        e6 = 22. / 525, e7 = -1. / 40;
    double t = t0, h = std::min(0.05, t1 - t0);
    auto axpy = [](const State& y, std::initializer_list<std::pair<double, const State*>> terms, double h) {
        State r = y;
        for (auto& [c, k] : terms)
            for (int i = 0; i < 4; ++i) r[i] += h * c * (*k)[i];
        return r;
    };
    int steps = 0;
    while (t < t1) {
        if (++steps > 100000) throw StepRejected("Ahlfors-Weill ODE: step budget exhausted");
        h = std::min(h, t1 - t);
        State k1 = f(t, y);
        State k2 = f(t + c2 * h, axpy(y, {{a21, &k1}}, h));
        State k3 = f(t + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
        State k4 = f(t + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
        State k5 = f(t + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
        State k6 = f(t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
        State y5 = axpy(y, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}}, h);
        State k7 = f(t + h, y5);
        double err = 0;
        for (int i = 0; i < 4; ++i) {
            cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
        }
        double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= fac;
    }
    return y;
}

} // namespace

AhlforsWeillMap::AhlforsWeillMap(const CircleFunction& varphi, const AhlforsWeillOptions& opt) : opt_(opt) {
    for (int k = 1; k <= varphi.N(); ++k)
        if (std::abs(varphi.coeff(k)) > 0) throw BoundViolated("phi must be holomorphic at infinity");
    for (int m = 0; m < 4 && m <= varphi.N(); ++m)
        if (std::abs(varphi.coeff(-m)) > 0) throw BoundViolated("(|z|^2-1)^2 |phi| unbounded unless phi = O(z^-4)");
    // psi(w) = w^{-4} phi(1/w) = sum_m c_m w^{m-4}.
    psi_.assign(std::max(1, varphi.N() - 3), cplx(0));
    for (int m = 4; m <= varphi.N(); ++m) psi_[m - 4] = varphi.coeff(-m);
    auto psi = [&](cplx w) {
        cplx s(0);
        for (size_t k = psi_.size(); k-- > 0;) s = s * w + psi_[k];
        return s;
    };
    // On D_inf, (1-|z|^2)^2 |phi(z)| = (1-|w|^2)^2 |psi(w)| with w = 1/z.
    for (int i = 0; i < 64; ++i) {
        double r = double(i) / 64;
        for (int j = 0; j < 128; ++j) {
            cplx w = std::polar(r, 2 * kPi * j / 128);
            bound_ = std::max(bound_, (1 - r * r) * (1 - r * r) * std::abs(psi(w)));
        }
    }
    if (bound_ >= 2.0) throw BoundViolated("sup (1-|z|^2)^2 |phi| = " + std::to_string(bound_) + " >= 2");
    // Y'' = -psi Y / 2 as power series at w = 0.
    const int order = 80;
    Y1_.assign(order + 1, cplx(0));
    Y2_.assign(order + 1, cplx(0));
    Y1_[0] = 1.0;
    Y2_[1] = 1.0;
    for (int n = 0; n + 2 <= order; ++n) {
        cplx s1(0), s2(0);
        for (int k = 0; k <= n && k < int(psi_.size()); ++k) {
            s1 += psi_[k] * Y1_[n - k];
            s2 += psi_[k] * Y2_[n - k];
        }
        Y1_[n + 2] = -0.5 * s1 / double((n + 2) * (n + 1));
        Y2_[n + 2] = -0.5 * s2 / double((n + 2) * (n + 1));
    }
}

cplx AhlforsWeillMap::varphi(cplx z) const {
    cplx w = 1.0 / z, s(0);
    for (size_t k = psi_.size(); k-- > 0;) s = s * w + psi_[k];
    return s * std::pow(w, 4);
}

void AhlforsWeillMap::solve(cplx w, cplx Y[2], cplx dY[2]) const {
    auto series = [](const CVec& c, cplx x, cplx& v, cplx& d) {
        v = 0;
        d = 0;
        for (size_t k = c.size(); k-- > 0;) {
            d = d * x + v;
            v = v * x + c[k];
        }
    };
    double r = std::abs(w);
    if (r <= opt_.seedRadius) {
        series(Y1_, w, Y[0], dY[0]);
        series(Y2_, w, Y[1], dY[1]);
    } else {
        cplx e = w / r, w0 = opt_.seedRadius * e;
        State y;
        series(Y1_, w0, y[0], y[1]);
        series(Y2_, w0, y[2], y[3]);
        auto rhs = [&](double t, const State& s) {
            cplx x = t * e, p(0);
            for (size_t k = psi_.size(); k-- > 0;) p = p * x + psi_[k];
            return State{s[1] * e, -0.5 * p * s[0] * e, s[3] * e, -0.5 * p * s[2] * e};
        };
        y = dopri(rhs, opt_.seedRadius, r, y, opt_.tol);
        Y[0] = y[0];
        dY[0] = y[1];
        Y[1] = y[2];
        dY[1] = y[3];
    }
    double drift = std::abs(Y[0] * dY[1] - dY[0] * Y[1] - 1.0);
    wronskianDrift_ = std::max(wronskianDrift_, drift);
    if (drift > 1e-6) throw WronskianCollapse("Wronskian drifted by " + std::to_string(drift));
}

cplx AhlforsWeillMap::operator()(cplx z) const {
    cplx Y[2], dY[2];
    double r2 = std::norm(z);
    if (r2 >= 1.0) {
        solve(1.0 / z, Y, dY);
        return Y[0] / Y[1];
    }
    // Reflection z* = 1/zbar, i.e. w = zbar; y(z*) + (z - z*) y'(z*) = zbar^{-1} (z Y + (1-|z|^2) Y').
    solve(std::conj(z), Y, dY);
    return (z * Y[0] + (1 - r2) * dY[0]) / (z * Y[1] + (1 - r2) * dY[1]);
}

cplx schwarzian_cauchy(const std::function<cplx(cplx)>& f, cplx z, double rho, int m) {
    cplx c[4] = {0, 0, 0, 0};
    for (int j = 0; j < m; ++j) {
        cplx e = std::polar(1.0, 2 * kPi * j / m);
        cplx v = f(z + rho * e);
        for (int k = 1; k <= 3; ++k) c[k] += v * std::pow(std::conj(e), k);
    }
    cplx f1 = c[1] / (m * rho), f2 = 2.0 * c[2] / (m * rho * rho), f3 = 6.0 * c[3] / (m * rho * rho * rho);
    return schwarzian_value(f1, f2, f3);
}

AhlforsWeillResult ahlfors_weill_map(const CircleFunction& varphi, const AhlforsWeillOptions& opt) {
    AhlforsWeillResult res{AhlforsWeillMap(varphi, opt), {}, 0, 0};
    const AhlforsWeillMap& F = res.F;
    auto f = [&F](cplx z) { return F(z); };
    res.grid = PlanarMap::sample_polar(f, 48, 96, 0.0, 2.0);
    const double golden = kPi * (3 - std::sqrt(5.0));
    for (int k = 0; k < opt.checkSamples; ++k) {
        double r = 1.3 + 1.7 * (k + 0.5) / opt.checkSamples;
        cplx z = std::polar(r, golden * k);
        res.schwarzianError = std::max(res.schwarzianError, std::abs(schwarzian_cauchy(f, z) - F.varphi(z)));
    }
    for (int k = 0; k < 50; ++k) {
        double r = 0.1 + 0.8 * (k + 0.5) / 50;
        cplx z = std::polar(r, golden * k);
        cplx zb = std::conj(z);
        cplx expect = -0.5 * std::pow(1 - r * r, 2) / std::pow(zb, 4) * F.varphi(1.0 / zb);
        res.dilatationError = std::max(res.dilatationError, std::abs(dilatation_at(f, z) - expect));
    }
    return res;
}

} // namespace uteich
