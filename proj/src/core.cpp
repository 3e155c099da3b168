#include "uteich/core.hpp"

#include <algorithm>
#include <cmath>

namespace uteich {

// ==== CircleFunction ====

CircleFunction::CircleFunction(int N, CVec coeffs) : N_(N), a_(std::move(coeffs)) {
    if (static_cast<int>(a_.size()) != 2 * N + 1)
        throw std::invalid_argument("CircleFunction: coefficient count must be 2N+1");
}

CircleFunction CircleFunction::from_samples(const CVec& samples, int N) {
    return CircleFunction(N, samples_to_coeffs(samples, N));
}

CircleFunction CircleFunction::monomial(int k, cplx c) {
    CircleFunction f(std::abs(k));
    f.set(k, c);
    return f;
}

void CircleFunction::set(int k, cplx v) {
    if (k < -N_ || k > N_) throw std::out_of_range("CircleFunction::set: mode outside truncation");
    a_[k + N_] = v;
}

cplx CircleFunction::eval(double x) const { return eval_z(std::polar(1.0, x)); }

cplx CircleFunction::eval_z(cplx z) const {
    // Horner on the positive and negative halves separately.
    cplx pos(0), neg(0);
    for (int k = N_; k >= 0; --k) pos = pos * z + a_[k + N_];
    cplx w = 1.0 / z;
    for (int k = N_; k >= 1; --k) neg = (neg + a_[-k + N_]) * w;
    return pos + neg;
}

CVec CircleFunction::samples(int n) const { return coeffs_to_samples(a_, n); }

bool CircleFunction::in_hplus(double tol) const {
    for (int k = -N_; k < 0; ++k)
        if (std::abs(coeff(k)) > tol) return false;
    return true;
}

bool CircleFunction::in_hminus(double tol) const {
    for (int k = 0; k <= N_; ++k)
        if (std::abs(coeff(k)) > tol) return false;
    return true;
}

bool CircleFunction::is_real(double tol) const {
    for (int k = 0; k <= N_; ++k)
        if (std::abs(coeff(-k) - std::conj(coeff(k))) > tol) return false;
    return true;
}

double CircleFunction::l2_norm() const {
    double s = 0;
    for (const auto& c : a_) s += std::norm(c);
    return std::sqrt(s);
}

CircleFunction CircleFunction::d_dx() const {
    CircleFunction r(N_);
    for (int k = -N_; k <= N_; ++k) r.a_[k + N_] = cplx(0, k) * a_[k + N_];
    return r;
}

CircleFunction CircleFunction::d_dz() const {
    CircleFunction r(N_ + 1);
    for (int k = -N_; k <= N_; ++k)
        if (k != 0) r.set(k - 1, double(k) * a_[k + N_]);
    return r;
}

CircleFunction CircleFunction::resized(int N) const {
    CircleFunction r(N);
    for (int k = -std::min(N, N_); k <= std::min(N, N_); ++k) r.set(k, coeff(k));
    return r;
}

CircleFunction CircleFunction::conj_reflect() const {
    CircleFunction r(N_);
    for (int k = -N_; k <= N_; ++k) r.set(k, std::conj(coeff(-k)));
    return r;
}

CircleFunction CircleFunction::operator+(const CircleFunction& o) const {
    CircleFunction r(std::max(N_, o.N_));
    for (int k = -r.N_; k <= r.N_; ++k) r.set(k, coeff(k) + o.coeff(k));
    return r;
}

CircleFunction CircleFunction::operator-(const CircleFunction& o) const { return *this + o * cplx(-1); }

CircleFunction CircleFunction::operator*(cplx s) const {
    CircleFunction r = *this;
    for (auto& c : r.a_) c *= s;
    return r;
}

CircleFunction CircleFunction::mul(const CircleFunction& o) const {
    CircleFunction r(N_ + o.N_);
    for (int i = -N_; i <= N_; ++i) {
        cplx ai = coeff(i);
        if (ai == cplx(0)) continue;
        for (int j = -o.N_; j <= o.N_; ++j) r.a_[i + j + r.N_] += ai * o.coeff(j);
    }
    return r;
}

nlohmann::ordered_json CircleFunction::to_json() const {
    nlohmann::ordered_json j;
    j["N"] = N_;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : a_) arr.push_back({c.real(), c.imag()});
    j["coeffs"] = arr;
    return j;
}

CircleFunction CircleFunction::from_json(const nlohmann::json& j) {
    int N = j.at("N").get<int>();
    const auto& arr = j.at("coeffs");
    if (static_cast<int>(arr.size()) != 2 * N + 1)
        throw std::invalid_argument("CircleFunction JSON: expected 2N+1 coefficients");
    CVec a;
    for (const auto& p : arr) a.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return CircleFunction(N, std::move(a));
}

// ==== TangentVector / QuadraticDifferential ====

static double ek_scale(int k) { return std::sqrt(double(k) * (double(k) * k - 1.0)); }

cplx TangentVector::monomial_coeff(int k) const { return get(k) / ek_scale(k); }

TangentVector TangentVector::basis(int k, int K) {
    TangentVector v(K);
    v.set(k, 1.0);
    return v;
}

double TangentVector::l2() const {
    double s = 0;
    for (const auto& c : t) s += std::norm(c);
    return std::sqrt(s);
}

QuadraticDifferential QuadraticDifferential::to_dx2() const {
    if (form == Form::dx2) return *this;
    QuadraticDifferential r;
    r.form = Form::dx2;
    r.b = CircleFunction(b.N() + 2);
    for (int k = -b.N(); k <= b.N(); ++k) r.b.set(k + 2, -b.coeff(k));
    return r;
}

QuadraticDifferential QuadraticDifferential::to_dz2() const {
    if (form == Form::dz2) return *this;
    QuadraticDifferential r;
    r.form = Form::dz2;
    r.b = CircleFunction(b.N() + 2);
    for (int k = -b.N(); k <= b.N(); ++k) r.b.set(k - 2, -b.coeff(k));
    return r;
}

// ==== Moebius ====

MoebiusTransform MoebiusTransform::make(cplx a, cplx b, cplx c, cplx d) {
    cplx det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw MoebiusDegenerate("zero determinant");
    cplx s = std::sqrt(det);
    return {a / s, b / s, c / s, d / s};
}

SpherePoint MoebiusTransform::apply(const SpherePoint& p) const {
    cplx num, den;
    if (p.inf) {
        num = a;
        den = c;
    } else {
        num = a * p.z + b;
        den = c * p.z + d;
    }
    if (std::abs(den) < 1e-300 * (1.0 + std::abs(num))) return SpherePoint::infinity();
    return SpherePoint(num / den);
}

MoebiusTransform MoebiusTransform::compose(const MoebiusTransform& m) const {
    return make(a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d);
}

MoebiusTransform MoebiusTransform::inverse() const { return make(d, -b, -c, a); }

namespace {

struct Hom {
    cplx x, y;  // [x : y]
};

Hom hom(const SpherePoint& p) { return p.inf ? Hom{1.0, 0.0} : Hom{p.z, 1.0}; }

bool same_point(const SpherePoint& p, const SpherePoint& q) {
    if (p.inf || q.inf) return p.inf && q.inf;
    return std::abs(p.z - q.z) < 1e-14 * (1.0 + std::abs(p.z));
}

// Sends 0 -> p1, 1 -> p2, infinity -> p3.
MoebiusTransform from_standard(const SpherePoint& p1, const SpherePoint& p2, const SpherePoint& p3) {
    if (same_point(p1, p2) || same_point(p2, p3) || same_point(p1, p3))
        throw DegenerateTriple("repeated point in triple");
    Hom v1 = hom(p1), v2 = hom(p2), v3 = hom(p3);
    // Solve l3 v3 + l1 v1 = v2.
    cplx det = v3.x * v1.y - v1.x * v3.y;
    cplx l3 = (v2.x * v1.y - v1.x * v2.y) / det;
    cplx l1 = (v3.x * v2.y - v2.x * v3.y) / det;
    return MoebiusTransform::make(l3 * v3.x, l1 * v1.x, l3 * v3.y, l1 * v1.y);
}

} // namespace

MoebiusTransform moebius_fixing_triple(const SpherePoint& p1, const SpherePoint& p2,
                                       const SpherePoint& p3, const SpherePoint& q1,
                                       const SpherePoint& q2, const SpherePoint& q3) {
    MoebiusTransform P = from_standard(p1, p2, p3);
    MoebiusTransform Q = from_standard(q1, q2, q3);
    return Q.compose(P.inverse());
}

// ==== Power series ====

cplx PowerSeries::eval(cplx z) const {
    cplx w = z - center, s(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * w + *it;
    return s;
}

PowerSeries PowerSeries::derivative() const {
    PowerSeries r{center, {}};
    for (size_t j = 1; j < c.size(); ++j) r.c.push_back(double(j) * c[j]);
    if (r.c.empty()) r.c.push_back(0.0);
    return r;
}

PowerSeries PowerSeries::recentred(cplx z0) const {
    // Repeated synthetic division (Taylor shift).
    CVec a = c;
    const int n = static_cast<int>(a.size());
    cplx h = z0 - center;
    for (int i = 0; i < n; ++i)
        for (int j = n - 2; j >= i; --j) a[j] += h * a[j + 1];
    return {z0, a};
}

PowerSeries series_mul(const PowerSeries& f, const PowerSeries& g, int order) {
    PowerSeries r{f.center, CVec(order + 1, cplx(0))};
    for (size_t i = 0; i < f.c.size() && int(i) <= order; ++i)
        for (size_t j = 0; j < g.c.size() && int(i + j) <= order; ++j) r.c[i + j] += f.c[i] * g.c[j];
    return r;
}

PowerSeries series_inv(const PowerSeries& f, int order) {
    if (f.c.empty() || std::abs(f.c[0]) < 1e-14) throw SingularDerivative("series not invertible");
    PowerSeries r{f.center, CVec(order + 1, cplx(0))};
    r.c[0] = 1.0 / f.c[0];
    for (int n = 1; n <= order; ++n) {
        cplx s(0);
        for (int j = 1; j <= n && j < int(f.c.size()); ++j) s += f.c[j] * r.c[n - j];
        r.c[n] = -s / f.c[0];
    }
    return r;
}

PowerSeries schwarzian(const PowerSeries& f, int order) {
    PowerSeries d1 = f.derivative();
    if (std::abs(d1.c[0]) < 1e-14) throw SingularDerivative("leading coefficient of f' vanishes");
    PowerSeries d2 = d1.derivative(), d3 = d2.derivative();
    PowerSeries inv = series_inv(d1, order);
    PowerSeries a = series_mul(d3, inv, order);
    PowerSeries b = series_mul(d2, inv, order);
    PowerSeries b2 = series_mul(b, b, order);
    PowerSeries s{f.center, CVec(order + 1)};
    for (int j = 0; j <= order; ++j) s.c[j] = a.c[j] - 1.5 * b2.c[j];
    return s;
}

// ==== Weil-Petersson ====

double wp_norm(const TangentVector& v) {
    CVec a(v.K() + 1, cplx(0));
    for (int k = 2; k <= v.K(); ++k) a[k] = v.monomial_coeff(k);
    return wp_norm_monomial(a);
}

double wp_norm_monomial(const CVec& a) {
    double s = 0;
    for (size_t n = 2; n < a.size(); ++n) s += double(n) * (double(n) * n - 1.0) * std::norm(a[n]);
    return std::sqrt(s);
}

QuadraticDifferential identify_tangent_cotangent(const TangentVector& v) {
    QuadraticDifferential q;
    q.form = QuadraticDifferential::Form::dz2;
    q.b = CircleFunction(std::max(v.K() - 2, 0));
    for (int k = 2; k <= v.K(); ++k) q.b.set(k - 2, v.get(k) * std::sqrt(2.0) * ek_scale(k));
    return q;
}

TangentVector identify_cotangent_tangent(const QuadraticDifferential& q0, int K, double tol) {
    QuadraticDifferential q = q0.to_dz2();
    TangentVector v(K);
    for (int j = -q.b.N(); j <= q.b.N(); ++j) {
        cplx c = q.b.coeff(j);
        int k = j + 2;
        if (k >= 2 && k <= K) {
            v.set(k, c / (std::sqrt(2.0) * ek_scale(k)));
        } else if (std::abs(c) > tol) {
            throw InverseUndefined("mode z^" + std::to_string(j) + " outside the image of e_2..e_K");
        }
    }
    return v;
}

cplx wp_inner_quadratic(const PowerSeries& f1, const PowerSeries& f2) {
    if (f1.center != cplx(0) || f2.center != cplx(0))
        throw std::invalid_argument("wp_inner_quadratic: series must be centred at 0");
    cplx s(0);
    for (size_t n = 0; n < std::min(f1.c.size(), f2.c.size()); ++n)
        s += f1.c[n] * std::conj(f2.c[n]) * radial_closed_2(static_cast<int>(n));
    return s;
}

// ==== Quadrature ====

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 1; j <= n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1, p1 = 0;
        for (int j = 1; j <= n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        x[n - 1 - i] = 0.5 * (b - a) * z + 0.5 * (b + a);
        w[n - 1 - i] = (b - a) / ((1.0 - z * z) * dp * dp);
    }
}

static double gl_radial(int p, int q) {
    // int_0^1 (1-r^2)^p r^q dr
    static thread_local std::vector<double> x, w;
    if (x.empty()) gauss_legendre(40, 0.0, 1.0, x, w);
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(1.0 - x[i] * x[i], p) * std::pow(x[i], q);
    return s;
}

double radial_moment_2(int n) { return gl_radial(2, 2 * n + 1); }
double radial_moment_3(int n) { return gl_radial(3, 2 * n - 1); }
double radial_closed_2(int n) { return 1.0 / ((n + 1.0) * (n + 2.0) * (n + 3.0)); }
double radial_closed_3(int n) { return 3.0 / (double(n) * (n + 1.0) * (n + 2.0) * (n + 3.0)); }

// ==== Quasisymmetry ====

double quasisymmetry_constant(const std::function<double(double)>& h, const QuasisymmetryOptions& opt) {
    double best = 1.0;
    const double lr = std::log(opt.tmax / opt.tmin);
    for (int i = 0; i < opt.nx; ++i) {
        double x = 2.0 * kPi * i / opt.nx;
        double hx = h(x);
        for (int j = 0; j < opt.nt; ++j) {
            double t = opt.tmin * std::exp(lr * j / std::max(opt.nt - 1, 1));
            double up = h(x + t) - hx, down = hx - h(x - t);
            if (up <= 0 || down <= 0) throw NonMonotone("non-positive increment at x=" + std::to_string(x));
            double r = up / down;
            best = std::max(best, std::max(r, 1.0 / r));
        }
    }
    return best;
}

} // namespace uteich
