#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "json.hpp"
#include "uteich/errors.hpp"
#include "uteich/fft.hpp"

namespace uteich {

inline constexpr double kPi = 3.14159265358979323846;

/// Truncated Fourier/Laurent series sum_{k=-N}^{N} a_k z^k, z = e^{ix} on the circle.
class CircleFunction {
public:
    CircleFunction() : N_(0), a_(1, cplx(0)) {}
    explicit CircleFunction(int N) : N_(N), a_(2 * N + 1, cplx(0)) {}
    CircleFunction(int N, CVec coeffs);

    /// Coefficients from n >= 2N+1 uniform samples on [0, 2pi).
    static CircleFunction from_samples(const CVec& samples, int N);
    static CircleFunction monomial(int k, cplx c = 1.0);

    int N() const { return N_; }
    const CVec& coeffs() const { return a_; }
    cplx coeff(int k) const { return (k < -N_ || k > N_) ? cplx(0) : a_[k + N_]; }
    void set(int k, cplx v);

    cplx eval(double x) const;
    /// Laurent evaluation off the circle.
    cplx eval_z(cplx z) const;
    CVec samples(int n) const;

    bool in_hplus(double tol = 1e-12) const;
    bool in_hminus(double tol = 1e-12) const;
    bool is_real(double tol = 1e-12) const;
    /// L2 norm for the normalised measure dx/2pi (Parseval).
    double l2_norm() const;

    CircleFunction d_dx() const;
    /// d/dz of the Laurent series (k a_k z^{k-1}).
    CircleFunction d_dz() const;
    CircleFunction resized(int N) const;
    CircleFunction conj_reflect() const;  // b_k = conj(a_{-k}), i.e. the pointwise conjugate

    CircleFunction operator+(const CircleFunction& o) const;
    CircleFunction operator-(const CircleFunction& o) const;
    CircleFunction operator*(cplx s) const;
    /// Exact Laurent product (truncation grows to N1 + N2).
    CircleFunction mul(const CircleFunction& o) const;

    nlohmann::ordered_json to_json() const;
    static CircleFunction from_json(const nlohmann::json& j);

private:
    int N_;
    CVec a_;
};

/// f = sum_{k=2}^{K} t_k e_k with e_k = z^k / sqrt(k(k^2-1)).
struct TangentVector {
    CVec t;  // t[k-2]
    TangentVector() = default;
    explicit TangentVector(int K) : t(K >= 2 ? K - 1 : 0, cplx(0)) {}
    int K() const { return static_cast<int>(t.size()) + 1; }
    cplx get(int k) const { return (k < 2 || k > K()) ? cplx(0) : t[k - 2]; }
    void set(int k, cplx v) { t.at(k - 2) = v; }
    /// Monomial coefficient a_k of z^k.
    cplx monomial_coeff(int k) const;
    static TangentVector basis(int k, int K);
    double l2() const;
};

/// b dz^2 (holomorphic convention) or b(x) dx^2 on the circle.
struct QuadraticDifferential {
    enum class Form { dz2, dx2 };
    CircleFunction b;
    Form form = Form::dz2;
    /// b(z)dz^2 = -z^2 b(z) dx^2 at z = e^{ix}.
    QuadraticDifferential to_dx2() const;
    QuadraticDifferential to_dz2() const;
};

/// Point of the Riemann sphere.
struct SpherePoint {
    cplx z{0.0};
    bool inf = false;
    SpherePoint() = default;
    SpherePoint(cplx w) : z(w) {}
    static SpherePoint infinity() { SpherePoint p; p.inf = true; return p; }
};

/// (a z + b)/(c z + d), normalised to ad - bc = 1.
struct MoebiusTransform {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
    static MoebiusTransform make(cplx a, cplx b, cplx c, cplx d);
    cplx operator()(cplx z) const { return (a * z + b) / (c * z + d); }
    SpherePoint apply(const SpherePoint& p) const;
    cplx derivative(cplx z) const { cplx den = c * z + d; return 1.0 / (den * den); }
    MoebiusTransform compose(const MoebiusTransform& inner) const;  // this o inner
    MoebiusTransform inverse() const;
    cplx det() const { return a * d - b * c; }
};

MoebiusTransform moebius_fixing_triple(const SpherePoint& p1, const SpherePoint& p2,
                                       const SpherePoint& p3, const SpherePoint& q1,
                                       const SpherePoint& q2, const SpherePoint& q3);

/// Power series sum_j c_j (z - center)^j.
struct PowerSeries {
    cplx center{0.0};
    CVec c;
    cplx eval(cplx z) const;
    PowerSeries derivative() const;
    /// Re-expansion of a polynomial about a new centre (exact for finite series).
    PowerSeries recentred(cplx z0) const;
};

PowerSeries series_mul(const PowerSeries& f, const PowerSeries& g, int order);
PowerSeries series_inv(const PowerSeries& f, int order);

/// Series of S(f) = f'''/f' - 3/2 (f''/f')^2 about f.center, through (z-c)^order.
PowerSeries schwarzian(const PowerSeries& f, int order);
/// Pointwise value from the first three derivatives.
inline cplx schwarzian_value(cplx f1, cplx f2, cplx f3) {
    cplx r = f2 / f1;
    return f3 / f1 - 1.5 * r * r;
}

/// sqrt(sum n(n^2-1)|a_n|^2); on e_k coordinates this is the l2 norm of t.
double wp_norm(const TangentVector& v);
double wp_norm_monomial(const CVec& a);  // a[n] multiplies z^n

/// The identification A: e_k -> sqrt(2k(k^2-1)) z^{k-2} dz^2.
QuadraticDifferential identify_tangent_cotangent(const TangentVector& v);
TangentVector identify_cotangent_tangent(const QuadraticDifferential& q, int K, double tol = 1e-12);

/// (1/2pi) int_D (1-|z|^2)^2 f1 conj(f2) dA by the exact radial integrals.
cplx wp_inner_quadratic(const PowerSeries& f1, const PowerSeries& f2);

/// wp_inner_quadratic(Av, Av) / wp_norm(v)^2; fixed from e_2 and the same for every e_k.
inline constexpr double kWpPairingConstant = 2.0;

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

/// int_0^1 (1-r^2)^2 r^{2n+1} dr and int_0^1 (1-r^2)^3 r^{2n-1} dr by Gauss-Legendre (exact on polynomials).
double radial_moment_2(int n);
double radial_moment_3(int n);
/// Closed forms for the two integrals above.
double radial_closed_2(int n);
double radial_closed_3(int n);

struct QuasisymmetryOptions {
    int nx = 256;
    int nt = 64;
    double tmin = 1e-3;
    double tmax = kPi;
};
/// Grid maximum of max(r, 1/r), r = (h(x+t)-h(x))/(h(x)-h(x-t)); a lower bound for the supremum.
double quasisymmetry_constant(const std::function<double(double)>& h,
                              const QuasisymmetryOptions& opt = {});

} // namespace uteich
