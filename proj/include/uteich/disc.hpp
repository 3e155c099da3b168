#pragma once

#include <vector>

#include "uteich/core.hpp"

namespace uteich {

/// sum c_{mn} z^m zbar^n on the closed unit disc, zero outside; m + n <= D.
class MonomialField {
public:
    MonomialField() : MonomialField(32) {}
    explicit MonomialField(int D) : D_(D), c_((D + 1) * (D + 1), cplx(0)) {}

    int D() const { return D_; }
    cplx get(int m, int n) const {
        return (m < 0 || n < 0 || m + n > D_) ? cplx(0) : c_[m * (D_ + 1) + n];
    }
    /// Adds c to the (m, n) coefficient; DegreeOverflow beyond the cap.
    void add(int m, int n, cplx c);
    void set(int m, int n, cplx c);
    /// Largest m + n with a nonzero coefficient (-1 for the zero field).
    int degree() const;
    bool is_zero() const { return degree() < 0; }
    void prune(double tol = 1e-15);
    MonomialField with_cap(int D) const;

    cplx eval(cplx z) const;
    /// d/dz and d/dzbar inside the disc.
    MonomialField dz() const;
    MonomialField dzbar() const;

    MonomialField operator+(const MonomialField& o) const;
    MonomialField operator-(const MonomialField& o) const;
    MonomialField operator*(cplx s) const;
    MonomialField& operator+=(const MonomialField& o);
    MonomialField mul(const MonomialField& o) const;

    struct Term {
        int m, n;
        cplx c;
    };
    std::vector<Term> terms() const;

    nlohmann::ordered_json to_json() const;
    static MonomialField from_json(const nlohmann::json& j);

private:
    int D_;
    CVec c_;
};

/// Inside: a MonomialField on D0; outside: a Laurent polynomial on D_inf.
struct PiecewiseField {
    MonomialField inside;
    CircleFunction outside;
    cplx eval(cplx z) const { return std::abs(z) <= 1.0 ? inside.eval(z) : outside.eval_z(z); }
    /// Inside part on the circle via zbar -> 1/z.
    CircleFunction trace_inside() const;
    CircleFunction trace_outside() const { return outside; }
};

/// mu = (1-|z|^2)^2 g(zbar) with g a polynomial, or a general field.
struct BeltramiCoefficient {
    MonomialField field;
    CVec g;                  // g(w) = sum g[k] w^k, empty for a general field
    double supNorm = 0.0;

    static BeltramiCoefficient zero(int D = 32);
    static BeltramiCoefficient from_g(const CVec& g, int D = 32);
    /// g(w) = sum_k t_k w^{k-2} / sqrt(k(k^2-1)).
    static BeltramiCoefficient from_tangent(const TangentVector& t, int D = 32);
    static BeltramiCoefficient from_field(const MonomialField& f);
    cplx eval(cplx z) const { return std::abs(z) < 1.0 ? field.eval(z) : cplx(0); }
};

/// Grid estimate of sup |f| on the disc (polar nr x nt, includes r = 0).
double sup_norm_disc(const MonomialField& f, int nr = 96, int nt = 192);

/// Exact P of a disc-supported field. The output inside cap is D+1 (P raises degree by one).
PiecewiseField cauchy_transform_P(const MonomialField& h);
/// Exact T = dP; inside degree is preserved.
PiecewiseField beurling_transform_T(const MonomialField& h);

/// Exact L2(D0) norm.
double l2_norm_disc(const MonomialField& h);
/// L2 norm over the plane of a piecewise field (infinite if the outside part is not square integrable).
double l2_norm_plane(const PiecewiseField& f);

MonomialField mu_multiply(const BeltramiCoefficient& mu, const MonomialField& h);

struct NeumannOptions {
    double tol = 1e-12;
    int maxIter = 200;
};

struct NeumannResult {
    MonomialField sum;
    std::vector<double> termNorms;
};

/// mu sum_{k>=0} (T mu)^k (n z^{n-1}) with per-term L2 monitoring.
NeumannResult neumann_series_detail(const BeltramiCoefficient& mu, int n, const NeumannOptions& opt = {});
MonomialField neumann_series(const BeltramiCoefficient& mu, int n, double tol = 1e-12, int maxIter = 200);

struct WSolution {
    PiecewiseField w;
    double residualL2 = 0;      // exact ||dbar w - mu dw||_{L2(D0)}
    double boundaryMean = 0;    // |(1/2pi) int w(e^{ix}) dx|
    std::vector<double> termNorms;
};

/// w = z^n + P(neumann_series(mu, n)).
WSolution solution_w_n(const BeltramiCoefficient& mu, int n, const NeumannOptions& opt = {});
/// Boundary values of w^(n) - z^n; lies in H_-.
CircleFunction boundary_v_n(const BeltramiCoefficient& mu, int n, const NeumannOptions& opt = {});

/// Max of |dbar w - mu dw| over interior polar samples (r < 1).
double beltrami_residual_grid(const BeltramiCoefficient& mu, const PiecewiseField& w, int nr = 64,
                              int nt = 128);

struct QuadratureOptions {
    int nr = 400;
    int nt = 400;
};
/// -(1/pi) int_D h(z)/(z - zeta) dA by tensor quadrature (polar about zeta when zeta is inside).
cplx quadrature_oracle_P(const MonomialField& h, cplx zeta, const QuadratureOptions& opt = {});
/// Principal value -(1/pi) pv int_D h(z)/(z - zeta)^2 dA, same scheme.
cplx quadrature_oracle_T(const MonomialField& h, cplx zeta, const QuadratureOptions& opt = {});

} // namespace uteich
