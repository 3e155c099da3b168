#pragma once

#include <functional>
#include <string>
#include <vector>

#include "uteich/disc.hpp"

namespace uteich {

using DVec = std::vector<double>;

/// Orientation-preserving circle diffeomorphism e^{ix} -> e^{i psi(x)}, stored as the
/// lift psi(x) = x + u(x) with u periodic and band limited.
class DiffeoOfCircle {
public:
    DiffeoOfCircle() : DiffeoOfCircle(DVec(8, 0.0)) {}
    /// u(x_j) = psi(x_j) - x_j at x_j = 2 pi j / n; the lift must be strictly increasing.
    explicit DiffeoOfCircle(const DVec& uSamples);
    static DiffeoOfCircle identity(int n = 256) { return DiffeoOfCircle(DVec(n, 0.0)); }
    static DiffeoOfCircle from_lift(const std::function<double(double)>& psi, int n = 256);

    int n() const { return static_cast<int>(u_.size()); }
    double x(int j) const { return 2.0 * 3.14159265358979323846 * j / n(); }
    /// psi(x_j).
    double lift_sample(int j) const { return x(j) + u_[j]; }
    DVec lift_samples() const;
    /// Fourier coefficients of psi - x.
    const CircleFunction& displacement() const { return uhat_; }
    bool orientation_preserving() const { return true; }

    double operator()(double x) const;
    double derivative(double x) const;
    /// Lift of the inverse, sampled on the same grid (Newton on the interpolant).
    DiffeoOfCircle inverse() const;
    /// (*this) o inner, sampled on the grid of *this.
    DiffeoOfCircle compose(const DiffeoOfCircle& inner) const;
    /// m o psi with m the disc automorphism fixing -1, -i, 1 after psi.
    DiffeoOfCircle normalized() const;
    MoebiusTransform normalizer() const;
    /// Max distance of psi(pi), psi(3pi/2), psi(0) from pi, 3pi/2, 0.
    double triple_error() const;
    double sup_distance_to_identity() const;
    double quasisymmetry() const;

private:
    DVec u_;
    CircleFunction uhat_;
};

/// Samples of a map on a structured grid.
struct PlanarMap {
    enum class Grid { cartesian, polar };
    Grid grid = Grid::cartesian;
    int n1 = 0, n2 = 0;      // cartesian: (x, y); polar: (r, theta), theta periodic
    double a0 = 0, da = 1;   // first coordinate: a0 + i * da
    double b0 = 0, db = 1;   // second coordinate: b0 + j * db
    std::vector<cplx> w;     // w[i * n2 + j]

    cplx point(int i, int j) const;
    cplx& at(int i, int j) { return w[i * n2 + j]; }
    cplx at(int i, int j) const { return w[i * n2 + j]; }
    static PlanarMap sample_polar(const std::function<cplx(cplx)>& f, int nr, int nt, double r0, double r1);
    static PlanarMap sample_cartesian(const std::function<cplx(cplx)>& f, int nx, int ny, double x0, double x1,
                                      double y0, double y1);
    /// Jacobian |dF|^2 - |dbarF|^2 > 0 at all interior nodes.
    bool orientation_preserving() const;
};

/// Grid field on the interior nodes of a PlanarMap.
struct GridField {
    int n1 = 0, n2 = 0;
    std::vector<cplx> v;     // NaN on nodes without a centred stencil
    double sup = 0;
    cplx at(int i, int j) const { return v[i * n2 + j]; }
};

struct BAGrid {
    double x0 = -kPi, x1 = kPi;
    int nx = 129;
    double y0 = 0.0, y1 = 2.0;
    int ny = 65;
    int quadNodes = 48;
};
/// f(x+iy) = 1/2 int_0^1 (h(x+ty)+h(x-ty)) dt + i int_0^1 (h(x+ty)-h(x-ty)) dt on a
/// cartesian grid of the upper half plane.
PlanarMap beurling_ahlfors_extend(const std::function<double(double)>& h, const BAGrid& grid = {});

/// dbar F / dF by centred differences.
GridField complex_dilatation(const PlanarMap& F);
/// Pointwise dilatation by centred differences with step h.
cplx dilatation_at(const std::function<cplx(cplx)>& F, cplx z, double h = 1e-4);

/// Disc version of the Beurling-Ahlfors extension of a circle diffeomorphism, pushed
/// through z = e^{i(x+iy)}; returns its complex dilatation on a polar grid with
/// radii (i + 1/2)/nr and angles 2 pi j / nt.
GridField ba_dilatation_disc(const DiffeoOfCircle& phi, int nr, int nt);

struct NormalizedSolution {
    PiecewiseField w;          // z + P(...) in the hydrodynamic normalisation
    MoebiusTransform M;        // post-composition fixing -1, -i, 1
    double residual = 0;       // grid max of |dbar omega - mu d omega| on interior samples
    double tripleError = 0;
    cplx operator()(cplx z) const { return M(w.eval(z)); }
    PlanarMap sample(int nr = 64, int nt = 128, double rmax = 2.0) const;
};
NormalizedSolution beltrami_solve_normalized(const BeltramiCoefficient& mu, const NeumannOptions& opt = {});

struct TheodorsenOptions {
    enum class Normalization { origin, triple };
    int n = 512;
    double tol = 1e-13;
    int maxIter = 200;
    Normalization normalization = Normalization::triple;
};
struct TheodorsenResult {
    DVec s;                  // curve parameter s(alpha_j), alpha_j = 2 pi j / n, origin-normalised map
    MoebiusTransform m;      // disc automorphism: f0 = fhat o m
    CircleFunction trace;    // f0(e^{i beta})
    int iterations = 0;
    double lastChange = 0;
};
/// Conformal map of D0 onto the interior of the star-shaped curve gamma(s) = sum a_k e^{iks}.
TheodorsenResult theodorsen_solve(const CircleFunction& curve, const TheodorsenOptions& opt = {});
CircleFunction riemann_map_theodorsen(const CircleFunction& curve, const TheodorsenOptions& opt = {});

struct WeldingRecord {
    CircleFunction f0;       // boundary trace of f0
    CircleFunction finf;     // boundary trace of f_infinity
    DiffeoOfCircle sigma;    // f0^{-1} o f_infinity
    MoebiusTransform hydrodynamicToTriple;
    int theodorsenIterations = 0;
    double compositionError = 0;  // max |f0(sigma(x)) - finf(x)|
    double tripleError = 0;

    std::string to_csv(int samples = 0) const;
    nlohmann::ordered_json diagnostics() const;
};
struct WeldingOptions {
    int n = 512;
    NeumannOptions neumann;
    double consistencyTol = 1e-8;
};
WeldingRecord welding_map(const BeltramiCoefficient& mu, const WeldingOptions& opt = {});

struct MuFromPhiOptions {
    int nr = 256;
    int nt = 256;
    int order = 32;          // degree of g kept
    double pruneTol = 1e-12; // trailing |g_k| below this are dropped, keeping the Neumann degree small
    double tol = 1e-13;
    int maxIter = 200;
};
struct MuFromPhiResult {
    BeltramiCoefficient mu;  // (1-|z|^2)^2 g(zbar), g = -1/2 S[z -> f_inf(1/z)]
    CVec laurent;            // f_inf(z) = z + sum_j laurent[j-1] z^{-j} before normalisation
    double supKappa = 0;     // sup of the Beurling-Ahlfors dilatation
    double supMu = 0;
    double gBound = 0;       // sup |g| on the disc samples
    double nehari = 0;       // sup (1-|z|^2)^2 |S[f_inf](1/zbar)|
    int neumannTerms = 0;
};
MuFromPhiResult mu_from_phi(const DiffeoOfCircle& phi, const MuFromPhiOptions& opt = {});

/// Grid Beurling transform on the polar grid of ba_dilatation_disc (exposed for tests).
std::vector<cplx> grid_beurling_T(const std::vector<cplx>& h, int nr, int nt);

struct AhlforsWeillOptions {
    double seedRadius = 0.2;  // in w = 1/z
    double tol = 1e-10;
    int checkSamples = 100;
};
/// F built from two solutions of y'' + phi y / 2 = 0 on D_inf; phi(z) = sum_m c_m z^{-m}.
class AhlforsWeillMap {
public:
    AhlforsWeillMap(const CircleFunction& varphi, const AhlforsWeillOptions& opt = {});
    cplx operator()(cplx z) const;
    cplx varphi(cplx z) const;
    /// Y1, Y2 and derivatives at w, with y_k(z) = z Y_k(1/z).
    void solve(cplx w, cplx Y[2], cplx dY[2]) const;
    double wronskian_drift() const { return wronskianDrift_; }
    double bound() const { return bound_; }

private:
    CVec psi_;               // psi(w) = w^{-4} phi(1/w) = sum psi_[k] w^k
    AhlforsWeillOptions opt_;
    CVec Y1_, Y2_;           // series at w = 0
    double bound_ = 0;
    mutable double wronskianDrift_ = 0;
};
struct AhlforsWeillResult {
    AhlforsWeillMap F;
    PlanarMap grid;
    double schwarzianError = 0;   // max |S[F] - phi| over samples of D_inf
    double dilatationError = 0;   // max |mu_F + 1/2 (1-|z|^2)^2 zbar^{-4} phi(1/zbar)| on D0 samples
};
AhlforsWeillResult ahlfors_weill_map(const CircleFunction& varphi, const AhlforsWeillOptions& opt = {});
/// Schwarzian of a holomorphic map at z from Cauchy integrals on a circle of radius rho.
cplx schwarzian_cauchy(const std::function<cplx(cplx)>& f, cplx z, double rho = 0.1, int m = 32);

/// Monotone cubic (Fritsch-Carlson) interpolation.
class MonotoneCubic {
public:
    MonotoneCubic(DVec x, DVec y);
    double operator()(double t) const;

private:
    DVec x_, y_, d_;
};

} // namespace uteich
