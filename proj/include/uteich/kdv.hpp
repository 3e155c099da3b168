#pragma once

#include <string>
#include <vector>

#include "uteich/geometry.hpp"

namespace uteich {

/// (lambda, f d/dz) with f a Laurent polynomial in z.
struct VirasoroElement {
    cplx central{0.0};
    CircleFunction field;
};

/// (t, b dx^2) with b a real profile in e^{ikx} modes.
struct VirasoroDualElement {
    double central = 0.0;
    CircleFunction quad;
};

/// (1/2 pi i) contour integral of f''' g dz: sum_m m(m-1)(m-2) f_m g_{2-m}.
cplx cocycle_c0(const CircleFunction& f, const CircleFunction& g);
/// f g' - f' g in d/dz, exact (output band is the sum of the input bands).
CircleFunction vector_field_bracket(const CircleFunction& f, const CircleFunction& g);
VirasoroElement virasoro_bracket(const VirasoroElement& a, const VirasoroElement& b);

/// f(x) d/dx = (i z f) d/dz on the circle, and back.
CircleFunction vector_field_x_to_z(const CircleFunction& fx);
CircleFunction vector_field_z_to_x(const CircleFunction& fz);

/// int_0^{2pi} log((s1 o s2)') d(log s2') by the trapezoid rule on 4 max(n1, n2) points.
double bott_cocycle(const DiffeoOfCircle& s1, const DiffeoOfCircle& s2);

/// Exact product of two band-limited functions.
CircleFunction multiply(const CircleFunction& a, const CircleFunction& b);

/// quad -> 1/2 t xi_xxx + 2 xi_x b + xi b_x with t the dual central value; central slot unchanged.
VirasoroDualElement coadjoint_action(const CircleFunction& xi, const VirasoroDualElement& dual);
/// 1/2 q_xxx + 3 q q_x; the product is formed on a 3/2-padded grid, so the full band 2N is alias free.
CircleFunction euler_vector_field(const CircleFunction& q);

/// Circle Schwarzian S(psi) + (psi'^2 - 1)/2, i.e. the dx^2 coefficient of the z-Schwarzian of
/// e^{ix} -> e^{i psi(x)}, composed with psi^{-1}. Returned with band n/2 - 1 of phi's grid.
CircleFunction kirillov_h(const DiffeoOfCircle& phi);

struct HillResult {
    double residual = 0;         // max |S(eta1/eta2)/2 - q| on interior samples
    double wronskianDrift = 0;
};
/// Solves eta'' + q eta = 0 on [0, 2pi] and compares the Schwarzian of the solution ratio with q.
HillResult hill_roundtrip(const CircleFunction& q, int steps = 1024);

enum class KdVConvention { kdv6uux, eulerArnold3qqx };
std::string convention_tag(KdVConvention c);
KdVConvention parse_convention(const std::string& tag);

struct KdVState {
    DVec u;                      // samples on x_j = 2 pi j / M
    double time = 0;
    KdVConvention convention = KdVConvention::kdv6uux;
    int M() const { return static_cast<int>(u.size()); }
    double mass() const;         // int u dx
    double energy() const;       // int u^2 dx
};

struct KdVOptions {
    int outputEvery = 0;         // record every k steps; 0 keeps only the endpoints
    double blowup = 1e6;
    double cfl = 1.0;            // guard: dt * kmax * c * max|u0| <= cfl, c = 6 or 3
};
struct KdVTrajectory {
    std::vector<KdVState> frames;
    double massDrift = 0;        // max |mass - mass0|
    double energyDrift = 0;      // max relative |energy - energy0|
    std::string to_csv() const;  // convention,t,x,u
};
/// Integrating-factor RK4 in Fourier space with 3/2-rule dealiasing of u^2.
KdVTrajectory kdv_reference_solve(const KdVState& u0, double tEnd, double dt, const KdVOptions& opt = {});

/// The identification on real profiles: positive modes u_k (k >= 2) <-> t_k = -u_k / sqrt(2k(k^2-1)).
TangentVector profile_to_tangent(const CircleFunction& u, int K);
CircleFunction tangent_to_profile(const TangentVector& t);
/// Velocity field v(x) d/dx of the welding path through a tangent vector: v_k = 2i t_k / (k(k^2-1))^{3/2}.
TangentVector velocity_to_tangent(const CircleFunction& v, int K);
CircleFunction tangent_to_velocity(const TangentVector& t);

struct GeodesicKdVOptions {
    int K = 8;                   // modes kept in the identification
    int samples = 6;             // time samples on [0, tEnd]
    int weldN = 512;
    double ceiling = 1e3;        // ResidualDiverged above this
};
struct GeodesicKdVResult {
    std::vector<double> times;
    std::vector<CircleFunction> q;
    std::vector<double> residual;    // ||q_t - (1/2 q_xxx + 3 q q_x)||, normalised L2
    double h = 0;
    nlohmann::ordered_json report() const;
};
/// q(t) = A(gdot / g') along the welding path g(t) = exp(t A^{-1} u0); see the conventions notes.
GeodesicKdVResult geodesic_to_kdv(const CircleFunction& u0, double tEnd, double h, const GeodesicKdVOptions& opt = {});
/// q(t) alone at a single time.
CircleFunction geodesic_q(const CircleFunction& u0, double t, double h, const GeodesicKdVOptions& opt = {});

} // namespace uteich
