#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uteich/grassmannian.hpp"

namespace uteich {

/// Tangent vector psi: H_+ -> H_- (GraphOperator layout) at the identity coset or at the
/// point reached by a block operator A.
struct GrTangent {
    CMat psi;
    std::optional<CMat> base;  // full 2N x 2N A, ordered z^{-N}..z^{N-1}; empty = H_+

    double norm() const { return psi.norm(); }
    GrTangent normalized() const;
    /// psi embedded as the H_+ -> H_- block of a full 2N x 2N operator.
    CMat embedded() const;
};

/// Tr(psi* chi) at H_+, Tr(psi~* (AA*)^{-1} chi~ AA*) at a base A.
cplx gr_inner(const GrTangent& psi, const GrTangent& chi);

/// sum_{i<j} lambda_i lambda_j = ((Tr M)^2 - Tr M^2) / 2.
double wedge2_trace(const CMat& M);
/// Polarised form ((Tr A)(Tr B) - Tr(AB)) / 2.
cplx wedge2_pair(const CMat& A, const CMat& B);

/// -2 + wedge2_trace(psi psi*) for the normalised direction.
double sectional_curvature(const GrTangent& psi);
/// Curvatures of `count` complex Gaussian N x N directions.
std::vector<double> curvature_sweep(int N, int count, std::uint64_t seed);
/// Stated closed form: diagonal branch (i,j) = (k,l) uses -2 delta_ij + W(psi_i psi_j*, psi_i psi_j*),
/// otherwise -d_ij d_kl - d_il d_kj + W(psi_i psi_j*, psi_k psi_l*) + W(psi_i psi_l*, psi_k psi_j*).
cplx curvature_component(int i, int j, int k, int l, const std::vector<GrTangent>& basis);

struct CartanOptions {
    double h = 1e-3;         // finite-difference step, one Richardson level (h, h/2)
};
/// g_ij = -d_{t_i} d_{tbar_j} log det(I - Psi Psi*), Psi = sum t_i psi_i.
CMat cartan_potential_hessian(const std::vector<cplx>& t, const std::vector<GrTangent>& basis,
                              const CartanOptions& opt = {});
/// Coefficient r_{i j k l} of t_k tbar_l in g_ij, by polarisation and Richardson in the radius tau.
cplx cartan_second_order(int i, int j, int k, int l, const std::vector<GrTangent>& basis, double tau = 0.05,
                         const CartanOptions& opt = {});

struct BlockAs {
    BlockOperator A, Ainv;
    double inverseError = 0;     // max |A Ainv - I|
    double intertwining1 = 0;    // (I + |s|^2 psi* psi)^{-1} psi* = psi* (I + |s|^2 psi psi*)^{-1}
    double intertwining2 = 0;    // psi (I + |s|^2 psi* psi)^{-1} = (I + |s|^2 psi psi*)^{-1} psi
};
/// A_s = [I, -conj(s) psi*; s psi, I] and its inverse from the intertwining identities.
BlockAs block_As(const GrTangent& psi, cplx s);

/// Graph of s psi.
GraphOperator geodesic_point(const GrTangent& psi, cplx s);
/// ||d gamma/dt|| for s(t) = s0 + e^{i theta} t: Hilbert-Schmidt norm of the H_+ columns of A^{-1} Adot A.
double tangent_norm_along(const GrTangent& psi, cplx s0, double theta);

struct GeodesicSample {
    double t = 0;
    cplx s;
    double speed = 0;
    cplx det;                // det(I - T T*), T = s psi
};
struct ReparamOptions {
    double speedTol = 1e-6;
    int maxRefine = 8;
    double theta = 0;
};
/// Integrates ds/dt = e^{i theta} / ||gamma'(s)|| by RK4 from s = 0.
std::vector<GeodesicSample> arclength_reparam(const GrTangent& psi, double tEnd, double dt,
                                              const ReparamOptions& opt = {});
std::string geodesic_csv(const std::vector<GeodesicSample>& table);

struct ExpResult {
    BeltramiCoefficient mu;
    WeldingRecord welding;
    GraphOperator graph;
};
struct ExpOptions {
    int N = 16;
    int degreeCap = 96;
    WeldingOptions welding;
};
/// mu_t = (1-|z|^2)^2 sum t_k e_k(zbar) zbar^{-2}, then welding and graph.
ExpResult exp_identity(const TangentVector& t, const ExpOptions& opt = {});

/// First-order graph direction L_mu = d/de graph(mu_{e t}) at 0 (by a one-sided difference at e = h).
GrTangent graph_direction(const TangentVector& t, int N, double h = 1e-6);
/// s minimising ||W - s psi|| for unit psi.
cplx calibrate_s(const GraphOperator& W, const GrTangent& unitPsi);

struct PoincareComparison {
    double R = 0;                 // |4 / K_psi|
    double radialError = 0;       // after the radial calibration u(|s|)
    double angularError = 0;      // circumference ratio mismatch at the same samples
    double maxError = 0;
};
/// Compares the metric induced on {graph(s psi)} with 4 R^4 |du|^2/(R^2-|u|^2)^2 on |s| <= sMax.
PoincareComparison poincare_comparison(const GrTangent& psi, double sMax = 1.0, int samples = 16);

} // namespace uteich
