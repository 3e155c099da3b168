#pragma once

#include <Eigen/Dense>

#include "uteich/welding.hpp"

namespace uteich {

using CMat = Eigen::MatrixXcd;

/// Graph of H_+ -> H_-: W(j-1, n) = <v^(n), z^{-j}>, rows j = 1..N, columns n = 0..N-1.
struct GraphOperator {
    CMat W;
    int N() const { return static_cast<int>(W.cols()); }
    nlohmann::ordered_json to_json() const;
    static GraphOperator from_json(const nlohmann::json& j);
};

/// [a b; c d] on H_+ (+) H_-, each block N x N; H_+ basis z^0..z^{N-1}, H_- basis z^{-1}..z^{-N}.
struct BlockOperator {
    CMat a, b, c, d;
    int N() const { return static_cast<int>(a.rows()); }
    /// Rows and columns ordered z^{-N}..z^{N-1}.
    CMat full() const;
    double offdiag_b() const { return b.norm(); }
    double offdiag_c() const { return c.norm(); }
};

struct GraphOptions {
    NeumannOptions neumann;
    int cap = 0;  // working degree cap for the Neumann algebra; 0 keeps mu's own cap
};
GraphOperator graph_from_mu(const BeltramiCoefficient& mu, int N, const GraphOptions& opt = {});

struct HSNorm {
    double frobenius = 0;
    double fittedC = 0;     // max |W[j][n]|^2 n^2 j^2 over nonzero entries
    double tail = 0;        // sum of C/(n^2 j^2) outside the truncation
    double tailRatio = 0;   // sum_{n >= N} |v^(n)|^2 / sum_{n < N} |v^(n)|^2, columns fitted as C'/n^2 on n >= N/2
    double slopeN = 0;      // least-squares slopes of log|W|^2 against log n and log j
    double slopeJ = 0;
};
HSNorm hs_norm(const GraphOperator& W);

struct CompositionBlocks {
    BlockOperator C, M, R;  // C f = (f o phi^{-1}) sqrt(phi'), M f = f / sqrt(phi'), R f = f o phi
};
/// Fourier matrices by 8N-point quadrature.
CompositionBlocks composition_operator_blocks(const DiffeoOfCircle& phi, int N);
/// Matrix of f -> f o phi (or any pointwise operator) on modes -N..N-1.
BlockOperator multiplier_blocks(const std::function<cplx(double, int)>& image, int N);

/// Graph of W o phi: R_phi applied to {z^n + v^(n)}, then column-reduced to graph form.
/// cropN > 0 keeps the leading cropN x cropN block.
GraphOperator right_translate(const GraphOperator& W, const DiffeoOfCircle& phi, int cropN = 0);

struct SiegelResult {
    cplx det;
    bool inside = false;    // I - T T* positive definite
};
SiegelResult siegel_check(const CMat& T);

} // namespace uteich
