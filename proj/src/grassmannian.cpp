#include "uteich/grassmannian.hpp"

#include <array>
#include <cmath>

#include "uteich/fft.hpp"
#include "uteich/parallel.hpp"

namespace uteich {

nlohmann::ordered_json GraphOperator::to_json() const {
    nlohmann::ordered_json j;
    j["rows"] = "j=1..N, basis z^-j";
    j["cols"] = "n=0..N-1, basis z^n";
    j["N"] = N();
    auto re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
        auto rr = nlohmann::json::array(), ri = nlohmann::json::array();
        for (Eigen::Index c = 0; c < W.cols(); ++c) {
            rr.push_back(W(r, c).real());
            ri.push_back(W(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

GraphOperator GraphOperator::from_json(const nlohmann::json& j) {
    int N = j.at("N").get<int>();
    GraphOperator g{CMat::Zero(N, N)};
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c)
            g.W(r, c) = cplx(j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>());
    return g;
}

CMat BlockOperator::full() const {
    int N = this->N();
    CMat F(2 * N, 2 * N);
    // index of mode k in the full ordering z^{-N}..z^{N-1}: k + N; H_- block rows are z^{-1}..z^{-N}
    auto minus = [N](int j) { return N - 1 - j; };  // j-th row of an H_- block -> full index
    for (int r = 0; r < N; ++r)
        for (int q = 0; q < N; ++q) {
            F(N + r, N + q) = a(r, q);
            F(N + r, minus(q)) = b(r, q);
            F(minus(r), N + q) = c(r, q);
            F(minus(r), minus(q)) = d(r, q);
        }
    return F;
}

GraphOperator graph_from_mu(const BeltramiCoefficient& mu, int N, const GraphOptions& opt) {
    BeltramiCoefficient m = mu;
    if (opt.cap > 0) m.field = mu.field.with_cap(opt.cap);
    GraphOperator g{CMat::Zero(N, N)};
    parallel_for(N - 1, [&](int i) {
        int n = i + 1;
        CircleFunction v = boundary_v_n(m, n, opt.neumann);
        for (int j = 1; j <= N; ++j) g.W(j - 1, n) = v.coeff(-j);
    });
    return g;
}

HSNorm hs_norm(const GraphOperator& g) {
    HSNorm h;
    const CMat& W = g.W;
    h.frobenius = W.norm();
    int N = g.N();
    if (N == 0) return h;

    // Fit log|W|^2 ~ c0 + sN log n + sJ log j on the resolved entries.
    Eigen::MatrixXd A(0, 3);
    Eigen::VectorXd y(0);
    std::vector<std::array<double, 4>> rows;
    for (int n = 1; n < N; ++n)
        for (int j = 1; j <= W.rows(); ++j) {
            double a2 = std::norm(W(j - 1, n));
            if (a2 <= 0) continue;
            h.fittedC = std::max(h.fittedC, a2 * double(n) * n * j * j);
            if (a2 > 1e-28) rows.push_back({1.0, std::log(double(n)), std::log(double(j)), std::log(a2)});
        }
    if (rows.size() >= 3) {
        A.resize(rows.size(), 3);
        y.resize(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) {
            A.row(r) << rows[r][0], rows[r][1], rows[r][2];
            y(r) = rows[r][3];
        }
        Eigen::Vector3d s = A.colPivHouseholderQr().solve(y);
        h.slopeN = s(1);
        h.slopeJ = s(2);
    }
    double zeta2 = kPi * kPi / 6, sn = 0, sj = 0;
    for (int n = 1; n < N; ++n) sn += 1.0 / (double(n) * n);
    for (int j = 1; j <= W.rows(); ++j) sj += 1.0 / (double(j) * j);
    h.tail = h.fittedC * (zeta2 * zeta2 - sn * sj);

    double cols = 0, Ccol = 0;
    for (int n = 1; n < N; ++n) {
        double c2 = W.col(n).squaredNorm();
        cols += c2;
        if (2 * n >= N - 1) Ccol = std::max(Ccol, c2 * n * n);
    }
    if (cols > 0) h.tailRatio = Ccol * (zeta2 - sn) / cols;
    return h;
}

BlockOperator multiplier_blocks(const std::function<cplx(double, int)>& image, int N) {
    int L = 8 * N, K = L / 2 - 1;
    CMat F(2 * N, 2 * N);  // F(m + N, k + N) = <image of z^k, z^m>
    parallel_for(2 * N, [&](int col) {
        int k = col - N;
        CVec s(L);
        for (int l = 0; l < L; ++l) s[l] = image(2 * kPi * l / L, k);
        CVec c = samples_to_coeffs(s, K);
        for (int m = -N; m < N; ++m) F(m + N, col) = c[m + K];
    });
    BlockOperator B;
    B.a = F.block(N, N, N, N);
    B.b.resize(N, N);
    B.c.resize(N, N);
    B.d.resize(N, N);
    for (int r = 0; r < N; ++r)
        for (int q = 0; q < N; ++q) {
            int mr = N - 1 - r, mq = N - 1 - q;  // z^{-(r+1)} sits at full index N-1-r
            B.b(r, q) = F(N + r, mq);
            B.c(r, q) = F(mr, N + q);
            B.d(r, q) = F(mr, mq);
        }
    return B;
}

namespace {

void require_diffeo(const DiffeoOfCircle& phi, int L) {
    for (int l = 0; l < L; ++l) {
        double d = phi.derivative(2 * kPi * l / L);
        if (!(d > 0)) throw NonDiffeomorphism("phi' = " + std::to_string(d) + " at sample " + std::to_string(l));
    }
}

} // namespace

CompositionBlocks composition_operator_blocks(const DiffeoOfCircle& phi, int N) {
    int L = 8 * N;
    require_diffeo(phi, L);
    DiffeoOfCircle inv = phi.inverse();
    CompositionBlocks out;
    // sqrt(phi') is the positive root of the lift derivative.
    out.R = multiplier_blocks([&](double x, int k) { return std::exp(cplx(0, k * phi(x))); }, N);
    out.M = multiplier_blocks(
        [&](double x, int k) { return std::exp(cplx(0, k * x)) / std::sqrt(phi.derivative(x)); }, N);
    out.C = multiplier_blocks(
        [&](double x, int k) { return std::exp(cplx(0, k * inv(x))) * std::sqrt(phi.derivative(x)); }, N);
    return out;
}

GraphOperator right_translate(const GraphOperator& g, const DiffeoOfCircle& phi, int cropN) {
    int N = g.N();
    int L = 8 * N, K = L / 2 - 1;
    require_diffeo(phi, L);
    DVec psi(L);
    for (int l = 0; l < L; ++l) psi[l] = phi(2 * kPi * l / L);

    CMat P(N, N), Q(N, N);
    parallel_for(N, [&](int n) {
        CVec s(L);
        for (int l = 0; l < L; ++l) {
            cplx z = std::exp(cplx(0, psi[l]));
            cplx v = std::pow(z, n), zi = 1.0 / z, zj = zi;
            for (int j = 1; j <= g.W.rows(); ++j, zj *= zi) v += g.W(j - 1, n) * zj;
            s[l] = v;
        }
        CVec c = samples_to_coeffs(s, K);
        for (int m = 0; m < N; ++m) P(m, n) = c[m + K];
        for (int j = 1; j <= N; ++j) Q(j - 1, n) = c[-j + K];
    });

    int n = (cropN > 0 && cropN < N) ? cropN : N;
    // Conditioning is judged on the retained block; the trailing columns of P are always
    // poorly resolved because z^n o phi spreads past mode N.
    Eigen::JacobiSVD<CMat> svd(P.topLeftCorner(n, n));
    const auto& sv = svd.singularValues();
    double cond = sv(0) / sv(sv.size() - 1);
    if (!(cond <= 1e8)) throw GraphTransversalityLost("cond(pr+) = " + std::to_string(cond));

    // Column reduction: new spanning vectors with pr+ = identity.
    CMat Wn = P.transpose().partialPivLu().solve(Q.transpose()).transpose();
    Wn.col(0).setZero();
    return GraphOperator{Wn.topLeftCorner(n, n)};
}

SiegelResult siegel_check(const CMat& T) {
    CMat A = CMat::Identity(T.rows(), T.rows()) - T * T.adjoint();
    SiegelResult r;
    r.det = A.rows() ? A.partialPivLu().determinant() : cplx(1);
    if (A.rows() == 0) {
        r.inside = true;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
    r.inside = es.eigenvalues().minCoeff() > 0;
    return r;
}

} // namespace uteich
