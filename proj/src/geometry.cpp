#include "uteich/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "uteich/parallel.hpp"

namespace uteich {

namespace {

const cplx I1(0, 1);

void require_orthonormal(const std::vector<GrTangent>& basis) {
    for (size_t a = 0; a < basis.size(); ++a)
        for (size_t b = 0; b < basis.size(); ++b) {
            cplx ip = (basis[a].psi.adjoint() * basis[b].psi).trace();
            if (std::abs(ip - (a == b ? 1.0 : 0.0)) > 1e-10)
                throw NotOrthonormal("Tr(psi_" + std::to_string(a) + "* psi_" + std::to_string(b) +
                                     ") = " + std::to_string(std::abs(ip)));
        }
}

// log det(I - Psi Psi*) for Psi = sum t_i psi_i; throws when I - Psi Psi* is not positive.
double log_det_potential(const std::vector<cplx>& t, const std::vector<GrTangent>& basis) {
    CMat Psi = CMat::Zero(basis[0].psi.rows(), basis[0].psi.cols());
    for (size_t i = 0; i < t.size(); ++i) Psi += t[i] * basis[i].psi;
    CMat X = CMat::Identity(Psi.rows(), Psi.rows()) - Psi * Psi.adjoint();
    Eigen::LLT<CMat> llt(X);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("I - Psi Psi* at |t| = " + std::to_string(std::abs(t[0])));
    double ld = 0;
    for (Eigen::Index k = 0; k < X.rows(); ++k) ld += 2 * std::log(llt.matrixL()(k, k).real());
    return ld;
}

CMat hessian_once(const std::vector<cplx>& t, const std::vector<GrTangent>& basis, double h) {
    int n = static_cast<int>(t.size());
    // Real coordinates: index 2i -> Re t_i, 2i+1 -> Im t_i.
    auto f = [&](int a, double da, int b, double db) {
        std::vector<cplx> s = t;
        s[a / 2] += (a % 2 ? I1 : cplx(1)) * da;
        s[b / 2] += (b % 2 ? I1 : cplx(1)) * db;
        return -log_det_potential(s, basis);
    };
    auto d2 = [&](int a, int b) {
        if (a == b) {
            double f0 = -log_det_potential(t, basis);
            return (f(a, h, a, 0) - 2 * f0 + f(a, -h, a, 0)) / (h * h);
        }
        return (f(a, h, b, h) - f(a, h, b, -h) - f(a, -h, b, h) + f(a, -h, b, -h)) / (4 * h * h);
    };
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double xx = d2(2 * i, 2 * j), yy = d2(2 * i + 1, 2 * j + 1);
            double xy = d2(2 * i, 2 * j + 1), yx = d2(2 * i + 1, 2 * j);
            // d_i dbar_j = 1/4 (dx_i - i dy_i)(dx_j + i dy_j)
            g(i, j) = 0.25 * cplx(xx + yy, xy - yx);
        }
    return g;
}

} // namespace

GrTangent GrTangent::normalized() const {
    double n = norm();
    if (!(n > 0)) throw ZeroDirection("psi = 0");
    GrTangent r = *this;
    r.psi /= n;
    return r;
}

CMat GrTangent::embedded() const {
    int N = static_cast<int>(psi.cols());
    BlockOperator B;
    B.a = CMat::Zero(N, N);
    B.b = CMat::Zero(N, N);
    B.c = psi;
    B.d = CMat::Zero(N, N);
    return B.full();
}

cplx gr_inner(const GrTangent& psi, const GrTangent& chi) {
    if (psi.base.has_value() != chi.base.has_value() ||
        (psi.base && (psi.base->rows() != chi.base->rows() || (*psi.base - *chi.base).norm() != 0.0)))
        throw BasePointMismatch("tangent vectors live at different points");
    if (!psi.base) return (psi.psi.adjoint() * chi.psi).trace();
    const CMat& A = *psi.base;
    CMat AAs = A * A.adjoint();
    CMat X = psi.embedded(), Y = chi.embedded();
    return (X.adjoint() * AAs.partialPivLu().solve(Y * AAs)).trace();
}

double wedge2_trace(const CMat& M) {
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw NotHermitian("M != M*");
    return wedge2_pair(M, M).real();
}

cplx wedge2_pair(const CMat& A, const CMat& B) { return 0.5 * (A.trace() * B.trace() - (A * B).trace()); }

double sectional_curvature(const GrTangent& psi) {
    GrTangent u = psi.normalized();
    return -2.0 + wedge2_trace(u.psi * u.psi.adjoint());
}

std::vector<double> curvature_sweep(int N, int count, std::uint64_t seed) {
    // Directions are drawn serially so the result does not depend on the thread count.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<GrTangent> dirs(count);
    for (auto& d : dirs) {
        d.psi.resize(N, N);
        for (Eigen::Index k = 0; k < d.psi.size(); ++k) d.psi(k) = cplx(g(rng), g(rng));
    }
    std::vector<double> K(count);
    parallel_for(count, [&](int q) { K[q] = sectional_curvature(dirs[q]); });
    return K;
}

cplx curvature_component(int i, int j, int k, int l, const std::vector<GrTangent>& basis) {
    require_orthonormal(basis);
    auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    auto pp = [&](int a, int b) -> CMat { return basis[a].psi * basis[b].psi.adjoint(); };
    if (i == k && j == l) return -2.0 * d(i, j) + wedge2_pair(pp(i, j), pp(i, j));
    return -d(i, j) * d(k, l) - d(i, l) * d(k, j) + wedge2_pair(pp(i, j), pp(k, l)) + wedge2_pair(pp(i, l), pp(k, j));
}

CMat cartan_potential_hessian(const std::vector<cplx>& t, const std::vector<GrTangent>& basis,
                              const CartanOptions& opt) {
    if (basis.empty() || t.size() != basis.size()) throw std::invalid_argument("t and basis sizes differ");
    log_det_potential(t, basis);  // positivity at t itself
    CMat gh = hessian_once(t, basis, opt.h), gh2 = hessian_once(t, basis, opt.h / 2);
    return (4.0 * gh2 - gh) / 3.0;
}

cplx cartan_second_order(int i, int j, int k, int l, const std::vector<GrTangent>& basis, double tau,
                         const CartanOptions& opt) {
    int n = static_cast<int>(basis.size());
    // c(v) = sum r_kl v_k conj(v_l), extracted as (g(tau v) - g(0)) / tau^2 with Richardson in tau.
    auto c = [&](const std::vector<cplx>& v) {
        auto at = [&](double r) {
            std::vector<cplx> t(n);
            for (int q = 0; q < n; ++q) t[q] = r * v[q];
            CMat g0 = cartan_potential_hessian(std::vector<cplx>(n, 0.0), basis, opt);
            return (cartan_potential_hessian(t, basis, opt)(i, j) - g0(i, j)) / (r * r);
        };
        return (4.0 * at(tau / 2) - at(tau)) / 3.0;
    };
    std::vector<cplx> v(n, 0.0);
    if (k == l) {
        v[k] = 1;
        return c(v);
    }
    cplx sum = 0, ip = 1;
    for (int p = 0; p < 4; ++p, ip *= I1) {
        std::fill(v.begin(), v.end(), 0.0);
        v[k] = 1;
        v[l] = ip;
        sum += ip * c(v);
    }
    return 0.25 * sum;
}

BlockAs block_As(const GrTangent& psi, cplx s) {
    const CMat& p = psi.psi;
    int N = static_cast<int>(p.cols());
    double s2 = std::norm(s);
    CMat I = CMat::Identity(N, N);
    CMat Lp = (I + s2 * p.adjoint() * p).inverse();  // on H_+
    CMat Lm = (I + s2 * p * p.adjoint()).inverse();  // on H_-
    BlockAs r;
    r.A = BlockOperator{I, -std::conj(s) * p.adjoint(), s * p, I};
    r.Ainv = BlockOperator{Lp, std::conj(s) * p.adjoint() * Lm, -s * p * Lp, Lm};
    CMat E = r.A.full() * r.Ainv.full() - CMat::Identity(2 * N, 2 * N);
    r.inverseError = E.cwiseAbs().maxCoeff();
    r.intertwining1 = (Lp * p.adjoint() - p.adjoint() * Lm).cwiseAbs().maxCoeff();
    r.intertwining2 = (p * Lp - Lm * p).cwiseAbs().maxCoeff();
    return r;
}

GraphOperator geodesic_point(const GrTangent& psi, cplx s) { return GraphOperator{s * psi.psi}; }

double tangent_norm_along(const GrTangent& psi, cplx s0, double theta) {
    if (!(psi.norm() > 0)) throw ZeroDirection("psi = 0");
    int N = static_cast<int>(psi.psi.cols());
    cplx e = std::polar(1.0, theta);
    BlockAs As = block_As(psi, s0);
    CMat Z = CMat::Zero(N, N);
    CMat Adot = BlockOperator{Z, -std::conj(e) * psi.psi.adjoint(), e * psi.psi, Z}.full();
    CMat X = As.Ainv.full() * Adot * As.A.full();
    // H_+ columns sit at N..2N-1 of the full ordering.
    return X.rightCols(N).norm();
}

std::vector<GeodesicSample> arclength_reparam(const GrTangent& psi, double tEnd, double dt,
                                              const ReparamOptions& opt) {
    if (!(psi.norm() > 0)) throw ZeroDirection("psi = 0");
    cplx e = std::polar(1.0, opt.theta);
    auto rhs = [&](cplx s) { return e / tangent_norm_along(psi, s, opt.theta); };
    auto sample = [&](double t, cplx s) {
        double sp = tangent_norm_along(psi, s, opt.theta);
        return GeodesicSample{t, s, sp, siegel_check(s * psi.psi).det};
    };
    std::vector<GeodesicSample> out{sample(0, 0)};
    double t = 0;
    cplx s = 0;
    while (t < tEnd - 1e-14) {
        double h = std::min(dt, tEnd - t);
        bool ok = false;
        for (int r = 0; r <= opt.maxRefine && !ok; ++r, h /= 2) {
            cplx k1 = rhs(s), k2 = rhs(s + 0.5 * h * k1), k3 = rhs(s + 0.5 * h * k2), k4 = rhs(s + h * k3);
            cplx sn = s + h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            // Unit speed in t: |ds/dt| * ||gamma'(s)|| = 1 at the new point.
            double speed = std::abs(rhs(sn)) * tangent_norm_along(psi, sn, opt.theta);
            if (std::abs(speed - 1.0) <= opt.speedTol) {
                s = sn;
                t += h;
                out.push_back(sample(t, s));
                ok = true;
            }
        }
        if (!ok) throw StepRejected("speed check failed at t = " + std::to_string(t));
    }
    return out;
}

std::string geodesic_csv(const std::vector<GeodesicSample>& table) {
    std::string out = "t,re_s,im_s,speed,det\r\n";
    char buf[160];
    for (const auto& g : table) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\r\n", g.t, g.s.real(), g.s.imag(), g.speed,
                      g.det.real());
        out += buf;
    }
    return out;
}

ExpResult exp_identity(const TangentVector& t, const ExpOptions& opt) {
    ExpResult r;
    r.mu = BeltramiCoefficient::from_tangent(t, opt.degreeCap);
    if (!(r.mu.supNorm < 1.0)) throw AssumptionViolated("sup |mu_t| = " + std::to_string(r.mu.supNorm));
    r.welding = welding_map(r.mu, opt.welding);
    GraphOptions go;
    go.neumann = opt.welding.neumann;
    r.graph = graph_from_mu(r.mu, opt.N, go);
    return r;
}

GrTangent graph_direction(const TangentVector& t, int N, double h) {
    TangentVector th = t;
    for (auto& c : th.t) c *= h;
    auto W = graph_from_mu(BeltramiCoefficient::from_tangent(th, 64), N);
    return GrTangent{W.W / h, std::nullopt};
}

cplx calibrate_s(const GraphOperator& W, const GrTangent& unitPsi) {
    return (unitPsi.psi.adjoint() * W.W).trace() / std::pow(unitPsi.norm(), 2);
}

PoincareComparison poincare_comparison(const GrTangent& psi, double sMax, int samples) {
    GrTangent u = psi.normalized();
    PoincareComparison pc;
    pc.R = std::abs(4.0 / sectional_curvature(u));
    const double R = pc.R;
    double alpha = 0.3;  // any ray; the path is rotation invariant
    double len = 0, prevRho = 0, prevSp = tangent_norm_along(u, 0, alpha);
    for (int q = 1; q <= samples; ++q) {
        double rho = sMax * q / samples;
        cplx s = std::polar(rho, alpha);
        double sp = tangent_norm_along(u, s, alpha);
        len += 0.5 * (sp + prevSp) * (rho - prevRho);
        prevRho = rho;
        prevSp = sp;
        // Radial calibration: hyperbolic distance 2R artanh(u/R) equals the induced length.
        double uu = R * std::tanh(len / (2 * R));
        pc.radialError = std::max(pc.radialError, std::abs(2 * R * std::atanh(uu / R) - len));
        // Circumference density: induced rho * |gamma'| in the angular direction vs the Poincare 2R^2 u/(R^2-u^2).
        double induced = rho * tangent_norm_along(u, s, alpha + kPi / 2);
        double model = 2 * R * R * uu / (R * R - uu * uu);
        pc.angularError = std::max(pc.angularError, std::abs(induced - model) / model);
    }
    pc.maxError = std::max(pc.radialError, pc.angularError);
    return pc;
}

} // namespace uteich
