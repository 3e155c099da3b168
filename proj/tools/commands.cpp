#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

namespace uteich::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const RunContext& ctx, const std::string& name, const std::string& content) {
    fs::create_directories(ctx.outDir);
    std::ofstream f(fs::path(ctx.outDir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(ctx.outDir) / name).string());
    f << content;
}

nlohmann::ordered_json header(const std::string& command, const RunConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["generator"] = "mt19937_64";
    j["seed"] = c.seed;
    j["config"] = c.to_json();
    return j;
}

CircleFunction cosine_profile(int k, double a) {
    CircleFunction u(k);
    u.set(k, a / 2);
    u.set(-k, a / 2);
    return u;
}

GrTangent diagonal_direction(int size, int rank) {
    GrTangent g{CMat::Zero(size, size), std::nullopt};
    for (int k = 0; k < rank; ++k) g.psi(k, k) = 1.0;
    return g.normalized();
}

BeltramiCoefficient mode_mu(int mode, int K, double amp, int D) {
    TangentVector t(K);
    t.set(mode, amp);
    return BeltramiCoefficient::from_tangent(t, D);
}

KdVState sample_profile(const CircleFunction& u, int M, KdVConvention c) {
    KdVState s;
    s.convention = c;
    s.u.resize(M);
    for (int j = 0; j < M; ++j) s.u[j] = u.eval(2 * kPi * j / M).real();
    return s;
}

GeodesicKdVOptions pipeline_options(const RunConfig& c) {
    GeodesicKdVOptions o;
    o.K = c.kdvK;
    o.samples = c.kdvSamples;
    o.weldN = c.kdvWeldN;
    return o;
}

// ---- validate ----

struct Check {
    std::string name;
    std::function<nlohmann::ordered_json(bool&)> run;
};

nlohmann::ordered_json run_check(const Check& ch) {
    nlohmann::ordered_json j;
    j["name"] = ch.name;
    bool pass = false;
    try {
        nlohmann::ordered_json v = ch.run(pass);
        j["pass"] = pass;
        j["values"] = v;
    } catch (const Error& e) {
        j["pass"] = false;
        j["error"] = e.kind();
        j["message"] = e.what();
    }
    return j;
}

} // namespace

nlohmann::ordered_json validate_report(const RunConfig& c) {
    const double amp = 1e-2;
    NeumannOptions nopt;
    nopt.tol = c.neumann;
    std::vector<Check> checks = {
        {"welding_normalisation",
         [&](bool& pass) {
             WeldingOptions wo;
             wo.n = c.weldN;
             wo.neumann = nopt;
             wo.consistencyTol = c.consistency;
             auto w = welding_map(mode_mu(2, c.K, amp, c.D), wo);
             pass = w.tripleError < 1e-8 && w.compositionError < c.consistency;
             return nlohmann::ordered_json{{"triple_error", w.tripleError}, {"composition_error", w.compositionError}};
         }},
        {"graph_hs_decay",
         [&](bool& pass) {
             GraphOptions go;
             go.neumann = nopt;
             go.cap = c.D;
             int n = std::min(c.N, 17);
             auto hs = hs_norm(graph_from_mu(mode_mu(2, c.K, 0.1, c.D), n, go));
             pass = std::isfinite(hs.frobenius) && hs.tailRatio < 0.1;
             return nlohmann::ordered_json{
                 {"N", n}, {"fitted_C", std::sqrt(hs.fittedC)}, {"frobenius", hs.frobenius}, {"tail_ratio", hs.tailRatio}};
         }},
        {"curvature_bound",
         [&](bool& pass) {
             auto K = curvature_sweep(c.curvSize, c.curvDirections, c.seed);
             double mx = *std::max_element(K.begin(), K.end());
             pass = mx < -1.5;
             return nlohmann::ordered_json{{"directions", K.size()}, {"max_K", mx}};
         }},
        {"unit_speed",
         [&](bool& pass) {
             double dev = 0;
             for (int r : {1, 2})
                 for (double s : {0.0, 1.0, 2.0}) dev = std::max(dev, std::abs(tangent_norm_along(diagonal_direction(4, r), s, 0.7) - 1.0));
             pass = dev < 1e-6;
             return nlohmann::ordered_json{{"max_deviation", dev}};
         }},
        {"virasoro_cocycle",
         [&](bool& pass) {
             std::mt19937_64 rng(c.seed);
             std::normal_distribution<double> nd;
             auto rnd = [&] {
                 CircleFunction f(4);
                 for (int k = -4; k <= 4; ++k) f.set(k, cplx(nd(rng), nd(rng)));
                 return f;
             };
             VirasoroElement a{0.0, rnd()}, b{0.0, rnd()}, d{0.0, rnd()};
             cplx j = virasoro_bracket(a, virasoro_bracket(b, d)).central + virasoro_bracket(b, virasoro_bracket(d, a)).central +
                      virasoro_bracket(d, virasoro_bracket(a, b)).central;
             pass = std::abs(j) < 1e-8;
             return nlohmann::ordered_json{{"cyclic_sum", std::abs(j)}};
         }},
        {"kdv_conservation",
         [&](bool& pass) {
             auto u0 = cosine_profile(c.kdvMode, 0.1);
             auto tr = kdv_reference_solve(sample_profile(u0, c.M, c.convention), 0.1, 1e-3);
             pass = tr.massDrift < 1e-12 && tr.energyDrift < 1e-8;
             return nlohmann::ordered_json{{"mass_drift", tr.massDrift}, {"energy_drift", tr.energyDrift}};
         }},
        {"hill_roundtrip",
         [&](bool& pass) {
             auto r = hill_roundtrip(cosine_profile(2, 0.2));
             pass = r.residual < 1e-5;
             return nlohmann::ordered_json{{"residual", r.residual}, {"wronskian_drift", r.wronskianDrift}};
         }},
    };
    nlohmann::ordered_json rep = header("validate", c);
    auto arr = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& ch : checks) {
        arr.push_back(run_check(ch));
        all = all && arr.back()["pass"].get<bool>();
    }
    rep["checks"] = arr;
    rep["pass"] = all;
    return rep;
}

namespace {

int cmd_validate(const RunContext& ctx, nlohmann::ordered_json& out) {
    out = validate_report(ctx.config);
    write_file(ctx, "validate.json", out.dump(2) + "\n");
    return out["pass"].get<bool>() ? 0 : 1;
}

int cmd_weld(const RunContext& ctx, nlohmann::ordered_json& out) {
    const auto& c = ctx.config;
    WeldingOptions wo;
    wo.n = c.weldN;
    wo.neumann.tol = c.neumann;
    wo.consistencyTol = c.consistency;
    auto w = welding_map(mode_mu(c.weldMode, c.K, c.weldAmplitude, c.D), wo);
    write_file(ctx, "weld.csv", w.to_csv(c.weldSamples));
    out = header("weld", c);
    out["diagnostics"] = w.diagnostics();
    write_file(ctx, "weld.json", out.dump(2) + "\n");
    return 0;
}

int cmd_geodesic(const RunContext& ctx, nlohmann::ordered_json& out) {
    const auto& c = ctx.config;
    ReparamOptions ro;
    ro.theta = c.geoTheta;
    auto table = arclength_reparam(diagonal_direction(c.geoSize, c.geoRank), c.geoTEnd, c.geoDt, ro);
    write_file(ctx, "geodesic.csv", geodesic_csv(table));
    double dev = 0;
    for (const auto& s : table) dev = std::max(dev, std::abs(s.speed - 1.0));
    out = header("geodesic", c);
    out["rows"] = table.size();
    out["max_speed_deviation"] = dev;
    write_file(ctx, "geodesic.json", out.dump(2) + "\n");
    return 0;
}

int cmd_curvature(const RunContext& ctx, nlohmann::ordered_json& out) {
    const auto& c = ctx.config;
    auto K = curvature_sweep(c.curvSize, c.curvDirections, c.seed);
    std::string csv = "seed,index,K\r\n";
    for (size_t i = 0; i < K.size(); ++i) csv += std::to_string(c.seed) + "," + std::to_string(i) + "," + num(K[i]) + "\r\n";
    write_file(ctx, "curvature.csv", csv);
    double mx = *std::max_element(K.begin(), K.end());
    out = header("curvature", c);
    out["directions"] = K.size();
    out["max_K"] = mx;
    out["all_below_minus_three_halves"] = mx < -1.5;
    write_file(ctx, "curvature.json", out.dump(2) + "\n");
    return mx < -1.5 ? 0 : 1;
}

int cmd_kdv_spectral(const RunContext& ctx, nlohmann::ordered_json& out) {
    const auto& c = ctx.config;
    KdVOptions ko;
    ko.outputEvery = std::max(1, static_cast<int>(std::lround(c.kdvTEnd / c.kdvDt / 10)));
    auto tr = kdv_reference_solve(sample_profile(cosine_profile(c.kdvMode, c.kdvAmplitude), c.M, c.convention), c.kdvTEnd,
                                  c.kdvDt, ko);
    write_file(ctx, "kdv_spectral.csv", tr.to_csv());
    out = header("kdv-spectral", c);
    out["frames"] = tr.frames.size();
    out["mass_drift"] = tr.massDrift;
    out["energy_drift"] = tr.energyDrift;
    write_file(ctx, "kdv_spectral.json", out.dump(2) + "\n");
    return 0;
}

int cmd_kdv_geodesic(const RunContext& ctx, nlohmann::ordered_json& out) {
    const auto& c = ctx.config;
    auto u0 = cosine_profile(c.kdvMode, c.kdvAmplitude);
    std::string csv = "h,t,residual\r\n", table = "h,max_residual,ratio\r\n";
    out = header("kdv-geodesic", c);
    auto levels = nlohmann::ordered_json::array();
    double prev = 0;
    for (int l = 0; l < c.kdvLevels; ++l) {
        double h = c.kdvH / std::pow(2.0, l);
        auto r = geodesic_to_kdv(u0, c.kdvTEnd, h, pipeline_options(c));
        double mx = 0;
        for (size_t i = 0; i < r.times.size(); ++i) {
            csv += num(h) + "," + num(r.times[i]) + "," + num(r.residual[i]) + "\r\n";
            mx = std::max(mx, r.residual[i]);
        }
        double ratio = prev > 0 ? prev / mx : 0.0;
        table += num(h) + "," + num(mx) + "," + (prev > 0 ? num(ratio) : std::string()) + "\r\n";
        levels.push_back({{"h", h}, {"max_residual", mx}, {"ratio", prev > 0 ? nlohmann::ordered_json(ratio) : nullptr}});
        prev = mx;
    }
    write_file(ctx, "kdv_geodesic.csv", csv);
    write_file(ctx, "kdv_convergence.csv", table);
    out["convention"] = convention_tag(KdVConvention::eulerArnold3qqx);
    out["levels"] = levels;
    write_file(ctx, "kdv_geodesic.json", out.dump(2) + "\n");
    return 0;
}

int cmd_compare(const RunContext& ctx, nlohmann::ordered_json& out) {
    const auto& c = ctx.config;
    auto u0 = cosine_profile(c.kdvMode, c.kdvAmplitude);
    auto pipe = geodesic_to_kdv(u0, c.kdvTEnd, c.kdvH, pipeline_options(c));
    std::string csv = "t,gap_l2,reference_l2\r\n";
    double worst = 0;
    for (size_t i = 0; i < pipe.times.size(); ++i) {
        double t = pipe.times[i];
        // u(t, x) = q(2t, x): the reference in the 6uux convention runs to t/2
        KdVState s = sample_profile(u0, c.M, KdVConvention::kdv6uux);
        KdVState ref = t > 0 ? kdv_reference_solve(s, t / 2, c.kdvDt).frames.back() : s;
        double gap = 0, norm = 0;
        for (int j = 0; j < c.M; ++j) {
            double q = pipe.q[i].eval(2 * kPi * j / c.M).real();
            gap += (q - ref.u[j]) * (q - ref.u[j]);
            norm += ref.u[j] * ref.u[j];
        }
        gap = std::sqrt(gap / c.M);
        norm = std::sqrt(norm / c.M);
        worst = std::max(worst, gap / norm);
        csv += num(t) + "," + num(gap) + "," + num(norm) + "\r\n";
    }
    write_file(ctx, "compare.csv", csv);
    out = header("compare", c);
    out["max_relative_gap"] = worst;
    write_file(ctx, "compare.json", out.dump(2) + "\n");
    return 0;
}

using Command = int (*)(const RunContext&, nlohmann::ordered_json&);

const std::vector<std::pair<std::string, Command>>& table() {
    static const std::vector<std::pair<std::string, Command>> t = {
        {"validate", cmd_validate},         {"weld", cmd_weld},
        {"geodesic", cmd_geodesic},         {"curvature", cmd_curvature},
        {"kdv-geodesic", cmd_kdv_geodesic}, {"kdv-spectral", cmd_kdv_spectral},
        {"compare", cmd_compare},
    };
    return t;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> n = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : table()) v.push_back(k);
        return v;
    }();
    return n;
}

int run_command(const std::string& name, const RunContext& ctx, std::ostream& log) {
    for (const auto& [k, f] : table()) {
        if (k != name) continue;
        nlohmann::ordered_json out;
        int code = 0;
        try {
            code = f(ctx, out);
        } catch (const Error& e) {
            out = header(name, ctx.config);
            out["error"] = e.kind();
            out["message"] = e.what();
            code = 1;
        }
        if (!ctx.quiet) log << out.dump(2) << "\n";
        return code;
    }
    throw ConfigInvalid("unknown command '" + name + "'");
}

} // namespace uteich::cli
