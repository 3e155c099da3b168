#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace uteich::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigInvalid(key + ": not an integer: '" + v + "'");
    return x;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigInvalid(key + ": not a number: '" + v + "'");
    return x;
}

struct Key {
    std::string name;  // section.key
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Key positive(std::string name, int RunConfig::*f) {
    return {name,
            [=](RunConfig& c, const std::string& v) {
                long long x = to_int(name, v);
                if (x <= 0 || x > 1 << 20) throw ConfigInvalid(name + " must be a positive integer");
                c.*f = static_cast<int>(x);
            },
            [=](const RunConfig& c) { return std::to_string(c.*f); }};
}

Key tolerance(std::string name, double RunConfig::*f) {
    return {name,
            [=](RunConfig& c, const std::string& v) {
                double x = to_double(name, v);
                if (!(x > 0 && x < 1)) throw ConfigInvalid(name + " must lie in (0, 1)");
                c.*f = x;
            },
            [=](const RunConfig& c) { return fmt_double(c.*f); }};
}

Key real(std::string name, double RunConfig::*f, double lo, double hi) {
    return {name,
            [=](RunConfig& c, const std::string& v) {
                double x = to_double(name, v);
                if (x < lo || x > hi) throw ConfigInvalid(name + " out of range [" + fmt_double(lo) + ", " + fmt_double(hi) + "]");
                c.*f = x;
            },
            [=](const RunConfig& c) { return fmt_double(c.*f); }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        positive("truncation.N", &RunConfig::N),
        positive("truncation.K", &RunConfig::K),
        positive("truncation.D", &RunConfig::D),
        positive("truncation.M", &RunConfig::M),
        tolerance("tolerance.neumann", &RunConfig::neumann),
        tolerance("tolerance.consistency", &RunConfig::consistency),
        {"run.seed",
         [](RunConfig& c, const std::string& v) {
             std::uint64_t x = 0;
             auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
             if (ec != std::errc() || p != v.data() + v.size()) throw ConfigInvalid("run.seed: not an unsigned integer");
             c.seed = x;
         },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        positive("weld.mode", &RunConfig::weldMode),
        real("weld.amplitude", &RunConfig::weldAmplitude, -0.5, 0.5),
        positive("weld.n", &RunConfig::weldN),
        positive("weld.samples", &RunConfig::weldSamples),
        positive("geodesic.size", &RunConfig::geoSize),
        positive("geodesic.rank", &RunConfig::geoRank),
        real("geodesic.t_end", &RunConfig::geoTEnd, 0, 1e3),
        real("geodesic.dt", &RunConfig::geoDt, 1e-9, 1e3),
        real("geodesic.theta", &RunConfig::geoTheta, -10, 10),
        positive("curvature.size", &RunConfig::curvSize),
        positive("curvature.directions", &RunConfig::curvDirections),
        {"kdv.convention", [](RunConfig& c, const std::string& v) { c.convention = parse_convention(v); },
         [](const RunConfig& c) { return convention_tag(c.convention); }},
        positive("kdv.mode", &RunConfig::kdvMode),
        real("kdv.amplitude", &RunConfig::kdvAmplitude, -1e3, 1e3),
        real("kdv.t_end", &RunConfig::kdvTEnd, 0, 1e3),
        tolerance("kdv.dt", &RunConfig::kdvDt),
        tolerance("kdv.h", &RunConfig::kdvH),
        positive("kdv.samples", &RunConfig::kdvSamples),
        positive("kdv.weld_n", &RunConfig::kdvWeldN),
        positive("kdv.K", &RunConfig::kdvK),
        positive("kdv.levels", &RunConfig::kdvLevels),
    };
    return k;
}

void check_consistency(const RunConfig& c) {
    if (c.M % 2) throw ConfigInvalid("truncation.M must be even");
    if (c.K < 2 || c.kdvK < 2) throw ConfigInvalid("tangent truncations start at mode 2");
    if (c.weldMode < 2 || c.kdvMode < 2) throw ConfigInvalid("modes 0 and 1 carry no tangent direction");
    if (c.weldMode > c.K) throw ConfigInvalid("weld.mode exceeds truncation.K");
    if (c.kdvMode > c.kdvK) throw ConfigInvalid("kdv.mode exceeds kdv.K");
    if (c.geoRank > c.geoSize) throw ConfigInvalid("geodesic.rank exceeds geodesic.size");
    if (c.kdvSamples < 2) throw ConfigInvalid("kdv.samples must be at least 2");
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig c;
    std::map<std::string, const Key*> index;
    for (const auto& k : keys()) index[k.name] = &k;
    std::istringstream in(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineNo) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigInvalid(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigInvalid(where + "expected key = value");
        if (section.empty()) throw ConfigInvalid(where + "key outside a section");
        std::string name = section + "." + trim(line.substr(0, eq));
        auto it = index.find(name);
        if (it == index.end()) throw ConfigInvalid(where + "unknown key '" + name + "'");
        it->second->set(c, trim(line.substr(eq + 1)));
    }
    check_consistency(c);
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::to_text() const {
    std::string out, section;
    for (const auto& k : keys()) {
        auto dot = k.name.find('.');
        std::string s = k.name.substr(0, dot);
        if (s != section) {
            out += (out.empty() ? "[" : "\n[") + s + "]\n";
            section = s;
        }
        out += k.name.substr(dot + 1) + " = " + k.get(*this) + "\n";
    }
    return out;
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    for (const auto& k : keys()) j[k.name] = k.get(*this);
    return j;
}

} // namespace uteich::cli
