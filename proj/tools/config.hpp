#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "uteich/kdv.hpp"

namespace uteich::cli {

/// Every run parameter. Files use sectioned key=value lines; unknown sections or keys are rejected.
struct RunConfig {
    // [truncation]
    int N = 64;                  // graph operator size
    int K = 16;                  // tangent modes
    int D = 64;                  // Neumann degree cap
    int M = 256;                 // KdV grid
    // [tolerance]
    double neumann = 1e-12;
    double consistency = 1e-8;
    // [run]
    std::uint64_t seed = 7;
    // [weld]
    int weldMode = 2;
    double weldAmplitude = 0.0;
    int weldN = 512;
    int weldSamples = 256;
    // [geodesic]
    int geoSize = 8;
    int geoRank = 1;
    double geoTEnd = 1.0;
    double geoDt = 0.1;
    double geoTheta = 0.0;
    // [curvature]
    int curvSize = 16;
    int curvDirections = 50;
    // [kdv]
    KdVConvention convention = KdVConvention::kdv6uux;
    int kdvMode = 2;
    double kdvAmplitude = 1e-2;
    double kdvTEnd = 0.05;
    double kdvDt = 1e-4;
    double kdvH = 4e-3;
    int kdvSamples = 6;
    int kdvWeldN = 256;
    int kdvK = 4;
    int kdvLevels = 3;           // h, h/2, ... in the convergence table

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    /// Canonical key=value text; parse(to_text()) reproduces the config.
    std::string to_text() const;
    nlohmann::ordered_json to_json() const;
};

} // namespace uteich::cli
