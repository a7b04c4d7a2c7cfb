#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schro/io.hpp"
#include "schro/recovery.hpp"

namespace schro {

// Detector response for imperfect recovery: 1 on [lo, hi], linear ramps of
// width `ramp` outside, or linear interpolation of a table.
struct DetectorProfile {
    double lo = 0.0, hi = 1e300, ramp = 0.0;
    std::vector<double> xi, f;
    double operator()(double x) const;
};
DetectorProfile detector_from_json(const Json& j);

struct Simulation {
    SchrodingerisedSystem sys;
    RunResult run;
    double forcing_error = -1.0;  // inhomogeneous only: max |sector 1 - f| / max |f|
    double t_schrodingerise = 0.0, t_evolve = 0.0, t_recover = 0.0;
};

RunConfig run_config(const ProblemFile& pf, int threads = 0);
Simulation simulate(const ProblemFile& pf, int threads = 0);

struct OracleReport {
    std::string problem, method, metric;
    double error = 0.0, tol = 0.0, accuracy = 0.0;
    bool pass = false;
    Json detail = Json::object();
};

// Compares the recovered field against the reference named in pf.oracle.
OracleReport compare_to_oracle(const ProblemFile& pf, const Simulation& s);

Json recovery_json(const Simulation& s);

}  // namespace schro
