#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "schro/grid.hpp"
#include "schro/pde_model.hpp"

namespace schro {

using Json = nlohmann::ordered_json;

// Raw little-endian complex128 samples in <stem>.c128-le plus a JSON sidecar
// <stem>.json describing shape and axes. Returns the two paths.
struct FieldMeta {
    std::vector<int> shape;
    std::vector<AxisSpec> axes;
    Json extra = Json::object();
};
std::vector<std::string> write_field(const std::string& stem, const CVec& v, const FieldMeta& meta);
CVec read_field(const std::string& stem, FieldMeta* meta = nullptr);

std::string sha256_file(const std::string& path);

Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j, int nvars);
Json spec_to_json(const PdeSpec& s);
PdeSpec spec_from_json(const Json& j);
Json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const Json& j);

struct OracleSpec {
    std::string problem;
    std::map<std::string, double> params;
    double tol = 1e-2;
};

// One simulation request as read from a problem file.
struct ProblemFile {
    std::string path;
    std::string name;
    PdeSpec spec;
    GridSpec grid;
    InitialData init;
    double t = 1.0;
    double dt = 0.1;
    int krylov_m = 30;
    double krylov_tol = 1e-12;
    std::string pipeline = "auto";
    std::string recover = "integrate";
    double xi_star = 1.0;
    double margin = 0.0;
    bool check_boundary = true;  // off for data that does not decay, e.g. constant forcing
    Json detector;  // imperfect recovery: [lo, hi, ramp], {lo, hi, ramp} or {xi, f}
    std::optional<OracleSpec> oracle;
    Json raw;
};

// Validation errors for malformed content, Io errors for unreadable files.
ProblemFile load_problem(const std::string& path);
ProblemFile parse_problem(const Json& j, const std::string& base_dir = ".");

}  // namespace schro
