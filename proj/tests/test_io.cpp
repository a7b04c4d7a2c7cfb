#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "schro/driver.hpp"

using namespace schro;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("schro_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Json heat_problem_json() {
    return Json::parse(R"({
      "name": "small heat",
      "builder": {"kind": "heat", "D": 1, "a": 1.0},
      "grid": {"x": [{"name": "x", "min": -12, "max": 12, "n": 64}], "xi": {"L": 10, "n": 128}},
      "initial": {"kind": "gaussian", "center": [0], "width": 1},
      "time": {"t": 0.25, "dt": 0.05},
      "oracle": {"problem": "heat", "params": {"a": 1.0}, "tol": 0.05}
    })");
}

}  // namespace

TEST(Io, FieldRoundTrip) {
    const fs::path d = scratch("field");
    CVec v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {0.5 * i, -1.0 / (i + 1)};
    FieldMeta m;
    m.shape = {3, 4};
    m.axes = {{"x", -1, 1, 3, true}, {"y", 0, 2, 4, false}};
    const auto files = write_field((d / "u").string(), v, m);
    ASSERT_EQ(files.size(), 2u);
    EXPECT_EQ(fs::file_size(files[0]), 12u * 16u);
    FieldMeta back;
    const CVec w = read_field((d / "u").string(), &back);
    EXPECT_EQ(w, v);
    EXPECT_EQ(back.shape, m.shape);
    EXPECT_EQ(back.axes, m.axes);
    fs::remove_all(d);
}

TEST(Io, Sha256KnownVector) {
    const fs::path d = scratch("sha");
    std::ofstream(d / "abc") << "abc";
    EXPECT_EQ(sha256_file((d / "abc").string()),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    fs::remove_all(d);
}

TEST(Io, SpecAndGridRoundTrip) {
    const PdeSpec s = build_heat(2, 0.7, {0.1, -0.2});
    EXPECT_EQ(spec_from_json(spec_to_json(s)), s);
    const PdeSpec c = build_convection(1, {cplx(1.5, 0.0)});
    EXPECT_EQ(spec_from_json(spec_to_json(c)), c);
    GridSpec g;
    g.x = {{"x", -3, 3, 32, true}, {"y", 0, 1, 16, false}};
    g.xi_L = 12;
    g.xi_n = 256;
    const GridSpec h = grid_from_json(grid_to_json(g));
    EXPECT_EQ(h.x, g.x);
    EXPECT_EQ(h.xi_L, g.xi_L);
    EXPECT_EQ(h.xi_n, g.xi_n);
}

TEST(Io, MalformedProblemIsValidationError) {
    Json j = heat_problem_json();
    j["pde"] = Json::object();  // both builder and pde
    try {
        parse_problem(j);
        FAIL() << "accepted builder and pde together";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
    }
    Json k = heat_problem_json();
    k["grid"]["xi"]["n"] = "many";
    try {
        parse_problem(k);
        FAIL() << "accepted a string grid size";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
    }
}

TEST(Io, MissingFileIsIoError) {
    try {
        load_problem("/nonexistent/problem.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Driver, HeatAgainstOracle) {
    const ProblemFile pf = parse_problem(heat_problem_json());
    const Simulation s = simulate(pf);
    const OracleReport r = compare_to_oracle(pf, s);
    EXPECT_EQ(r.problem, "heat");
    EXPECT_TRUE(r.pass) << r.error;
    EXPECT_LT(s.run.stats.norm_drift, 1e-10);
}

TEST(Driver, DetectorProfileShapes) {
    const DetectorProfile a = detector_from_json(Json::parse("[1.0, 3.0, 0.5]"));
    EXPECT_DOUBLE_EQ(a(2.0), 1.0);
    EXPECT_DOUBLE_EQ(a(0.75), 0.5);
    EXPECT_DOUBLE_EQ(a(0.0), 0.0);
    const DetectorProfile b = detector_from_json(Json::parse(R"({"xi": [0, 1, 2], "f": [0, 1, 0.5]})"));
    EXPECT_DOUBLE_EQ(b(0.5), 0.5);
    EXPECT_DOUBLE_EQ(b(1.5), 0.75);
}
