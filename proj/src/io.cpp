#include "schro/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "schro/uq.hpp"

namespace schro {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace fs = std::filesystem;

namespace {

Json axis_to_json(const AxisSpec& a) {
    return Json{{"name", a.name}, {"min", a.min}, {"max", a.max}, {"n", a.n}, {"periodic", a.periodic}};
}

AxisSpec axis_from_json(const Json& j) {
    AxisSpec a;
    a.name = j.value("name", std::string("x"));
    a.min = j.at("min").get<double>();
    a.max = j.at("max").get<double>();
    a.n = j.at("n").get<int>();
    a.periodic = j.value("periodic", true);
    return a;
}

cplx number(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    fail(ErrorKind::Validation, "expected a number or a [re, im] pair");
}

Json number_to_json(cplx c) {
    if (c.imag() == 0.0) return c.real();
    return Json::array({c.real(), c.imag()});
}

CoefficientExpr coef_from_json(const Json& j, int nvars) {
    if (j.is_object() && j.contains("table")) {
        const Json& t = j.at("table");
        TabulatedField f;
        f.shape = t.at("shape").get<std::vector<int>>();
        const auto re = t.at("re").get<std::vector<double>>();
        const auto im = t.value("im", std::vector<double>(re.size(), 0.0));
        if (im.size() != re.size()) fail(ErrorKind::Validation, "table re/im length mismatch");
        for (std::size_t i = 0; i < re.size(); ++i) f.values.emplace_back(re[i], im[i]);
        return CoefficientExpr(std::move(f));
    }
    return CoefficientExpr(polynomial_from_json(j, nvars));
}

Json coef_to_json(const CoefficientExpr& c) {
    if (c.is_polynomial()) return polynomial_to_json(c.poly());
    Json re = Json::array(), im = Json::array();
    for (const cplx& v : c.table().values) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return Json{{"table", {{"shape", c.table().shape}, {"re", re}, {"im", im}}}};
}

InitialData initial_from_json(const Json& j, const GridSpec& g, const PdeSpec& spec, const std::string& base) {
    InitialData init;
    auto field = [&](const Json& f) -> CVec {
        const std::string kind = f.value("kind", std::string("gaussian"));
        if (kind == "gaussian") {
            std::vector<double> c = f.value("center", std::vector<double>(g.x.size(), 0.0));
            if (c.size() != g.x.size()) fail(ErrorKind::Validation, "initial center has the wrong dimension");
            const double w = f.value("width", 1.0);
            if (!(w > 0.0)) fail(ErrorKind::Validation, "initial width must be positive");
            return gaussian_field(g, c, w, f.contains("amplitude") ? number(f.at("amplitude")) : cplx(1.0));
        }
        if (kind == "zero") {
            std::size_t n = 1;
            for (int s : grid_shape(g)) n *= static_cast<std::size_t>(s);
            return CVec(n, 0.0);
        }
        if (kind == "file") {
            fs::path p = f.at("path").get<std::string>();
            if (p.is_relative()) p = fs::path(base) / p;
            FieldMeta m;
            CVec v = read_field(p.string(), &m);
            if (m.shape != grid_shape(g)) fail(ErrorKind::Validation, "initial field shape differs from the grid");
            return v;
        }
        fail(ErrorKind::Validation, "unknown initial data kind '" + kind + "'");
    };
    init.shape = grid_shape(g);
    init.u0 = field(j);
    init.provenance = j.value("kind", std::string("gaussian"));
    for (const auto& v : init.u0)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail(ErrorKind::Validation, "initial data is not finite");
    if (spec.time_order == 2) init.ut0 = j.contains("velocity") ? field(j.at("velocity")) : CVec(init.u0.size(), 0.0);
    if (spec.L > 0) {
        // z-independent data: only the n = 0 chaos coefficient is set
        GridSpec gg = g;
        const LayoutPtr L = make_layout(gg, 0, 0);
        const CVec u = init.u0;
        init.u0 = hermite_project([&](std::span<const double>) { return u; }, *L);
        init.provenance += " (chaos projected)";
    }
    return init;
}

PdeSpec from_builder(const Json& b) {
    const std::string kind = b.at("kind").get<std::string>();
    if (kind == "convection") {
        std::vector<cplx> a;
        for (const auto& v : b.at("a")) a.push_back(number(v));
        return build_convection(static_cast<int>(a.size()), a);
    }
    if (kind == "heat") {
        const int D = b.value("D", 1);
        return build_heat(D, b.value("a", 1.0), b.value("k", std::vector<double>{}));
    }
    if (kind == "fokker_planck") {
        const int D = b.value("D", 1);
        std::vector<Polynomial> mu, d;
        for (const auto& v : b.at("drift")) mu.push_back(polynomial_from_json(v, D));
        for (const auto& v : b.at("diffusion")) d.push_back(polynomial_from_json(v, D));
        return build_fokker_planck(D, mu, d);
    }
    if (kind == "black_scholes") return build_black_scholes(b.value("sigma", 0.2), b.value("r", 0.05));
    if (kind == "wave") {
        const auto s = b.at("speeds").get<std::vector<double>>();
        const int D = static_cast<int>(s.size());
        return build_wave(D, s, b.contains("V") ? polynomial_from_json(b.at("V"), D) : Polynomial(D));
    }
    if (kind == "liouville") {
        const int D = b.value("D", 1);
        std::vector<Polynomial> a;
        for (const auto& v : b.at("a")) a.push_back(polynomial_from_json(v, D));
        return build_liouville(D, a);
    }
    if (kind == "uq_convection") {
        const int D = b.value("D", 1), L = b.value("L", 1);
        std::vector<Polynomial> c;
        for (const auto& v : b.at("c")) c.push_back(polynomial_from_json(v, D + L));
        return build_uncertain_convection(D, L, c);
    }
    fail(ErrorKind::Validation, "unknown builder '" + kind + "'");
}

}  // namespace

std::vector<std::string> write_field(const std::string& stem, const CVec& v, const FieldMeta& meta) {
    std::size_t n = 1;
    for (int s : meta.shape) n *= static_cast<std::size_t>(s);
    if (n != v.size()) fail(ErrorKind::Validation, "field size does not match its shape");
    const std::string data = stem + ".c128-le", side = stem + ".json";
    {
        std::ofstream f(data, std::ios::binary);
        if (!f) fail(ErrorKind::Io, "cannot write " + data);
        f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
        if (!f) fail(ErrorKind::Io, "short write on " + data);
    }
    Json j{{"format", "c128-le"},
           {"dtype", "complex128"},
           {"endianness", "little"},
           {"order", "row-major"},
           {"shape", meta.shape},
           {"data", fs::path(data).filename().string()}};
    Json axes = Json::array();
    for (const auto& a : meta.axes) axes.push_back(axis_to_json(a));
    j["axes"] = axes;
    for (auto it = meta.extra.begin(); it != meta.extra.end(); ++it) j[it.key()] = it.value();
    std::ofstream s(side);
    if (!s) fail(ErrorKind::Io, "cannot write " + side);
    s << j.dump(2) << '\n';
    return {data, side};
}

CVec read_field(const std::string& stem, FieldMeta* meta) {
    std::ifstream s(stem + ".json");
    if (!s) fail(ErrorKind::Io, "cannot read " + stem + ".json");
    Json j;
    try {
        s >> j;
    } catch (const Json::exception& e) {
        fail(ErrorKind::Validation, std::string("bad field sidecar: ") + e.what());
    }
    if (j.value("format", std::string()) != "c128-le") fail(ErrorKind::Validation, "unsupported field format");
    FieldMeta m;
    m.shape = j.at("shape").get<std::vector<int>>();
    for (const auto& a : j.value("axes", Json::array())) m.axes.push_back(axis_from_json(a));
    std::size_t n = 1;
    for (int x : m.shape) n *= static_cast<std::size_t>(x);
    CVec v(n);
    std::ifstream f(stem + ".c128-le", std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot read " + stem + ".c128-le");
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
    if (f.gcount() != static_cast<std::streamsize>(n * sizeof(cplx))) fail(ErrorKind::Validation, "field data is truncated");
    if (meta) *meta = std::move(m);
    return v;
}

std::string sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot read " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (f) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char b[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

Json polynomial_to_json(const Polynomial& p) {
    Json a = Json::array();
    for (const auto& [e, c] : p.terms()) a.push_back(Json{{"exp", e}, {"c", number_to_json(c)}});
    return a;
}

Polynomial polynomial_from_json(const Json& j, int nvars) {
    if (j.is_number()) {
        const double c = j.get<double>();
        return c == 0.0 ? Polynomial(nvars) : Polynomial::constant(nvars, c);
    }
    if (!j.is_array()) fail(ErrorKind::Validation, "polynomial must be a number or a list of terms");
    Polynomial p(nvars);
    for (const auto& t : j) {
        std::vector<int> e = t.value("exp", std::vector<int>{});
        if (static_cast<int>(e.size()) > nvars) fail(ErrorKind::Validation, "polynomial exponent has too many variables");
        for (int x : e)
            if (x < 0) fail(ErrorKind::Validation, "polynomial exponents must be non-negative");
        e.resize(nvars, 0);
        p.add_term(e, number(t.at("c")));
    }
    return p;
}

Json spec_to_json(const PdeSpec& s) {
    const int nv = s.D + s.L;
    Json terms = Json::array();
    for (const auto& t : s.terms) {
        Json e{{"axis", t.j + 1}, {"order", t.k}, {"coef", coef_to_json(t.coef)}, {"kind", term_kind_name(t.kind)}};
        if (t.i >= 0) e["outer"] = t.i + 1;
        terms.push_back(e);
    }
    Json j{{"name", s.name}, {"D", s.D}, {"time_order", s.time_order}, {"L", s.L}, {"terms", terms}, {"b", coef_to_json(s.b)}};
    if (s.f) j["f"] = coef_to_json(*s.f);
    if (s.time_order == 2) {
        j["c0"] = coef_to_json(s.c0);
        Json cj = Json::array();
        for (const auto& c : s.cj) cj.push_back(coef_to_json(c));
        j["cj"] = cj;
    }
    if (s.allow_unstable) j["allow_unstable"] = true;
    (void)nv;
    return j;
}

PdeSpec spec_from_json(const Json& j) {
    PdeSpec s;
    s.name = j.value("name", std::string("pde"));
    s.D = j.at("D").get<int>();
    s.L = j.value("L", 0);
    s.time_order = j.value("time_order", 1);
    if (s.D < 1 || s.L < 0) fail(ErrorKind::Validation, "D must be >= 1 and L >= 0");
    const int nv = s.D + s.L;
    for (const auto& t : j.value("terms", Json::array())) {
        DerivativeTerm d;
        d.j = t.at("axis").get<int>() - 1;
        d.k = t.at("order").get<int>();
        d.coef = coef_from_json(t.at("coef"), nv);
        const std::string kind = t.value("kind", std::string("plain"));
        const auto k = term_kind_from_name(kind);
        if (!k) fail(ErrorKind::Validation, "unknown term kind '" + kind + "'");
        d.kind = *k;
        if (t.contains("outer")) d.i = t.at("outer").get<int>() - 1;
        s.terms.push_back(std::move(d));
    }
    s.b = j.contains("b") ? coef_from_json(j.at("b"), nv) : CoefficientExpr(Polynomial(nv));
    if (j.contains("f")) s.f = coef_from_json(j.at("f"), nv);
    if (j.contains("c0")) s.c0 = coef_from_json(j.at("c0"), nv);
    for (const auto& c : j.value("cj", Json::array())) s.cj.push_back(coef_from_json(c, nv));
    s.allow_unstable = j.value("allow_unstable", false);
    return s;
}

Json grid_to_json(const GridSpec& g) {
    Json x = Json::array();
    for (const auto& a : g.x) x.push_back(axis_to_json(a));
    Json j{{"x", x}, {"xi", {{"L", g.xi_L}, {"n", g.xi_n}}}};
    if (!g.n_max.empty()) j["n_max"] = g.n_max;
    return j;
}

GridSpec grid_from_json(const Json& j) {
    GridSpec g;
    for (const auto& a : j.at("x")) g.x.push_back(axis_from_json(a));
    if (j.contains("xi")) {
        g.xi_L = j.at("xi").value("L", 10.0);
        g.xi_n = j.at("xi").value("n", 512);
    }
    g.n_max = j.value("n_max", std::vector<int>{});
    return g;
}

ProblemFile parse_problem(const Json& j, const std::string& base_dir) {
    try {
        ProblemFile pf;
        pf.raw = j;
        if (j.contains("builder") == j.contains("pde")) fail(ErrorKind::Validation, "give exactly one of 'builder' and 'pde'");
        pf.spec = j.contains("pde") ? spec_from_json(j.at("pde")) : from_builder(j.at("builder"));
        if (j.contains("forcing")) pf.spec.f = coef_from_json(j.at("forcing"), pf.spec.D + pf.spec.L);
        pf.name = j.value("name", pf.spec.name);
        pf.grid = grid_from_json(j.at("grid"));
        require_valid(pf.spec, pf.grid);
        pf.init = initial_from_json(j.value("initial", Json{{"kind", "gaussian"}}), pf.grid, pf.spec, base_dir);
        if (j.contains("time")) {
            pf.t = j.at("time").value("t", pf.t);
            pf.dt = j.at("time").value("dt", pf.dt);
        }
        if (!(pf.t >= 0.0) || !(pf.dt > 0.0)) fail(ErrorKind::Validation, "need t >= 0 and dt > 0");
        if (j.contains("evolve")) {
            pf.krylov_m = j.at("evolve").value("krylov_m", pf.krylov_m);
            pf.krylov_tol = j.at("evolve").value("krylov_tol", pf.krylov_tol);
        }
        pf.pipeline = j.value("pipeline", pf.pipeline);
        pf.recover = j.value("recover", pf.recover);
        pf.xi_star = j.value("xi_star", pf.xi_star);
        pf.margin = j.value("margin", pf.margin);
        pf.check_boundary = j.value("check_boundary", pf.check_boundary);
        if (j.contains("detector")) pf.detector = j.at("detector");
        if (j.contains("oracle")) {
            OracleSpec o;
            o.problem = j.at("oracle").at("problem").get<std::string>();
            o.params = j.at("oracle").value("params", std::map<std::string, double>{});
            o.tol = j.at("oracle").value("tol", o.tol);
            pf.oracle = o;
        }
        return pf;
    } catch (const Json::exception& e) {
        fail(ErrorKind::Validation, std::string("malformed problem file: ") + e.what());
    }
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorKind::Io, "cannot open " + path);
    Json j;
    try {
        f >> j;
    } catch (const Json::exception& e) {
        fail(ErrorKind::Validation, std::string("malformed JSON: ") + e.what());
    }
    ProblemFile pf = parse_problem(j, fs::path(path).parent_path().string());
    pf.path = path;
    return pf;
}

}  // namespace schro
