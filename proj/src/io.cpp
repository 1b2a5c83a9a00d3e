#include "homog/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace homog {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

QuasiMetricSpace load_space(const std::string& path) {
    json j = read_json(path);
    QuasiMetricSpace X;
    if (!j.contains("A0") || !j.contains("d"))
        throw std::runtime_error(path + ": space file needs \"A0\" and \"d\"");
    X.A0 = j["A0"].get<double>();

    const json& d = j["d"];
    if (d.is_array()) {
        X.n = static_cast<int>(d.size());
        X.dist.assign(static_cast<size_t>(X.n) * X.n, 0.0);
        for (int i = 0; i < X.n; ++i) {
            if (!d[i].is_array() || static_cast<int>(d[i].size()) != X.n)
                throw std::runtime_error(path + ": \"d\" must be a square matrix");
            for (int k = 0; k < X.n; ++k) X.dist[static_cast<size_t>(i) * X.n + k] = d[i][k];
        }
    } else if (d.is_object() && d.value("kind", "") == "euclidean-grid") {
        std::vector<int> dims = d.at("dims").get<std::vector<int>>();
        if (dims.empty() || dims.size() > 2)
            throw std::runtime_error(path + ": euclidean-grid wants 1 or 2 dims");
        int nx = dims[0], ny = dims.size() == 2 ? dims[1] : 1;
        if (nx < 1 || ny < 1) throw std::runtime_error(path + ": grid dims must be positive");
        double h = d.value("spacing", 0.0);
        if (h <= 0.0) h = 1.0 / std::max(nx, ny);
        X.n = nx * ny;
        X.dist.assign(static_cast<size_t>(X.n) * X.n, 0.0);
        for (int i = 0; i < X.n; ++i)
            for (int k = 0; k < X.n; ++k) {
                double dx = (i % nx - k % nx) * h, dy = (i / nx - k / nx) * h;
                X.dist[static_cast<size_t>(i) * X.n + k] = std::sqrt(dx * dx + dy * dy);
            }
    } else {
        throw std::runtime_error(path + ": \"d\" must be a matrix or a euclidean-grid object");
    }

    if (j.contains("mu")) {
        X.mu = j["mu"].get<Vec>();
        if (static_cast<int>(X.mu.size()) != X.n)
            throw std::runtime_error(path + ": \"mu\" length does not match \"d\"");
    } else {
        X.mu.assign(X.n, 1.0);
    }
    if (j.contains("labels")) {
        X.labels = j["labels"].get<std::vector<std::string>>();
        if (!X.labels.empty() && static_cast<int>(X.labels.size()) != X.n)
            throw std::runtime_error(path + ": \"labels\" length does not match \"d\"");
    }
    ValidationReport rep = verify_space(X);
    if (!rep.ok()) throw std::runtime_error(path + ": invalid space\n" + rep.joined());
    return X;
}

void save_space(const QuasiMetricSpace& X, const std::string& path) {
    json j;
    j["A0"] = X.A0;
    j["mu"] = X.mu;
    json rows = json::array();
    for (int i = 0; i < X.n; ++i) {
        json row = json::array();
        for (int k = 0; k < X.n; ++k) row.push_back(X.d(i, k));
        rows.push_back(std::move(row));
    }
    j["d"] = std::move(rows);
    if (!X.labels.empty()) j["labels"] = X.labels;
    write_json(j, path);
}

void save_dyadic(const DyadicSystem& dys, const std::string& path) {
    json j;
    j["delta"] = dys.delta;
    j["K_max"] = dys.K_max;
    j["j0"] = dys.j0;
    j["c0"] = dys.c0;
    j["C0"] = dys.C0;
    j["c_nat"] = dys.c_nat();
    j["C_nat"] = dys.C_nat();
    json levels = json::array();
    for (const auto& lv : dys.levels) {
        json L;
        L["net"] = lv.net;
        L["cube_of"] = lv.cube_of;
        L["c_achieved"] = lv.c_achieved;
        L["C_achieved"] = lv.C_achieved;
        json cubes = json::array();
        for (const auto& Q : lv.cubes) {
            json c;
            c["center"] = Q.center;
            c["parent"] = Q.parent;
            c["children"] = Q.children;
            c["members"] = Q.members;
            cubes.push_back(std::move(c));
        }
        L["cubes"] = std::move(cubes);
        levels.push_back(std::move(L));
    }
    j["levels"] = std::move(levels);
    write_json(j, path);
}

void save_family(const OperatorFamily& fam, const std::string& base) {
    json j;
    j["kind"] = fam.kind == FamilyKind::haar_martingale ? "haar" : "gauss";
    j["n"] = fam.X->n;
    j["nu"] = fam.nu;
    j["a"] = fam.a;
    j["delta"] = fam.delta;
    j["K"] = fam.K;
    j["j0"] = fam.dys->j0;
    j["matrix_file"] = base + ".bin";
    j["layout"] = "P_0..P_K then Q_0..Q_K, n*n row-major float64 little-endian";
    json d;
    d["size_C"] = fam.diag.size_C;
    d["eta_eff"] = fam.diag.eta_eff;
    d["fitted_slope"] = fam.diag.fitted_slope;
    d["second_diff_C"] = fam.diag.second_diff_C;
    d["marginal_err"] = fam.diag.marginal_err;
    d["cancel_err"] = fam.diag.cancel_err;
    d["sinkhorn_iters"] = fam.diag.sinkhorn_iters;
    j["diagnostics"] = std::move(d);
    write_json(j, base + ".json");

    std::ofstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error(base + ".bin: cannot open for writing");
    for (const auto* set : {&fam.P, &fam.Q})
        for (const Matrix& M : *set)
            bin.write(reinterpret_cast<const char*>(M.a.data()),
                      static_cast<std::streamsize>(M.a.size() * sizeof(double)));
    if (!bin) throw std::runtime_error(base + ".bin: write failed");
}

OperatorFamily load_family(const std::string& base, const QuasiMetricSpace& X,
                           DyadicSystem* dys_out) {
    json j = read_json(base + ".json");
    if (static_cast<int>(j.at("n").get<int>()) != X.n)
        throw std::runtime_error(base + ".json: family was built on a space of different size");
    std::string kind = j.at("kind").get<std::string>();
    DyadicOptions opt;
    opt.delta = j.at("delta").get<double>();
    opt.K_max = j.at("K").get<int>();
    opt.j0 = j.at("j0").get<int>();
    *dys_out = build_dyadic(X, opt);

    OperatorFamily fam;
    fam.kind = kind == "haar" ? FamilyKind::haar_martingale : FamilyKind::gauss_sinkhorn;
    fam.X = &X;
    fam.dys = dys_out;
    fam.nu = j.at("nu").get<double>();
    fam.a = j.at("a").get<double>();
    fam.delta = opt.delta;
    fam.K = opt.K_max;
    if (j.contains("diagnostics")) {
        const json& d = j["diagnostics"];
        fam.diag.size_C = d.value("size_C", 0.0);
        fam.diag.eta_eff = d.value("eta_eff", 0.0);
        fam.diag.fitted_slope = d.value("fitted_slope", 0.0);
        fam.diag.second_diff_C = d.value("second_diff_C", 0.0);
        fam.diag.marginal_err = d.value("marginal_err", 0.0);
        fam.diag.cancel_err = d.value("cancel_err", 0.0);
        fam.diag.sinkhorn_iters = d.value("sinkhorn_iters", 0);
    }

    std::ifstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error(base + ".bin: cannot open");
    fam.P.assign(fam.K + 1, Matrix(X.n));
    fam.Q.assign(fam.K + 1, Matrix(X.n));
    for (auto* set : {&fam.P, &fam.Q})
        for (Matrix& M : *set) {
            bin.read(reinterpret_cast<char*>(M.a.data()),
                     static_cast<std::streamsize>(M.a.size() * sizeof(double)));
            if (!bin) throw std::runtime_error(base + ".bin: truncated matrix data");
        }
    return fam;
}

Vec load_vec(const std::string& path) {
    json j = read_json(path);
    if (j.is_object() && j.contains("f")) j = j["f"];
    if (!j.is_array()) throw std::runtime_error(path + ": expected a JSON array of values");
    return j.get<Vec>();
}

void save_vec(const Vec& v, const std::string& path) {
    write_json(json(v), path);
}

void save_decomposition(const AtomicDecomposition& dec, const std::string& path) {
    json j;
    j["p"] = dec.p;
    j["q"] = std::isinf(dec.q) ? json("inf") : json(dec.q);
    j["lp_sum"] = dec.lp_sum;
    j["residual_rel"] = dec.residual_rel;
    j["route_C"] = dec.route_C;
    j["scale_C"] = dec.scale_C;
    j["invalid"] = dec.invalid;
    json atoms = json::array();
    for (const AtomEntry& e : dec.atoms) {
        json a;
        a["lambda"] = e.lambda;
        a["x0"] = e.x0;
        a["r0"] = e.r0;
        a["j"] = e.j;
        a["k"] = e.k;
        a["global"] = e.global;
        a["a"] = e.a;
        atoms.push_back(std::move(a));
    }
    j["atoms"] = std::move(atoms);
    write_json(j, path);
}

AtomicDecomposition load_decomposition(const std::string& path) {
    json j = read_json(path);
    AtomicDecomposition dec;
    dec.p = j.at("p").get<double>();
    dec.q = j.at("q").is_string() ? std::numeric_limits<double>::infinity()
                                  : j.at("q").get<double>();
    dec.lp_sum = j.value("lp_sum", 0.0);
    dec.residual_rel = j.value("residual_rel", 0.0);
    dec.route_C = j.value("route_C", 0.0);
    dec.scale_C = j.value("scale_C", 0.0);
    dec.invalid = j.value("invalid", 0);
    for (const json& a : j.at("atoms")) {
        AtomEntry e;
        e.lambda = a.at("lambda").get<double>();
        e.x0 = a.at("x0").get<int>();
        e.r0 = a.at("r0").get<double>();
        e.j = a.value("j", 0);
        e.k = a.value("k", 0);
        e.global = a.value("global", false);
        e.a = a.at("a").get<Vec>();
        dec.atoms.push_back(std::move(e));
    }
    return dec;
}

} // namespace homog
