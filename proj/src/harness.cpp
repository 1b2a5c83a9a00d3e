#include "homog/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "homog/generators.hpp"
#include "homog/io.hpp"
#include "homog/rng.hpp"
#include "homog/square.hpp"
#include "json.hpp"

namespace homog {

namespace {

using nlohmann::json;

constexpr double kInfQ = std::numeric_limits<double>::infinity();

double linf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

bool all_zero(const Vec& v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

// L^q over an explicit member list, ascending order, matching the validator's
// summation shape so the identity candidate's scale lands within a few ulp.
double lq_members(const QuasiMetricSpace& X, const Vec& f, const std::vector<int>& members,
                  double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (int y : members) m = std::max(m, std::fabs(f[y]));
        return m;
    }
    double s = 0.0;
    for (int y : members) s += std::pow(std::fabs(f[y]), q) * X.mu[y];
    return std::pow(s, 1.0 / q);
}

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["space_kind"] = cfg.space_kind;
    j["space_file"] = cfg.space_file;
    j["n"] = cfg.n;
    j["nx"] = cfg.nx;
    j["ny"] = cfg.ny;
    j["depth"] = cfg.depth;
    j["spacing"] = cfg.spacing;
    j["space_seed"] = cfg.space_seed;
    j["family"] = cfg.family;
    j["nu"] = cfg.nu;
    j["a"] = cfg.a;
    j["p_grid"] = cfg.p_grid;
    j["theta"] = cfg.theta;
    j["lambda"] = cfg.lambda;
    j["N"] = cfg.N;
    j["j0"] = cfg.j0;
    j["suite"] = cfg.suite;
    j["seed"] = cfg.seed;
    j["out_csv"] = cfg.out_csv;
    j["out_json"] = cfg.out_json;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.space_kind = j.value("space_kind", cfg.space_kind);
    cfg.space_file = j.value("space_file", cfg.space_file);
    cfg.n = j.value("n", cfg.n);
    cfg.nx = j.value("nx", cfg.nx);
    cfg.ny = j.value("ny", cfg.ny);
    cfg.depth = j.value("depth", cfg.depth);
    cfg.spacing = j.value("spacing", cfg.spacing);
    cfg.space_seed = j.value("space_seed", cfg.space_seed);
    cfg.family = j.value("family", cfg.family);
    cfg.nu = j.value("nu", cfg.nu);
    cfg.a = j.value("a", cfg.a);
    cfg.p_grid = j.value("p_grid", cfg.p_grid);
    cfg.theta = j.value("theta", cfg.theta);
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.N = j.value("N", cfg.N);
    cfg.j0 = j.value("j0", cfg.j0);
    cfg.suite = j.value("suite", cfg.suite);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_csv = j.value("out_csv", cfg.out_csv);
    cfg.out_json = j.value("out_json", cfg.out_json);
    return cfg;
}

// Valid local (1,inf)-atom with a strict margin: random values on a ball of
// at least two points, mean-removed when the ball is small, scaled to
// (1 - 2^-40) of the size bound.
Vec random_local_atom(const QuasiMetricSpace& X, Rng& rng, const std::vector<double>& radii,
                      int* x0_out = nullptr, double* r0_out = nullptr) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        int x0 = static_cast<int>(rng.below(X.n));
        double rmin = std::numeric_limits<double>::infinity();
        for (int y = 0; y < X.n; ++y)
            if (y != x0) rmin = std::min(rmin, X.d(x0, y));
        std::vector<double> eligible;
        for (double r : radii)
            if (r > rmin) eligible.push_back(r);
        if (eligible.empty()) continue;
        double r0 = eligible[rng.below(eligible.size())];
        std::vector<int> ball = X.ball(x0, r0);

        Vec a(X.n, 0.0);
        for (int y : ball) a[y] = rng.uniform(-1.0, 1.0);
        if (r0 <= 1.0) {
            double num = 0.0, den = 0.0;
            for (int y : ball) {
                num += a[y] * X.mu[y];
                den += X.mu[y];
            }
            double m = num / den;
            for (int y : ball) a[y] -= m;
        }
        double top = 0.0;
        for (int y : ball) top = std::max(top, std::fabs(a[y]));
        if (top == 0.0) continue;
        double muB = X.ballMeasure(x0, r0);
        double scale = std::pow(muB, -1.0) * (1.0 - 0x1.0p-40) / top;  // p_ref = 1, q = inf
        for (int y : ball) a[y] *= scale;
        if (x0_out) *x0_out = x0;
        if (r0_out) *r0_out = r0;
        return a;
    }
    throw std::runtime_error("could not place a random atom on this space");
}

// Small-core atom plus geometrically damped annulus noise, the molecule
// shape the tail validator expects.
Vec random_molecule(const QuasiMetricSpace& X, Rng& rng, const std::vector<double>& radii) {
    int x0 = 0;
    double r0 = 0.0;
    Vec a = random_local_atom(X, rng, radii, &x0, &r0);
    double delta = default_delta(X.A0);
    std::vector<int> inner = X.ball(x0, r0);
    std::vector<char> seen(X.n, 0);
    for (int y : inner) seen[y] = 1;
    for (int m = 1; m <= 60; ++m) {
        double rm = r0 / std::pow(delta, m);
        std::vector<int> outer = X.ball(x0, rm);
        std::vector<int> ann;
        for (int y : outer)
            if (!seen[y]) ann.push_back(y);
        if (ann.empty()) {
            if (rm > X.diameter()) break;
            continue;
        }
        double eps = std::pow(2.0, -m);
        double bound = 0.5 * eps * std::pow(X.ballMeasure(x0, rm), -1.0);
        for (int y : ann) {
            a[y] = rng.uniform(-1.0, 1.0) * bound;
            seen[y] = 1;
        }
    }
    return a;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t s = v.size();
    return s % 2 ? v[s / 2] : 0.5 * (v[s / 2 - 1] + v[s / 2]);
}

} // namespace

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return config_from_json(j);
}

void config_to_json_file(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << config_json(cfg).dump(2) << '\n';
}

std::unique_ptr<Workbench> build_workbench(const ExperimentConfig& cfg) {
    auto wb = std::make_unique<Workbench>();
    if (cfg.space_kind == "grid1d")
        wb->X = grid1d(cfg.n, cfg.spacing);
    else if (cfg.space_kind == "grid2d")
        wb->X = grid2d(cfg.nx, cfg.ny, cfg.spacing);
    else if (cfg.space_kind == "snowflake")
        wb->X = snowflake_square(cfg.n, cfg.spacing);
    else if (cfg.space_kind == "cantor")
        wb->X = cantor_ultrametric(cfg.depth);
    else if (cfg.space_kind == "graph")
        wb->X = weighted_graph(cfg.n, cfg.space_seed);
    else if (cfg.space_kind == "cloud")
        wb->X = random_cloud(cfg.n, cfg.space_seed);
    else if (cfg.space_kind == "file")
        wb->X = load_space(cfg.space_file);
    else
        throw std::invalid_argument("unknown space kind \"" + cfg.space_kind + "\"");

    DyadicOptions opt;
    if (cfg.j0 > 0) opt.j0 = cfg.j0;
    wb->dys = build_dyadic(wb->X, opt);

    if (cfg.family == "haar")
        wb->fam = build_haar_family(wb->dys);
    else if (cfg.family == "gauss")
        wb->fam = build_gauss_sinkhorn_family(wb->X, wb->dys, cfg.nu, cfg.a);
    else
        throw std::invalid_argument("unknown family \"" + cfg.family + "\"");
    wb->fam.X = &wb->X;
    wb->fam.dys = &wb->dys;
    verify_iati(wb->fam);

    wb->omega = doubling_profile(wb->X).omega;
    if (wb->fam.kind == FamilyKind::gauss_sinkhorn)
        wb->beta = wb->gamma = std::min(0.49, 0.9 * wb->fam.diag.eta_eff);
    else
        wb->beta = wb->gamma = 0.49;
    wb->dict = build_test_dictionary(wb->fam, wb->beta, wb->gamma);
    wb->dict.X = &wb->X;
    wb->dict.fam = &wb->fam;
    return wb;
}

SuiteKind suite_kind(int index) {
    int r = index % 10;
    if (r < 4) return SuiteKind::smooth;
    if (r < 7) return SuiteKind::atom;
    if (r < 9) return SuiteKind::molecule;
    return SuiteKind::spike;
}

const char* suite_kind_name(SuiteKind k) {
    switch (k) {
    case SuiteKind::smooth: return "smooth";
    case SuiteKind::atom: return "atom";
    case SuiteKind::molecule: return "molecule";
    default: return "spike";
    }
}

std::vector<Vec> generate_suite(const Workbench& wb, int count, uint64_t seed,
                                std::vector<SuiteKind>* kinds_out) {
    if (count < 1) throw std::invalid_argument("empty suite");
    const QuasiMetricSpace& X = wb.X;
    Rng rng(seed);
    std::vector<double> radii = ball_family_radii(X);
    std::vector<Vec> suite;
    suite.reserve(count);
    if (kinds_out) kinds_out->clear();
    for (int i = 0; i < count; ++i) {
        SuiteKind kind = suite_kind(i);
        if (kinds_out) kinds_out->push_back(kind);
        switch (kind) {
        case SuiteKind::smooth: {
            Vec noise(X.n);
            for (double& v : noise) v = rng.uniform(-1.0, 1.0);
            suite.push_back(wb.fam.applyP(wb.fam.K / 2, noise));
            break;
        }
        case SuiteKind::atom: suite.push_back(random_local_atom(X, rng, radii)); break;
        case SuiteKind::molecule: suite.push_back(random_molecule(X, rng, radii)); break;
        default: {
            Vec f(X.n, 0.0);
            int x = static_cast<int>(rng.below(X.n));
            f[x] = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.5, 1.5);
            suite.push_back(std::move(f));
        }
        }
    }
    return suite;
}

double finite_atomic_upper_bound(const Workbench& wb, const Vec& f, double p, double q,
                                 AtomicDecomposition* best_out) {
    const QuasiMetricSpace& X = wb.X;
    if (static_cast<int>(f.size()) != X.n)
        throw std::invalid_argument("input length does not match the space");
    if (all_zero(f)) {
        if (best_out) *best_out = AtomicDecomposition{p, q, {}, 0.0, 0.0, 0.0, 0.0, 0};
        return 0.0;
    }

    double best = std::numeric_limits<double>::infinity();
    AtomicDecomposition best_dec;

    // identity candidate: rescale f into a single atom on the cheapest
    // enclosing ball; an inflated past-unit ball drops the cancellation cost
    std::vector<int> support;
    for (int y = 0; y < X.n; ++y)
        if (f[y] != 0.0) support.push_back(y);
    std::vector<double> radii = ball_family_radii(X);
    double integ = 0.0;
    for (int y : support) integ += f[y] * X.mu[y];
    for (int x0 = 0; x0 < X.n; ++x0) {
        double maxd = 0.0;
        for (int y : support) maxd = std::max(maxd, X.d(x0, y));
        std::vector<double> r_try;
        double tight = std::numeric_limits<double>::infinity();
        for (double r : radii)
            if (r > maxd) tight = std::min(tight, r);
        if (std::isfinite(tight)) r_try.push_back(tight);
        if (!(tight > 1.0)) {
            double loose = std::numeric_limits<double>::infinity();
            for (double r : radii)
                if (r > 1.0) loose = std::min(loose, r);
            if (std::isfinite(loose)) r_try.push_back(loose);
        }
        for (double r0 : r_try) {
            std::vector<int> ball = X.ball(x0, r0);
            double muB = X.ballMeasure(x0, r0);
            double bound = std::pow(muB, (std::isinf(q) ? 0.0 : 1.0 / q) - 1.0 / p);
            double c = lq_members(X, f, ball, q) / bound;
            if (r0 <= 1.0) c = std::max(c, std::fabs(integ) / 1e-10);
            if (!(c > 0.0) || !std::isfinite(c) || c >= best) continue;
            Vec a(X.n, 0.0);
            bool ok = false;
            for (int pass = 0; pass < 64 && !ok; ++pass) {
                for (int y : ball) a[y] = f[y] / c;
                ok = validate_local_atom(X, a, x0, r0, p, q).ok();
                if (!ok) c *= 1.0 + 0x1.0p-50;
            }
            if (!ok || c >= best) continue;
            best = c;
            AtomEntry e;
            e.a = a;
            e.x0 = x0;
            e.r0 = r0;
            e.lambda = c;
            e.global = false;
            best_dec = AtomicDecomposition{p, q, {std::move(e)}, std::pow(c, p), 0.0, 0.0, c, 0};
        }
    }

    auto consider = [&](AtomicDecomposition&& dec) {
        if (dec.invalid > 0) return;
        double b = std::pow(dec.lp_sum, 1.0 / p);
        if (std::isfinite(b) && b < best) {
            best = b;
            best_dec = std::move(dec);
        }
    };
    try {
        consider(atomic_decompose_maximal(X, wb.fam, wb.dict, f, p));
    } catch (const std::exception&) {
    }
    if (p <= 1.0) {
        try {
            consider(atomic_decompose_wavelet(X, wb.fam, f, p, 1));
        } catch (const std::exception&) {
        }
    }

    if (!std::isfinite(best))
        throw std::runtime_error("no finite decomposition found; input resists every route");
    if (best_out) *best_out = std::move(best_dec);
    return best;
}

NormBattery norm_battery(const Workbench& wb, const std::vector<Vec>& suite, double p,
                         double theta, double lambda, int N) {
    NormBattery bat;
    bat.columns = {"radial", "nontan", "grand", "lusin", "g", "gstar", "atomic"};
    int count = static_cast<int>(suite.size());
    bat.values.assign(count, std::vector<double>(bat.columns.size(), 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        const Vec& f = suite[i];
        const QuasiMetricSpace& X = wb.X;
        auto& row = bat.values[i];
        row[0] = lp_quasinorm(X, radial_local_maximal(wb.fam, f, N), p);
        row[1] = lp_quasinorm(X, nontangential_maximal(wb.fam, f, theta), p);
        row[2] = lp_quasinorm(X, grand_maximal_dict(wb.dict, f), p);
        row[3] = lp_quasinorm(X, lusin_area(wb.fam, f, theta), p);
        row[4] = lp_quasinorm(X, g_function(wb.fam, f, N), p);
        row[5] = lp_quasinorm(X, g_lambda_star(wb.fam, f, lambda), p);
        row[6] = finite_atomic_upper_bound(wb, f, p, kInfQ);
    }
    return bat;
}

EquivalenceTable run_equivalence_experiment(const ExperimentConfig& cfg) {
    if (cfg.suite < 1) throw std::invalid_argument("empty suite");
    auto wb = build_workbench(cfg);

    EquivalenceTable t;
    t.omega = wb->omega;
    t.beta = wb->beta;
    t.gamma = wb->gamma;
    t.suite = cfg.suite;
    t.seed = cfg.seed;
    double p_floor = t.omega / (t.omega + std::min(t.beta, t.gamma));
    for (double p : cfg.p_grid)
        if (p > p_floor && p <= 1.0) t.ps.push_back(p);
    if (t.ps.empty())
        throw std::invalid_argument(
            "no admissible p: every grid entry fails p > omega/(omega + regularity)");

    std::vector<Vec> suite = generate_suite(*wb, cfg.suite, cfg.seed, &t.kinds);

    for (double p : t.ps) {
        double lam = cfg.lambda > 0.0 ? cfg.lambda : 2.0 * t.omega / p + 2.0;
        NormBattery bat = norm_battery(*wb, suite, p, cfg.theta, lam, cfg.N);
        if (t.columns.empty()) t.columns = bat.columns;
        t.values.push_back(bat.values);

        int C = static_cast<int>(bat.columns.size());
        for (int i = 0; i < C; ++i)
            for (int j = i + 1; j < C; ++j) {
                std::vector<double> ratios;
                for (const auto& row : bat.values) {
                    double a = row[i], b = row[j];
                    if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))
                        ratios.push_back(a / b);
                }
                if (ratios.empty()) continue;
                EquivRow r;
                r.p = p;
                r.pair = bat.columns[i] + "/" + bat.columns[j];
                r.min_ratio = *std::min_element(ratios.begin(), ratios.end());
                r.max_ratio = *std::max_element(ratios.begin(), ratios.end());
                r.median_ratio = median_of(ratios);
                r.count = static_cast<int>(ratios.size());
                t.rows.push_back(std::move(r));
            }
    }
    return t;
}

void export_report(const EquivalenceTable& t, const ExperimentConfig& cfg,
                   const std::string& csv_path, const std::string& json_path) {
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error(csv_path + ": cannot open for writing");
        out << "p,element,kind";
        for (const auto& c : t.columns) out << ',' << c;
        out << '\n';
        for (size_t pi = 0; pi < t.ps.size(); ++pi)
            for (size_t e = 0; e < t.values[pi].size(); ++e) {
                out << fmt17(t.ps[pi]) << ',' << e << ',' << suite_kind_name(t.kinds[e]);
                for (double v : t.values[pi][e]) out << ',' << fmt17(v);
                out << '\n';
            }
        if (!out) throw std::runtime_error(csv_path + ": write failed");
    }
    if (!json_path.empty()) {
        json j;
        j["provenance"] = config_json(cfg);
        j["omega"] = t.omega;
        j["beta"] = t.beta;
        j["gamma"] = t.gamma;
        j["suite"] = t.suite;
        j["seed"] = t.seed;
        j["columns"] = t.columns;
        j["p_values"] = t.ps;
        json rows = json::array();
        for (const EquivRow& r : t.rows) {
            json row;
            row["p"] = r.p;
            row["pair"] = r.pair;
            row["min"] = r.min_ratio;
            row["median"] = r.median_ratio;
            row["max"] = r.max_ratio;
            row["count"] = r.count;
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error(json_path + ": cannot open for writing");
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error(json_path + ": write failed");
    }
}

GlobalLocalReport global_vs_local_experiment(const ExperimentConfig& cfg) {
    if (cfg.suite < 1) throw std::invalid_argument("empty suite");
    auto wb = build_workbench(cfg);
    const QuasiMetricSpace& X = wb->X;

    GlobalLocalReport rep;
    rep.suite = cfg.suite;
    double p_floor = wb->omega / (wb->omega + std::min(wb->beta, wb->gamma));
    rep.p = 1.0;
    for (double p : cfg.p_grid)
        if (p > p_floor && p <= 1.0) {
            rep.p = p;
            break;
        }
    double p = rep.p;
    double muX = X.muTotal();

    std::vector<Vec> suite = generate_suite(*wb, cfg.suite, cfg.seed);
    for (const Vec& f : suite) {
        Vec Pf = wb->fam.applyP(0, f);
        double s = 0.0;
        for (int y = 0; y < X.n; ++y) s += (f[y] - Pf[y]) * X.mu[y];
        rep.worst_mean_zero = std::max(rep.worst_mean_zero, std::fabs(s));
        AtomicDecomposition dec = atomic_decompose_maximal(X, wb->fam, wb->dict, f, p);
        if (dec.invalid > 0) ++rep.maximal_failures;
    }

    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    double big = X.diameter() + 1.0;
    double cconst = std::pow(muX, -1.0 / p);

    // direction one: every global atom is a local atom on the full ball
    for (int trial = 0; trial < 2 + cfg.suite / 4; ++trial) {
        Vec a(X.n, 0.0);
        if (trial == 0)
            a.assign(X.n, cconst);
        else if (trial == 1)
            a.assign(X.n, -cconst);
        else {
            for (double& v : a) v = rng.uniform(-1.0, 1.0);
            double num = 0.0, den = 0.0;
            for (int y = 0; y < X.n; ++y) {
                num += a[y] * X.mu[y];
                den += X.mu[y];
            }
            for (double& v : a) v -= num / den;
            double top = linf(a);
            if (top == 0.0) continue;
            double s = cconst * (1.0 - 0x1.0p-40) / top;
            for (double& v : a) v *= s;
            if (!validate_global_atom(X, a, p, kInfQ).ok()) continue;
        }
        ++rep.global_atoms_checked;
        if (validate_local_atom(X, a, 0, big, p, kInfQ).ok()) ++rep.global_atoms_local_pass;
    }

    // direction two: a big-ball local atom with nonzero mean splits into a
    // mean-zero part plus a multiple of the signed constant
    for (int trial = 0; trial < 2 + cfg.suite / 4; ++trial) {
        Vec a(X.n);
        for (double& v : a) v = rng.uniform(-1.0, 1.0);
        double top = linf(a);
        if (top == 0.0) continue;
        double s = cconst * (1.0 - 0x1.0p-40) / top;
        for (double& v : a) v *= s;
        if (!validate_local_atom(X, a, 0, big, p, kInfQ).ok()) continue;
        ++rep.splits_checked;

        double mean = 0.0;
        Vec a1 = split_global_atom(X, a, &mean);
        bool mean_ok = std::fabs(mean) <= std::pow(muX, -1.0 / p);
        rep.mean_bound_ok = rep.mean_bound_ok && mean_ok;
        rep.worst_mean_margin =
            std::max(rep.worst_mean_margin, std::fabs(mean) * std::pow(muX, 1.0 / p));

        bool a1_ok = false;
        for (double c1 = 1.0; c1 <= 8.0 && !a1_ok; c1 *= 2.0) {
            Vec scaled = a1;
            for (double& v : scaled) v /= c1;
            if (validate_global_atom(X, scaled, p, kInfQ).ok()) {
                a1_ok = true;
                rep.worst_split_scale = std::max(rep.worst_split_scale, c1);
            }
        }
        Vec a2(X.n, std::copysign(std::pow(X.muTotal(), -1.0 / p), mean));
        bool a2_ok = validate_global_atom(X, a2, p, kInfQ).ok();
        if (mean_ok && a1_ok && a2_ok) ++rep.splits_ok;
    }
    return rep;
}

void export_report(const GlobalLocalReport& r, const ExperimentConfig& cfg,
                   const std::string& json_path) {
    if (json_path.empty()) return;
    json j;
    j["provenance"] = config_json(cfg);
    j["p"] = r.p;
    j["suite"] = r.suite;
    j["worst_mean_zero"] = r.worst_mean_zero;
    j["maximal_failures"] = r.maximal_failures;
    j["global_atoms"] = {{"checked", r.global_atoms_checked},
                         {"local_pass", r.global_atoms_local_pass}};
    j["splits"] = {{"checked", r.splits_checked},
                   {"ok", r.splits_ok},
                   {"worst_scale", r.worst_split_scale},
                   {"mean_bound_ok", r.mean_bound_ok},
                   {"worst_mean_margin", r.worst_mean_margin}};
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error(json_path + ": cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error(json_path + ": write failed");
}

} // namespace homog
