// Command-line front end: space generation, cube systems, kernel families,
// norms, decompositions, reconstruction, dual norms, and experiments.

#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "homog/atoms.hpp"
#include "homog/decompose.hpp"
#include "homog/dyadic.hpp"
#include "homog/generators.hpp"
#include "homog/harness.hpp"
#include "homog/io.hpp"
#include "homog/kernels.hpp"
#include "homog/maximal.hpp"
#include "homog/reproducing.hpp"
#include "homog/rng.hpp"
#include "homog/space.hpp"
#include "homog/square.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace homog;
using nlohmann::json;

namespace {

constexpr double kInfQ = std::numeric_limits<double>::infinity();

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

// a loaded family keeps its cube system alive here
struct FamilyHandle {
    DyadicSystem dys;
    OperatorFamily fam;
};

std::unique_ptr<FamilyHandle> load_family_handle(const std::string& base,
                                                 const QuasiMetricSpace& X) {
    auto h = std::make_unique<FamilyHandle>();
    h->fam = load_family(base, X, &h->dys);
    return h;
}

// --f FILE loads a JSON array; --gen noise:SEED | spike:SEED | smooth:SEED
// synthesizes a deterministic input (smooth needs a family)
Vec input_function(const std::string& f_path, const std::string& gen, const QuasiMetricSpace& X,
                   const OperatorFamily* fam) {
    if (!f_path.empty() && !gen.empty())
        throw CLI::ValidationError("--f and --gen are mutually exclusive");
    if (!f_path.empty()) {
        Vec v = load_vec(f_path);
        if (static_cast<int>(v.size()) != X.n)
            throw std::runtime_error(f_path + ": length does not match the space");
        return v;
    }
    if (gen.empty()) throw CLI::ValidationError("need --f FILE or --gen SPEC");
    auto colon = gen.find(':');
    std::string kind = gen.substr(0, colon);
    uint64_t seed = colon == std::string::npos ? 1 : std::stoull(gen.substr(colon + 1));
    Rng rng(seed);
    if (kind == "noise") {
        Vec v(X.n);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        return v;
    }
    if (kind == "spike") {
        Vec v(X.n, 0.0);
        v[rng.below(X.n)] = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.5, 1.5);
        return v;
    }
    if (kind == "smooth") {
        if (!fam) throw CLI::ValidationError("--gen smooth needs --family");
        Vec v(X.n);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        return fam->applyP(fam->K / 2, v);
    }
    throw CLI::ValidationError("unknown --gen kind \"" + kind +
                               "\"; expected noise:SEED, spike:SEED, or smooth:SEED");
}

void write_pointwise_csv(const std::string& path, const Vec& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "point,value\n";
    for (size_t i = 0; i < v.size(); ++i) out << i << ',' << fmt17(v[i]) << '\n';
}

double dict_regularity(const OperatorFamily& fam, double flag) {
    if (flag > 0.0) return flag;
    if (fam.kind == FamilyKind::gauss_sinkhorn) return std::min(0.49, 0.9 * fam.diag.eta_eff);
    return 0.49;
}

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* t = std::getenv("HOMOG_THREADS")) {
        int k = std::atoi(t);
        if (k > 0) omp_set_num_threads(k);
    }
#endif
    CLI::App app{"local Hardy space machinery on finite quasi-metric measure spaces"};
    app.require_subcommand(1);

    // ---- space gen
    auto* space = app.add_subcommand("space", "space file operations");
    space->require_subcommand(1);
    auto* sgen = space->add_subcommand("gen", "generate a space and write its JSON");
    std::string s_kind = "grid1d", s_out;
    int s_n = 64, s_nx = 8, s_ny = 8, s_depth = 5;
    double s_spacing = 0.0;
    uint64_t s_seed = 1;
    sgen->add_option("--kind", s_kind, "grid1d|grid2d|snowflake|cantor|graph|cloud");
    sgen->add_option("--n", s_n);
    sgen->add_option("--nx", s_nx);
    sgen->add_option("--ny", s_ny);
    sgen->add_option("--depth", s_depth);
    sgen->add_option("--spacing", s_spacing);
    sgen->add_option("--seed", s_seed);
    sgen->add_option("--out", s_out)->required();

    // ---- dyadic build
    auto* dyadic = app.add_subcommand("dyadic", "cube system operations");
    dyadic->require_subcommand(1);
    auto* dbuild = dyadic->add_subcommand("build", "build the cube tree and write its JSON");
    std::string d_space, d_out;
    double d_delta = 0.0;
    int d_j0 = 0;
    dbuild->add_option("--space", d_space)->required();
    dbuild->add_option("--delta", d_delta, "base ratio; <= 0 selects the default");
    dbuild->add_option("--j0", d_j0, "refinement depth; <= 0 selects the default");
    dbuild->add_option("--out", d_out)->required();

    // ---- kernels build
    auto* kernels = app.add_subcommand("kernels", "operator family operations");
    kernels->require_subcommand(1);
    auto* kbuild = kernels->add_subcommand("build", "build a family and write header + matrices");
    std::string k_space, k_kind = "haar", k_out;
    double k_nu = 1.0, k_a = 1.0, k_delta = 0.0;
    int k_j0 = 0;
    kbuild->add_option("--space", k_space)->required();
    kbuild->add_option("--kind", k_kind, "haar|gauss");
    kbuild->add_option("--nu", k_nu);
    kbuild->add_option("--a", k_a);
    kbuild->add_option("--delta", k_delta);
    kbuild->add_option("--j0", k_j0);
    kbuild->add_option("--out", k_out, "base path; writes <base>.json and <base>.bin")->required();

    // ---- norm
    auto* norm = app.add_subcommand("norm", "maximal and square function quasi-norms");
    std::string n_space, n_family, n_which = "grand", n_f, n_gen, n_csv, n_json;
    double n_p = 1.0, n_theta = 1.0, n_lambda = 4.0, n_beta = 0.0, n_gamma = 0.0;
    int n_N = 1;
    norm->add_option("--space", n_space)->required();
    norm->add_option("--family", n_family, "family base path (not needed for --which hl)");
    norm->add_option("--which", n_which, "radial|nontan|grand|hl|lusin|g|gstar");
    norm->add_option("--p", n_p);
    norm->add_option("--theta", n_theta);
    norm->add_option("--lambda", n_lambda);
    norm->add_option("--N", n_N);
    norm->add_option("--beta", n_beta, "test class regularity; <= 0 applies the family policy");
    norm->add_option("--gamma", n_gamma);
    norm->add_option("--f", n_f, "input function, JSON array");
    norm->add_option("--gen", n_gen, "noise:SEED|spike:SEED|smooth:SEED");
    norm->add_option("--out-csv", n_csv, "per-point values");
    norm->add_option("--out-json", n_json, "summary");

    // ---- decompose
    auto* dec = app.add_subcommand("decompose", "atomic decompositions");
    std::string de_space, de_family, de_route = "maximal", de_f, de_gen, de_out;
    double de_p = 1.0, de_beta = 0.0, de_gamma = 0.0;
    int de_N = 1, de_jlo = INT_MIN, de_jhi = INT_MAX;
    dec->add_option("--space", de_space)->required();
    dec->add_option("--family", de_family)->required();
    dec->add_option("--route", de_route, "maximal|wavelet");
    dec->add_option("--p", de_p);
    dec->add_option("--N", de_N, "split level for the wavelet route");
    dec->add_option("--j-lo", de_jlo, "threshold cascade override: lowest exponent");
    dec->add_option("--j-hi", de_jhi, "threshold cascade override: highest exponent");
    dec->add_option("--beta", de_beta);
    dec->add_option("--gamma", de_gamma);
    dec->add_option("--f", de_f);
    dec->add_option("--gen", de_gen);
    dec->add_option("--out", de_out)->required();

    // ---- atoms validate
    auto* atoms = app.add_subcommand("atoms", "atom file operations");
    atoms->require_subcommand(1);
    auto* avalidate = atoms->add_subcommand("validate", "re-validate a stored decomposition");
    std::string a_space, a_dec;
    avalidate->add_option("--space", a_space)->required();
    avalidate->add_option("--dec", a_dec)->required();

    // ---- dual
    auto* dual = app.add_subcommand("dual", "oscillation norms dual to the decomposition spaces");
    std::string du_space, du_which = "campanato", du_f, du_gen;
    double du_alpha = 0.1, du_q = kInfQ;
    dual->add_option("--space", du_space)->required();
    dual->add_option("--which", du_which, "campanato|lipschitz");
    dual->add_option("--alpha", du_alpha);
    dual->add_option("--q", du_q, "inner exponent for the campanato form; inf for sup");
    dual->add_option("--f", du_f);
    dual->add_option("--gen", du_gen);

    // ---- reproduce
    auto* rep = app.add_subcommand("reproduce", "truncated reconstruction from the family");
    std::string r_space, r_family, r_route = "exact", r_sampler = "center", r_f, r_gen, r_out;
    int r_K = -1, r_N = 1, r_j0 = 1;
    rep->add_option("--space", r_space)->required();
    rep->add_option("--family", r_family)->required();
    rep->add_option("--route", r_route, "exact|discrete");
    rep->add_option("--K", r_K, "truncation level; < 0 means the full range");
    rep->add_option("--N", r_N);
    rep->add_option("--j0", r_j0);
    rep->add_option("--sampler", r_sampler, "center|worst|random:SEED");
    rep->add_option("--f", r_f);
    rep->add_option("--gen", r_gen);
    rep->add_option("--out", r_out, "write the approximation as a JSON array");

    // ---- experiment
    auto* exp = app.add_subcommand("experiment", "seeded experiment suites");
    exp->require_subcommand(1);
    auto* eq = exp->add_subcommand("equivalence", "pairwise norm-equivalence table");
    std::string eq_config, eq_csv, eq_json;
    eq->add_option("--config", eq_config)->required();
    eq->add_option("--out-csv", eq_csv, "overrides the config's out_csv");
    eq->add_option("--out-json", eq_json, "overrides the config's out_json");
    auto* gl = exp->add_subcommand("globallocal", "global versus local bridge checks");
    std::string gl_config, gl_json;
    gl->add_option("--config", gl_config)->required();
    gl->add_option("--out-json", gl_json, "overrides the config's out_json");

    // ---- report
    auto* report = app.add_subcommand("report", "pretty-print an exported report");
    std::string rp_in;
    report->add_option("--in", rp_in)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sgen->parsed()) {
            QuasiMetricSpace X;
            if (s_kind == "grid1d")
                X = grid1d(s_n, s_spacing);
            else if (s_kind == "grid2d")
                X = grid2d(s_nx, s_ny, s_spacing);
            else if (s_kind == "snowflake")
                X = snowflake_square(s_n, s_spacing);
            else if (s_kind == "cantor")
                X = cantor_ultrametric(s_depth);
            else if (s_kind == "graph")
                X = weighted_graph(s_n, s_seed);
            else if (s_kind == "cloud")
                X = random_cloud(s_n, s_seed);
            else
                throw CLI::ValidationError("unknown --kind \"" + s_kind + "\"");
            ValidationReport v = verify_space(X);
            if (!v.ok()) throw std::runtime_error("generated space failed checks\n" + v.joined());
            save_space(X, s_out);
            DoublingProfile prof = doubling_profile(X);
            emit({{"n", X.n},
                  {"A0", X.A0},
                  {"quasi_triangle", quasi_triangle_constant(X)},
                  {"doubling_C", prof.C_mu},
                  {"omega", prof.omega},
                  {"diameter", X.diameter()},
                  {"out", s_out}});
        } else if (dbuild->parsed()) {
            QuasiMetricSpace X = load_space(d_space);
            DyadicOptions opt;
            opt.delta = d_delta;
            opt.j0 = d_j0;
            DyadicSystem dys = build_dyadic(X, opt);
            ValidationReport v = verify_dyadic(dys);
            if (!v.ok()) throw std::runtime_error("cube system failed checks\n" + v.joined());
            save_dyadic(dys, d_out);
            double cw = 0.0;
            for (const auto& lv : dys.levels) cw = std::max(cw, lv.C_achieved);
            emit({{"delta", dys.delta},
                  {"K_max", dys.K_max},
                  {"j0", dys.j0},
                  {"C_achieved", cw},
                  {"C_nat", dys.C_nat()},
                  {"out", d_out}});
        } else if (kbuild->parsed()) {
            QuasiMetricSpace X = load_space(k_space);
            DyadicOptions opt;
            opt.delta = k_delta;
            opt.j0 = k_j0;
            DyadicSystem dys = build_dyadic(X, opt);
            OperatorFamily fam = k_kind == "haar" ? build_haar_family(dys)
                                : k_kind == "gauss"
                                    ? build_gauss_sinkhorn_family(X, dys, k_nu, k_a)
                                    : throw CLI::ValidationError("unknown --kind \"" + k_kind +
                                                                 "\"");
            verify_iati(fam);
            save_family(fam, k_out);
            emit({{"kind", k_kind},
                  {"K", fam.K},
                  {"size_C", fam.diag.size_C},
                  {"eta_eff", fam.diag.eta_eff},
                  {"marginal_err", fam.diag.marginal_err},
                  {"cancel_err", fam.diag.cancel_err},
                  {"sinkhorn_iters", fam.diag.sinkhorn_iters},
                  {"out", k_out}});
        } else if (norm->parsed()) {
            QuasiMetricSpace X = load_space(n_space);
            std::unique_ptr<FamilyHandle> h;
            if (!n_family.empty()) h = load_family_handle(n_family, X);
            if (n_which != "hl" && !h)
                throw CLI::ValidationError("--which " + n_which + " needs --family");
            Vec f = input_function(n_f, n_gen, X, h ? &h->fam : nullptr);
            Vec vals;
            if (n_which == "radial")
                vals = radial_local_maximal(h->fam, f, n_N);
            else if (n_which == "nontan")
                vals = nontangential_maximal(h->fam, f, n_theta);
            else if (n_which == "grand") {
                TestDictionary dict = build_test_dictionary(
                    h->fam, dict_regularity(h->fam, n_beta), dict_regularity(h->fam, n_gamma));
                vals = grand_maximal_dict(dict, f);
            } else if (n_which == "hl")
                vals = hl_maximal(X, f);
            else if (n_which == "lusin")
                vals = lusin_area(h->fam, f, n_theta);
            else if (n_which == "g")
                vals = g_function(h->fam, f, n_N);
            else if (n_which == "gstar")
                vals = g_lambda_star(h->fam, f, n_lambda);
            else
                throw CLI::ValidationError("unknown --which \"" + n_which + "\"");
            if (!n_csv.empty()) write_pointwise_csv(n_csv, vals);
            json j = {{"which", n_which}, {"p", n_p}, {"quasinorm", lp_quasinorm(X, vals, n_p)}};
            if (!n_json.empty()) {
                std::ofstream out(n_json);
                out << j.dump(2) << '\n';
            }
            emit(j);
        } else if (dec->parsed()) {
            QuasiMetricSpace X = load_space(de_space);
            auto h = load_family_handle(de_family, X);
            Vec f = input_function(de_f, de_gen, X, &h->fam);
            AtomicDecomposition d;
            if (de_route == "maximal") {
                TestDictionary dict = build_test_dictionary(
                    h->fam, dict_regularity(h->fam, de_beta), dict_regularity(h->fam, de_gamma));
                d = atomic_decompose_maximal(X, h->fam, dict, f, de_p, de_jlo, de_jhi);
            } else if (de_route == "wavelet") {
                d = atomic_decompose_wavelet(X, h->fam, f, de_p, de_N);
            } else {
                throw CLI::ValidationError("unknown --route \"" + de_route + "\"");
            }
            save_decomposition(d, de_out);
            emit({{"route", de_route},
                  {"p", d.p},
                  {"atoms", d.atoms.size()},
                  {"lp_sum", d.lp_sum},
                  {"residual_rel", d.residual_rel},
                  {"route_C", d.route_C},
                  {"invalid", d.invalid},
                  {"out", de_out}});
        } else if (avalidate->parsed()) {
            QuasiMetricSpace X = load_space(a_space);
            AtomicDecomposition d = load_decomposition(a_dec);
            // both routes certify every entry against the local validator;
            // coarse full-space pieces carry r0 > 1 so cancellation is waived
            int bad = 0;
            for (const AtomEntry& e : d.atoms)
                if (!validate_local_atom(X, e.a, e.x0, e.r0, d.p, d.q).ok()) ++bad;
            emit({{"atoms", d.atoms.size()}, {"invalid", bad}});
            if (bad > 0) return 1;
        } else if (dual->parsed()) {
            QuasiMetricSpace X = load_space(du_space);
            Vec f = input_function(du_f, du_gen, X, nullptr);
            double v = du_which == "campanato" ? campanato_norm(X, f, du_alpha, du_q)
                       : du_which == "lipschitz"
                           ? lipschitz_norm(X, f, du_alpha)
                           : throw CLI::ValidationError("unknown --which \"" + du_which + "\"");
            emit({{"which", du_which}, {"alpha", du_alpha}, {"norm", v}});
        } else if (rep->parsed()) {
            QuasiMetricSpace X = load_space(r_space);
            auto h = load_family_handle(r_family, X);
            Vec f = input_function(r_f, r_gen, X, &h->fam);
            ReproducingReport rr;
            Vec approx;
            if (r_route == "exact") {
                int K = r_K < 0 ? h->fam.K : r_K;
                approx = reproduce_exact(h->fam, f, K, &rr);
            } else if (r_route == "discrete") {
                approx = reproduce_discrete(h->fam, h->dys, f, r_N, r_j0,
                                            SamplerSpec::parse(r_sampler), &rr);
            } else {
                throw CLI::ValidationError("unknown --route \"" + r_route + "\"");
            }
            if (!r_out.empty()) save_vec(approx, r_out);
            emit({{"route", rr.route},
                  {"N", rr.N},
                  {"j0", rr.j0},
                  {"residuals", rr.residuals},
                  {"final_residual", rr.residuals.back()}});
        } else if (eq->parsed()) {
            ExperimentConfig cfg = config_from_json_file(eq_config);
            if (!eq_csv.empty()) cfg.out_csv = eq_csv;
            if (!eq_json.empty()) cfg.out_json = eq_json;
            EquivalenceTable t = run_equivalence_experiment(cfg);
            export_report(t, cfg, cfg.out_csv, cfg.out_json);
            double worst = 0.0;
            for (const EquivRow& r : t.rows) worst = std::max(worst, r.max_ratio / r.min_ratio);
            emit({{"rows", t.rows.size()},
                  {"p_values", t.ps},
                  {"suite", t.suite},
                  {"worst_spread", worst},
                  {"out_csv", cfg.out_csv},
                  {"out_json", cfg.out_json}});
        } else if (gl->parsed()) {
            ExperimentConfig cfg = config_from_json_file(gl_config);
            if (!gl_json.empty()) cfg.out_json = gl_json;
            GlobalLocalReport r = global_vs_local_experiment(cfg);
            export_report(r, cfg, cfg.out_json);
            emit({{"p", r.p},
                  {"worst_mean_zero", r.worst_mean_zero},
                  {"maximal_failures", r.maximal_failures},
                  {"global_atoms_checked", r.global_atoms_checked},
                  {"global_atoms_local_pass", r.global_atoms_local_pass},
                  {"splits_checked", r.splits_checked},
                  {"splits_ok", r.splits_ok},
                  {"mean_bound_ok", r.mean_bound_ok},
                  {"out_json", cfg.out_json}});
        } else if (report->parsed()) {
            std::ifstream in(rp_in);
            if (!in) throw std::runtime_error(rp_in + ": cannot open");
            json j;
            in >> j;
            if (j.contains("rows")) {
                std::printf("%-18s %6s %12s %12s %12s %6s\n", "pair", "p", "min", "median", "max",
                            "count");
                for (const json& r : j["rows"])
                    std::printf("%-18s %6.3f %12.5g %12.5g %12.5g %6d\n",
                                r["pair"].get<std::string>().c_str(), r["p"].get<double>(),
                                r["min"].get<double>(), r["median"].get<double>(),
                                r["max"].get<double>(), r["count"].get<int>());
            } else {
                emit(j);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
