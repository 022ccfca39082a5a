// Command-line front end: JSON reports on stdout, diagnostics on stderr.
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cylsd.hpp"

using namespace cylsd;

namespace {

constexpr double report_tol = 1e-10;

int emit(const json& report, bool ok) {
    std::cout << report.dump(2) << '\n';
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------- construct

int run_construct(const std::string& family, const std::string& params_path, const std::string& out_path) {
    const json p = read_json_file(params_path);
    json fixture;
    json summary{{"family", family}, {"out", out_path}};
    if (family == "remark3") {
        auto sign = [&](const char* key) { return p.contains(key) ? sign_from_json(p.at(key), key) : 1; };
        const auto fam = remark3_family(
            rational_from_json(field(p, "omega", "params"), "omega"), rational_from_json(field(p, "a1", "params"), "a1"),
            rational_from_json(field(p, "a2", "params"), "a2"), rational_from_json(field(p, "b1", "params"), "b1"),
            rational_from_json(field(p, "b2", "params"), "b2"), sign("p1"), sign("p2"), sign("q1"), sign("q2"),
            p.contains("sigma_scale") ? rational_from_json(p.at("sigma_scale"), "sigma_scale") : Rational(1));
        fixture = fixture_json(fam);
        json sig = json::array();
        for (const auto& cf : fam.cfs) sig.push_back(rational_json(cf.sigma));
        summary["sigma"] = sig;
    } else if (family == "lemma4") {
        const auto fam = lemma4_pair(double_from_json(field(p, "sigma", "params"), "sigma"),
                                     p.contains("theta1") ? double_from_json(p.at("theta1"), "theta1") : 0.0,
                                     p.contains("theta2") ? double_from_json(p.at("theta2"), "theta2") : 0.0,
                                     double_from_json(field(p, "kappa", "params"), "kappa"));
        fixture = fixture_json(fam);
    } else if (family == "remark4") {
        const auto fam = remark4_counterexample(double_from_json(field(p, "sigma", "params"), "sigma"),
                                                double_from_json(field(p, "kappa", "params"), "kappa"));
        fixture = fixture_json(fam);
    } else {
        throw InvalidInput("unknown family '" + family + "'");
    }
    write_json_file(out_path, fixture);
    summary["status"] = "certified";
    std::cerr << "wrote " << out_path << '\n';
    return emit(summary, true);
}

// -------------------------------------------------------------------- check

json check_cylinder(const CylinderFamily& fam, GridDensity density, unsigned workers, bool& ok) {
    json report{{"family", fam.family}, {"group", "cylinder"}};
    const auto fcfs = fam.float_cfs();
    const auto grid = default_cylinder_grid(fam.matrix.size(), density);
    const auto res = independence_residual<CylinderCF>(fcfs, fam.float_matrix(), grid, workers);
    report["independence"] = residual_json(res);
    ok = res.residual <= report_tol;

    if (fam.matrix.size() != 3) return report;

    const auto form = reduce_to_normal_form(fam.matrix);
    const auto cfs = transform_cfs<ExactCylinderCF>(fam.cfs, form);
    const bool degenerate = std::all_of(cfs.begin(), cfs.end(), [](const ExactCylinderCF& cf) {
        return cf.sigma == 0 && cf.kappa == 0 && cf.lambda == 0;
    });
    const bool twisted = std::any_of(cfs.begin(), cfs.end(), [](const ExactCylinderCF& cf) { return cf.twist != 0; });
    if (degenerate) {
        report["branch"] = "degenerate";
        report["support"] = to_string(SupportKind::point);
        return report;
    }
    report["branch"] = "nondegenerate";
    if (twisted) {
        report["system"] = "not applicable: twisted CFs";
        return report;
    }

    const auto system = gaussian_system_check<Rational>(cfs, form.matrix);
    report["system"] = system_json(system);
    report["max_system_residual"] = system.max_residual();
    report["worst_equation"] = system.worst().equation;
    const auto failed = system.first_failing(report_tol);
    report["failed_equation"] = failed ? json(*failed) : json(nullptr);
    ok = ok && !failed;

    const auto p = normal_form_params(form.matrix);
    report["lemma2"] = condition_json(lemma2_conditions(p.a1, p.a2, p.b1, p.b2));
    try {
        const auto lmn = classify_LMN(form.matrix);
        report["LMN"] = {{"L", to_string(lmn.L)}, {"M", to_string(lmn.M)}, {"N", to_string(lmn.N)}, {"case", lmn.table_case()}};
    } catch (const InvalidInput& e) {
        report["LMN"] = {{"error", e.what()}};
    }

    const auto nu = nu_support_check<Rational>(cfs, form.matrix);
    report["nu"] = {{"sigma", nu.sigma},
                    {"kappa", nu.kappa},
                    {"lambda", nu.lambda},
                    {"defect", nu.defect},
                    {"identity_lhs", rational_json(nu.identity_lhs)},
                    {"identity_rhs", rational_json(nu.identity_rhs)},
                    {"identity_holds", nu.identity_holds()}};
    report["support"] = to_string(nu.support.kind);
    if (nu.support.kind == SupportKind::line) report["omega"] = nu.support.omega;
    ok = ok && nu.line_ok(report_tol);
    return report;
}

json check_torus(const TorusFamily& fam, GridDensity density, unsigned workers, bool& ok) {
    json report{{"family", fam.family}, {"group", "torus"}};
    const auto grid = default_torus_grid(fam.matrix.size(), density);
    const auto res = independence_residual<TorusCF>(fam.cfs, fam.matrix, grid, workers);
    report["independence"] = residual_json(res);
    json gaussian = json::array();
    for (const auto& cf : fam.cfs) gaussian.push_back(is_gaussian(cf));
    report["gaussian"] = gaussian;
    ok = res.residual <= report_tol;
    return report;
}

int run_check(const std::string& fixture_path, const std::string& grid_name, unsigned workers) {
    if (grid_name != "default" && grid_name != "dense") throw InvalidInput("--grid must be 'default' or 'dense'");
    const auto density = grid_name == "dense" ? GridDensity::dense : GridDensity::standard;
    const auto fx = fixture_from_json(read_json_file(fixture_path));
    bool ok = false;
    json report = fx.cylinder ? check_cylinder(*fx.cylinder, density, workers, ok) : check_torus(*fx.torus, density, workers, ok);
    report["tolerance"] = report_tol;
    report["pass"] = ok;
    if (!ok) std::cerr << "check failed\n";
    return emit(report, ok);
}

// ------------------------------------------------------------------- lemma2

int run_lemma2(const std::string& a1s, const std::string& a2s, const std::string& b1s, const std::string& b2s) {
    const Rational a1 = parse_rational(a1s), a2 = parse_rational(a2s), b1 = parse_rational(b1s), b2 = parse_rational(b2s);
    const auto r = lemma2_conditions(a1, a2, b1, b2);
    json report = condition_json(r);
    if (r.statement4()) {
        const auto s = solve_sigmas(a1, a2, b1, b2);
        report["sigma"] = s ? json::array({rational_json((*s)[0]), rational_json((*s)[1]), rational_json((*s)[2])})
                            : json(nullptr);
    }
    return emit(report, r.all_hold());
}

// ------------------------------------------------------------------- reduce

GridFunction load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_csv(in);
}

int run_reduce(const std::vector<std::string>& inputs, const std::string& mode, int max_deg, double tol,
               const std::string& fixture_path) {
    if (inputs.empty()) throw InvalidInput("--input is required");
    std::vector<GridFunction> grids;
    for (const auto& path : inputs) grids.push_back(load_grid(path));

    if (mode == "degree") {
        const auto d = polynomial_degree(grids.front(), max_deg, tol);
        return emit({{"mode", mode}, {"degree", d ? json(*d) : json(nullptr)}, {"max_deg", max_deg}}, d.has_value());
    }
    if (mode == "lemma8") {
        try {
            const auto fit = lemma8_fit(grids.front(), tol);
            json kappa = json::object(), lambda = json::object();
            for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
                kappa[std::to_string(fit.n_values[i])] = fit.kappa[i];
                lambda[std::to_string(fit.n_values[i])] = fit.lambda[i];
            }
            return emit({{"mode", mode}, {"sigma", fit.sigma}, {"kappa", kappa}, {"lambda", lambda}, {"residual", fit.residual}},
                        true);
        } catch (const InvalidInput& e) {
            std::cerr << e.what() << '\n';
            return emit({{"mode", mode}, {"fit", nullptr}, {"error", e.what()}}, false);
        }
    }
    if (mode == "lemma6") {
        if (grids.size() != 3) throw InvalidInput("lemma6 mode needs three --input grids");
        if (fixture_path.empty()) throw InvalidInput("lemma6 mode needs --fixture for the subgroup tags");
        const auto fx = fixture_from_json(read_json_file(fixture_path));
        if (!fx.cylinder || fx.cylinder->matrix.size() != 3) throw InvalidInput("lemma6 mode needs a 3x3 cylinder fixture");
        const auto form = reduce_to_normal_form(fx.cylinder->matrix);
        const auto tags = classify_LMN(form.matrix);
        const auto r = verify_lemma6({grids[0], grids[1], grids[2]}, tags);
        const bool ok = r[0] <= tol && r[1] <= tol && r[2] <= tol;
        return emit({{"mode", mode},
                     {"LMN", {to_string(tags.L), to_string(tags.M), to_string(tags.N)}},
                     {"residuals", {r[0], r[1], r[2]}}},
                    ok);
    }
    throw InvalidInput("--mode must be degree, lemma8 or lemma6");
}

// ----------------------------------------------------------------- simulate

int run_simulate(const std::string& fixture_path, std::size_t count, std::uint64_t seed, int replicates, unsigned workers) {
    if (count < 2) throw InvalidInput("--count must be >= 2");
    const auto fx = fixture_from_json(read_json_file(fixture_path));
    std::vector<std::vector<CylinderPoint>> samples;
    StatMatrix<CylinderAuto> m = fx.cylinder ? fx.cylinder->float_matrix()
                                             : fx.torus->matrix.transform([](const TorusAuto& e) { return CylinderAuto(1.0, 0.0, e.p()); });
    TupleGrid<DualPoint> probes(m.size());
    if (fx.cylinder) {
        samples = sample_family(fx.cylinder->float_cfs(), count, seed, workers);
        probes = default_probes(m.size());
    } else {
        for (std::size_t j = 0; j < fx.torus->cfs.size(); ++j) {
            const auto angles = sample_torus_twisted(fx.torus->cfs[j], count, derive_seed(seed, 0x7, j), workers);
            std::vector<CylinderPoint> pts;
            pts.reserve(angles.size());
            for (double a : angles) pts.emplace_back(0.0, a);
            samples.push_back(std::move(pts));
        }
        const std::vector<DualPoint> slots{{0.0, 1}, {0.0, 2}, {0.0, 3}};
        probes = cartesian_grid<DualPoint>(slots, m.size(), 1u << 20);
    }
    const auto r = empirical_independence(samples, m, probes, replicates, seed, workers);
    const bool ok = r.consistent_with_zero();
    return emit({{"family", fx.family},
                 {"count", r.count},
                 {"seed", seed},
                 {"probes", r.probes},
                 {"max_residual", r.max_residual},
                 {"replicates", r.replicates},
                 {"band", r.band},
                 {"interval", {r.lo, r.hi}},
                 {"consistent_with_zero", ok}},
                ok);
}

// ----------------------------------------------------------------- solenoid

int run_solenoid(const std::string& base_path, const std::string& fixture_path, std::size_t depth, std::size_t cap,
                 unsigned workers) {
    const auto base = base_from_json(read_json_file(base_path));
    const auto fx = fixture_from_json(read_json_file(fixture_path));
    if (!fx.cylinder) throw InvalidInput("solenoid needs a cylinder fixture");
    const auto r = pullback_residual(fx.cylinder->cfs, fx.cylinder->matrix, base, depth, cap, workers);
    const bool ok = r.residual <= report_tol;
    json report = residual_json(r);
    report["depth"] = depth;
    report["base_prefix"] = base.entries();
    report["pass"] = ok;
    return emit(report, ok);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checks independence of linear statistics on R x T, T and solenoid duals"};
    app.require_subcommand(1);
    unsigned workers = 1;

    std::string family, params, out;
    auto* construct = app.add_subcommand("construct", "build and certify an independent family");
    construct->add_option("--family", family, "remark3 | lemma4 | remark4")->required();
    construct->add_option("--params", params, "parameter JSON file")->required();
    construct->add_option("--out", out, "fixture output path")->required();

    std::string fixture, grid = "default";
    auto* check = app.add_subcommand("check", "run every checker on a fixture");
    check->add_option("--fixture", fixture)->required();
    check->add_option("--grid", grid, "default | dense");
    check->add_option("--workers", workers);

    std::string a1, a2, b1, b2;
    auto* lemma2 = app.add_subcommand("lemma2", "evaluate the real-line conditions on (a1, a2, b1, b2)");
    lemma2->add_option("--a1", a1)->required();
    lemma2->add_option("--a2", a2)->required();
    lemma2->add_option("--b1", b1)->required();
    lemma2->add_option("--b2", b2)->required();

    std::vector<std::string> inputs;
    std::string mode, reduce_fixture;
    int max_deg = 4;
    double tol = 1e-9;
    auto* reduce = app.add_subcommand("reduce", "finite-difference analysis of sampled grids");
    reduce->add_option("--input", inputs, "grid CSV (s,n,re,im); three for lemma6")->required();
    reduce->add_option("--mode", mode, "degree | lemma8 | lemma6")->required();
    reduce->add_option("--max-deg", max_deg);
    reduce->add_option("--tol", tol);
    reduce->add_option("--fixture", reduce_fixture, "fixture supplying the matrix for lemma6");

    std::size_t count = 100000;
    std::uint64_t seed = 1;
    int replicates = 200;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo corroboration");
    simulate->add_option("--fixture", fixture)->required();
    simulate->add_option("--count", count);
    simulate->add_option("--seed", seed);
    simulate->add_option("--replicates", replicates);
    simulate->add_option("--workers", workers);

    std::string base;
    std::size_t depth = 6, cap = 20000;
    auto* solenoid = app.add_subcommand("solenoid", "independence on the dual of a solenoid cylinder");
    solenoid->add_option("--base", base)->required();
    solenoid->add_option("--fixture", fixture)->required();
    solenoid->add_option("--depth", depth);
    solenoid->add_option("--cap", cap);
    solenoid->add_option("--workers", workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*construct) return run_construct(family, params, out);
        if (*check) return run_check(fixture, grid, workers);
        if (*lemma2) return run_lemma2(a1, a2, b1, b2);
        if (*reduce) return run_reduce(inputs, mode, max_deg, tol, reduce_fixture);
        if (*simulate) return run_simulate(fixture, count, seed, replicates, workers);
        if (*solenoid) return run_solenoid(base, fixture, depth, cap, workers);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << json{{"error", e.what()}}.dump() << '\n';
        return 2;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        std::cout << json{{"error", e.what()}}.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << json{{"error", e.what()}}.dump() << '\n';
        return 2;
    }
    return 2;
}
