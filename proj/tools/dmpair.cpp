#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "dmpair/scenario.hpp"

namespace fs = std::filesystem;
using namespace dmpair;

namespace {

struct CommonFlags {
    std::size_t panels = 0;
    double tol = 0.0;
    bool serial = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--panels", panels, "panel budget override for the oracle sweeps");
        cmd->add_option("--tol", tol, "quadrature tolerance override");
        cmd->add_flag("--serial", serial, "run the reference serial kernels");
    }

    RunOptions run_options() const {
        RunOptions opt;
        if (tol > 0.0) {
            opt.quad.tol = tol;
            opt.oracle.tol = tol;
        }
        if (panels > 0) {
            opt.oracle.panels_1d = panels;
            opt.oracle.panel_budget_2d = panels;
        }
        opt.serial = serial;
        opt.oracle.parallel = !serial;
        return opt;
    }
};

int run_command(const std::string& scenario_path, const std::string& out_dir,
                const CommonFlags& flags, std::optional<std::uint64_t> seed) {
    Scenario sc = load_scenario(scenario_path);
    RunOptions opt = flags.run_options();
    opt.seed_override = seed;
    const RunResult result = run_scenario(sc, opt);
    fs::create_directories(out_dir);
    write_report_csv((fs::path(out_dir) / "report.csv").string(), result, sc.name);
    write_convergence_csv((fs::path(out_dir) / "convergence.csv").string(), result);
    std::size_t failed = 0;
    for (const auto& r : result.rows)
        if (!r.pass) {
            ++failed;
            std::cerr << "FAIL " << r.name << " value=" << format_double(r.value)
                      << " reference=" << format_double(r.reference)
                      << " residual=" << format_double(r.residual)
                      << " tolerance=" << format_double(r.tolerance) << "\n";
        }
    std::cout << sc.name << ": " << (result.rows.size() - failed) << "/" << result.rows.size()
              << " checks passed\n";
    return result.ok ? 0 : 1;
}

int pair_command(const std::string& scenario_path, const std::string& out_dir,
                 const CommonFlags& flags) {
    Scenario sc = load_scenario(scenario_path);
    const RunOptions opt = flags.run_options();
    if (opt.serial) par::set_enabled(false);

    std::vector<TestFunction> phis = sc.test_functions;
    if (sc.random_count > 0) {
        SplitMix64 rng(sc.seed);
        for (std::size_t i = 0; i < sc.random_count; ++i)
            phis.push_back(random_bump(*sc.domain, rng));
    }

    const PairingResult pr = pairing_decomposition(*sc.field, *sc.bv);
    std::unique_ptr<MollifiedPairing> mp;
    if (!sc.eps_sequence.empty())
        mp = std::make_unique<MollifiedPairing>(*sc.field, *sc.bv, sc.eps_sequence, opt.quad);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        file.open((fs::path(out_dir) / "pairing.csv").string());
        os = &file;
    }
    (*os) << "route,phi,value,residual\n";
    for (std::size_t i = 0; i < phis.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "phi%02zu", i);
        const double r1 = pr.mu_total.apply(phis[i], opt.quad);
        const double r2 = pairing_by_definition(*sc.field, *sc.bv, phis[i], opt.quad);
        (*os) << "decomposition," << id << ',' << format_double(r1) << ",0\n";
        (*os) << "definition," << id << ',' << format_double(r2) << ','
              << format_double(std::abs(r2 - r1)) << "\n";
        if (mp) {
            const MollifiedRoute r3 = mp->evaluate(phis[i]);
            (*os) << "mollified," << id << ',' << format_double(r3.extrapolated) << ','
                  << format_double(std::abs(r3.extrapolated - r1)) << "\n";
        }
    }
    return 0;
}

int oracle_command(const std::string& scenario_path, int phi_index, const CommonFlags& flags) {
    Scenario sc = load_scenario(scenario_path);
    const RunOptions opt = flags.run_options();
    if (opt.serial) par::set_enabled(false);
    std::vector<TestFunction> phis = sc.test_functions;
    if (sc.random_count > 0) {
        SplitMix64 rng(sc.seed);
        for (std::size_t i = 0; i < sc.random_count; ++i)
            phis.push_back(random_bump(*sc.domain, rng));
    }
    if (phis.empty()) {
        std::cerr << "scenario has no test functions\n";
        return 2;
    }
    const auto v = composite_field(*sc.field, *sc.bv);
    const PairingResult pr = pairing_decomposition(*sc.field, *sc.bv);
    const std::size_t lo = phi_index >= 0 ? std::size_t(phi_index) : 0;
    const std::size_t hi = phi_index >= 0 ? std::size_t(phi_index) + 1 : phis.size();
    std::cout << "phi,weak_divergence,error_estimate,measure_value,difference\n";
    for (std::size_t i = lo; i < hi && i < phis.size(); ++i) {
        const auto wd = oracle::weak_divergence(*sc.domain, v, phis[i], opt.oracle);
        const double mv = pr.composite_div.apply(phis[i], opt.quad);
        std::cout << "phi" << i << ',' << format_double(wd.value) << ','
                  << format_double(wd.error_estimate) << ',' << format_double(mv) << ','
                  << format_double(std::abs(wd.value - mv)) << "\n";
    }
    return 0;
}

int gauss_green_command(const std::string& scenario_path, const std::string& polygon,
                        bool as_json, const CommonFlags& flags) {
    Scenario sc = load_scenario(scenario_path);
    const RunOptions opt = flags.run_options();
    if (opt.serial) par::set_enabled(false);
    std::vector<std::string> names;
    if (!polygon.empty()) names.push_back(polygon);
    else names = sc.gauss_green_polygons;
    if (as_json) std::cout << "[\n";
    bool first = true;
    for (const auto& name : names) {
        const BalanceReport rep = gauss_green(*sc.field, *sc.bv, sc.polygon(name), opt.quad);
        if (as_json) {
            if (!first) std::cout << ",\n";
            first = false;
            std::cout << "  {\"polygon\": \"" << name << "\""
                      << ", \"lhs_interior\": " << format_double(rep.lhs_interior)
                      << ", \"rhs_interior\": " << format_double(rep.rhs_interior)
                      << ", \"lhs_closure\": " << format_double(rep.lhs_closure)
                      << ", \"rhs_closure\": " << format_double(rep.rhs_closure)
                      << ", \"residual_interior\": " << format_double(rep.residual_interior())
                      << ", \"residual_closure\": " << format_double(rep.residual_closure())
                      << "}";
        } else {
            if (first) {
                std::cout << "polygon,lhs_interior,rhs_interior,lhs_closure,rhs_closure,"
                             "residual_interior,residual_closure\n";
                first = false;
            }
            std::cout << name << ',' << format_double(rep.lhs_interior) << ','
                      << format_double(rep.rhs_interior) << ','
                      << format_double(rep.lhs_closure) << ','
                      << format_double(rep.rhs_closure) << ','
                      << format_double(rep.residual_interior()) << ','
                      << format_double(rep.residual_closure()) << "\n";
        }
    }
    if (as_json) std::cout << "\n]\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dmpair: nonlinear pairings of divergence-measure fields with BV functions"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, polygon;
    std::uint64_t seed = 0;
    bool seed_set = false, as_json = false;
    int phi_index = -1;
    CommonFlags run_flags, pair_flags, oracle_flags, gg_flags;

    auto* run = app.add_subcommand("run", "run a scenario and write report CSVs");
    run->add_option("scenario", scenario_path, "scenario JSON path")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "override the random test-function seed")
        ->each([&](const std::string&) { seed_set = true; });
    run_flags.attach(run);

    auto* pair = app.add_subcommand("pair", "evaluate the pairing by all routes");
    pair->add_option("scenario", scenario_path, "scenario JSON path")->required();
    pair->add_option("--out", out_dir, "output directory (stdout when omitted)");
    pair_flags.attach(pair);

    auto* orc = app.add_subcommand("oracle", "weak-divergence oracle vs the measure value");
    orc->add_option("scenario", scenario_path, "scenario JSON path")->required();
    orc->add_option("--phi", phi_index, "test function index (all when omitted)");
    oracle_flags.attach(orc);

    auto* gg = app.add_subcommand("gauss-green", "evaluate the Gauss-Green balance");
    gg->add_option("scenario", scenario_path, "scenario JSON path")->required();
    gg->add_option("--polygon", polygon, "polygon name (all when omitted)");
    gg->add_flag("--json", as_json, "emit JSON instead of CSV");
    gg_flags.attach(gg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(scenario_path, out_dir, run_flags,
                               seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
        if (pair->parsed()) return pair_command(scenario_path, out_dir, pair_flags);
        if (orc->parsed()) return oracle_command(scenario_path, phi_index, oracle_flags);
        if (gg->parsed()) return gauss_green_command(scenario_path, polygon, as_json, gg_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
