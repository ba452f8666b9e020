// vasculo: classify parameters, build half and interior bumps, verify
// solution files, run nonexistence probes and (a, b) sweeps.
//
// Exit codes: 0 ok, 2 bad config or input, 3 no solution found,
// 4 regime mismatch, 5 verification failed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vasculo/vasculo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vasculo;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNotFound = 3, kRegime = 4, kVerify = 5 };

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel g_log = LogLevel::Error;

void log(LogLevel level, const std::string& msg) {
    if (level <= g_log) {
        static const char* names[] = {"error", "info", "debug"};
        std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
    }
}

void init_logging() {
    const char* env = std::getenv("VASCULO_LOG");
    if (!env || !*env) return;
    const std::string v = env;
    if (v == "error") g_log = LogLevel::Error;
    else if (v == "info") g_log = LogLevel::Info;
    else if (v == "debug") g_log = LogLevel::Debug;
    else throw UsageError("VASCULO_LOG must be one of error, info, debug (got '" + v + "')");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("malformed JSON in '" + path + "': " + e.what());
    }
}

ModelParams read_params(const std::string& path) {
    try {
        return params_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw UsageError("params '" + path + "': " + e.what());
    }
}

void emit(const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
    log(LogLevel::Info, "wrote " + path);
}

void emit_csv(const PiecewiseSolution& sol, const std::string& path, double r_max, int n) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    write_profile_csv(out, sol, r_max, n);
    log(LogLevel::Info, "wrote " + path + " (" + std::to_string(n) + " rows)");
}

struct Common {
    std::string params;
    std::string json_out;
    std::string csv_out;
    double r_max = 0.0;
    int n = 2000;
    std::uint64_t seed = 0;
    double tol_residual = 1e-8;
    double tol_identity = 1e-6;
    double tol_energy = 1e-9;
    double tol_quad_abs = 1e-12;
    double tol_quad_rel = 1e-10;
    double tol_newton = 1e-10;
    int random_points = 256;

    VerifyTolerances verify_tolerances() const {
        VerifyTolerances t;
        t.residual = tol_residual;
        t.identity = tol_identity;
        t.energy_rel = tol_energy;
        t.quad.abs_tol = tol_quad_abs;
        t.quad.rel_tol = tol_quad_rel;
        t.random_points = random_points;
        t.seed = seed;
        t.quad.validate();
        if (!(tol_residual > 0.0 && tol_identity > 0.0 && tol_energy > 0.0 && tol_newton > 0.0)) {
            throw UsageError("tolerances must be positive");
        }
        return t;
    }
};

void add_tolerances(CLI::App* cmd, Common& c) {
    cmd->add_option("--tol-residual", c.tol_residual, "ODE residual factor")->capture_default_str();
    cmd->add_option("--tol-identity", c.tol_identity, "phi identity gap factor")->capture_default_str();
    cmd->add_option("--tol-energy", c.tol_energy, "relative agreement of energy forms")
        ->capture_default_str();
    cmd->add_option("--tol-quad-abs", c.tol_quad_abs, "quadrature absolute tolerance")
        ->capture_default_str();
    cmd->add_option("--tol-quad-rel", c.tol_quad_rel, "quadrature relative tolerance")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed for the random residual probe points")
        ->capture_default_str();
    cmd->add_option("--random-points", c.random_points, "number of random residual probe points")
        ->capture_default_str();
}

void add_outputs(CLI::App* cmd, Common& c) {
    cmd->add_option("--json", c.json_out, "write JSON here instead of standard output");
    cmd->add_option("--csv", c.csv_out, "write a profile CSV");
    cmd->add_option("--rmax", c.r_max, "profile extent (default: last breakpoint + 40/beta)");
    cmd->add_option("--n", c.n, "profile rows")->capture_default_str()->check(CLI::Range(2, 10000000));
}

json certificate(const VerificationReport& rep) {
    json cert = to_json(rep);
    cert["energy"] = rep.energy.direct;
    return cert;
}

int finish_solution(const PiecewiseSolution& sol, json out, const Common& c) {
    const VerificationReport rep = verify(sol, c.verify_tolerances());
    out["solution"] = to_json(sol);
    out["certificate"] = certificate(rep);
    emit(out, c.json_out);
    if (!c.csv_out.empty()) {
        emit_csv(sol, c.csv_out, c.r_max > 0.0 ? c.r_max : default_r_cut(sol), c.n);
    }
    if (!rep.passed()) {
        std::string why;
        for (const auto& f : rep.failures) why += " " + f;
        log(LogLevel::Error, "verification failed:" + why);
        return kVerify;
    }
    return kOk;
}

int cmd_classify(const Common& c) {
    const ModelParams p = read_params(c.params);
    const Regime r = classify(p);
    emit(to_json(r, p), c.json_out);
    return kOk;
}

int cmd_halfbump(const Common& c, double phi0) {
    const ModelParams p = read_params(c.params);
    const HalfBumpSolution hb = construct_half_bump(p, phi0);
    log(LogLevel::Info, "half bump: r0 = " + std::to_string(hb.r0) + ", " +
                            std::to_string(hb.brackets.size()) + " bracket(s)");
    json brackets = json::array();
    for (const auto& b : hb.brackets) brackets.push_back({{"lo", b.lo}, {"hi", b.hi}, {"root", b.root}});
    json out;
    out["construction"] = {{"kind", "half_bump"},
                           {"rho0", hb.rho0},
                           {"phi0", hb.phi0},
                           {"K", hb.K},
                           {"c1", hb.c1},
                           {"r0", hb.r0},
                           {"A1", hb.A1},
                           {"A2", hb.A2},
                           {"L", hb.L},
                           {"m", hb.m},
                           {"W1", hb.W1},
                           {"matching_residual", hb.matching_residual},
                           {"brackets", brackets}};
    return finish_solution(hb.solution, out, c);
}

int cmd_interiorbump(const Common& c, const std::vector<double>& guess, double tol_newton) {
    const ModelParams p = read_params(c.params);
    InteriorBumpOptions opt;
    opt.newton.tol = tol_newton;
    try {
        const InteriorBumpSolution ib = construct_interior_bump(p, {guess.at(0), guess.at(1)}, opt);
        json out;
        out["construction"] = {{"kind", "interior_bump"}, {"phi0", ib.phi0}, {"r0", ib.r0},
                               {"r1", ib.r1},            {"K", ib.K},         {"c1", ib.c1},
                               {"c2", ib.c2},            {"A2", ib.A2},       {"dphi_r0", ib.dphi_r0},
                               {"dphi_r1", ib.dphi_r1},  {"newton", newton_trace_json(ib.newton)}};
        return finish_solution(ib.solution, out, c);
    } catch (const NotFound&) {
        const InteriorObstruction o = interior_obstruction(p, guess.at(0), guess.at(1));
        log(LogLevel::Info, "oscillator energy at guess: g(r0) = " + std::to_string(o.g_r0) +
                                ", g(r1) = " + std::to_string(o.g_r1));
        throw;
    }
}

int cmd_verify(const Common& c, const std::string& solution_path) {
    json j = read_json_file(solution_path);
    if (j.contains("solution")) j = j.at("solution");
    PiecewiseSolution sol;
    try {
        sol = solution_from_json(j);
    } catch (const json::exception& e) {
        throw UsageError("solution '" + solution_path + "': " + e.what());
    }
    sol.params.validate();
    const VerificationReport rep = verify(sol, c.verify_tolerances());
    emit(to_json(rep), c.json_out);
    if (!c.csv_out.empty()) {
        emit_csv(sol, c.csv_out, c.r_max > 0.0 ? c.r_max : default_r_cut(sol), c.n);
    }
    return rep.passed() ? kOk : kVerify;
}

int cmd_probe(const Common& c, const std::string& scenario, const ProbeOptions& opt) {
    const ModelParams p = read_params(c.params);
    const ProbeReport rep = probe_nonexistence(probe_scenario_from_string(scenario), p, opt);
    emit(to_json(rep), c.json_out);
    return rep.certified ? kOk : kVerify;
}

int cmd_sweep(const Common& c, SweepSpec spec, unsigned jobs, const std::string& out_dir) {
    spec.base = read_params(c.params);
    const auto cells = run_sweep(spec, jobs);
    json table = json::array();
    for (const auto& cell : cells) {
        json row = to_json(cell);
        if (!out_dir.empty() && cell.solution) {
            fs::create_directories(out_dir);
            const std::string name = "cell_" + std::to_string(cell.index) + ".json";
            const std::string path = (fs::path(out_dir) / name).string();
            std::ofstream f(path, std::ios::binary);
            if (!f) throw UsageError("cannot write '" + path + "'");
            f << json{{"solution", to_json(*cell.solution)}}.dump(2) << "\n";
            row["file"] = name;  // relative to --out-dir
        }
        table.push_back(row);
        log(LogLevel::Debug, "cell " + std::to_string(cell.index) + ": " + cell.status);
    }
    json out;
    out["mode"] = spec.mode == SweepMode::HalfBump ? "halfbump" : "interiorbump";
    out["base"] = to_json(spec.base);
    out["cells"] = table;
    emit(out, c.json_out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial stationary states with vacuum for a chemotaxis model"};
    app.require_subcommand(1);
    Common common;
    double phi0 = 1.0;
    std::vector<double> guess;
    std::string solution_path;
    std::string scenario;
    ProbeOptions probe_opt;
    SweepSpec sweep_spec;
    std::string sweep_mode = "halfbump";
    unsigned jobs = 1;
    std::string out_dir;

    auto* classify_cmd = app.add_subcommand("classify", "print the regime of a parameter set");
    classify_cmd->add_option("--params", common.params, "parameter JSON")->required();
    classify_cmd->add_option("--json", common.json_out, "write JSON here");

    auto* half = app.add_subcommand("halfbump", "construct a half bump centred at r = 0");
    half->add_option("--params", common.params, "parameter JSON")->required();
    half->add_option("--phi0", phi0, "phi(0)")->capture_default_str();
    add_outputs(half, common);
    add_tolerances(half, common);

    auto* interior = app.add_subcommand("interiorbump", "solve for an interior bump by Newton");
    interior->add_option("--params", common.params, "parameter JSON")->required();
    interior->add_option("--guess", guess, "initial r0,r1")->delimiter(',')->expected(2)->required();
    interior->add_option("--tol-newton", common.tol_newton, "Newton residual tolerance")
        ->capture_default_str();
    add_outputs(interior, common);
    add_tolerances(interior, common);

    auto* verify_cmd = app.add_subcommand("verify", "verify a solution JSON file");
    verify_cmd->add_option("--solution,solution", solution_path, "solution JSON")->required();
    add_outputs(verify_cmd, common);
    add_tolerances(verify_cmd, common);

    auto* probe = app.add_subcommand("probe", "certify a nonexistence scenario");
    probe->add_option("--params", common.params, "parameter JSON")->required();
    probe->add_option("--scenario", scenario,
                      "HalfBumpCase1|HalfBumpCase2|TouchingZeroCase1|TouchingZeroCase2|"
                      "TouchingZeroCase3|SymmetricInterior")
        ->required();
    probe->add_option("--rho0", probe_opt.rho0, "half-bump scenarios: rho(0)")->capture_default_str();
    probe->add_option("--phi0", probe_opt.phi0, "half-bump scenarios: phi(0)")->capture_default_str();
    probe->add_option("--K", probe_opt.K, "touching-zero scenarios: K < 0")->capture_default_str();
    probe->add_option("--rmax", probe_opt.r_max, "grid extent")->capture_default_str();
    probe->add_option("--n", probe_opt.n, "grid points")->capture_default_str()->check(CLI::Range(2, 10000000));
    probe->add_option("--json", common.json_out, "write JSON here");

    auto* sweep = app.add_subcommand("sweep", "construct over an (a, b) grid");
    sweep->add_option("--params", common.params, "base parameter JSON (a, b overridden)")->required();
    sweep->add_option("--a", sweep_spec.a_values, "a values")->delimiter(',')->capture_default_str();
    sweep->add_option("--b", sweep_spec.b_values, "b values")->delimiter(',')->capture_default_str();
    sweep->add_option("--mode", sweep_mode, "halfbump|interiorbump")
        ->check(CLI::IsMember({"halfbump", "interiorbump"}))
        ->capture_default_str();
    sweep->add_option("--phi0", sweep_spec.phi0, "phi(0) for half bumps")->capture_default_str();
    sweep->add_option("--jobs", jobs, "concurrent cells")->capture_default_str()->check(CLI::Range(1u, 1024u));
    sweep->add_option("--out-dir", out_dir, "write each solution to its own file here");
    sweep->add_option("--json", common.json_out, "write the table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        init_logging();
        if (classify_cmd->parsed()) return cmd_classify(common);
        if (half->parsed()) return cmd_halfbump(common, phi0);
        if (interior->parsed()) return cmd_interiorbump(common, guess, common.tol_newton);
        if (verify_cmd->parsed()) return cmd_verify(common, solution_path);
        if (probe->parsed()) return cmd_probe(common, scenario, probe_opt);
        if (sweep->parsed()) {
            sweep_spec.mode = sweep_mode == "halfbump" ? SweepMode::HalfBump : SweepMode::InteriorBump;
            return cmd_sweep(common, sweep_spec, jobs, out_dir);
        }
    } catch (const NotFound& e) {
        log(LogLevel::Error, e.what());
        std::cout << e.diagnostics() << "\n";
        return kNotFound;
    } catch (const SpuriousRoot& e) {
        log(LogLevel::Error, e.what());
        return kNotFound;
    } catch (const RegimeError& e) {
        log(LogLevel::Error, e.what());
        return kRegime;
    } catch (const std::exception& e) {
        log(LogLevel::Error, e.what());
        return kConfig;
    }
    return kConfig;
}
