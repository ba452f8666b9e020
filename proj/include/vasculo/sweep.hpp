#pragma once

// Parameter sweeps over (a, b) with the other constants held fixed. Cells run
// on a bounded pool of threads; the table is assembled in grid order so the
// output does not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "vasculo/analysis.hpp"
#include "vasculo/constructors.hpp"
#include "vasculo/errors.hpp"
#include "vasculo/model.hpp"

namespace vasculo {

enum class SweepMode { HalfBump, InteriorBump };

struct SweepSpec {
    ModelParams base{};
    std::vector<double> a_values{1.5, 2.0, 3.0};
    std::vector<double> b_values{0.5, 1.0};
    SweepMode mode = SweepMode::HalfBump;
    double phi0 = 1.0;
    /// Interior mode: initial guess in units of (1/beta, 1/omega), i.e.
    /// r0 = g0/beta and r1 = r0 + g1/omega.
    roots::Vec2 guess_scaled{1.0, 3.0};
};

struct SweepCell {
    std::size_t index = 0;
    ModelParams params;
    RegimeKind regime = RegimeKind::Degenerate;
    std::string status;  // ok, not_found, regime, spurious, error
    std::string message;
    double rho0 = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;
    double K = 0.0;
    double energy = 0.0;
    std::optional<PiecewiseSolution> solution;
};

inline SweepCell run_sweep_cell(const SweepSpec& spec, std::size_t index) {
    const std::size_t nb = spec.b_values.size();
    SweepCell cell;
    cell.index = index;
    cell.params = spec.base;
    cell.params.a = spec.a_values[index / nb];
    cell.params.b = spec.b_values[index % nb];
    try {
        cell.params.validate();
        cell.regime = classify(cell.params).kind;
        if (spec.mode == SweepMode::HalfBump) {
            const HalfBumpSolution hb = construct_half_bump(cell.params, spec.phi0);
            cell.rho0 = hb.rho0;
            cell.r0 = hb.r0;
            cell.K = hb.K;
            cell.energy = stationary_energy(hb.solution).direct;
            cell.solution = hb.solution;
        } else {
            const Regime reg = classify(cell.params);
            if (reg.kind != RegimeKind::Supercritical) {
                throw RegimeError("interior bump: regime is " + std::string(to_string(reg.kind)));
            }
            const double beta = cell.params.beta();
            if (!(beta > 0.0)) throw RegimeError("interior bump: beta = 0");
            const double g0 = spec.guess_scaled[0] / beta;
            const roots::Vec2 guess{g0, g0 + spec.guess_scaled[1] / *reg.freq};
            const InteriorBumpSolution ib = construct_interior_bump(cell.params, guess);
            cell.r0 = ib.r0;
            cell.r1 = ib.r1;
            cell.K = ib.K;
            cell.energy = stationary_energy(ib.solution).direct;
            cell.solution = ib.solution;
        }
        cell.status = "ok";
    } catch (const NotFound& e) {
        cell.status = "not_found";
        cell.message = e.what();
    } catch (const RegimeError& e) {
        cell.status = "regime";
        cell.message = e.what();
    } catch (const SpuriousRoot& e) {
        cell.status = "spurious";
        cell.message = e.what();
    } catch (const Error& e) {
        cell.status = "error";
        cell.message = e.what();
    }
    return cell;
}

/// Runs every (a, b) cell, at most `jobs` at a time. Cell i is (a[i / nb], b[i % nb]).
inline std::vector<SweepCell> run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
    const std::size_t n = spec.a_values.size() * spec.b_values.size();
    std::vector<SweepCell> cells(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) cells[i] = run_sweep_cell(spec, i);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    return cells;
}

inline nlohmann::json to_json(const SweepCell& c) {
    nlohmann::json j;
    j["index"] = c.index;
    j["a"] = c.params.a;
    j["b"] = c.params.b;
    j["regime"] = std::string(to_string(c.regime));
    j["status"] = c.status;
    if (c.status == "ok") {
        j["rho0"] = c.rho0;
        j["r0"] = c.r0;
        j["r1"] = c.r1;
        j["K"] = c.K;
        j["energy_Es"] = c.energy;
    } else {
        j["message"] = c.message;
    }
    return j;
}

}  // namespace vasculo
