#pragma once

// Verification of piecewise solutions: pointwise residuals of the stationary
// radial system
//   D phi'' + D phi'/r + a rho - b phi = 0,     (eps/2 rho^2)' - chi rho phi' = 0,
// one-sided continuity at breakpoints, mass and the energy functionals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vasculo/errors.hpp"
#include "vasculo/matching.hpp"
#include "vasculo/quadrature.hpp"
#include "vasculo/solutions.hpp"
#include "vasculo/specfun.hpp"

namespace vasculo {

struct ResidualNorms {
    double sup = 0.0;
    double rms = 0.0;
    double argmax = 0.0;
};

struct PointResidual {
    double phi_eq = 0.0;
    double rho_eq = 0.0;
};

/// Residuals of both equations at one point, using the piece that eval picks.
inline PointResidual point_residual(const ModelParams& p, const PointValue& v, double r) {
    PointResidual res;
    const double lap = r > 0.0 ? v.d2phi + v.dphi / r : 2.0 * v.d2phi;
    res.phi_eq = p.D * lap + p.a * v.rho - p.b * v.phi;
    res.rho_eq = p.eps * v.rho * v.drho - p.chi * v.rho * v.dphi;
    return res;
}

struct OdeResidualReport {
    ResidualNorms phi_eq;
    ResidualNorms rho_eq;
    std::size_t points = 0;
    double max_abs_phi = 0.0;
};

inline OdeResidualReport ode_residuals(const PiecewiseSolution& sol, const std::vector<double>& grid) {
    OdeResidualReport rep;
    double ss_phi = 0.0, ss_rho = 0.0;
    for (double r : grid) {
        const PointValue v = eval(sol, r);
        const PointResidual res = point_residual(sol.params, v, r);
        const double ap = std::fabs(res.phi_eq);
        const double ar = std::fabs(res.rho_eq);
        if (ap > rep.phi_eq.sup) {
            rep.phi_eq.sup = ap;
            rep.phi_eq.argmax = r;
        }
        if (ar > rep.rho_eq.sup) {
            rep.rho_eq.sup = ar;
            rep.rho_eq.argmax = r;
        }
        ss_phi += ap * ap;
        ss_rho += ar * ar;
        rep.max_abs_phi = std::max(rep.max_abs_phi, std::fabs(v.phi));
    }
    rep.points = grid.size();
    if (!grid.empty()) {
        rep.phi_eq.rms = std::sqrt(ss_phi / static_cast<double>(grid.size()));
        rep.rho_eq.rms = std::sqrt(ss_rho / static_cast<double>(grid.size()));
    }
    return rep;
}

/// Uniform grid on [0, r_max] with points closer than `exclusion` to a
/// breakpoint removed.
inline std::vector<double> verification_grid(const PiecewiseSolution& sol, double r_max, int n,
                                             double exclusion = 1e-10) {
    if (n < 2 || !(r_max > 0.0)) throw UsageError("grid: need n >= 2 and r_max > 0");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = r_max * i / (n - 1);
        const bool near = std::any_of(sol.breakpoints.begin(), sol.breakpoints.end(),
                                      [&](double b) { return std::fabs(r - b) <= exclusion; });
        if (!near) grid.push_back(r);
    }
    return grid;
}

struct ContinuityEntry {
    double r = 0.0;
    PointValue left;
    PointValue right;
    double rho_jump = 0.0;
    double phi_jump = 0.0;
    double dphi_jump = 0.0;
    double d2phi_jump = 0.0;
};

inline std::vector<ContinuityEntry> continuity_report(const PiecewiseSolution& sol) {
    std::vector<ContinuityEntry> out;
    for (std::size_t i = 0; i < sol.breakpoints.size(); ++i) {
        ContinuityEntry e;
        e.r = sol.breakpoints[i];
        e.left = eval_piece(sol.pieces.at(i), sol.params, e.r);
        e.right = eval_piece(sol.pieces.at(i + 1), sol.params, e.r);
        e.rho_jump = e.right.rho - e.left.rho;
        e.phi_jump = e.right.phi - e.left.phi;
        e.dphi_jump = e.right.dphi - e.left.dphi;
        e.d2phi_jump = e.right.d2phi - e.left.d2phi;
        out.push_back(e);
    }
    return out;
}

/// Cut-off radius for integrals over the plane: the vacuum tail beyond it
/// carries a factor K0(40)^2 ~ e^-80.
inline double default_r_cut(const PiecewiseSolution& sol) {
    const double last = sol.breakpoints.empty() ? 0.0 : sol.breakpoints.back();
    const double beta = sol.params.beta();
    return last + (beta > 0.0 ? 40.0 / beta : 40.0);
}

namespace detail {

// 2 pi sum over pieces of int f(piece value, r) r dr on [0, r_cut], each piece
// evaluated with its own formula up to and including its endpoints.
template <typename F>
double piecewise_radial(const PiecewiseSolution& sol, double r_cut, const Quadrature& quad,
                        bool dense_only, F&& f) {
    double total = 0.0;
    for (std::size_t i = 0; i < sol.pieces.size(); ++i) {
        const Piece& piece = sol.pieces[i];
        if (dense_only && piece.is_vacuum()) continue;
        const double lo = sol.piece_begin(i);
        const double hi = std::min(sol.piece_end(i), r_cut);
        if (!(hi > lo)) continue;
        total += integrate_radial(
            [&](double r) { return f(eval_piece(piece, sol.params, r)); }, lo, hi, quad);
    }
    return 2.0 * std::numbers::pi * total;
}

}  // namespace detail

/// Total cell mass 2 pi int rho r dr.
inline double mass(const PiecewiseSolution& sol, double r_cut, const Quadrature& quad = {}) {
    return detail::piecewise_radial(sol, r_cut, quad, true, [](const PointValue& v) { return v.rho; });
}

inline double mass(const PiecewiseSolution& sol) { return mass(sol, default_r_cut(sol)); }

struct StationaryEnergy {
    double direct = 0.0;  // 2 pi int (eps/2 rho^2 - chi/2 rho phi) r dr
    double via_K = 0.0;   // 2 pi int rho K/2 r dr
};

/// Stationary energy in its two equivalent forms. The chemotactic term enters
/// with a minus sign; only then does it coincide with the K form.
inline StationaryEnergy stationary_energy(const PiecewiseSolution& sol, double r_cut,
                                          const Quadrature& quad = {}) {
    const ModelParams& p = sol.params;
    StationaryEnergy e;
    e.direct = detail::piecewise_radial(sol, r_cut, quad, true, [&](const PointValue& v) {
        return 0.5 * p.eps * v.rho * v.rho - 0.5 * p.chi * v.rho * v.phi;
    });
    double total = 0.0;
    for (std::size_t i = 0; i < sol.pieces.size(); ++i) {
        const Piece& piece = sol.pieces[i];
        if (piece.is_vacuum()) continue;
        const double lo = sol.piece_begin(i);
        const double hi = std::min(sol.piece_end(i), r_cut);
        if (!(hi > lo)) continue;
        total += 0.5 * piece.K *
                 integrate_radial([&](double r) { return eval_piece(piece, p, r).rho; }, lo, hi, quad);
    }
    e.via_K = 2.0 * std::numbers::pi * total;
    return e;
}

inline StationaryEnergy stationary_energy(const PiecewiseSolution& sol) {
    return stationary_energy(sol, default_r_cut(sol));
}

struct IdentityGap {
    double lhs = 0.0;  // 2 pi int (chi D/a phi'^2 + chi b/a phi^2) r dr
    double rhs = 0.0;  // 2 pi int chi rho phi r dr
    double gap = 0.0;
    /// Bound on the discarded tail of lhs beyond r_cut from the final
    /// vacuum piece A2 K0(beta r).
    double tail_bound = 0.0;
};

/// The integrated phi equation tested against chi phi/a.
inline IdentityGap phi_identity_gap(const PiecewiseSolution& sol, double r_cut,
                                    const Quadrature& quad = {}) {
    const ModelParams& p = sol.params;
    if (!(p.a > 0.0)) throw DomainError("phi identity: needs a > 0");
    IdentityGap g;
    g.lhs = detail::piecewise_radial(sol, r_cut, quad, false, [&](const PointValue& v) {
        return p.chi * p.D / p.a * v.dphi * v.dphi + p.chi * p.b / p.a * v.phi * v.phi;
    });
    g.rhs = detail::piecewise_radial(sol, r_cut, quad, true,
                                     [&](const PointValue& v) { return p.chi * v.rho * v.phi; });
    g.gap = std::fabs(g.lhs - g.rhs);
    const Piece& last = sol.pieces.back();
    const double beta = p.beta();
    if (last.is_vacuum() && beta > 0.0 && r_cut > 0.0) {
        // phi^2 and phi'^2 <= A2^2 K1(beta r)^2 beyond r_cut; K1 decays like K0.
        const auto k = specfun::k0(beta * r_cut);
        const double amp = last.c2 * last.c2 * k.deriv * k.deriv;
        g.tail_bound = amp * (p.D + p.b) * r_cut * p.chi / p.a;
    }
    return g;
}

struct AppendixEnergies {
    double E_plus = 0.0;
    double coupling = 0.0;  // 2 pi int chi rho phi r dr
    double E = 0.0;         // E_plus - coupling
    double E_direct = 0.0;  // the same functional integrated in one pass
};

inline AppendixEnergies appendix_functionals(const PiecewiseSolution& sol, double r_cut,
                                             const Quadrature& quad = {}) {
    const ModelParams& p = sol.params;
    if (!(p.a > 0.0)) throw DomainError("appendix functionals: need a > 0");
    const double wD = p.chi * p.D / (2.0 * p.a);
    const double wb = p.chi * p.b / (2.0 * p.a);
    AppendixEnergies e;
    e.E_plus = detail::piecewise_radial(sol, r_cut, quad, false, [&](const PointValue& v) {
        return 0.5 * p.eps * v.rho * v.rho + wD * v.dphi * v.dphi + wb * v.phi * v.phi;
    });
    e.coupling = detail::piecewise_radial(sol, r_cut, quad, true,
                                          [&](const PointValue& v) { return p.chi * v.rho * v.phi; });
    e.E = e.E_plus - e.coupling;
    e.E_direct = detail::piecewise_radial(sol, r_cut, quad, false, [&](const PointValue& v) {
        return 0.5 * p.eps * v.rho * v.rho + wD * v.dphi * v.dphi + wb * v.phi * v.phi -
               p.chi * v.rho * v.phi;
    });
    return e;
}

struct VerifyTolerances {
    double residual = 1e-8;      // times (D + a + b)(1 + max|phi|)
    double identity = 1e-6;      // times (1 + |rhs|)
    double energy_rel = 1e-9;    // agreement of equivalent energy forms
    double sign = 1e-10;         // rho, phi >= -sign (1 + max|.|)
    int grid_points = 4096;
    /// Extra uniformly random radii in (0, r_cut) added to the residual grid.
    int random_points = 0;
    std::uint64_t seed = 0;
    Quadrature quad{};
};

struct SignReport {
    double min_rho = 0.0;
    double min_phi = 0.0;
    /// Grid points with phi < rho; reported only.
    std::size_t phi_below_rho = 0;
};

struct VerificationReport {
    double r_cut = 0.0;
    OdeResidualReport residuals;
    double residual_threshold = 0.0;
    std::vector<ContinuityEntry> continuity;
    std::vector<TransitionCheck> transitions;
    SignReport signs;
    std::vector<std::string> structural_issues;
    double mass = 0.0;
    StationaryEnergy energy;
    double energy_threshold = 0.0;
    bool has_identity = false;
    IdentityGap identity;
    double identity_threshold = 0.0;
    AppendixEnergies appendix;
    double appendix_threshold = 0.0;
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
};

inline VerificationReport verify(const PiecewiseSolution& sol, const VerifyTolerances& tol = {},
                                 std::optional<double> r_cut = std::nullopt) {
    const ModelParams& p = sol.params;
    VerificationReport rep;
    rep.structural_issues = sol.structural_issues();
    if (!rep.structural_issues.empty()) {
        rep.failures.emplace_back("structure");
        return rep;
    }
    rep.r_cut = r_cut.value_or(default_r_cut(sol));
    auto grid = verification_grid(sol, rep.r_cut, tol.grid_points);
    if (tol.random_points > 0) {
        std::mt19937_64 rng(tol.seed);
        std::uniform_real_distribution<double> dist(0.0, rep.r_cut);
        for (int i = 0; i < tol.random_points; ++i) {
            const double r = dist(rng);
            const bool near = std::any_of(sol.breakpoints.begin(), sol.breakpoints.end(),
                                          [&](double b) { return std::fabs(r - b) <= 1e-10; });
            if (!near) grid.push_back(r);
        }
        std::sort(grid.begin(), grid.end());
    }
    rep.residuals = ode_residuals(sol, grid);
    rep.residual_threshold = tol.residual * (p.D + p.a + p.b) * (1.0 + rep.residuals.max_abs_phi);
    if (rep.residuals.phi_eq.sup > rep.residual_threshold) rep.failures.emplace_back("residual_phi_eq");
    if (rep.residuals.rho_eq.sup > rep.residual_threshold) rep.failures.emplace_back("residual_rho_eq");

    rep.continuity = continuity_report(sol);
    for (double b : sol.breakpoints) {
        rep.transitions.push_back(transition_check(sol, b));
        if (!rep.transitions.back().passed) rep.failures.emplace_back("transition");
        if (!rep.transitions.back().implication_holds) rep.failures.emplace_back("implication");
    }

    double max_rho = 0.0;
    rep.signs.min_rho = std::numeric_limits<double>::infinity();
    rep.signs.min_phi = std::numeric_limits<double>::infinity();
    for (double r : grid) {
        const PointValue v = eval(sol, r);
        rep.signs.min_rho = std::min(rep.signs.min_rho, v.rho);
        rep.signs.min_phi = std::min(rep.signs.min_phi, v.phi);
        max_rho = std::max(max_rho, v.rho);
        if (v.phi < v.rho) ++rep.signs.phi_below_rho;
    }
    if (rep.signs.min_rho < -tol.sign * (1.0 + max_rho)) rep.failures.emplace_back("rho_negative");
    if (rep.signs.min_phi < -tol.sign * (1.0 + rep.residuals.max_abs_phi)) {
        rep.failures.emplace_back("phi_negative");
    }

    rep.mass = mass(sol, rep.r_cut, tol.quad);
    rep.energy = stationary_energy(sol, rep.r_cut, tol.quad);
    rep.energy_threshold = tol.energy_rel * std::max(std::fabs(rep.energy.direct), 1e-300);
    if (std::fabs(rep.energy.direct - rep.energy.via_K) > rep.energy_threshold &&
        std::fabs(rep.energy.direct - rep.energy.via_K) > tol.quad.abs_tol) {
        rep.failures.emplace_back("energy_forms");
    }
    if (p.a > 0.0) {
        rep.has_identity = true;
        rep.identity = phi_identity_gap(sol, rep.r_cut, tol.quad);
        rep.identity_threshold = tol.identity * (1.0 + std::fabs(rep.identity.rhs));
        if (rep.identity.gap > rep.identity_threshold) rep.failures.emplace_back("identity_gap");
        rep.appendix = appendix_functionals(sol, rep.r_cut, tol.quad);
        rep.appendix_threshold =
            std::max(tol.energy_rel * std::fabs(rep.appendix.E), tol.quad.abs_tol);
        if (std::fabs(rep.appendix.E - rep.appendix.E_direct) > rep.appendix_threshold) {
            rep.failures.emplace_back("appendix_energy");
        }
    }
    return rep;
}

inline nlohmann::json to_json(const ResidualNorms& n) {
    return {{"sup", n.sup}, {"rms", n.rms}, {"argmax", n.argmax}};
}

inline nlohmann::json to_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["passed"] = rep.passed();
    j["failures"] = rep.failures;
    j["structural_issues"] = rep.structural_issues;
    if (!rep.structural_issues.empty()) return j;
    j["r_cut"] = rep.r_cut;
    j["residual_phi_eq"] = to_json(rep.residuals.phi_eq);
    j["residual_rho_eq"] = to_json(rep.residuals.rho_eq);
    j["residual_threshold"] = rep.residual_threshold;
    j["grid_points"] = rep.residuals.points;
    j["continuity"] = nlohmann::json::array();
    for (const auto& c : rep.continuity) {
        j["continuity"].push_back({{"r", c.r},
                                   {"rho_jump", c.rho_jump},
                                   {"phi_jump", c.phi_jump},
                                   {"dphi_jump", c.dphi_jump},
                                   {"d2phi_jump", c.d2phi_jump}});
    }
    j["transitions"] = nlohmann::json::array();
    for (const auto& t : rep.transitions) j["transitions"].push_back(to_json(t));
    j["signs"] = {{"min_rho", rep.signs.min_rho},
                  {"min_phi", rep.signs.min_phi},
                  {"phi_below_rho_points", rep.signs.phi_below_rho}};
    j["mass"] = rep.mass;
    j["energy_Es"] = rep.energy.direct;
    j["energy_Es_via_K"] = rep.energy.via_K;
    if (rep.has_identity) {
        j["identity_gap"] = rep.identity.gap;
        j["identity_lhs"] = rep.identity.lhs;
        j["identity_rhs"] = rep.identity.rhs;
        j["identity_threshold"] = rep.identity_threshold;
        j["identity_tail_bound"] = rep.identity.tail_bound;
        j["E"] = rep.appendix.E;
        j["E_plus"] = rep.appendix.E_plus;
        j["E_direct"] = rep.appendix.E_direct;
    }
    return j;
}

/// Profile table `r,rho,phi,dphi,d2phi,res_phi_eq,res_rho_eq`, 17 significant digits.
inline void write_profile_csv(std::ostream& os, const PiecewiseSolution& sol, double r_max, int n) {
    if (n < 2 || !(r_max > 0.0)) throw UsageError("profile: need n >= 2 and r_max > 0");
    os << "r,rho,phi,dphi,d2phi,res_phi_eq,res_rho_eq\n";
    char line[512];
    for (int i = 0; i < n; ++i) {
        const double r = r_max * i / (n - 1);
        const PointValue v = eval(sol, r);
        const PointResidual res = point_residual(sol.params, v, r);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r, v.rho,
                      v.phi, v.dphi, v.d2phi, res.phi_eq, res.rho_eq);
        os << line;
    }
}

}  // namespace vasculo
