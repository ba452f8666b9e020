#pragma once

// Constructions of stationary states with vacuum and certificates for the
// configurations that cannot exist.
//
//  * Half bump: a Case3 piece on [0, r0] glued to a decaying vacuum tail.
//  * Interior bump: vacuum [0, r0], Case3 on [r0, r1], decaying vacuum tail.
//  * Probes: explicit would-be profiles whose density never vanishes (or
//    whose matching forces the trivial state).
//
// Both constructions are linear and homogeneous in the amplitude phi0, so the
// searches run at phi0 = 1 and the result is scaled afterwards.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vasculo/errors.hpp"
#include "vasculo/matching.hpp"
#include "vasculo/model.hpp"
#include "vasculo/roots.hpp"
#include "vasculo/solutions.hpp"
#include "vasculo/specfun.hpp"

namespace vasculo {

/// Interval of admissible central densities rho0.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;

    bool empty() const { return lo > hi || (lo == hi && (lo_open || hi_open)); }
    bool contains(double x) const {
        const bool above = lo_open ? x > lo : x >= lo;
        const bool below = hi_open ? x < hi : x <= hi;
        return above && below;
    }
};

namespace detail {

inline double require_supercritical(const ModelParams& p, const char* what) {
    const Regime r = classify(p);
    switch (r.kind) {
        case RegimeKind::Degenerate:
            throw RegimeError(std::string(what) +
                              ": degenerate parameters, rho = rho0 - chi a K r^2/(4 D eps^2) "
                              "never vanishes, so no such solution exists");
        case RegimeKind::Subcritical:
            throw RegimeError(std::string(what) +
                              ": subcritical parameters, the I0 profile is monotone, so no such "
                              "solution exists");
        case RegimeKind::Supercritical: break;
    }
    return *r.freq;
}

inline nlohmann::json interval_json(const Interval& iv) {
    return {{"lo", iv.lo}, {"hi", iv.hi}, {"lo_open", iv.lo_open}, {"hi_open", iv.hi_open}};
}

}  // namespace detail

/// Central densities rho0 > 0 for which a half bump with phi(0) = phi0 can
/// have a density zero inside the first J0 lobe:
///   K <= 0:                 rho0 <= chi phi0/eps
///   c1 > 0:                 rho0 >  (chi/eps) q/(1+q) phi0
///   zero before minimum:    rho0 >= (chi/eps) q phi0/(m/(1+m) + q)
/// with q = beta^2/omega^2 and -m the first minimum of J0.
inline Interval halfbump_admissible_interval(const ModelParams& p, double phi0) {
    const double omega = detail::require_supercritical(p, "half bump");
    if (!(phi0 > 0.0) || !std::isfinite(phi0)) throw DomainError("half bump: phi0 must be > 0");
    const double m = specfun::j0_first_min().depth;
    const double beta = p.beta();
    const double q = beta * beta / (omega * omega);
    const double ratio = p.chi / p.eps;
    Interval iv;
    iv.hi = ratio * phi0;
    const double lo_c1 = ratio * q / (1.0 + q) * phi0;
    const double lo_min = ratio * q * phi0 / (m / (1.0 + m) + q);
    iv.lo = std::max(lo_c1, lo_min);
    iv.lo_open = iv.lo == 0.0 || (lo_c1 >= lo_min);
    return iv;
}

/// Smallest r0 > 0 with rho(r0) = 0, i.e. J0(omega r0) = -L/(rho0 - L) with
/// L = -(K/eps) beta^2/omega^2 and K = eps rho0 - chi phi0.
inline double halfbump_r0(double rho0, double phi0, const ModelParams& p) {
    const double omega = detail::require_supercritical(p, "halfbump_r0");
    const double beta = p.beta();
    const double K = p.eps * rho0 - p.chi * phi0;
    const double L = -(K / p.eps) * beta * beta / (omega * omega);
    if (!(rho0 > L)) throw DomainError("halfbump_r0: need rho0 > L (c1 > 0)");
    double target = -L / (rho0 - L);
    const auto minimum = specfun::j0_first_min();
    const double m = minimum.depth;
    if (target < -m) {
        if (target < -m * (1.0 + 1e-13)) {
            throw NoZeroError("halfbump_r0: target " + std::to_string(target) +
                              " below the first minimum of J0; rho has no zero in the first lobe");
        }
        target = -m;
    }
    if (!(target < 1.0)) throw NoZeroError("halfbump_r0: target >= 1, rho has no zero");
    const double zero = specfun::j0_first_zero();
    auto f = [&](double t) { return specfun::j0(t).value - target; };
    double t;
    if (target == -m) {
        t = minimum.location;
    } else if (target < 0.0) {
        t = roots::bisect(f, zero, minimum.location);
    } else if (target == 0.0) {
        t = zero;
    } else {
        t = roots::bisect(f, 0.0, zero);
    }
    return t / omega;
}

/// Unit-amplitude matching residual R(s) = phi(r0) d/dr K0(beta r0) - phi'(r0) K0(beta r0)
/// at rho0 = s, phi0 = 1. R = 0 is the decay (A1 = 0) condition of the tail.
inline double halfbump_residual(double s, const ModelParams& p) {
    const double omega = detail::require_supercritical(p, "half bump");
    const double beta = p.beta();
    const double K = p.eps * s - p.chi;
    const double c1 = 1.0 + p.a * K / (p.D * p.eps * omega * omega);
    const double r0 = halfbump_r0(s, 1.0, p);
    const auto J = specfun::j0(omega * r0);
    const auto Kb = specfun::k0(beta * r0);
    const double phi = c1 * J.value - p.a * K / (p.D * p.eps * omega * omega);
    const double dphi = c1 * omega * J.deriv;
    return phi * beta * Kb.deriv - dphi * Kb.value;
}

struct ScanSample {
    double rho0_ratio = 0.0;  // rho0/phi0
    double r0 = 0.0;
    double residual = 0.0;
};

struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
    double root = 0.0;
};

struct HalfBumpOptions {
    int scan_samples = 256;
    double residual_tol = 1e-11;
};

struct HalfBumpSolution {
    double rho0 = 0.0;
    double phi0 = 0.0;
    double K = 0.0;
    double c1 = 0.0;
    double r0 = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    double L = 0.0;
    double m = 0.0;
    /// Cramer numerator of A1 at r0 for the assembled solution.
    double W1 = 0.0;
    /// Unit-amplitude matching residual at the accepted root.
    double matching_residual = 0.0;
    PiecewiseSolution solution;
    TransitionCheck transition;
    std::vector<RootBracket> brackets;
    std::vector<ScanSample> scan;
};

inline nlohmann::json scan_json(const std::vector<ScanSample>& scan) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : scan) rows.push_back({s.rho0_ratio, s.r0, s.residual});
    return {{"columns", {"rho0_over_phi0", "r0", "residual"}}, {"rows", rows}};
}

/// Builds the half bump with phi(0) = phi0: scans rho0 over the admissible
/// interval for sign changes of the matching residual, refines every bracket
/// with Brent's method and assembles the smallest root.
inline HalfBumpSolution construct_half_bump(const ModelParams& p, double phi0,
                                            const HalfBumpOptions& opt = {}) {
    const double omega = detail::require_supercritical(p, "half bump");
    const double beta = p.beta();
    if (!(beta > 0.0)) {
        throw RegimeError("half bump: beta = 0 leaves no decaying vacuum tail (phi = c1 + c2 ln r)");
    }
    const Interval unit = halfbump_admissible_interval(p, 1.0);
    (void)halfbump_admissible_interval(p, phi0);  // validates phi0
    const int n = std::max(opt.scan_samples, 2);

    HalfBumpSolution out;
    out.phi0 = phi0;
    out.m = specfun::j0_first_min().depth;
    if (unit.empty()) {
        throw NotFound("half bump: admissible rho0 interval is empty",
                       nlohmann::json{{"interval", detail::interval_json(unit)}}.dump());
    }
    for (int i = 0; i < n; ++i) {
        double s = unit.lo + (unit.hi - unit.lo) * i / (n - 1);
        if (i == 0 && unit.lo_open) continue;
        if (i == n - 1) s = unit.hi;
        ScanSample sample{s, 0.0, std::numeric_limits<double>::quiet_NaN()};
        try {
            sample.r0 = halfbump_r0(s, 1.0, p);
            sample.residual = halfbump_residual(s, p);
        } catch (const NoZeroError&) {
        } catch (const DomainError&) {
        }
        out.scan.push_back(sample);
    }
    for (std::size_t i = 0; i + 1 < out.scan.size(); ++i) {
        const double ra = out.scan[i].residual;
        const double rb = out.scan[i + 1].residual;
        if (!std::isfinite(ra) || !std::isfinite(rb)) continue;
        if (ra == 0.0) {
            out.brackets.push_back({out.scan[i].rho0_ratio, out.scan[i].rho0_ratio,
                                    out.scan[i].rho0_ratio});
        } else if ((ra < 0.0) != (rb < 0.0) && rb != 0.0) {
            const double lo = out.scan[i].rho0_ratio;
            const double hi = out.scan[i + 1].rho0_ratio;
            const double root = roots::brent([&](double s) { return halfbump_residual(s, p); }, lo, hi);
            out.brackets.push_back({lo, hi, root});
        }
    }
    if (out.brackets.empty()) {
        throw NotFound("half bump: matching residual has no sign change over the admissible interval",
                       nlohmann::json{{"interval", detail::interval_json(unit)},
                                      {"scan", scan_json(out.scan)}}
                           .dump());
    }
    const double s = out.brackets.front().root;
    out.matching_residual = halfbump_residual(s, p);
    if (!(std::fabs(out.matching_residual) <= opt.residual_tol)) {
        throw NotFound("half bump: refined residual above tolerance",
                       nlohmann::json{{"residual", out.matching_residual},
                                      {"scan", scan_json(out.scan)}}
                           .dump());
    }

    const double w2 = omega * omega;
    out.r0 = halfbump_r0(s, 1.0, p);
    out.rho0 = s * phi0;
    out.K = p.eps * out.rho0 - p.chi * phi0;
    out.c1 = phi0 + p.a * out.K / (p.D * p.eps * w2);
    out.L = -(out.K / p.eps) * beta * beta / w2;

    Piece core{PieceKind::Case3, out.c1, 0.0, out.K};
    const PointValue at_r0 = eval_piece(core, p, out.r0);
    const auto Kb = specfun::k0(beta * out.r0);
    out.A1 = 0.0;
    out.A2 = at_r0.phi / Kb.value;
    out.W1 = solve_vacuum_coeffs(at_r0.phi, at_r0.dphi, out.r0, beta).W1;
    out.solution.params = p;
    out.solution.breakpoints = {out.r0};
    out.solution.pieces = {core, Piece::vacuum(0.0, out.A2)};
    out.transition = transition_check(out.solution, out.r0);

    std::vector<std::string> broken;
    if (!(out.K < 0.0)) broken.emplace_back("K < 0");
    if (!(out.c1 > 0.0)) broken.emplace_back("c1 > 0");
    if (!(out.A2 > 0.0)) broken.emplace_back("A2 > 0");
    if (!(out.r0 * omega <= specfun::j0_first_min().location * (1.0 + 1e-14))) {
        broken.emplace_back("r0 in first lobe");
    }
    if (!(std::fabs(at_r0.rho) <= 1e-8 * out.rho0)) broken.emplace_back("rho(r0) = 0");
    if (!out.transition.passed) broken.emplace_back("transition check");
    if (!out.solution.structural_issues().empty()) broken.emplace_back("structure");
    if (!broken.empty()) {
        std::string msg = "half bump: assembled solution violates";
        for (const auto& b : broken) msg += " [" + b + "]";
        throw SpuriousRoot(msg);
    }
    return out;
}

struct InteriorResidual {
    double F1 = 0.0;  // phi_int(r1) + K/chi
    double F2 = 0.0;  // phi_int'(r1) K0(beta r1) - phi_int(r1) d/dr K0(beta r1)
    double K = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Residuals of the interior bump system at unit amplitude phi0 = 1.
inline InteriorResidual interior_residual(const ModelParams& p, double r0, double r1) {
    const double omega = detail::require_supercritical(p, "interior bump");
    const double beta = p.beta();
    const auto I = specfun::i0(beta * r0);
    InteriorResidual res;
    res.K = -p.chi * I.value;
    const double offset = particular_offset(PieceKind::Case3, p, res.K);
    const InteriorCoeffs c =
        interior_cramer(PieceKind::Case3, r0, omega, I.value, beta * I.deriv, offset);
    res.c1 = c.c1;
    res.c2 = c.c2;
    const PointValue v = eval_piece({PieceKind::Case3, c.c1, c.c2, res.K}, p, r1);
    const auto Kb = specfun::k0(beta * r1);
    res.F1 = v.phi + res.K / p.chi;
    res.F2 = v.dphi * Kb.value - v.phi * beta * Kb.deriv;
    return res;
}

/// Quantities behind the oscillator-energy obstruction for a candidate (r0, r1).
///
/// With psi = phi - offset on the Case3 piece, g = psi'^2 + omega^2 psi^2 obeys
/// g' = -2 psi'^2/r <= 0. If psi(r1) = psi(r0) then |phi'(r1)| <= phi'(r0).
/// The inner trace has phi'(r0)/phi(r0) = beta I1/I0 < beta, while a decaying
/// tail needs |phi'(r1)|/phi(r1) = beta K1/K0 > beta.
struct InteriorObstruction {
    double g_r0 = 0.0;
    double g_r1 = 0.0;
    double inlet_log_slope = 0.0;     // phi'(r0)/phi(r0)
    double outlet_log_slope = 0.0;    // |d/dr K0(beta r1)|/K0(beta r1)
    double beta = 0.0;
    bool energy_nonincreasing = false;
    bool slopes_separated = false;    // inlet < beta < outlet
};

inline InteriorObstruction interior_obstruction(const ModelParams& p, double r0, double r1) {
    const double omega = detail::require_supercritical(p, "interior bump");
    const double beta = p.beta();
    const InteriorResidual res = interior_residual(p, r0, r1);
    const double offset = particular_offset(PieceKind::Case3, p, res.K);
    const Piece core{PieceKind::Case3, res.c1, res.c2, res.K};
    auto energy = [&](double r) {
        const PointValue v = eval_piece(core, p, r);
        const double psi = v.phi - offset;
        return v.dphi * v.dphi + omega * omega * psi * psi;
    };
    const auto I = specfun::i0(beta * r0);
    const auto Kb = specfun::k0(beta * r1);
    InteriorObstruction o;
    o.beta = beta;
    o.g_r0 = energy(r0);
    o.g_r1 = energy(r1);
    o.inlet_log_slope = beta * I.deriv / I.value;
    o.outlet_log_slope = -beta * Kb.deriv / Kb.value;
    o.energy_nonincreasing = o.g_r1 <= o.g_r0 * (1.0 + 1e-12);
    o.slopes_separated = o.inlet_log_slope < beta && beta < o.outlet_log_slope;
    return o;
}

struct InteriorBumpSolution {
    double phi0 = 1.0;
    double r0 = 0.0;
    double r1 = 0.0;
    double K = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double A2 = 0.0;
    double dphi_r0 = 0.0;
    double dphi_r1 = 0.0;
    double min_rho_interior = 0.0;
    PiecewiseSolution solution;
    TransitionCheck transition_r0;
    TransitionCheck transition_r1;
    roots::NewtonResult newton;
};

struct InteriorBumpOptions {
    roots::NewtonOptions newton{};
    int positivity_grid = 2048;
};

/// Chebyshev-spaced points strictly inside (lo, hi), plus both endpoints.
inline std::vector<double> chebyshev_grid(double lo, double hi, int n) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n) + 2);
    xs.push_back(lo);
    for (int k = n - 1; k >= 0; --k) {
        const double c = std::cos(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * n));
        xs.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * c);
    }
    xs.push_back(hi);
    return xs;
}

inline nlohmann::json newton_trace_json(const roots::NewtonResult& nr) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : nr.trace) {
        rows.push_back({s.x[0], s.x[1], s.F[0], s.F[1], s.norm_F, s.damping});
    }
    return {{"converged", nr.converged},
            {"iterations", nr.iterations},
            {"columns", {"r0", "r1", "F1", "F2", "norm_F", "damping"}},
            {"rows", rows}};
}

/// Solves the interior bump system from an initial guess (r0, r1) by damped
/// Newton at phi0 = 1.
inline InteriorBumpSolution construct_interior_bump(const ModelParams& p, roots::Vec2 guess,
                                                    const InteriorBumpOptions& opt = {}) {
    detail::require_supercritical(p, "interior bump");
    const double beta = p.beta();
    if (!(beta > 0.0)) {
        throw RegimeError("interior bump: beta = 0 forces phi constant in vacuum, hence trivial");
    }
    if (!(guess[0] > 0.0 && guess[1] > guess[0])) {
        throw DomainError("interior bump: guess must satisfy 0 < r0 < r1");
    }
    auto admissible = [&](const roots::Vec2& x) {
        return x[0] > 0.0 && x[1] > x[0] && beta * x[0] <= specfun::kI0OverflowThreshold &&
               std::isfinite(x[1]);
    };
    auto F = [&](const roots::Vec2& x) -> roots::Vec2 {
        const InteriorResidual r = interior_residual(p, x[0], x[1]);
        return {r.F1, r.F2};
    };
    InteriorBumpSolution out;
    out.newton = roots::damped_newton_2d(F, guess, admissible, opt.newton);
    if (!out.newton.converged) {
        throw NotFound("interior bump: Newton iteration did not converge",
                       newton_trace_json(out.newton).dump());
    }
    out.r0 = out.newton.x[0];
    out.r1 = out.newton.x[1];
    const InteriorResidual res = interior_residual(p, out.r0, out.r1);
    out.K = res.K;
    out.c1 = res.c1;
    out.c2 = res.c2;
    out.A2 = -out.K / (p.chi * specfun::k0(beta * out.r1).value);
    const Piece core{PieceKind::Case3, out.c1, out.c2, out.K};
    out.solution.params = p;
    out.solution.breakpoints = {out.r0, out.r1};
    out.solution.pieces = {Piece::vacuum(1.0, 0.0), core, Piece::vacuum(0.0, out.A2)};
    out.dphi_r0 = eval_piece(core, p, out.r0).dphi;
    out.dphi_r1 = eval_piece(core, p, out.r1).dphi;
    const auto grid = chebyshev_grid(out.r0, out.r1, opt.positivity_grid);
    out.min_rho_interior = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        out.min_rho_interior = std::min(out.min_rho_interior, eval_piece(core, p, grid[i]).rho);
    }
    if (!(out.dphi_r0 > 0.0 && out.dphi_r1 < 0.0)) {
        throw SpuriousRoot("interior bump: converged root violates phi'(r0) > 0 > phi'(r1)");
    }
    if (!(out.min_rho_interior > 0.0)) {
        throw SpuriousRoot("interior bump: converged root has rho <= 0 inside (r0, r1)");
    }
    if (!(out.K < 0.0)) throw SpuriousRoot("interior bump: converged root has K >= 0");
    out.transition_r0 = transition_check(out.solution, out.r0);
    out.transition_r1 = transition_check(out.solution, out.r1);
    if (!out.transition_r0.passed || !out.transition_r1.passed) {
        throw SpuriousRoot("interior bump: converged root fails a transition check");
    }
    return out;
}

struct ResidualFieldCell {
    double r0 = 0.0;
    double r1 = 0.0;
    double F1 = 0.0;
    double F2 = 0.0;
};

/// F(r0, r1) on the tensor grid r0s x r1s, skipping cells with r1 <= r0.
inline std::vector<ResidualFieldCell> interior_residual_field(const ModelParams& p,
                                                              const std::vector<double>& r0s,
                                                              const std::vector<double>& r1s) {
    std::vector<ResidualFieldCell> cells;
    for (double r0 : r0s) {
        for (double r1 : r1s) {
            if (!(r1 > r0)) continue;
            const InteriorResidual r = interior_residual(p, r0, r1);
            cells.push_back({r0, r1, r.F1, r.F2});
        }
    }
    return cells;
}

enum class ProbeScenario {
    HalfBumpCase1,
    HalfBumpCase2,
    TouchingZeroCase1,
    TouchingZeroCase2,
    TouchingZeroCase3,
    SymmetricInterior,
};

inline std::string_view to_string(ProbeScenario s) {
    switch (s) {
        case ProbeScenario::HalfBumpCase1: return "HalfBumpCase1";
        case ProbeScenario::HalfBumpCase2: return "HalfBumpCase2";
        case ProbeScenario::TouchingZeroCase1: return "TouchingZeroCase1";
        case ProbeScenario::TouchingZeroCase2: return "TouchingZeroCase2";
        case ProbeScenario::TouchingZeroCase3: return "TouchingZeroCase3";
        case ProbeScenario::SymmetricInterior: return "SymmetricInterior";
    }
    return "unknown";
}

inline ProbeScenario probe_scenario_from_string(std::string_view s) {
    for (auto sc : {ProbeScenario::HalfBumpCase1, ProbeScenario::HalfBumpCase2,
                    ProbeScenario::TouchingZeroCase1, ProbeScenario::TouchingZeroCase2,
                    ProbeScenario::TouchingZeroCase3, ProbeScenario::SymmetricInterior}) {
        if (to_string(sc) == s) return sc;
    }
    throw UsageError("unknown probe scenario '" + std::string(s) + "'");
}

struct ProbeOptions {
    double rho0 = 1.0;  // half-bump scenarios
    double phi0 = 2.0;  // half-bump scenarios
    double K = -1.0;    // touching-zero scenarios
    double r_max = 50.0;
    int n = 2001;
    int symmetric_points = 100;
};

struct ProbeReport {
    ProbeScenario scenario{};
    RegimeKind regime{};
    double K = 0.0;
    double rho_at_zero = 0.0;
    double min_rho = 0.0;
    double argmin_r = 0.0;
    double min_rho_positive_r = 0.0;  // min over grid points r > 0
    bool nondecreasing = false;
    /// Largest deviation of the evaluated profile from its closed form,
    /// relative to 1 + |rho|.
    double closed_form_deviation = 0.0;
    // SymmetricInterior
    int points_checked = 0;
    double min_dI0 = 0.0;
    double max_dK0 = 0.0;
    bool certified = false;
    std::string mechanism;
};

/// Builds the would-be profile of a nonexistent configuration from its
/// explicit formula and certifies the obstruction on a grid over [0, r_max].
inline ProbeReport probe_nonexistence(ProbeScenario scenario, const ModelParams& p,
                                      const ProbeOptions& opt = {}) {
    const Regime regime = classify(p);
    ProbeReport rep;
    rep.scenario = scenario;
    rep.regime = regime.kind;
    auto need = [&](RegimeKind k) {
        if (regime.kind != k) {
            throw UsageError("probe " + std::string(to_string(scenario)) + " needs " +
                             std::string(to_string(k)) + " parameters, got " +
                             std::string(to_string(regime.kind)));
        }
    };
    const double De = p.D * p.eps;
    const double De2 = p.D * p.eps * p.eps;

    if (scenario == ProbeScenario::SymmetricInterior) {
        const double beta = p.beta();
        rep.points_checked = opt.symmetric_points;
        rep.min_dI0 = std::numeric_limits<double>::infinity();
        rep.max_dK0 = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= opt.symmetric_points; ++i) {
            const double r = opt.r_max * i / opt.symmetric_points;
            if (beta > 0.0) {
                const double x = std::min(beta * r, specfun::kI0OverflowThreshold);
                rep.min_dI0 = std::min(rep.min_dI0, beta * specfun::i0(x).deriv);
                rep.max_dK0 = std::max(rep.max_dK0, beta * specfun::k0(beta * r).deriv);
            } else {
                // phi = c1 ln r + c2: d/dr ln r = 1/r
                rep.min_dI0 = std::min(rep.min_dI0, 1.0 / r);
                rep.max_dK0 = std::max(rep.max_dK0, -1.0 / r);
            }
        }
        rep.certified = rep.min_dI0 > 0.0 && rep.max_dK0 < 0.0;
        rep.mechanism = beta > 0.0
                            ? "phi'(r0) = A1 beta I1(beta r0) = 0 with I1 > 0 forces A1 = 0; "
                              "likewise A2 = 0 at r1, so K = 0 and phi vanishes identically"
                            : "phi = c1 ln r + c2 with phi'(r0) = c1/r0 = 0 forces c1 = 0, so "
                              "phi is constant and finite energy makes it zero";
        return rep;
    }

    Piece piece;
    std::function<double(double)> closed;
    double floor_value = 0.0;  // rho must stay >= this on the grid
    switch (scenario) {
        case ProbeScenario::HalfBumpCase1: {
            need(RegimeKind::Degenerate);
            rep.K = p.eps * opt.rho0 - p.chi * opt.phi0;
            if (!(rep.K <= 0.0)) throw UsageError("probe: half bump needs phi0 >= eps rho0/chi");
            piece = {PieceKind::Case1, 0.0, opt.phi0, rep.K};
            const double K = rep.K, rho0 = opt.rho0;
            closed = [=](double r) { return rho0 - p.chi * p.a * K / (4.0 * De2) * r * r; };
            floor_value = opt.rho0;
            rep.mechanism = "K <= 0 makes rho = rho0 - chi a K r^2/(4 D eps^2) nondecreasing";
            break;
        }
        case ProbeScenario::HalfBumpCase2: {
            need(RegimeKind::Subcritical);
            const double xi2 = -regime.sigma;
            rep.K = p.eps * opt.rho0 - p.chi * opt.phi0;
            if (!(rep.K <= 0.0)) throw UsageError("probe: half bump needs phi0 >= eps rho0/chi");
            piece = {PieceKind::Case2, opt.phi0 - p.a * rep.K / (De * xi2), 0.0, rep.K};
            const double K = rep.K, rho0 = opt.rho0, xi = *regime.freq;
            const double shift = p.chi * p.a * K / (De2 * xi2) + K / p.eps;
            closed = [=](double r) { return (rho0 - shift) * specfun::i0(xi * r).value + shift; };
            floor_value = opt.rho0;
            rep.mechanism = "c1 > 0 and I0 increasing make rho >= rho0";
            break;
        }
        case ProbeScenario::TouchingZeroCase1: {
            need(RegimeKind::Degenerate);
            if (!(opt.K < 0.0)) throw UsageError("probe: touching-zero needs K < 0");
            if (!(p.a > 0.0)) throw UsageError("probe: touching-zero case 1 needs a > 0");
            rep.K = opt.K;
            piece = {PieceKind::Case1, 0.0, -rep.K / p.chi, rep.K};
            const double K = rep.K;
            closed = [=](double r) { return -p.chi * p.a * K / (4.0 * De2) * r * r; };
            rep.mechanism = "rho = -chi a K r^2/(4 D eps^2) vanishes only at r = 0";
            break;
        }
        case ProbeScenario::TouchingZeroCase2: {
            need(RegimeKind::Subcritical);
            if (!(opt.K < 0.0)) throw UsageError("probe: touching-zero needs K < 0");
            rep.K = opt.K;
            const double xi2 = -regime.sigma, xi = *regime.freq;
            const double amp = p.chi * p.a * rep.K / (De2 * xi2) + rep.K / p.eps;
            piece = {PieceKind::Case2, -(p.eps / p.chi) * amp, 0.0, rep.K};
            closed = [=](double r) { return amp * (1.0 - specfun::i0(xi * r).value); };
            rep.mechanism = "rho = (chi a K/(D eps^2 xi^2) + K/eps)(1 - I0(xi r)) vanishes only at r = 0";
            break;
        }
        case ProbeScenario::TouchingZeroCase3: {
            need(RegimeKind::Supercritical);
            if (!(opt.K < 0.0)) throw UsageError("probe: touching-zero needs K < 0");
            if (!(p.beta() > 0.0)) throw UsageError("probe: touching-zero case 3 needs beta > 0");
            rep.K = opt.K;
            const double w2 = regime.sigma, omega = *regime.freq;
            const double amp = -p.chi * p.a * rep.K / (De2 * w2) + rep.K / p.eps;
            piece = {PieceKind::Case3, -(p.eps / p.chi) * amp, 0.0, rep.K};
            closed = [=](double r) { return amp * (1.0 - specfun::j0(omega * r).value); };
            rep.mechanism = "rho = (K/eps)(1 - chi a/(D eps omega^2))(1 - J0(omega r)) vanishes only at r = 0";
            break;
        }
        case ProbeScenario::SymmetricInterior: break;
    }

    const bool half = scenario == ProbeScenario::HalfBumpCase1 ||
                      scenario == ProbeScenario::HalfBumpCase2;
    rep.min_rho = std::numeric_limits<double>::infinity();
    rep.min_rho_positive_r = std::numeric_limits<double>::infinity();
    rep.nondecreasing = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < opt.n; ++i) {
        const double r = opt.r_max * i / (opt.n - 1);
        const double rho = eval_piece(piece, p, r).rho;
        const double ref = closed(r);
        rep.closed_form_deviation =
            std::max(rep.closed_form_deviation, std::fabs(rho - ref) / (1.0 + std::fabs(ref)));
        if (i == 0) rep.rho_at_zero = rho;
        if (rho < rep.min_rho) {
            rep.min_rho = rho;
            rep.argmin_r = r;
        }
        if (i > 0) rep.min_rho_positive_r = std::min(rep.min_rho_positive_r, rho);
        if (rho < prev - 1e-14 * (1.0 + std::fabs(prev))) rep.nondecreasing = false;
        prev = rho;
    }
    const bool closed_ok = rep.closed_form_deviation <= 1e-9;
    if (half) {
        rep.certified = closed_ok && rep.argmin_r == 0.0 && rep.nondecreasing &&
                        rep.min_rho >= floor_value * (1.0 - 1e-12);
    } else {
        rep.certified = closed_ok && std::fabs(rep.rho_at_zero) <= 1e-14 &&
                        rep.min_rho_positive_r > 0.0;
    }
    return rep;
}

inline nlohmann::json to_json(const ProbeReport& r) {
    nlohmann::json j;
    j["scenario"] = std::string(to_string(r.scenario));
    j["regime"] = std::string(to_string(r.regime));
    j["certified"] = r.certified;
    j["mechanism"] = r.mechanism;
    if (r.scenario == ProbeScenario::SymmetricInterior) {
        j["points_checked"] = r.points_checked;
        j["min_dI0"] = r.min_dI0;
        j["max_dK0"] = r.max_dK0;
    } else {
        j["K"] = r.K;
        j["rho_at_zero"] = r.rho_at_zero;
        j["min_rho"] = r.min_rho;
        j["argmin_r"] = r.argmin_r;
        j["min_rho_positive_r"] = r.min_rho_positive_r;
        j["nondecreasing"] = r.nondecreasing;
        j["closed_form_deviation"] = r.closed_form_deviation;
    }
    return j;
}

}  // namespace vasculo
