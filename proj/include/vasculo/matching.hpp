#pragma once

// Transition-point algebra between vacuum and positivity regions: the
// Wronskian determinants of the fundamental pairs and the Cramer solves that
// recover coefficients from a (phi, phi') trace. Every derivative is taken
// with respect to r, so chain factors beta, xi, omega are included.

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "vasculo/errors.hpp"
#include "vasculo/solutions.hpp"
#include "vasculo/specfun.hpp"

namespace vasculo {

/// I0(beta r) d/dr K0(beta r) - d/dr I0(beta r) K0(beta r). Equals -1/r.
inline double wronskian_W(double r, double beta) {
    if (!(r > 0.0) || !(beta > 0.0)) throw DomainError("wronskian_W: need r > 0 and beta > 0");
    const auto I = specfun::i0(beta * r);
    const auto K = specfun::k0(beta * r);
    return beta * (I.value * K.deriv - I.deriv * K.value);
}

struct VacuumCoeffs {
    double A1 = 0.0;
    double A2 = 0.0;
    double W = 0.0;
    double W1 = 0.0;
    double W2 = 0.0;
};

/// Solves A1 I0(beta r) + A2 K0(beta r) = phi and its r-derivative = dphi.
inline VacuumCoeffs solve_vacuum_coeffs(double phi, double dphi, double r, double beta) {
    if (!(r > 0.0) || !(beta > 0.0)) {
        throw DomainError("solve_vacuum_coeffs: need r > 0 and beta > 0");
    }
    const auto I = specfun::i0(beta * r);
    const auto K = specfun::k0(beta * r);
    const double dI = beta * I.deriv;
    const double dK = beta * K.deriv;
    VacuumCoeffs c;
    c.W = I.value * dK - dI * K.value;
    c.W1 = phi * dK - dphi * K.value;
    c.W2 = I.value * dphi - dI * phi;
    c.A1 = c.W1 / c.W;
    c.A2 = c.W2 / c.W;
    return c;
}

/// Offset-free pair coefficients of a non-vacuum piece.
struct InteriorCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
    double wronskian = 0.0;
};

/// Cramer solve for c1 B1(freq r) + c2 B2(freq r) + offset = phi with matching
/// r-derivative, where (B1, B2) is (I0, K0) for Case2 and (J0, Y0) for Case3.
/// The Case3 Wronskian is 2/(pi r) and the Case2 one is -1/r.
inline InteriorCoeffs interior_cramer(PieceKind kind, double r, double freq, double phi,
                                      double dphi, double offset) {
    if (!(r > 0.0) || !(freq > 0.0)) throw DomainError("interior_cramer: need r > 0 and freq > 0");
    specfun::BesselEval b1, b2;
    if (kind == PieceKind::Case2) {
        b1 = specfun::i0(freq * r);
        b2 = specfun::k0(freq * r);
    } else if (kind == PieceKind::Case3) {
        b1 = specfun::j0(freq * r);
        b2 = specfun::y0(freq * r);
    } else {
        throw UsageError("interior_cramer: kind must be case2 or case3");
    }
    const double d1 = freq * b1.deriv;
    const double d2 = freq * b2.deriv;
    const double target = phi - offset;
    InteriorCoeffs c;
    c.wronskian = b1.value * d2 - d1 * b2.value;
    c.c1 = (target * d2 - dphi * b2.value) / c.wronskian;
    c.c2 = (b1.value * dphi - d1 * target) / c.wronskian;
    return c;
}

struct TransitionCheck {
    double r_bar = 0.0;
    double phi_jump = 0.0;
    double dphi_jump = 0.0;
    double d2phi_jump = 0.0;
    double value_condition = 0.0;  // phi(r_bar) + K/chi
    double tol_phi = 0.0;
    double tol_dphi = 0.0;
    double tol_C2 = 0.0;
    double tol_val = 0.0;
    bool passed = false;
    /// C1 plus the value condition forces C2; false only if that fails.
    bool implication_holds = true;
};

/// Jump report at a vacuum/non-vacuum breakpoint r_bar (right minus left).
inline TransitionCheck transition_check(const PiecewiseSolution& sol, double r_bar) {
    std::size_t idx = sol.breakpoints.size();
    for (std::size_t i = 0; i < sol.breakpoints.size(); ++i) {
        if (sol.breakpoints[i] == r_bar) idx = i;
    }
    if (idx == sol.breakpoints.size()) {
        throw UsageError("transition_check: " + std::to_string(r_bar) + " is not a breakpoint");
    }
    const Piece& left = sol.pieces.at(idx);
    const Piece& right = sol.pieces.at(idx + 1);
    if (left.is_vacuum() == right.is_vacuum()) {
        throw UsageError("transition_check: breakpoint does not separate vacuum and positivity");
    }
    const PointValue lv = eval_piece(left, sol.params, r_bar);
    const PointValue rv = eval_piece(right, sol.params, r_bar);
    const Piece& dense = left.is_vacuum() ? right : left;
    const PointValue& vac = left.is_vacuum() ? lv : rv;

    TransitionCheck t;
    t.r_bar = r_bar;
    t.phi_jump = rv.phi - lv.phi;
    t.dphi_jump = rv.dphi - lv.dphi;
    t.d2phi_jump = rv.d2phi - lv.d2phi;
    t.value_condition = vac.phi + dense.K / sol.params.chi;
    const double scale2 = std::max(std::fabs(lv.d2phi), std::fabs(rv.d2phi));
    t.tol_phi = 1e-8 * (1.0 + std::max(std::fabs(lv.phi), std::fabs(rv.phi)));
    t.tol_dphi = 1e-8 * (1.0 + std::max(std::fabs(lv.dphi), std::fabs(rv.dphi)));
    t.tol_C2 = 1e-8 * (1.0 + scale2);
    t.tol_val = 1e-9 * (1.0 + std::fabs(dense.K) / sol.params.chi);
    const bool c1 = std::fabs(t.phi_jump) <= t.tol_phi && std::fabs(t.dphi_jump) <= t.tol_dphi;
    const bool value_ok = std::fabs(t.value_condition) <= t.tol_val;
    const bool c2 = std::fabs(t.d2phi_jump) <= t.tol_C2;
    t.implication_holds = !(c1 && value_ok) || c2;
    t.passed = c1 && value_ok && c2;
    return t;
}

inline nlohmann::json to_json(const TransitionCheck& t) {
    return {{"r_bar", t.r_bar},
            {"phi_jump", t.phi_jump},
            {"dphi_jump", t.dphi_jump},
            {"d2phi_jump", t.d2phi_jump},
            {"value_condition", t.value_condition},
            {"tol_C2", t.tol_C2},
            {"tol_val", t.tol_val},
            {"implication_holds", t.implication_holds},
            {"passed", t.passed}};
}

}  // namespace vasculo
