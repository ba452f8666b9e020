#pragma once

// Piecewise analytic representation of radial stationary states (rho, phi).
//
// On a vacuum piece rho = 0 and phi solves phi'' + phi'/r - beta^2 phi = 0.
// On a non-vacuum piece eps rho = chi phi + K and
//   phi'' + phi'/r + sigma phi + a K/(D eps) = 0,   sigma = a chi/(D eps) - beta^2,
// whose general solution is selected by the sign of sigma (Case1/2/3).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vasculo/errors.hpp"
#include "vasculo/model.hpp"
#include "vasculo/specfun.hpp"

namespace vasculo {

enum class PieceKind { Vacuum, Case1, Case2, Case3 };

inline std::string_view to_string(PieceKind k) {
    switch (k) {
        case PieceKind::Vacuum: return "vacuum";
        case PieceKind::Case1: return "case1";
        case PieceKind::Case2: return "case2";
        case PieceKind::Case3: return "case3";
    }
    return "unknown";
}

inline PieceKind piece_kind_from_string(std::string_view s) {
    if (s == "vacuum") return PieceKind::Vacuum;
    if (s == "case1") return PieceKind::Case1;
    if (s == "case2") return PieceKind::Case2;
    if (s == "case3") return PieceKind::Case3;
    throw UsageError("unknown piece kind '" + std::string(s) + "'");
}

/// One analytic segment.
///
/// Coefficient roles per kind:
///   Vacuum: phi = c1 I0(beta r) + c2 K0(beta r)           (c1 = A1, c2 = A2)
///           phi = c1 + c2 ln r                             when beta = 0
///   Case1:  phi = c1 ln r + c2 - a K r^2/(4 D eps)
///   Case2:  phi = c1 I0(xi r) + c2 K0(xi r) + a K/(D eps xi^2)
///   Case3:  phi = c1 J0(omega r) + c2 Y0(omega r) - a K/(D eps omega^2)
/// The coefficient of the basis function that is unbounded at r = 0 is c1
/// for Case1 and c2 otherwise.
struct Piece {
    PieceKind kind = PieceKind::Vacuum;
    double c1 = 0.0;
    double c2 = 0.0;
    double K = 0.0;

    double A1() const { return c1; }
    double A2() const { return c2; }
    bool is_vacuum() const { return kind == PieceKind::Vacuum; }
    double singular_coefficient() const { return kind == PieceKind::Case1 ? c1 : c2; }

    static Piece vacuum(double A1, double A2) { return {PieceKind::Vacuum, A1, A2, 0.0}; }

    friend bool operator==(const Piece&, const Piece&) = default;
};

struct PointValue {
    double rho = 0.0;
    double phi = 0.0;
    double dphi = 0.0;
    double d2phi = 0.0;
    double drho = 0.0;
};

/// The radial scale of a piece: beta, xi or omega. Zero for Case1.
inline double piece_frequency(PieceKind kind, const ModelParams& p) {
    switch (kind) {
        case PieceKind::Vacuum: return p.beta();
        case PieceKind::Case1: return 0.0;
        case PieceKind::Case2: {
            const Regime r = classify(p);
            if (r.kind != RegimeKind::Subcritical) {
                throw UsageError("case2 piece requires subcritical parameters");
            }
            return *r.freq;
        }
        case PieceKind::Case3: {
            const Regime r = classify(p);
            if (r.kind != RegimeKind::Supercritical) {
                throw UsageError("case3 piece requires supercritical parameters");
            }
            return *r.freq;
        }
    }
    return 0.0;
}

/// Constant particular solution of the non-vacuum phi equation.
inline double particular_offset(PieceKind kind, const ModelParams& p, double K) {
    const double scale = p.a * K / (p.D * p.eps);
    switch (kind) {
        case PieceKind::Case2: {
            const double xi = piece_frequency(kind, p);
            return scale / (xi * xi);
        }
        case PieceKind::Case3: {
            const double omega = piece_frequency(kind, p);
            return -scale / (omega * omega);
        }
        default: return 0.0;
    }
}

/// rho = (chi phi + K)/eps on a non-vacuum piece.
inline double rho_from_phi(double phi, double K, const ModelParams& p) {
    return (p.chi * phi + K) / p.eps;
}

namespace detail {

// Value/derivative pair of a two-term combination c1 f1(s r) + c2 f2(s r),
// skipping zero coefficients so that a bounded piece can be evaluated at 0.
template <typename F1, typename F2>
void combine(double c1, double c2, double s, double r, F1&& f1, F2&& f2, double& v, double& d) {
    v = 0.0;
    d = 0.0;
    const double x = s * r;
    if (c1 != 0.0) {
        const specfun::BesselEval e = f1(x);
        v += c1 * e.value;
        d += c1 * s * e.deriv;
    }
    if (c2 != 0.0) {
        const specfun::BesselEval e = f2(x);
        v += c2 * e.value;
        d += c2 * s * e.deriv;
    }
}

}  // namespace detail

/// Evaluates one piece at r >= 0 regardless of the piece's span.
inline PointValue eval_piece(const Piece& piece, const ModelParams& p, double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("eval: radius must be finite and >= 0");
    PointValue out;
    const double s = piece_frequency(piece.kind, p);
    double curv = 0.0;  // coefficient "k" in phi'' + phi'/r = curv*phi + forcing
    double forcing = 0.0;
    switch (piece.kind) {
        case PieceKind::Vacuum: {
            if (s > 0.0) {
                detail::combine(piece.c1, piece.c2, s, r, specfun::i0, specfun::k0, out.phi,
                                out.dphi);
            } else {
                if (piece.c2 != 0.0 && r == 0.0) throw DomainError("eval: ln r singular at r = 0");
                out.phi = piece.c1 + (piece.c2 != 0.0 ? piece.c2 * std::log(r) : 0.0);
                out.dphi = piece.c2 != 0.0 ? piece.c2 / r : 0.0;
            }
            curv = s * s;
            break;
        }
        case PieceKind::Case1: {
            const double q = p.a * piece.K / (4.0 * p.D * p.eps);
            if (piece.c1 != 0.0 && r == 0.0) throw DomainError("eval: ln r singular at r = 0");
            out.phi = piece.c2 - q * r * r + (piece.c1 != 0.0 ? piece.c1 * std::log(r) : 0.0);
            out.dphi = -2.0 * q * r + (piece.c1 != 0.0 ? piece.c1 / r : 0.0);
            forcing = -p.a * piece.K / (p.D * p.eps);
            break;
        }
        case PieceKind::Case2: {
            detail::combine(piece.c1, piece.c2, s, r, specfun::i0, specfun::k0, out.phi, out.dphi);
            out.phi += particular_offset(piece.kind, p, piece.K);
            curv = s * s;
            forcing = -p.a * piece.K / (p.D * p.eps);
            break;
        }
        case PieceKind::Case3: {
            detail::combine(piece.c1, piece.c2, s, r, specfun::j0, specfun::y0, out.phi, out.dphi);
            out.phi += particular_offset(piece.kind, p, piece.K);
            curv = -s * s;
            forcing = -p.a * piece.K / (p.D * p.eps);
            break;
        }
    }
    const double lap = curv * out.phi + forcing;  // phi'' + phi'/r
    out.d2phi = r > 0.0 ? lap - out.dphi / r : 0.5 * lap;
    if (!piece.is_vacuum()) {
        out.rho = rho_from_phi(out.phi, piece.K, p);
        out.drho = p.chi * out.dphi / p.eps;
    }
    return out;
}

/// Breakpoints r_1 < ... < r_k and k+1 pieces covering [0, inf).
struct PiecewiseSolution {
    ModelParams params;
    std::vector<double> breakpoints;
    std::vector<Piece> pieces;

    /// Index of the piece used at r; at a breakpoint the right-hand piece.
    std::size_t piece_index(double r) const {
        return static_cast<std::size_t>(
            std::upper_bound(breakpoints.begin(), breakpoints.end(), r) - breakpoints.begin());
    }

    /// Left and right end of piece i (right end is +inf for the last piece).
    double piece_begin(std::size_t i) const { return i == 0 ? 0.0 : breakpoints[i - 1]; }
    double piece_end(std::size_t i) const {
        return i < breakpoints.size() ? breakpoints[i] : std::numeric_limits<double>::infinity();
    }

    /// Violations of the structural invariants, empty when well formed.
    std::vector<std::string> structural_issues() const {
        std::vector<std::string> issues;
        if (pieces.size() != breakpoints.size() + 1) {
            issues.emplace_back("pieces.size() must equal breakpoints.size() + 1");
            return issues;
        }
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            if (!(breakpoints[i] > 0.0) || !std::isfinite(breakpoints[i])) {
                issues.emplace_back("breakpoints must be positive and finite");
            }
            if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
                issues.emplace_back("breakpoints must be strictly increasing");
            }
            if (pieces[i].is_vacuum() == pieces[i + 1].is_vacuum()) {
                issues.emplace_back("adjacent pieces must alternate vacuum/non-vacuum");
            }
        }
        if (pieces.front().singular_coefficient() != 0.0) {
            issues.emplace_back("piece containing r = 0 must have zero singular coefficient");
        }
        const Piece& last = pieces.back();
        if (!last.is_vacuum() || last.c1 != 0.0) {
            issues.emplace_back("final piece must be vacuum with A1 = 0");
        }
        return issues;
    }
};

inline PointValue eval(const PiecewiseSolution& sol, double r) {
    if (!(r >= 0.0)) throw DomainError("eval: radius must be >= 0");
    return eval_piece(sol.pieces.at(sol.piece_index(r)), sol.params, r);
}

inline nlohmann::json to_json(const Piece& piece) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(piece.kind));
    if (piece.is_vacuum()) {
        j["A1"] = piece.c1;
        j["A2"] = piece.c2;
    } else {
        j["c1"] = piece.c1;
        j["c2"] = piece.c2;
        j["K"] = piece.K;
    }
    return j;
}

inline Piece piece_from_json(const nlohmann::json& j) {
    Piece piece;
    piece.kind = piece_kind_from_string(j.at("kind").get<std::string>());
    if (piece.is_vacuum()) {
        piece.c1 = j.at("A1").get<double>();
        piece.c2 = j.at("A2").get<double>();
    } else {
        piece.c1 = j.at("c1").get<double>();
        piece.c2 = j.at("c2").get<double>();
        piece.K = j.at("K").get<double>();
    }
    return piece;
}

inline nlohmann::json to_json(const PiecewiseSolution& sol) {
    nlohmann::json j;
    j["params"] = to_json(sol.params);
    j["breakpoints"] = sol.breakpoints;
    j["pieces"] = nlohmann::json::array();
    for (const auto& piece : sol.pieces) j["pieces"].push_back(to_json(piece));
    return j;
}

inline PiecewiseSolution solution_from_json(const nlohmann::json& j) {
    PiecewiseSolution sol;
    sol.params = params_from_json(j.at("params"));
    sol.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    for (const auto& pj : j.at("pieces")) sol.pieces.push_back(piece_from_json(pj));
    if (sol.pieces.size() != sol.breakpoints.size() + 1) {
        throw UsageError("solution JSON: pieces must number breakpoints + 1");
    }
    return sol;
}

}  // namespace vasculo
