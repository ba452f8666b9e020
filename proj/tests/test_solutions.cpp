#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "vasculo/errors.hpp"
#include "vasculo/solutions.hpp"

using namespace vasculo;

namespace {

ModelParams params(double a, double b, double chi = 1.0, double eps = 1.0, double D = 1.0) {
    ModelParams p;
    p.D = D;
    p.chi = chi;
    p.a = a;
    p.b = b;
    p.eps = eps;
    return p;
}

// A parameter set matching each non-vacuum kind.
ModelParams params_for(PieceKind k) {
    switch (k) {
        case PieceKind::Case1: return params(1.0, 1.0);
        case PieceKind::Case2: return params(0.5, 1.0);
        default: return params(2.0, 1.0, 1.3, 0.7, 1.1);
    }
}

}  // namespace

TEST(Eval, ZeroVacuumIsZero) {
    PiecewiseSolution sol{params(2, 1), {}, {Piece::vacuum(0, 0)}};
    for (double r : {0.0, 0.5, 3.0}) {
        const PointValue v = eval(sol, r);
        EXPECT_EQ(v.rho, 0.0);
        EXPECT_EQ(v.phi, 0.0);
        EXPECT_EQ(v.dphi, 0.0);
        EXPECT_EQ(v.d2phi, 0.0);
    }
}

TEST(Eval, Case3AtOrigin) {
    const ModelParams p = params(2, 1);
    const double phi0 = 1.7;
    const PointValue v = eval_piece({PieceKind::Case3, phi0, 0.0, 0.0}, p, 0.0);
    EXPECT_EQ(v.phi, phi0);
    EXPECT_EQ(v.rho, p.chi / p.eps * phi0);
    EXPECT_EQ(v.dphi, 0.0);
}

TEST(Eval, Case2ReconstructsCentralDensity) {
    const ModelParams p = params(0.5, 1.0);
    const double xi2 = -classify(p).sigma;
    const double rho0 = 0.8, K = -0.3;
    const double c1 = p.eps / p.chi *
                      (rho0 - p.chi * p.a * K / (p.D * p.eps * p.eps * xi2) - K / p.eps);
    const PointValue v = eval_piece({PieceKind::Case2, c1, 0.0, K}, p, 0.0);
    EXPECT_NEAR(v.rho, rho0, 1e-15);
}

TEST(RhoFromPhi, Examples) {
    const ModelParams p = params(2, 1);
    EXPECT_EQ(rho_from_phi(0.5 / p.chi, -0.5, p), 0.0);
    EXPECT_EQ(rho_from_phi(0.0, 0.0, p), 0.0);
    EXPECT_EQ(rho_from_phi(1.0, -0.5, p), 0.5);
}

TEST(Eval, LinearRelationHoldsPointwise) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (PieceKind k : {PieceKind::Case1, PieceKind::Case2, PieceKind::Case3}) {
        const ModelParams p = params_for(k);
        for (int t = 0; t < 50; ++t) {
            const Piece piece{k, u(rng), u(rng), u(rng)};
            for (double r = 0.05; r < 12.0; r += 0.37) {
                const PointValue v = eval_piece(piece, p, r);
                EXPECT_LE(std::fabs(p.eps * v.rho - p.chi * v.phi - piece.K),
                          1e-12 * (1 + std::fabs(p.chi * v.phi)));
            }
        }
    }
}

TEST(Eval, SecondDerivativeMatchesFiniteDifference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-5;
    for (PieceKind k : {PieceKind::Vacuum, PieceKind::Case1, PieceKind::Case2, PieceKind::Case3}) {
        const ModelParams p = params_for(k);
        for (int t = 0; t < 20; ++t) {
            const Piece piece{k, u(rng), u(rng), k == PieceKind::Vacuum ? 0.0 : u(rng)};
            for (double r = 0.2; r < 10.0; r += 0.41) {
                const double fd = (eval_piece(piece, p, r + h).dphi - eval_piece(piece, p, r - h).dphi) /
                                  (2 * h);
                const double d2 = eval_piece(piece, p, r).d2phi;
                EXPECT_LE(std::fabs(fd - d2), 1e-6 * (1 + std::fabs(d2))) << to_string(k) << " r=" << r;
            }
        }
    }
}

TEST(Eval, OriginUsesLimitOfLaplacian) {
    // phi'' + phi'/r -> 2 phi''(0); for J0 at the origin phi''(0) = -omega^2/2.
    const ModelParams p = params(2, 1);
    const PointValue v = eval_piece({PieceKind::Case3, 1.0, 0.0, 0.0}, p, 0.0);
    EXPECT_DOUBLE_EQ(v.d2phi, -0.5);
}

TEST(Eval, ScalesLinearlyWithCoefficients) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (PieceKind k : {PieceKind::Vacuum, PieceKind::Case1, PieceKind::Case2, PieceKind::Case3}) {
        const ModelParams p = params_for(k);
        const Piece piece{k, u(rng), u(rng), k == PieceKind::Vacuum ? 0.0 : u(rng)};
        for (double lambda : {0.5, 2.0, 10.0}) {
            const Piece scaled{k, lambda * piece.c1, lambda * piece.c2, lambda * piece.K};
            for (double r = 0.3; r < 8.0; r += 0.7) {
                const PointValue a = eval_piece(piece, p, r), b = eval_piece(scaled, p, r);
                EXPECT_NEAR(b.phi, lambda * a.phi, 1e-13 * lambda * (1 + std::fabs(a.phi)));
                EXPECT_NEAR(b.rho, lambda * a.rho, 1e-13 * lambda * (1 + std::fabs(a.rho)));
                EXPECT_NEAR(b.dphi, lambda * a.dphi, 1e-13 * lambda * (1 + std::fabs(a.dphi)));
                EXPECT_NEAR(b.d2phi, lambda * a.d2phi, 1e-13 * lambda * (1 + std::fabs(a.d2phi)));
            }
        }
    }
}

TEST(Eval, BreakpointUsesRightPiece) {
    const ModelParams p = params(2, 1);
    PiecewiseSolution sol{p, {2.0}, {{PieceKind::Case3, 1.0, 0.0, -0.2}, Piece::vacuum(0.0, 3.0)}};
    EXPECT_EQ(sol.piece_index(2.0), 1u);
    EXPECT_EQ(eval(sol, 2.0).rho, 0.0);
    EXPECT_EQ(eval(sol, 2.0).phi, eval_piece(sol.pieces[1], p, 2.0).phi);
    EXPECT_EQ(sol.piece_index(1.999), 0u);
}

TEST(Eval, Errors) {
    const ModelParams p = params(2, 1);
    PiecewiseSolution sol{p, {}, {Piece::vacuum(1.0, 0.0)}};
    EXPECT_THROW(eval(sol, -1e-3), DomainError);
    EXPECT_THROW(eval_piece({PieceKind::Case2, 1, 0, 0}, p, 1.0), UsageError);
    EXPECT_THROW(eval_piece({PieceKind::Case1, 1, 0, 0}, params(1, 1), 0.0), DomainError);
    EXPECT_THROW(eval_piece(Piece::vacuum(0, 1), p, 0.0), DomainError);
}

TEST(Eval, ZeroBetaVacuumIsLogarithmic) {
    const ModelParams p = params(2, 0);
    const PointValue v = eval_piece(Piece::vacuum(1.0, 2.0), p, std::exp(1.0));
    EXPECT_NEAR(v.phi, 3.0, 1e-15);
    EXPECT_NEAR(v.dphi, 2.0 / std::exp(1.0), 1e-15);
}

TEST(Structure, DetectsViolations) {
    const ModelParams p = params(2, 1);
    PiecewiseSolution good{p, {2.0}, {{PieceKind::Case3, 1.0, 0.0, -0.2}, Piece::vacuum(0.0, 3.0)}};
    EXPECT_TRUE(good.structural_issues().empty());
    PiecewiseSolution growing = good;
    growing.pieces[1].c1 = 1.0;
    EXPECT_FALSE(growing.structural_issues().empty());
    PiecewiseSolution singular = good;
    singular.pieces[0].c2 = 1.0;
    EXPECT_FALSE(singular.structural_issues().empty());
    PiecewiseSolution same_kind{p, {2.0}, {Piece::vacuum(1.0, 0.0), Piece::vacuum(0.0, 3.0)}};
    EXPECT_FALSE(same_kind.structural_issues().empty());
    PiecewiseSolution unsorted{p, {2.0, 1.0}, {Piece::vacuum(1, 0), {PieceKind::Case3, 1, 1, -1},
                                               Piece::vacuum(0, 1)}};
    EXPECT_FALSE(unsorted.structural_issues().empty());
}

TEST(Json, RoundTripIsBitExact) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    ModelParams p = params(2.0 + 1e-7, 1.0 / 3.0, 0.1 + 0.2, std::sqrt(2.0));
    p.alpha = 0.25;
    for (int t = 0; t < 100; ++t) {
        PiecewiseSolution sol{p, {std::fabs(u(rng)) + 1e-3}, {{PieceKind::Case3, u(rng), 0.0, u(rng)},
                                                              Piece::vacuum(0.0, u(rng))}};
        const std::string text = to_json(sol).dump();
        const PiecewiseSolution back = solution_from_json(nlohmann::json::parse(text));
        EXPECT_EQ(back.params, sol.params);
        EXPECT_EQ(back.breakpoints, sol.breakpoints);
        EXPECT_EQ(back.pieces, sol.pieces);
    }
    EXPECT_THROW(piece_kind_from_string("case4"), UsageError);
}
