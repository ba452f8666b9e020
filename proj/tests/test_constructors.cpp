#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "vasculo/analysis.hpp"
#include "vasculo/constructors.hpp"
#include "vasculo/errors.hpp"

using namespace vasculo;
namespace sf = vasculo::specfun;
using boost::math::cyl_bessel_i;
using boost::math::cyl_bessel_j;
using boost::math::cyl_bessel_k;

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

const std::vector<ModelParams>& supercritical_sets() {
    static const std::vector<ModelParams> sets = {
        params(2, 1), params(1.5, 0.5), params(3, 1), params(5, 0.2), params(1.2, 1.0),
        params(2.5, 2.0, 1.7, 0.6, 1.3), params(40, 3), params(1.01, 1.0)};
    return sets;
}

// Half-bump matching residual re-evaluated with Boost's Bessel functions.
double boost_halfbump_residual(const ModelParams& p, double phi0, double rho0, double r0) {
    const double w = *classify(p).freq, beta = p.beta();
    const double K = p.eps * rho0 - p.chi * phi0;
    const double off = -p.a * K / (p.D * p.eps * w * w);
    const double c1 = phi0 - off;
    const double phi = c1 * double(cyl_bessel_j(0, (long double)(w * r0))) + off;
    const double dphi = -c1 * w * double(cyl_bessel_j(1, (long double)(w * r0)));
    const double k0 = double(cyl_bessel_k(0, (long double)(beta * r0)));
    const double dk0 = -beta * double(cyl_bessel_k(1, (long double)(beta * r0)));
    return phi * dk0 - dphi * k0;
}

}  // namespace

TEST(AdmissibleInterval, RegimeErrors) {
    EXPECT_THROW(halfbump_admissible_interval(params(1, 1), 1.0), RegimeError);
    EXPECT_THROW(halfbump_admissible_interval(params(0.5, 1), 1.0), RegimeError);
    EXPECT_THROW(halfbump_admissible_interval(params(2, 1), 0.0), DomainError);
}

TEST(AdmissibleInterval, ZeroBeta) {
    const Interval iv = halfbump_admissible_interval(params(2, 0), 1.5);
    EXPECT_EQ(iv.lo, 0.0);
    EXPECT_TRUE(iv.lo_open);
    EXPECT_EQ(iv.hi, 1.5);
    EXPECT_FALSE(iv.hi_open);
    EXPECT_FALSE(iv.contains(0.0));
    EXPECT_TRUE(iv.contains(1.5));
}

TEST(AdmissibleInterval, MatchesTheThreeInequalities) {
    const double m = 0.402759395702553;  // first minimum depth of J0
    std::mt19937_64 rng(41);
    for (const ModelParams& p : supercritical_sets()) {
        const double phi0 = 1.3;
        const Interval iv = halfbump_admissible_interval(p, phi0);
        ASSERT_FALSE(iv.empty());
        const double w2 = classify(p).sigma, q = p.beta() * p.beta() / w2;
        auto admissible = [&](double rho0) {
            const double K = p.eps * rho0 - p.chi * phi0;
            const double c1 = phi0 + p.a * K / (p.D * p.eps * w2);
            return rho0 > 0 && K <= 0 && c1 > 0 && p.chi / p.eps * q * phi0 <= (m / (1 + m) + q) * rho0;
        };
        std::uniform_real_distribution<double> u(0.0, 1.2 * p.chi / p.eps * phi0);
        for (int i = 0; i < 2000; ++i) {
            const double rho0 = u(rng);
            if (std::fabs(rho0 - iv.lo) < 1e-9 || std::fabs(rho0 - iv.hi) < 1e-9) continue;
            EXPECT_EQ(iv.contains(rho0), admissible(rho0)) << rho0;
        }
    }
}

TEST(HalfBumpR0, BoundaryTargets) {
    const ModelParams p = params(2, 1);
    const double w = 1.0;
    const Interval iv = halfbump_admissible_interval(p, 1.0);
    // Lower end of the interval puts the zero at the minimum of J0.
    EXPECT_NEAR(halfbump_r0(iv.lo, 1.0, p), sf::j0_first_min().location / w, 1e-6);
    // K -> 0- sends the target to 0-, i.e. to the first zero.
    EXPECT_NEAR(halfbump_r0(iv.hi * (1 - 1e-13), 1.0, p), sf::j0_first_zero() / w, 1e-9);
    EXPECT_THROW(halfbump_r0(iv.lo * (1 - 1e-6), 1.0, p), NoZeroError);
}

TEST(HalfBumpR0, MidpointSolvesZeroEquation) {
    for (const ModelParams& p : supercritical_sets()) {
        const Interval iv = halfbump_admissible_interval(p, 1.0);
        const double rho0 = 0.5 * (iv.lo + iv.hi);
        const double w = *classify(p).freq;
        const double K = p.eps * rho0 - p.chi;
        const double L = -(K / p.eps) * p.beta() * p.beta() / (w * w);
        const double target = -L / (rho0 - L);
        const double r0 = halfbump_r0(rho0, 1.0, p);
        EXPECT_LE(std::fabs(sf::j0(w * r0).value - target), 1e-12);
        EXPECT_NEAR(double(cyl_bessel_j(0, (long double)(w * r0))), target, 1e-12);
        EXPECT_LE(w * r0, sf::j0_first_min().location);
    }
}

TEST(HalfBump, RegimeErrors) {
    EXPECT_THROW(construct_half_bump(params(1, 1), 1.0), RegimeError);
    EXPECT_THROW(construct_half_bump(params(0.5, 1), 1.0), RegimeError);
    EXPECT_THROW(construct_half_bump(params(2, 0), 1.0), RegimeError);
}

TEST(HalfBump, InvariantsAcrossParameterSets) {
    for (const ModelParams& p : supercritical_sets()) {
        const double phi0 = 1.0;
        const HalfBumpSolution hb = construct_half_bump(p, phi0);
        const double w = *classify(p).freq;
        EXPECT_LT(hb.K, 0.0);
        EXPECT_DOUBLE_EQ(hb.K, p.eps * hb.rho0 - p.chi * phi0);
        EXPECT_GT(hb.c1, 0.0);
        EXPECT_EQ(hb.solution.pieces.back().c1, 0.0);
        EXPECT_GT(hb.A2, 0.0);
        EXPECT_LE(w * hb.r0, sf::j0_first_min().location * (1 + 1e-14));
        EXPECT_LE(std::fabs(eval_piece(hb.solution.pieces[0], p, hb.r0).rho), 1e-8 * hb.rho0);
        EXPECT_LE(std::fabs(eval(hb.solution, hb.r0).phi + hb.K / p.chi), 1e-9);
        EXPECT_TRUE(hb.transition.passed);
        EXPECT_LE(std::fabs(hb.W1), 1e-11);
        EXPECT_GE(hb.brackets.size(), 1u);
        // Independent residual at the accepted root.
        EXPECT_LE(std::fabs(boost_halfbump_residual(p, phi0, hb.rho0, hb.r0)), 1e-11);
        // Residual sup-norm on [0, 3 r0].
        const auto grid = verification_grid(hb.solution, 3 * hb.r0, 2000);
        const auto res = ode_residuals(hb.solution, grid);
        EXPECT_LE(res.phi_eq.sup, 1e-8 * (p.D + p.a + p.b) * (1 + res.max_abs_phi));
        EXPECT_LT(stationary_energy(hb.solution).direct, 0.0);
    }
}

TEST(HalfBump, ResidualChangesSignAcrossTheInterval) {
    // Endpoint signs: R > 0 where K = 0, R < 0 where the zero sits at the J0 minimum.
    for (const ModelParams& p : supercritical_sets()) {
        const Interval iv = halfbump_admissible_interval(p, 1.0);
        EXPECT_GT(halfbump_residual(iv.hi, p), 0.0);
        EXPECT_LT(halfbump_residual(iv.lo * (1 + 1e-12), p), 0.0);
    }
}

TEST(HalfBump, AmplitudeEquivariance) {
    const ModelParams p = params(2.5, 2.0, 1.7, 0.6, 1.3);
    const HalfBumpSolution base = construct_half_bump(p, 1.0);
    for (double lambda : {0.5, 2.0, 10.0}) {
        const HalfBumpSolution hb = construct_half_bump(p, lambda);
        EXPECT_EQ(hb.r0, base.r0);
        EXPECT_NEAR(hb.rho0, lambda * base.rho0, 1e-12 * lambda * base.rho0);
        EXPECT_NEAR(hb.K, lambda * base.K, 1e-12 * lambda * std::fabs(base.K));
        EXPECT_NEAR(hb.c1, lambda * base.c1, 1e-12 * lambda * base.c1);
        EXPECT_NEAR(hb.A2, lambda * base.A2, 1e-12 * lambda * base.A2);
    }
}

TEST(HalfBump, Deterministic) {
    const HalfBumpSolution a = construct_half_bump(params(3, 1), 1.7);
    const HalfBumpSolution b = construct_half_bump(params(3, 1), 1.7);
    EXPECT_EQ(to_json(a.solution).dump(), to_json(b.solution).dump());
    EXPECT_EQ(scan_json(a.scan).dump(), scan_json(b.scan).dump());
}

TEST(InteriorBump, RegimeAndDomainErrors) {
    EXPECT_THROW(construct_interior_bump(params(1, 1), {1, 2}), RegimeError);
    EXPECT_THROW(construct_interior_bump(params(0.5, 1), {1, 2}), RegimeError);
    EXPECT_THROW(construct_interior_bump(params(2, 0), {1, 2}), RegimeError);
    EXPECT_THROW(construct_interior_bump(params(2, 1), {2, 1}), DomainError);
}

TEST(InteriorBump, ResidualMatchesIndependentEvaluation) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u0(0.1, 4.0), ud(0.1, 8.0);
    for (const ModelParams& p : supercritical_sets()) {
        const double w = *classify(p).freq, beta = p.beta();
        for (int i = 0; i < 20; ++i) {
            const double r0 = u0(rng), r1 = r0 + ud(rng);
            const InteriorResidual res = interior_residual(p, r0, r1);
            // Oracle: propagate the trace with Boost J0/Y0 and the explicit Cramer formula.
            const long double I0 = cyl_bessel_i(0, (long double)(beta * r0));
            const long double I1 = cyl_bessel_i(1, (long double)(beta * r0));
            const long double K = -p.chi * I0;
            const long double off = -p.a * K / (p.D * p.eps * w * w);
            auto J = [&](int n, double x) { return boost::math::cyl_bessel_j(n, (long double)x); };
            auto Y = [&](int n, double x) { return boost::math::cyl_neumann(n, (long double)x); };
            const long double target = I0 - off, slope = beta * I1;
            const long double wr = 2.0L / (3.14159265358979323846264338327950288L * r0);
            const long double c1 = (target * (-w * Y(1, w * r0)) - slope * Y(0, w * r0)) / wr;
            const long double c2 = (J(0, w * r0) * slope - (-w * J(1, w * r0)) * target) / wr;
            const long double phi1 = c1 * J(0, w * r1) + c2 * Y(0, w * r1) + off;
            const long double dphi1 = -w * (c1 * J(1, w * r1) + c2 * Y(1, w * r1));
            const long double k0 = cyl_bessel_k(0, (long double)(beta * r1));
            const long double dk0 = -beta * cyl_bessel_k(1, (long double)(beta * r1));
            const double F1 = double(phi1 + K / p.chi), F2 = double(dphi1 * k0 - phi1 * dk0);
            const double scale = 1 + std::fabs(double(c1)) + std::fabs(double(c2)) + std::fabs(double(off));
            EXPECT_NEAR(res.F1, F1, 1e-11 * scale);
            EXPECT_NEAR(res.F2, F2, 1e-11 * scale * double(k0 + std::fabs(dk0)) + 1e-300);
        }
    }
}

TEST(InteriorBump, ValueMatchForcesPositiveOuterResidual) {
    // Along every curve F1 = 0 the outer condition F2 stays strictly positive,
    // so the Newton system has no root. Near-critical sets may never return to
    // the inlet value at all, since the oscillation amplitude only shrinks.
    int crossings = 0;
    for (const ModelParams& p : supercritical_sets()) {
        const double w = *classify(p).freq, beta = p.beta();
        for (double r0 = 0.05; r0 < std::min(8.0, 300.0 / beta); r0 *= 1.3) {
            const double span = 12.0 * std::numbers::pi / w;
            double prev_r = r0 * (1 + 1e-9);
            double prev = interior_residual(p, r0, prev_r).F1;
            for (int k = 1; k <= 600; ++k) {
                const double r1 = r0 + span * k / 600.0;
                const double f = interior_residual(p, r0, r1).F1;
                if ((f < 0) != (prev < 0)) {
                    const double root = roots::brent(
                        [&](double r) { return interior_residual(p, r0, r).F1; }, prev_r, r1);
                    const InteriorResidual at = interior_residual(p, r0, root);
                    EXPECT_GT(at.F2, 0.0) << "r0=" << r0 << " r1=" << root;
                    const InteriorObstruction o = interior_obstruction(p, r0, root);
                    EXPECT_TRUE(o.energy_nonincreasing);
                    EXPECT_TRUE(o.slopes_separated);
                    ++crossings;
                }
                prev = f;
                prev_r = r1;
            }
        }
    }
    EXPECT_GT(crossings, 0);
}

TEST(InteriorBump, NewtonReportsNotFoundWithTrace) {
    const ModelParams p = params(2, 1);
    try {
        construct_interior_bump(p, {1.0, 4.0});
        FAIL() << "no interior bump expected";
    } catch (const NotFound& e) {
        const auto j = nlohmann::json::parse(e.diagnostics());
        EXPECT_FALSE(j.at("converged").get<bool>());
        EXPECT_GE(j.at("rows").size(), 1u);
    }
}

TEST(InteriorBump, ResidualFieldSkipsInvalidCells) {
    const auto cells = interior_residual_field(params(2, 1), {0.5, 1.0, 2.0}, {0.5, 1.5, 3.0});
    EXPECT_EQ(cells.size(), 5u);
    for (const auto& c : cells) EXPECT_GT(c.r1, c.r0);
}

TEST(ChebyshevGrid, EndpointsAndOrdering) {
    const auto g = chebyshev_grid(1.0, 3.0, 2048);
    ASSERT_EQ(g.size(), 2050u);
    EXPECT_EQ(g.front(), 1.0);
    EXPECT_EQ(g.back(), 3.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
}

TEST(Probe, HalfBumpCase2) {
    const ProbeReport r = probe_nonexistence(ProbeScenario::HalfBumpCase2, params(0.5, 1));
    EXPECT_TRUE(r.certified);
    EXPECT_EQ(r.argmin_r, 0.0);
    EXPECT_NEAR(r.min_rho, 1.0, 1e-14);
    EXPECT_TRUE(r.nondecreasing);
}

TEST(Probe, HalfBumpCase1) {
    const ProbeReport r = probe_nonexistence(ProbeScenario::HalfBumpCase1, params(1, 1));
    EXPECT_TRUE(r.certified);
    EXPECT_EQ(r.min_rho, 1.0);
    EXPECT_TRUE(r.nondecreasing);
}

TEST(Probe, TouchingZero) {
    const ProbeReport c1 = probe_nonexistence(ProbeScenario::TouchingZeroCase1, params(1, 1));
    EXPECT_TRUE(c1.certified);
    EXPECT_EQ(c1.rho_at_zero, 0.0);
    // rho = -chi a K r^2/(4 D eps^2) with K = -1.
    const PointValue v = eval_piece({PieceKind::Case1, 0.0, 1.0, -1.0}, params(1, 1), 2.0);
    EXPECT_NEAR(v.rho, 1.0, 1e-14);
    EXPECT_TRUE(probe_nonexistence(ProbeScenario::TouchingZeroCase2, params(0.5, 1)).certified);
    const ProbeReport c3 = probe_nonexistence(ProbeScenario::TouchingZeroCase3, params(2, 1));
    EXPECT_TRUE(c3.certified);
    EXPECT_GT(c3.min_rho_positive_r, 0.0);
}

TEST(Probe, SymmetricInterior) {
    for (const ModelParams& p : {params(2, 1), params(0.5, 1), params(1, 1), params(2, 0)}) {
        const ProbeReport r = probe_nonexistence(ProbeScenario::SymmetricInterior, p);
        EXPECT_TRUE(r.certified);
        EXPECT_EQ(r.points_checked, 100);
        EXPECT_GT(r.min_dI0, 0.0);
    }
}

TEST(Probe, ScenarioRegimeMismatch) {
    EXPECT_THROW(probe_nonexistence(ProbeScenario::HalfBumpCase1, params(2, 1)), UsageError);
    EXPECT_THROW(probe_nonexistence(ProbeScenario::TouchingZeroCase3, params(0.5, 1)), UsageError);
    EXPECT_THROW(probe_scenario_from_string("WholeBump"), UsageError);
    EXPECT_EQ(probe_scenario_from_string("TouchingZeroCase2"), ProbeScenario::TouchingZeroCase2);
}
