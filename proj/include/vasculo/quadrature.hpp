#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "vasculo/errors.hpp"

namespace vasculo {

/// Adaptive Simpson settings.
struct Quadrature {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 40;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth < 10) {
            throw UsageError("quadrature: tolerances must be positive and max_depth >= 10");
        }
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

namespace detail {

template <typename F>
struct SimpsonState {
    F& f;
    int max_depth;
    int evaluations = 0;
    bool depth_exceeded = false;
    double error = 0.0;

    double call(double x) {
        ++evaluations;
        return f(x);
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = call(lm);
        const double frm = call(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double diff = left + right - whole;
        if (std::fabs(diff) <= 15.0 * tol || (b - a) <= 4.0 * std::fabs(m) * 1e-15) {
            error += std::fabs(diff) / 15.0;
            return left + right + diff / 15.0;
        }
        if (depth >= max_depth) {
            depth_exceeded = true;
            error += std::fabs(diff) / 15.0;
            return left + right + diff / 15.0;
        }
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace detail

/// Adaptive Simpson quadrature of f over [lo, hi] with Richardson correction.
///
/// The tolerance target is max(abs_tol, rel_tol |I|) where |I| is taken from a
/// 32-panel composite Simpson pre-pass; the adaptive sweep starts from those
/// panels so that narrow features are not missed by a single coarse sample.
template <typename F>
QuadratureResult adaptive_simpson(F&& f, double lo, double hi, const Quadrature& quad = {}) {
    quad.validate();
    if (!(lo < hi)) throw UsageError("quadrature: need lo < hi");
    constexpr int panels = 32;
    const double h = (hi - lo) / panels;
    double xs[2 * panels + 1];
    double fs[2 * panels + 1];
    for (int i = 0; i <= 2 * panels; ++i) {
        xs[i] = (i == 2 * panels) ? hi : lo + 0.5 * h * i;
        fs[i] = f(xs[i]);
        if (!std::isfinite(fs[i])) throw DomainError("quadrature: integrand not finite");
    }
    double coarse = 0.0;
    for (int p = 0; p < panels; ++p) {
        coarse += (xs[2 * p + 2] - xs[2 * p]) / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
    }
    const double target = std::max(quad.abs_tol, quad.rel_tol * std::fabs(coarse));
    detail::SimpsonState<std::remove_reference_t<F>> state{f, quad.max_depth};
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = xs[2 * p];
        const double b = xs[2 * p + 2];
        const double whole = (b - a) / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
        total += state.recurse(a, b, fs[2 * p], fs[2 * p + 1], fs[2 * p + 2], whole, target / panels,
                               0);
    }
    QuadratureResult res{total, state.error, state.evaluations + 2 * panels + 1};
    if (state.depth_exceeded && state.error > target) {
        throw AccuracyError("quadrature: max_depth " + std::to_string(quad.max_depth) +
                                " exceeded, error estimate " + std::to_string(state.error),
                            total);
    }
    return res;
}

/// Integral of f(r) r dr over [r_lo, r_hi] (the radial part of the 2-D measure).
template <typename F>
double integrate_radial(F&& f, double r_lo, double r_hi, const Quadrature& quad = {}) {
    return adaptive_simpson([&](double r) { return f(r) * r; }, r_lo, r_hi, quad).value;
}

}  // namespace vasculo
