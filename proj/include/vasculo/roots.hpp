#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace vasculo::roots {

/// Brent's method on a sign-changing bracket [a, b]. Iterates until the
/// bracket collapses to adjacent doubles or |f| <= f_tol.
template <typename F>
double brent(F&& f, double a, double b, double f_tol = 0.0, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b);
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0 || std::fabs(fb) <= f_tol) return b;
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return b;
}

/// Plain bisection for a monotone sign change; runs to adjacent doubles.
template <typename F>
double bisect(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 2000; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::fabs(flo) <= std::fabs(f(hi)) ? lo : hi;
}

using Vec2 = std::array<double, 2>;

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

struct NewtonStep {
    Vec2 x{};
    Vec2 F{};
    double norm_F = 0.0;
    double damping = 1.0;
};

struct NewtonResult {
    bool converged = false;
    Vec2 x{};
    Vec2 F{};
    double norm_F = 0.0;
    int iterations = 0;
    std::vector<NewtonStep> trace;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double fd_rel_step = 1e-6;  // h = fd_rel_step * max(1, |x_i|)
    int max_halvings = 40;
};

/// Damped Newton for F: R^2 -> R^2 with a forward-difference Jacobian.
///
/// A full step is halved until ||F|| decreases and the iterate stays inside
/// the admissible set. Iterates that leave the domain of F (admissible
/// returns false) are treated as failed trials.
inline NewtonResult damped_newton_2d(const std::function<Vec2(const Vec2&)>& F, Vec2 x,
                                     const std::function<bool(const Vec2&)>& admissible,
                                     const NewtonOptions& opt = {}) {
    NewtonResult res;
    Vec2 fx = F(x);
    double nf = norm(fx);
    res.trace.push_back({x, fx, nf, 1.0});
    for (int it = 0; it < opt.max_iter; ++it) {
        res.iterations = it;
        if (nf <= opt.tol) {
            res.converged = true;
            break;
        }
        std::array<Vec2, 2> cols{};
        bool jac_ok = true;
        for (int j = 0; j < 2; ++j) {
            Vec2 xh = x;
            const double h = opt.fd_rel_step * std::max(1.0, std::fabs(x[j]));
            xh[j] += h;
            if (!admissible(xh)) {
                xh[j] = x[j] - h;
                if (!admissible(xh)) {
                    jac_ok = false;
                    break;
                }
            }
            const Vec2 fh = F(xh);
            const double dh = xh[j] - x[j];
            cols[j] = {(fh[0] - fx[0]) / dh, (fh[1] - fx[1]) / dh};
        }
        if (!jac_ok) break;
        const double det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
        if (det == 0.0 || !std::isfinite(det)) break;
        const Vec2 step{-(fx[0] * cols[1][1] - fx[1] * cols[1][0]) / det,
                        -(cols[0][0] * fx[1] - cols[0][1] * fx[0]) / det};
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings; ++k, lambda *= 0.5) {
            const Vec2 trial{x[0] + lambda * step[0], x[1] + lambda * step[1]};
            if (!admissible(trial)) continue;
            const Vec2 ft = F(trial);
            const double nt = norm(ft);
            if (std::isfinite(nt) && nt < nf) {
                x = trial;
                fx = ft;
                nf = nt;
                accepted = true;
                break;
            }
        }
        res.trace.push_back({x, fx, nf, accepted ? lambda : 0.0});
        if (!accepted) break;
        res.iterations = it + 1;
    }
    if (nf <= opt.tol) res.converged = true;
    res.x = x;
    res.F = fx;
    res.norm_F = nf;
    return res;
}

}  // namespace vasculo::roots
