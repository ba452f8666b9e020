#pragma once

// Order-zero Bessel kernels J0, Y0, I0, K0 with first derivatives.
//
// Below the switchover argument the defining power series are summed in
// extended precision. Above it the Hankel amplitude/phase representation is
// used, with the amplitude integrals evaluated by a trapezoid rule, which
// converges geometrically for these analytic integrands.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "vasculo/errors.hpp"

namespace vasculo::specfun {

/// Euler-Mascheroni constant to 20 significant digits.
inline constexpr long double kEulerGamma = 0.57721566490153286061L;

inline constexpr double kJYSwitchover = 8.0;
inline constexpr double kIKSwitchover = 12.0;
// The log-coupled K0 series cancels like e^{2x}; past x = 2 it drops below
// 1e-10 relative, so K0 leaves the series earlier than I0.
inline constexpr double kKSwitchover = 2.0;
inline constexpr double kI0OverflowThreshold = 700.0;

/// Value and first derivative (with respect to the raw argument).
struct BesselEval {
    double value = 0.0;
    double deriv = 0.0;
};

/// f'' for the J0/Y0 pair, read off x f'' + f' + x f = 0.
inline double second_deriv_oscillatory(const BesselEval& f, double x) {
    return -f.deriv / x - f.value;
}

/// f'' for the I0/K0 pair, read off x f'' + f' - x f = 0.
inline double second_deriv_modified(const BesselEval& f, double x) {
    return -f.deriv / x + f.value;
}

namespace detail {

inline constexpr int kMaxSeriesTerms = 60;
inline constexpr long double kSeriesCutoff = 1e-17L;

inline void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(name) + ": argument must be finite");
    }
}

inline bool series_converged(int k, long double term, long double sum) {
    return std::fabs(term) < kSeriesCutoff * std::fabs(sum) || k >= kMaxSeriesTerms;
}

// Sums the four series that share q = (x/2)^2:
//   s0 = sum sign^k q^k/(k!)^2            (J0 or I0)
//   s1 = sum sign^k q^k/(k!(k+1)!)        (J1 or I1 divided by x/2)
//   h0 = sum_{k>=1} (-1)^(k+1) H_k q^k/(k!)^2   or  sum H_k q^k/(k!)^2
//   h1 = the same with an extra factor k
// with sign = -1 for the oscillatory pair and +1 for the modified pair
// (the H_k sums carry sign^(k+1) only in the oscillatory case).
struct SeriesSums {
    long double s0 = 0, s1 = 0, h0 = 0, h1 = 0;
};

inline SeriesSums power_series(double x, bool oscillatory) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    const long double sign = oscillatory ? -1.0L : 1.0L;
    SeriesSums s;
    long double t0 = 1.0L;  // sign^k q^k/(k!)^2
    long double t1 = 1.0L;  // sign^k q^k/(k!(k+1)!)
    long double harmonic = 0.0L;
    s.s0 = t0;
    s.s1 = t1;
    for (int k = 1;; ++k) {
        t0 *= sign * q / (static_cast<long double>(k) * k);
        t1 *= sign * q / (static_cast<long double>(k) * (k + 1));
        harmonic += 1.0L / k;
        s.s0 += t0;
        s.s1 += t1;
        const long double hk = (oscillatory ? -1.0L : 1.0L) * harmonic * t0;
        s.h0 += hk;
        s.h1 += hk * k;
        const bool done = series_converged(k, t0, s.s0) && series_converged(k, t1, s.s1) &&
                          series_converged(k, hk, s.h0);
        if (done) break;
    }
    return s;
}

struct PairEval {
    BesselEval first;   // J0 or I0
    BesselEval second;  // Y0 or K0
};

inline PairEval jy_series(double x) {
    const SeriesSums s = power_series(x, true);
    const long double lx = x;
    const long double j0 = s.s0;
    const long double j1 = lx / 2.0L * s.s1;
    const long double log_term = std::log(lx / 2.0L) + kEulerGamma;
    constexpr long double two_over_pi = 2.0L / std::numbers::pi_v<long double>;
    // h0 was accumulated as sum (-1)^(k+1) H_k q^k/(k!)^2.
    const long double y0 = two_over_pi * (log_term * j0 + s.h0);
    const long double y0p = two_over_pi * (j0 / lx - log_term * j1 + 2.0L / lx * s.h1);
    PairEval out;
    out.first = {static_cast<double>(j0), static_cast<double>(-j1)};
    out.second = {static_cast<double>(y0), static_cast<double>(y0p)};
    return out;
}

inline PairEval ik_series(double x) {
    const SeriesSums s = power_series(x, false);
    const long double lx = x;
    const long double i0 = s.s0;
    const long double i1 = lx / 2.0L * s.s1;
    const long double log_term = std::log(lx / 2.0L) + kEulerGamma;
    PairEval out;
    out.first = {static_cast<double>(i0), static_cast<double>(i1)};
    if (x > 0.0) {
        const long double k0 = -log_term * i0 + s.h0;
        const long double k0p = -i0 / lx - log_term * i1 + 2.0L / lx * s.h1;
        out.second = {static_cast<double>(k0), static_cast<double>(k0p)};
    }
    return out;
}

// Amplitude integrals of the Hankel representation,
//   S0(z) = (1/G(1/2)) int_0^inf e^-u u^-1/2 (1 + u/(2z))^-1/2 du
//   S1(z) = (1/G(3/2)) int_0^inf e^-u u^+1/2 (1 + u/(2z))^+1/2 du
// after u = t^2. z is i*x for the Hankel functions and x for K.
template <typename T>
inline void hankel_amplitudes(T two_z, T& s0, T& s1) {
    constexpr double h = 0.2;
    constexpr int n = 33;  // t up to 6.6; e^-t^2 below 1e-18
    T acc0 = T(0.5);       // t = 0 node, half weight
    T acc1 = T(0);
    for (int j = 1; j <= n; ++j) {
        const double t = j * h;
        const double t2 = t * t;
        const double g = std::exp(-t2);
        const T root = std::sqrt(T(1) + T(t2) / two_z);
        acc0 += g / root;
        acc1 += g * t2 * root;
    }
    const double norm = 2.0 * h / std::sqrt(std::numbers::pi);
    s0 = acc0 * norm;
    s1 = acc1 * norm * 2.0;
}

inline PairEval jy_hankel(double x) {
    using C = std::complex<double>;
    C s0, s1;
    hankel_amplitudes<C>(C(0.0, -2.0 * x), s0, s1);  // 1 + i u/(2x) = 1 + u/(-2ix)
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    const double phase0 = x - std::numbers::pi / 4.0;
    const double phase1 = x - 3.0 * std::numbers::pi / 4.0;
    const C h0 = amp * std::polar(1.0, phase0) * s0;
    const C h1 = amp * std::polar(1.0, phase1) * s1;
    PairEval out;
    out.first = {h0.real(), -h1.real()};
    out.second = {h0.imag(), -h1.imag()};
    return out;
}

inline BesselEval k_hankel(double x) {
    double s0 = 0, s1 = 0;
    hankel_amplitudes<double>(2.0 * x, s0, s1);
    const double amp = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    return {amp * s0, -amp * s1};
}

// I_n(x) = (1/pi) int_0^pi e^{x cos th} cos(n th) dth, n = 0, 1, by the
// trapezoid rule, which is spectrally accurate for periodic integrands.
inline BesselEval i_trapezoid(double x) {
    const int n = 8 + static_cast<int>(std::ceil(std::sqrt(24.0 * x)));
    const double h = std::numbers::pi / n;
    double acc0 = 0.0, acc1 = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double th = j * h;
        const double c = std::cos(th);
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        const double e = w * std::exp(x * (c - 1.0));
        acc0 += e;
        acc1 += e * c;
    }
    const double scale = std::exp(x) / n;
    return {acc0 * scale, acc1 * scale};
}

}  // namespace detail

/// J0(x) and J0'(x) = -J1(x) for x >= 0.
inline BesselEval j0(double x) {
    detail::require_finite(x, "j0");
    if (x < 0.0) throw DomainError("j0: argument must be nonnegative");
    if (x <= kJYSwitchover) return detail::jy_series(x).first;
    return detail::jy_hankel(x).first;
}

/// Y0(x) and Y0'(x) = -Y1(x) for x > 0.
inline BesselEval y0(double x) {
    detail::require_finite(x, "y0");
    if (x <= 0.0) throw DomainError("y0: argument must be positive (logarithmic singularity at 0)");
    if (x <= kJYSwitchover) return detail::jy_series(x).second;
    return detail::jy_hankel(x).second;
}

/// I0(x) and I0'(x) = I1(x) for 0 <= x <= 700.
inline BesselEval i0(double x) {
    detail::require_finite(x, "i0");
    if (x < 0.0) throw DomainError("i0: argument must be nonnegative");
    if (x > kI0OverflowThreshold) {
        throw OverflowError("i0: argument exceeds overflow threshold " +
                                std::to_string(kI0OverflowThreshold),
                            kI0OverflowThreshold);
    }
    if (x <= kIKSwitchover) return detail::ik_series(x).first;
    return detail::i_trapezoid(x);
}

/// K0(x) and K0'(x) = -K1(x) for x > 0.
inline BesselEval k0(double x) {
    detail::require_finite(x, "k0");
    if (x <= 0.0) throw DomainError("k0: argument must be positive (logarithmic singularity at 0)");
    if (x <= kKSwitchover) return detail::ik_series(x).second;
    return detail::k_hankel(x);
}

/// Location and depth of a J0 landmark.
struct J0Landmark {
    double location = 0.0;
    double depth = 0.0;  // m = -J0(location) for the minimum; 0 for the zero
};

namespace detail {

template <typename F>
double bisect_sign_change(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
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
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// First positive zero of J0, computed once.
inline double j0_first_zero() {
    static const double zero =
        detail::bisect_sign_change([](double x) { return j0(x).value; }, 2.0, 3.0);
    return zero;
}

/// First positive stationary point of J0 and m = -J0 there, computed once.
inline J0Landmark j0_first_min() {
    static const J0Landmark landmark = [] {
        const double loc =
            detail::bisect_sign_change([](double x) { return j0(x).deriv; }, 3.0, 4.5);
        return J0Landmark{loc, -j0(loc).value};
    }();
    return landmark;
}

}  // namespace vasculo::specfun
