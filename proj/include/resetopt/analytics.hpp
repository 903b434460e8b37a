#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "resetopt/model.hpp"

namespace resetopt {

// Standard normal CDF via erfc, |error| <= 1e-12 across the real line.
inline double norm_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double norm_pdf(double z) noexcept {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

// European put, strike-K convention with d-arguments in log(strike/x):
//   strike e^{-r tau} Phi(d1) - x e^{-delta tau} Phi(d2),
//   d1 = [log(strike/x) - (r - delta - sigma^2/2) tau] / (sigma sqrt(tau)),
//   d2 = [log(strike/x) - (r - delta + sigma^2/2) tau] / (sigma sqrt(tau)).
inline double european_put(double t, double x, double strike, const ModelParams& p) {
    if (t > p.maturity) throw std::domain_error("european_put: t > maturity");
    if (!(x > 0.0)) throw std::domain_error("european_put: spot must be > 0");
    if (!(strike > 0.0)) throw std::domain_error("european_put: strike must be > 0");
    const double tau = p.maturity - t;
    if (tau == 0.0) return std::max(strike - x, 0.0);
    const double sig_sqrt = p.vol * std::sqrt(tau);
    const double lm = std::log(strike / x);
    const double drift = (p.rate - p.dividend) * tau;
    const double half_var = 0.5 * p.vol * p.vol * tau;
    const double d1 = (lm - drift + half_var) / sig_sqrt;
    const double d2 = (lm - drift - half_var) / sig_sqrt;
    return strike * std::exp(-p.rate * tau) * norm_cdf(d1) -
           x * std::exp(-p.dividend * tau) * norm_cdf(d2);
}

// At-the-money normalized put V^e(t) = V^e(t, 1; 1); a function of time only.
inline double unit_put(double t, const ModelParams& p) {
    if (t < 0.0 || t > p.maturity) throw std::domain_error("unit_put: t outside [0, T]");
    const double tau = p.maturity - t;
    if (tau == 0.0) return 0.0;
    const double root = std::sqrt(tau);
    const double a = (p.dividend - p.rate) / p.vol + 0.5 * p.vol;
    const double b = (p.dividend - p.rate) / p.vol - 0.5 * p.vol;
    return std::exp(-p.rate * tau) * norm_cdf(a * root) -
           std::exp(-p.dividend * tau) * norm_cdf(b * root);
}

// h_1(t) = (V^e)'(t) - delta V^e(t) in closed form; diverges to -inf as t -> T.
inline double h1(double t, const ModelParams& p) {
    if (t < 0.0 || t >= p.maturity) throw std::domain_error("h1: t outside [0, T)");
    const double tau = p.maturity - t;
    const double root = std::sqrt(tau);
    const double a = (p.dividend - p.rate) / p.vol + 0.5 * p.vol;
    const double disc = std::exp(-p.rate * tau);
    return (p.rate - p.dividend) * disc * norm_cdf(a * root) -
           0.5 * p.vol / root * disc * norm_pdf(a * root);
}

// Tail probability under the tilted measure:
//   Qhat(X_u >= z | X_t = x) = Phi([log(x/z) + (r - delta + sigma^2/2)(u - t)] / (sigma sqrt(u - t))).
inline double qhat_tail(double t, double u, double x, double z, const ModelParams& p) {
    if (!(u > t)) throw std::domain_error("qhat_tail: u must exceed t");
    if (!(x > 0.0) || !(z > 0.0)) throw std::domain_error("qhat_tail: x, z must be > 0");
    const double du = u - t;
    const double arg =
        (std::log(x / z) + (p.rate - p.dividend + 0.5 * p.vol * p.vol) * du) /
        (p.vol * std::sqrt(du));
    return norm_cdf(arg);
}

// Premium kernel L_n(t,u,x,z) = -x e^{-delta(u-t)} h_n(u) Qhat(X_u >= z | X_t = x);
// the caller supplies h_n(u).
inline double kernel_L(double h_at_u, double t, double u, double x, double z,
                       const ModelParams& p) {
    return -x * std::exp(-p.dividend * (u - t)) * h_at_u * qhat_tail(t, u, x, z, p);
}

// Average over [t_l, t_r] of u -> e^{-delta(u-t)} Qhat(X_u >= b(u) | X_t = x)
// with b interpolated between (t_l, b_l) and (t_r, b_r), for t <= t_l < t_r.
// Gauss-Legendre after the substitution u = t + s^2: the integrand's
// x-sensitivity concentrates in a (u - t)^{-1/2} layer at u = t (it is what
// the spatial derivative of the premium integral feels), and the
// substitution renders it smooth. Plain midpoint sampling here leaves an
// O(sqrt(Delta)) error in the hedge slope at the boundary.
//
// b is linear by default. With sqrt_shape it follows
// b_r + (b_l - b_r) sqrt((t_r - u)/(t_r - t_l)): the boundary approaches its
// terminal value like K + c sqrt(T - u), so on the subinterval ending at
// maturity the linear chord sits well below the curve, overstates the tail
// probability near the corner, and leaves a persistent O(b - K) dip in the
// solved boundary at the second-to-last node. The sqrt family is closed
// under restriction to a sub-range ending at t_r, so partial-interval
// evaluations stay consistent with whole-interval ones.
inline double discounted_tail_average(double t, double t_l, double t_r, double x, double b_l,
                                      double b_r, const ModelParams& p,
                                      bool sqrt_shape = false) {
    if (!(t_r > t_l) || t_l < t)
        throw std::domain_error("discounted_tail_average: need t <= t_l < t_r");
    static constexpr double gl_x[8] = {0.01985507175123188, 0.10166676129318664,
                                       0.2372337950418355,  0.40828267875217505,
                                       0.5917173212478249,  0.7627662049581645,
                                       0.8983332387068134,  0.9801449282487681};
    static constexpr double gl_w[8] = {0.05061426814518813, 0.11119051722668724,
                                       0.15685332293894363, 0.18134189168918097,
                                       0.18134189168918097, 0.15685332293894363,
                                       0.11119051722668724, 0.05061426814518813};
    const double span = t_r - t_l;
    if (!sqrt_shape) {
        const double s_lo = std::sqrt(t_l - t);
        const double s_hi = std::sqrt(t_r - t);
        double sum = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double s = s_lo + (s_hi - s_lo) * gl_x[i];
            const double u = t + s * s;
            const double b_u = b_r + (b_l - b_r) * (t_r - u) / span;
            sum += gl_w[i] * 2.0 * s * std::exp(-p.dividend * (u - t)) *
                   qhat_tail(t, u, x, b_u, p);
        }
        return sum * (s_hi - s_lo) / span;
    }
    // The sqrt shape kinks the integrand at u = t_r as well; integrate each
    // half with the substitution that smooths its own end.
    const double t_m = 0.5 * (t_l + t_r);
    double sum = 0.0;
    const double s_lo = std::sqrt(t_l - t);
    const double s_mid = std::sqrt(t_m - t);
    for (int i = 0; i < 8; ++i) {  // [t_l, t_m] in s = sqrt(u - t)
        const double s = s_lo + (s_mid - s_lo) * gl_x[i];
        const double u = t + s * s;
        const double b_u = b_r + (b_l - b_r) * std::sqrt((t_r - u) / span);
        sum += gl_w[i] * 2.0 * s * (s_mid - s_lo) * std::exp(-p.dividend * (u - t)) *
               qhat_tail(t, u, x, b_u, p);
    }
    const double w_hi = std::sqrt(t_r - t_m);
    for (int i = 0; i < 8; ++i) {  // [t_m, t_r] in w = sqrt(t_r - u)
        const double w = w_hi * gl_x[i];
        const double u = t_r - w * w;
        const double b_u = b_r + (b_l - b_r) * w / std::sqrt(span);
        sum += gl_w[i] * 2.0 * w * w_hi * std::exp(-p.dividend * (u - t)) *
               qhat_tail(t, u, x, b_u, p);
    }
    return sum / span;
}

// Average of h_1 over [t1, t2], t2 <= T. Since h_1 = (V^e)' - delta V^e with
// V^e the at-the-money unit put, the integral is unit_put(t2) - unit_put(t1)
// minus delta times the integral of unit_put; the latter is computed with
// Gauss-Legendre after the substitution tau = s^2, which removes the
// square-root behavior of unit_put at maturity. Unlike pointwise sampling
// this captures the full mass of the (T-u)^{-1/2} singularity of h_1.
inline double h1_average(double t1, double t2, const ModelParams& p) {
    if (t1 < 0.0 || !(t2 > t1) || t2 > p.maturity)
        throw std::domain_error("h1_average: need 0 <= t1 < t2 <= T");
    // 8-point Gauss-Legendre on [0, 1]
    static constexpr double gl_x[8] = {0.01985507175123188, 0.10166676129318664,
                                       0.2372337950418355,  0.40828267875217505,
                                       0.5917173212478249,  0.7627662049581645,
                                       0.8983332387068134,  0.9801449282487681};
    static constexpr double gl_w[8] = {0.05061426814518813, 0.11119051722668724,
                                       0.15685332293894363, 0.18134189168918097,
                                       0.18134189168918097, 0.15685332293894363,
                                       0.11119051722668724, 0.05061426814518813};
    const double s1 = std::sqrt(p.maturity - t1);
    const double s2 = std::sqrt(p.maturity - t2);
    double integral = 0.0;  // int_{t1}^{t2} unit_put dt = int_{s2}^{s1} unit_put(T - s^2) 2s ds
    for (int i = 0; i < 8; ++i) {
        const double s = s2 + (s1 - s2) * gl_x[i];
        integral += gl_w[i] * unit_put(p.maturity - s * s, p) * 2.0 * s;
    }
    integral *= s1 - s2;
    return (unit_put(t2, p) - unit_put(t1, p) - p.dividend * integral) / (t2 - t1);
}

// Locates t*: the last sign change of h_1 from positive to nonpositive on [0, T).
// Scan on a uniform grid then bisect. Absent when h_1 <= 0 everywhere scanned,
// which is the typical regime.
inline std::optional<double> find_t_star(const ModelParams& p, std::size_t n_scan) {
    if (n_scan < 2) throw std::invalid_argument("find_t_star: n_scan must be >= 2");
    // keep the scan strictly inside [0, T); h1 is singular at T
    const double t_max = p.maturity * (1.0 - 1e-9);
    const double step = t_max / static_cast<double>(n_scan - 1);
    double lo = -1.0, hi = -1.0;
    double prev_t = 0.0;
    double prev_h = h1(0.0, p);
    for (std::size_t i = 1; i < n_scan; ++i) {
        const double t = static_cast<double>(i) * step;
        const double h = h1(t, p);
        if (prev_h > 0.0 && h <= 0.0) {
            lo = prev_t;
            hi = t;
        }
        prev_t = t;
        prev_h = h;
    }
    if (lo < 0.0) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * p.maturity; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h1(mid, p) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace resetopt
