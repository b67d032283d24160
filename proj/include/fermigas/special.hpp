#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "fermigas/common.hpp"
#include "fermigas/quadrature.hpp"

// Bessel functions of the first kind for the handful of orders the limit
// formulas need, exact Gamma values on the half-integer ladder, the Fourier
// transform of a ball indicator and the Schafheitlin integral.

namespace fermigas::special {

/// Gamma function for z in {1/2, 1, 3/2, ..., 6}; exact closed forms only.
inline double gamma_fn(double z) {
    const double two_z = 2.0 * z;
    const long k = std::lround(two_z);
    if (std::abs(two_z - static_cast<double>(k)) > 1e-12 || k < 1 || k > 12)
        throw ArgumentUnsupported("gamma_fn supports half-integer z in [1/2, 6], got " +
                                  std::to_string(z));
    // Walk the recurrence up from Gamma(1/2) or Gamma(1).
    double value = (k % 2) ? std::sqrt(kPi) : 1.0;
    double arg = (k % 2) ? 0.5 : 1.0;
    while (arg + 0.5 < z + 1e-9) {
        value *= arg;
        arg += 1.0;
    }
    return value;
}

namespace detail {

/// Ascending series sum_k (-r^2/4)^k / (k! Gamma(nu+k+1)), i.e. J_nu(r)/(r/2)^nu.
inline double bessel_series_scaled(double nu, double r, int max_terms = 60) {
    const double q = -0.25 * r * r;
    double gamma_nu1 = std::tgamma(nu + 1.0);
    double term = 1.0 / gamma_nu1;
    double sum = term;
    for (int k = 1; k < max_terms; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// J_0..J_nmax by Miller's backward recurrence with even-order normalization.
inline void bessel_jn_miller(double r, int nmax, double* out) {
    const int start = static_cast<int>(1.4 * r + 60.0) | 1;
    double jp = 0.0;       // J_{k+1}
    double jc = 1e-300;    // J_k, arbitrary seed
    double norm = 0.0;     // accumulates J_0 + 2 sum_{even k>=2} J_k
    for (int k = start; k >= 1; --k) {
        const double jm = (2.0 * k / r) * jc - jp;
        jp = jc;
        jc = jm;
        if (k - 1 <= nmax) out[k - 1] = jc;
        if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? jc : 2.0 * jc;
        if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (int i = std::max(0, k - 1); i <= nmax; ++i) out[i] *= 1e-250;
        }
    }
    for (int i = 0; i <= nmax; ++i) out[i] /= norm;
}

}  // namespace detail

/// J_nu(r) for nu in {0, 1/2, 1, 3/2, 2, 5/2}, r >= 0.
/// Half-integer orders use their trigonometric closed forms away from the
/// cancellation region near r = 0, the ascending series below it.
inline double bessel_j(double nu, double r) {
    if (r < 0.0) throw ArgumentUnsupported("bessel_j requires r >= 0");
    const long two_nu = std::lround(2.0 * nu);
    if (std::abs(2.0 * nu - static_cast<double>(two_nu)) > 1e-12 || two_nu < 0 ||
        two_nu > 5)
        throw OrderUnsupported("bessel_j supports nu in {0, 1/2, 1, 3/2, 2, 5/2}");

    if (r < 0.5)  // series branch: exact limit at r = 0, no cancellation
        return std::pow(0.5 * r, nu) * detail::bessel_series_scaled(nu, r);

    switch (two_nu) {
        case 1:
            return std::sqrt(2.0 / (kPi * r)) * std::sin(r);
        case 3:
            return std::sqrt(2.0 / (kPi * r)) * (std::sin(r) / r - std::cos(r));
        case 5:
            return std::sqrt(2.0 / (kPi * r)) *
                   ((3.0 / (r * r) - 1.0) * std::sin(r) - 3.0 / r * std::cos(r));
        default: {  // integer orders 0, 1, 2
            // the ascending series loses ~(r/2)^2 digits to cancellation;
            // switch to backward recurrence before that reaches 1e-12
            if (r <= 8.0) return std::pow(0.5 * r, nu) * detail::bessel_series_scaled(nu, r);
            double j[3];
            detail::bessel_jn_miller(r, 2, j);
            return j[two_nu / 2];
        }
    }
}

/// 2^{n/2} Gamma(n/2+1) J_{n/2}(r) / r^{n/2}, continued by 1 at r = 0.
/// This is the shape of every limit curve in the library; the removable
/// singularity is handled by the scaled series.
inline double limit_profile(int n, double r) {
    if (n != 2 && n != 3) throw DimensionUnsupported("limit_profile needs n in {2,3}");
    const double nu = 0.5 * n;
    if (r < 0.5)
        return gamma_fn(nu + 1.0) * detail::bessel_series_scaled(nu, r);
    return std::pow(2.0, nu) * gamma_fn(nu + 1.0) * bessel_j(nu, r) / std::pow(r, nu);
}

/// Volume of the n-ball of radius r.
inline double ball_volume(int n, double r) {
    return std::pow(kPi, 0.5 * n) * std::pow(r, n) / gamma_fn(0.5 * n + 1.0);
}

/// Fourier transform of the indicator of B_gamma evaluated at |y| (with the
/// convention F v(y) = int e^{-i y.x} v(x) dx). Equals |B_gamma| at y = 0.
inline double ball_indicator_hat(int n, double gamma, double abs_y) {
    if (n != 2 && n != 3) throw DimensionUnsupported("ball_indicator_hat needs n in {2,3}");
    return ball_volume(n, gamma) * limit_profile(n, gamma * abs_y);
}

struct SchafheitlinResult {
    double closed;      ///< 4 / ((n^2-1) pi)
    double quadrature;  ///< independent quadrature of the defining integral
};

/// int_0^infty r^{-2} J_{n/2}^2(r) dr, closed form plus quadrature check.
inline SchafheitlinResult schafheitlin(int n) {
    if (n < 2) throw ArgumentUnsupported("schafheitlin requires n >= 2");
    if (n > 3) throw DimensionUnsupported("schafheitlin implemented for n in {2,3}");
    SchafheitlinResult out;
    out.closed = 4.0 / ((static_cast<double>(n) * n - 1.0) * kPi);

    const double nu = 0.5 * n;
    auto f = [nu, n](double r) {
        if (r < 1e-12) return 0.0;
        if (r < 0.5) {
            // r^{2 nu - 2} (series)^2 / 4^nu stays finite at the origin
            const double s = detail::bessel_series_scaled(nu, r);
            return std::pow(r, 2.0 * nu - 2.0) * s * s / std::pow(4.0, nu);
        }
        const double j = bessel_j(nu, r);
        return j * j / (r * r);
    };
    const double head = adaptive_simpson(f, 0.0, 1.0, 1e-11);
    const double R = 400.0;
    const double body = simpson(f, 1.0, R, static_cast<int>((R - 1.0) * 32.0 / kPi));
    const double tail = 1.0 / (2.0 * kPi * R * R);  // oscillation-averaged envelope
    out.quadrature = head + body + tail;

    if (std::abs(out.quadrature - out.closed) > 1e-6)
        throw NumericError("schafheitlin quadrature disagrees with closed form");
    return out;
}

}  // namespace fermigas::special
