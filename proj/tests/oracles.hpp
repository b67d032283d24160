#pragma once

// Test-side oracles, kept independent of the library implementation paths
// they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracles {

/// Ascending-series Bessel J_nu in extended precision, 50 terms. Reliable as
/// an oracle for r up to ~12 before cancellation dominates.
inline long double bessel_series(long double nu, long double r) {
    const long double q = -0.25L * r * r;
    long double term = 1.0L / std::tgammal(nu + 1.0L);
    long double sum = term;
    for (int k = 1; k <= 50; ++k) {
        term *= q / (static_cast<long double>(k) * (nu + k));
        sum += term;
    }
    return std::pow(0.5L * r, nu) * sum;
}

/// Sorted Dirichlet box eigenvalues by direct enumeration of mode tuples.
inline std::vector<double> box_dirichlet_eigenvalues(const std::vector<double>& L,
                                                     int K) {
    const long double pi = 3.141592653589793238462643383279502884L;
    std::vector<double> lam;
    int jcap = 4;
    for (;;) {
        lam.clear();
        if (L.size() == 2) {
            for (int a = 1; a <= jcap; ++a)
                for (int b = 1; b <= jcap; ++b)
                    lam.push_back(static_cast<double>(
                        pi * pi * (a * a / (L[0] * L[0]) + b * b / (L[1] * L[1]))));
        } else {
            for (int a = 1; a <= jcap; ++a)
                for (int b = 1; b <= jcap; ++b)
                    for (int c = 1; c <= jcap; ++c)
                        lam.push_back(static_cast<double>(
                            pi * pi *
                            (a * a / (L[0] * L[0]) + b * b / (L[1] * L[1]) +
                             c * c / (L[2] * L[2]))));
        }
        std::sort(lam.begin(), lam.end());
        // the enumeration cube must reach past the K-th value along each axis
        const double pi2 = static_cast<double>(pi * pi);
        const double lmax_axis =
            pi2 * jcap * jcap / std::pow(*std::max_element(L.begin(), L.end()), 2.0);
        if (static_cast<int>(lam.size()) >= K && lam[static_cast<std::size_t>(K - 1)] <
                                                     lmax_axis)
            break;
        jcap *= 2;
        if (jcap > 4096) break;
    }
    lam.resize(static_cast<std::size_t>(K));
    return lam;
}

/// Lattice-point count: nodes i*h strictly inside the disk of given radius.
inline long disk_lattice_count(double radius, double h) {
    const long imax = static_cast<long>(radius / h) + 2;
    long count = 0;
    for (long i = -imax; i <= imax; ++i)
        for (long j = -imax; j <= imax; ++j) {
            const double x = i * h, y = j * h;
            if (std::hypot(x, y) < radius) ++count;
        }
    return count;
}

/// First positive root of sin r - r cos r (tan r = r) by bisection.
inline double first_tan_root() {
    double lo = 3.2, hi = 4.6;
    auto f = [](double r) { return std::sin(r) - r * std::cos(r); };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracles
