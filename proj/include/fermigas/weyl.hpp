#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fermigas/common.hpp"
#include "fermigas/geometry.hpp"
#include "fermigas/special.hpp"
#include "fermigas/spectral.hpp"

// Eigenvalue-counting diagnostics: the phase-space radius gamma(Omega), the
// counting function, the k^{1/n} h_k ratio expected to approach 1, and the
// Fermi momentum of the m-component gas.

namespace fermigas {

/// gamma(Omega) = 2 pi^{1/2} Gamma^{1/n}(n/2+1) / |Omega|^{1/n}; the radius
/// making the phase-space cylinder Omega x B_gamma carry mass (2 pi)^n.
inline double gamma_omega(const DomainSpec& domain) {
    const int n = domain.dim;
    return 2.0 * std::sqrt(kPi) * std::pow(special::gamma_fn(0.5 * n + 1.0), 1.0 / n) /
           std::pow(domain.volume, 1.0 / n);
}

struct WeylConstants {
    double gamma = 0.0;
    double volume = 0.0;
    int dimension = 0;

    /// (2 pi)^{-n} |Omega x B_gamma|; equals 1 by construction of gamma.
    double phase_space_mass() const {
        return volume * special::ball_volume(dimension, gamma) /
               std::pow(2.0 * kPi, dimension);
    }
};

inline WeylConstants weyl_constants(const DomainSpec& domain) {
    return WeylConstants{gamma_omega(domain), domain.volume, domain.dim};
}

/// #\{k : lambda_k <= lambda\}. Only answerable up to the computed spectrum.
/// Queries carry a 1e-12 relative slack so an exactly-hit eigenvalue counts
/// regardless of rounding in how the query value was formed.
inline int counting(const EigenBasis& basis, double lambda) {
    if (basis.size() == 0) throw InsufficientSpectrum("empty basis");
    const double q = lambda + 1e-12 * std::abs(lambda);
    if (q > basis.eigenvalues.back() * (1.0 + 1e-12))
        throw LambdaBeyondComputed("lambda exceeds the computed spectrum");
    return static_cast<int>(std::upper_bound(basis.eigenvalues.begin(),
                                             basis.eigenvalues.end(), q) -
                            basis.eigenvalues.begin());
}

/// gamma k^{1/n} lambda_k^{-1/2} for 1-based k; tends to 1 along the spectrum.
inline double weyl_ratio(const EigenBasis& basis, int k) {
    if (k < 1 || k > basis.size()) throw IndexOutOfRange("weyl_ratio index " + std::to_string(k));
    const int n = basis.domain.dim;
    const double lam = basis.eigenvalues[static_cast<std::size_t>(k - 1)];
    return gamma_omega(basis.domain) * std::pow(static_cast<double>(k), 1.0 / n) /
           std::sqrt(lam);
}

/// p_F = gamma m^{-1/n}.
inline double fermi_momentum(const DomainSpec& domain, int m) {
    if (m < 1) throw ConfigError("spin multiplicity must be >= 1");
    return gamma_omega(domain) * std::pow(static_cast<double>(m), -1.0 / domain.dim);
}

/// Least-squares slope of log N(lambda) against log lambda over the top
/// decade of the computed spectrum; the counting exponent, expected n/2.
inline double counting_slope_top_decade(const EigenBasis& basis) {
    if (basis.size() < 16) throw InsufficientSpectrum("need a longer spectrum for the fit");
    const double lam_max = basis.eigenvalues.back();
    const double lam_min = lam_max / 10.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long cnt = 0;
    for (int k = 0; k < basis.size(); ++k) {
        const double lam = basis.eigenvalues[static_cast<std::size_t>(k)];
        if (lam < lam_min) continue;
        const double x = std::log(lam);
        const double yv = std::log(static_cast<double>(k + 1));
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
        ++cnt;
    }
    const double denom = cnt * sxx - sx * sx;
    if (cnt < 8 || denom == 0.0) throw InsufficientSpectrum("degenerate slope fit");
    return (cnt * sxy - sx * sy) / denom;
}

}  // namespace fermigas
