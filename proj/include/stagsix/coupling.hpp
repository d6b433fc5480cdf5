#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <numbers>

namespace stagsix {

using Cplx = std::complex<double>;
inline constexpr double PI = std::numbers::pi;

/// All scalar model parameters, derived from the crossing angle gamma.
/// gamma is the single source of truth; everything else is recomputed from it.
struct Coupling {
    double gamma;            // crossing angle, 0 < gamma < pi/2
    double gamma0;           // pi - 2 gamma
    Cplx q_def;              // e^{i gamma}
    double sqrtQ;            // 2 cos gamma
    Cplx jimbo_k;            // e^{2 i gamma} = -e^{-i gamma0}
    std::optional<int> k_int;  // set iff gamma = pi/k_int within tolerance
    bool k_int_exact = false;  // true when gamma was constructed from an integer k

    bool has_k() const { return k_int.has_value(); }
    int k() const {
        if (!k_int) throw std::domain_error("coupling: k_int not available (gamma is not pi/k)");
        return *k_int;
    }
};

/// Spectral parameter u with the derived conventions u0 = -2u, x = e^{-i u0} = e^{2iu}.
struct SpectralPoint {
    Cplx u;
    Cplx u0;
    Cplx x;
};

inline Coupling coupling_from_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma < PI / 2.0))
        throw std::domain_error("coupling_from_gamma: require 0 < gamma < pi/2");
    Coupling c;
    c.gamma = gamma;
    c.gamma0 = PI - 2.0 * gamma;
    c.q_def = std::polar(1.0, gamma);
    c.sqrtQ = 2.0 * std::cos(gamma);
    c.jimbo_k = std::polar(1.0, 2.0 * gamma);
    double kreal = PI / gamma;
    double kround = std::round(kreal);
    if (std::abs(kreal - kround) < 1e-12 && kround >= 3)
        c.k_int = static_cast<int>(kround);
    return c;
}

inline Coupling coupling_from_k(int k) {
    if (k < 3) throw std::domain_error("coupling_from_k: require k >= 3");
    Coupling c = coupling_from_gamma(PI / static_cast<double>(k));
    c.k_int = k;
    c.k_int_exact = true;
    return c;
}

inline SpectralPoint spectral_point(Cplx u) {
    SpectralPoint s;
    s.u = u;
    s.u0 = -2.0 * u;
    s.x = std::exp(Cplx(0.0, 2.0) * u);
    return s;
}

}  // namespace stagsix
