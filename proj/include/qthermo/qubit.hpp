#pragma once

// Qubit states, the thermal parameter g and its temperature map, thermal
// states, the pin map and effective-temperature assignment.
//
// Units: hbar = k_B = E(omega) = 1. The thermal state of parameter g is
// (1/2) diag(1-g, 1+g), i.e. Bloch vector (0, 0, -g); g = 1 is T = 0 and
// g = 0 is T = infinity.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qthermo/linalg.hpp"

namespace qthermo {

struct BlochVector {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;

    double norm() const { return std::sqrt(r1 * r1 + r2 * r2 + r3 * r3); }
    bool is_physical(double tol = 1e-12) const { return r1 * r1 + r2 * r2 + r3 * r3 <= 1.0 + tol; }

    friend BlochVector operator-(const BlochVector &a, const BlochVector &b) {
        return {a.r1 - b.r1, a.r2 - b.r2, a.r3 - b.r3};
    }
    bool operator==(const BlochVector &) const = default;
};

inline double distance(const BlochVector &a, const BlochVector &b) { return (a - b).norm(); }

/// Bath description: g in [0, 1] and total emission rate gamma > 0.
struct ThermalParam {
    double g = 0.0;
    double gamma = 1.0;

    void validate() const {
        if (!(g >= 0.0 && g <= 1.0)) {
            throw std::invalid_argument("ThermalParam: g must lie in [0, 1], got " + std::to_string(g));
        }
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("ThermalParam: gamma must be positive, got " + std::to_string(gamma));
        }
    }
    /// Spontaneous emission rate gamma_0 = g * gamma.
    double gamma0() const { return g * gamma; }
    /// Planck occupation N = (1/g - 1) / 2; infinite at g = 0.
    double planck_n() const { return g == 0.0 ? std::numeric_limits<double>::infinity() : (1.0 / g - 1.0) / 2.0; }
};

inline ComplexMatrix bloch_to_density(const BlochVector &r) {
    if (!r.is_physical()) {
        throw std::invalid_argument("bloch_to_density: Bloch vector longer than 1");
    }
    return ComplexMatrix{{0.5 * (1.0 + r.r3), 0.5 * complex(r.r1, -r.r2)},
                         {0.5 * complex(r.r1, r.r2), 0.5 * (1.0 - r.r3)}};
}

/// Bloch components Tr(rho sigma_i) without validation; also used for
/// intermediate operators such as rk4 stages.
inline BlochVector bloch_components(const ComplexMatrix &rho) {
    return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

inline BlochVector density_to_bloch(const ComplexMatrix &rho) {
    if (rho.rows() != 2 || rho.cols() != 2) {
        throw std::invalid_argument("density_to_bloch: expected a 2x2 matrix");
    }
    if (!is_density_matrix(rho, 1e-10)) {
        throw std::invalid_argument("density_to_bloch: not a valid density matrix");
    }
    return bloch_components(rho);
}

inline void require_g_in_unit_interval(double g, const char *who) {
    if (!(g >= 0.0 && g <= 1.0)) {
        throw std::invalid_argument(std::string(who) + ": g must lie in [0, 1], got " + std::to_string(g));
    }
}

/// g = tanh(1/(2T)); T = +inf gives 0, T = 0 gives 1.
inline double g_from_temperature(double temperature) {
    if (std::isnan(temperature) || temperature < 0.0) {
        throw std::invalid_argument("g_from_temperature: temperature must be >= 0");
    }
    if (temperature == 0.0) {
        return 1.0;
    }
    return std::tanh(0.5 / temperature);
}

/// T = 1 / (2 atanh g). Accepts g in [-1, 1]: negative g (population
/// inversion) maps to a negative temperature; g = 0 maps to +inf.
inline double temperature_from_g(double g) {
    if (!(g >= -1.0 && g <= 1.0)) {
        throw std::invalid_argument("temperature_from_g: g must lie in [-1, 1], got " + std::to_string(g));
    }
    if (g == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (g == 1.0) {
        return 0.0;
    }
    if (g == -1.0) {
        return -0.0;
    }
    return 1.0 / (2.0 * std::atanh(g));
}

inline ComplexMatrix thermal_state(double g) {
    require_g_in_unit_interval(g, "thermal_state");
    return ComplexMatrix::diagonal({0.5 * (1.0 - g), 0.5 * (1.0 + g)});
}

inline void require_probability(double p, const char *who) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(who) + ": p must lie in [0, 1], got " + std::to_string(p));
    }
}

/// The pin map as a 4x4 superoperator on row-major vec(rho) =
/// (rho00, rho01, rho10, rho11).
inline ComplexMatrix pin_map_superoperator(double p) {
    require_probability(p, "pin_map_superoperator");
    return ComplexMatrix{{p, 0.0, 0.0, p}, {0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, {1.0 - p, 0.0, 0.0, 1.0 - p}};
}

/// Sends every qubit state to diag(p, 1-p). The thermal target of
/// parameter g corresponds to p = (1 - g) / 2.
inline ComplexMatrix pin_map_apply(const ComplexMatrix &rho, double p) {
    if (rho.rows() != 2 || rho.cols() != 2) {
        throw std::invalid_argument("pin_map_apply: expected a 2x2 matrix");
    }
    const ComplexMatrix n = pin_map_superoperator(p);
    const std::array<complex, 4> in{rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1)};
    std::array<complex, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            out[i] += n(i, j) * in[j];
        }
    }
    return ComplexMatrix{{out[0], out[1]}, {out[2], out[3]}};
}

/// Kraus operators {K00, K01, K10, K11} of the pin map.
inline std::vector<ComplexMatrix> pin_map_kraus(double p) {
    require_probability(p, "pin_map_kraus");
    const double a = std::sqrt(p);
    const double b = std::sqrt(1.0 - p);
    return {
        ComplexMatrix{{a, 0.0}, {0.0, 0.0}},
        ComplexMatrix{{0.0, a}, {0.0, 0.0}},
        ComplexMatrix{{0.0, 0.0}, {b, 0.0}},
        ComplexMatrix{{0.0, 0.0}, {0.0, b}},
    };
}

inline ComplexMatrix apply_kraus(const std::vector<ComplexMatrix> &kraus, const ComplexMatrix &rho) {
    ComplexMatrix out(rho.rows(), rho.cols());
    for (const auto &k : kraus) {
        out += k * rho * k.adjoint();
    }
    return out;
}

/// How a (possibly non-thermal) qubit state is mapped to a thermal parameter.
enum class ThermalAssignment {
    /// g = -r3: computational-basis populations; negative for inverted states.
    populations,
    /// g = |r|: the thermal state with the same spectrum.
    spectrum,
};

struct EffectiveG {
    double g_eff = 0.0;
    /// sqrt(r1^2 + r2^2); nonzero means the state is not diagonal.
    double coherence_residue = 0.0;
};

inline EffectiveG effective_g(const ComplexMatrix &rho, ThermalAssignment mode = ThermalAssignment::populations) {
    const BlochVector r = density_to_bloch(rho);
    const double coherence = std::hypot(r.r1, r.r2);
    if (mode == ThermalAssignment::spectrum) {
        return {r.norm(), coherence};
    }
    return {-r.r3, coherence};
}

} // namespace qthermo
