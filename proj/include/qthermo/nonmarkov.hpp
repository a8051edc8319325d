#pragma once

// Qubit A coupled to qubit B through H_AB(t) = omega(t) sz (x) sz (hbar = 1).
//
// With f(t) = int_0^t omega, the reduced dynamics of A keeps r_z and
// multiplies the transverse part r_x - i r_y by cos 2f - i g_z sin 2f, where
// g_z is B's Bloch z-component. The trace distance between two evolved
// states is therefore
//
//   sqrt( dz^2 + (dx^2 + dy^2) (cos^2 2f + g_z^2 sin^2 2f) ).
//
// A bracket with g_z^2 sin^2 f (single angle) would be wrong: it disagrees
// with both the direct evaluation and the derivative
// -2 sin(4f) f' (1 - g_z^2) (dx^2 + dy^2) of the squared distance.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qthermo/linalg.hpp"
#include "qthermo/qubit.hpp"

namespace qthermo {

struct ConstantOmega {
    double omega0 = 1.0;
};

/// Piecewise-linear omega(t) through (t_k, omega_k); t_0 must be 0.
struct OmegaTable {
    std::vector<double> t;
    std::vector<double> omega;

    void validate() const {
        if (t.size() < 2 || t.size() != omega.size()) {
            throw std::invalid_argument("OmegaTable: need at least two (t, omega) samples");
        }
        if (t.front() != 0.0) {
            throw std::invalid_argument("OmegaTable: table must start at t = 0");
        }
        for (std::size_t k = 1; k < t.size(); ++k) {
            if (!(t[k] > t[k - 1])) {
                throw std::invalid_argument("OmegaTable: sample times must be strictly increasing");
            }
        }
    }
};

struct DephasingSpec {
    std::variant<ConstantOmega, OmegaTable> omega = ConstantOmega{};
    double g_z = 0.0;

    void validate() const {
        if (!(std::abs(g_z) <= 1.0)) {
            throw std::invalid_argument("DephasingSpec: |g_z| must be <= 1");
        }
        if (const auto *table = std::get_if<OmegaTable>(&omega)) {
            table->validate();
        }
    }
};

namespace detail {
inline void require_in_table(const OmegaTable &table, double t) {
    if (t > table.t.back()) {
        throw std::invalid_argument("omega table does not cover the requested time");
    }
}
} // namespace detail

inline double omega_at(const DephasingSpec &spec, double t) {
    if (const auto *c = std::get_if<ConstantOmega>(&spec.omega)) {
        return c->omega0;
    }
    const auto &table = std::get<OmegaTable>(spec.omega);
    detail::require_in_table(table, t);
    const auto it = std::upper_bound(table.t.begin(), table.t.end(), t);
    if (it == table.t.end()) {
        return table.omega.back();
    }
    const std::size_t k = static_cast<std::size_t>(it - table.t.begin());
    const double w = (t - table.t[k - 1]) / (table.t[k] - table.t[k - 1]);
    return (1.0 - w) * table.omega[k - 1] + w * table.omega[k];
}

/// f(t) = int_0^t omega; trapezoidal over the table (exact for the
/// piecewise-linear interpolant).
inline double f_of_t(const DephasingSpec &spec, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("f_of_t: t must be >= 0");
    }
    if (const auto *c = std::get_if<ConstantOmega>(&spec.omega)) {
        return c->omega0 * t;
    }
    const auto &table = std::get<OmegaTable>(spec.omega);
    detail::require_in_table(table, t);
    double acc = 0.0;
    for (std::size_t k = 1; k < table.t.size() && table.t[k - 1] < t; ++k) {
        const double hi = std::min(t, table.t[k]);
        acc += 0.5 * (table.omega[k - 1] + omega_at(spec, hi)) * (hi - table.t[k - 1]);
    }
    return acc;
}

/// rho_A(t) = cos^2 f rho + sin^2 f Z rho Z - (i/2) sin 2f g_z Z rho + (i/2) sin 2f g_z rho Z.
inline ComplexMatrix reduced_state_A(const BlochVector &r0, const DephasingSpec &spec, double t) {
    spec.validate();
    const double f = f_of_t(spec, t);
    const ComplexMatrix rho = bloch_to_density(r0);
    const ComplexMatrix z = pauli::Z();
    const double c2 = std::cos(f) * std::cos(f);
    const double s2 = std::sin(f) * std::sin(f);
    const complex k = 0.5 * kI * std::sin(2.0 * f) * spec.g_z;
    return c2 * rho + s2 * (z * rho * z) - k * (z * rho) + k * (rho * z);
}

/// The factor multiplying r_x - i r_y.
inline complex transverse_factor(const DephasingSpec &spec, double t) {
    const double f = f_of_t(spec, t);
    return {std::cos(2.0 * f), -spec.g_z * std::sin(2.0 * f)};
}

inline double trace_distance_A(const BlochVector &r0, const BlochVector &s0, const DephasingSpec &spec, double t) {
    spec.validate();
    const BlochVector d = r0 - s0;
    const double f = f_of_t(spec, t);
    const double c = std::cos(2.0 * f);
    const double s = std::sin(2.0 * f);
    const double bracket = c * c + spec.g_z * spec.g_z * s * s;
    return std::sqrt(d.r3 * d.r3 + (d.r1 * d.r1 + d.r2 * d.r2) * bracket);
}

struct DistanceSample {
    double t = 0.0;
    double distance = 0.0;
    bool increasing = false; ///< distance rose from the previous grid point
};

struct Interval {
    double t_start = 0.0;
    double t_end = 0.0;
};

inline constexpr double kIncreaseThreshold = 1e-12;

inline void require_increasing_grid(const std::vector<double> &t_grid) {
    if (t_grid.size() < 2) {
        throw std::invalid_argument("time grid needs at least two points");
    }
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > t_grid[k - 1])) {
            throw std::invalid_argument("time grid must be strictly increasing");
        }
    }
}

inline std::vector<DistanceSample> scan_trace_distance(const BlochVector &r0, const BlochVector &s0,
                                                       const DephasingSpec &spec, const std::vector<double> &t_grid) {
    require_increasing_grid(t_grid);
    std::vector<DistanceSample> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        const double d = trace_distance_A(r0, s0, spec, t);
        const bool up = !out.empty() && d - out.back().distance > kIncreaseThreshold;
        out.push_back({t, d, up});
    }
    return out;
}

/// Maximal runs of grid segments over which the trace distance increases.
/// A nonempty result witnesses non-Markovian (information backflow) dynamics.
inline std::vector<Interval> increase_intervals(const std::vector<DistanceSample> &samples) {
    std::vector<Interval> out;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (!samples[k].increasing) {
            continue;
        }
        if (!out.empty() && out.back().t_end == samples[k - 1].t) {
            out.back().t_end = samples[k].t;
        } else {
            out.push_back({samples[k - 1].t, samples[k].t});
        }
    }
    return out;
}

inline std::vector<Interval> nonmarkov_witness(const BlochVector &r0, const BlochVector &s0, const DephasingSpec &spec,
                                               const std::vector<double> &t_grid) {
    return increase_intervals(scan_trace_distance(r0, s0, spec, t_grid));
}

} // namespace qthermo
