#pragma once

// Thermalizing unitary U(t,0) and Hamiltonian H_th(t) = i (dU/dt) U^dag.
//
// With X = |00><11| + |11><00| (phi variant) or |01><10| + |10><01| (psi
// variant), H_th(t) = sign * f(t) X where
//
//   f(t)     = gamma e^{-gamma t/2} / (2 sqrt(1 - e^{-gamma t}))
//   theta(t) = int_0^t f = arcsin sqrt(1 - e^{-gamma t})
//
// and U(t,0) = exp(-i sign theta(t) X). The canonical branch is sign = -1,
// which gives +i sqrt(1 - e^{-gamma t}) on the anti-diagonal corners.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qthermo/channel.hpp"
#include "qthermo/linalg.hpp"
#include "qthermo/master_equation.hpp"

namespace qthermo {

enum class ThermalizerVariant {
    phi, ///< couples |00> and |11>
    psi, ///< couples |01> and |10>
};

struct ThermalizerSpec {
    double gamma = 1.0;
    int sign = -1;
    ThermalizerVariant variant = ThermalizerVariant::phi;

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("ThermalizerSpec: gamma must be positive");
        }
        if (sign != 1 && sign != -1) {
            throw std::invalid_argument("ThermalizerSpec: sign must be +1 or -1");
        }
    }
};

/// Start of all Hamiltonian-based integrations; [0, eps] uses the closed form.
inline constexpr double kSingularityCutoff = 1e-8;

/// |00><11| + |11><00| or |01><10| + |10><01|.
inline ComplexMatrix coupling_operator(ThermalizerVariant variant) {
    ComplexMatrix x(4, 4);
    if (variant == ThermalizerVariant::phi) {
        x(0, 3) = x(3, 0) = 1.0;
    } else {
        x(1, 2) = x(2, 1) = 1.0;
    }
    return x;
}

/// f(t) magnitude; diverges as t -> 0.
inline double coupling_rate(double gamma, double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("coupling_rate: t must be > 0");
    }
    return gamma * std::exp(-0.5 * gamma * t) / (2.0 * std::sqrt(-std::expm1(-gamma * t)));
}

inline double integrated_angle(double gamma, double t) {
    require_nonnegative_time(t, "integrated_angle");
    if (std::isinf(t)) {
        return 0.5 * std::numbers::pi;
    }
    return std::atan2(std::sqrt(-std::expm1(-gamma * t)), std::exp(-0.5 * gamma * t));
}

/// Closed-form U(t,0).
inline ComplexMatrix thermal_unitary(const ThermalizerSpec &spec, double t) {
    spec.validate();
    require_nonnegative_time(t, "thermal_unitary");
    const double diag = std::exp(-0.5 * spec.gamma * t);
    const double off = std::sqrt(-std::expm1(-spec.gamma * t));
    const auto [a, b] = spec.variant == ThermalizerVariant::phi ? std::pair<std::size_t, std::size_t>{0, 3}
                                                                : std::pair<std::size_t, std::size_t>{1, 2};
    ComplexMatrix u = ComplexMatrix::identity(4);
    u(a, a) = diag;
    u(b, b) = diag;
    u(a, b) = -kI * static_cast<double>(spec.sign) * off;
    u(b, a) = u(a, b);
    return u;
}

inline ComplexMatrix h_th(const ThermalizerSpec &spec, double t) {
    spec.validate();
    if (!(t > 0.0)) {
        throw std::invalid_argument("h_th: t must be > 0 (f diverges at t = 0)");
    }
    return (spec.sign * coupling_rate(spec.gamma, t)) * coupling_operator(spec.variant);
}

/// Channel parameter sets whose ancilla simulation reproduces the master
/// equation channel at (gamma, g, t):
///   [0] lambda = g, alpha = delta = acos e^{-gamma t/2}, beta = 0, xi = 0
///       (ancilla Bloch (0,0,+g), phi-variant unitary);
///   [1] lambda = g, alpha = -delta = acos e^{-gamma t/2}, beta = 0, xi = pi
///       (ancilla Bloch (0,0,-g), psi-variant unitary).
/// eta is free in both; it is set to 0. Each set is checked against
/// affine_from_master before being returned.
inline std::vector<ChannelParams> solve_thermal_params(double gamma, double g, double t) {
    const ThermalParam th{g, gamma};
    th.validate();
    require_nonnegative_time(t, "solve_thermal_params");
    const double angle = std::acos(std::exp(-0.5 * gamma * t));

    std::vector<ChannelParams> sets{
        {.alpha = angle, .beta = 0.0, .delta = angle, .eta = 0.0, .xi = 0.0, .lambda = g},
        {.alpha = angle, .beta = 0.0, .delta = -angle, .eta = 0.0, .xi = std::numbers::pi, .lambda = g},
    };
    const AffineChannel target = affine_from_master(th, t);
    for (const auto &p : sets) {
        if (affine_from_params(p).max_abs_diff(target) > 1e-10) {
            throw std::logic_error("solve_thermal_params: parameter set does not reproduce the master equation");
        }
    }
    return sets;
}

namespace detail {

/// Step k (1-based) of the mesh uniform in sqrt(s): s(u) = (sqrt(eps) +
/// (sqrt(t) - sqrt(eps)) u)^2, u = k/n. The midpoint is taken in u and the
/// step length is s'(u_mid) du; f(s) s'(u) is smooth, so the rule stays
/// second order across the 1/sqrt(s) singularity.
struct GradedStep {
    double s_mid = 0.0;
    double ds = 0.0;
};

inline GradedStep graded_step(double eps, double t, int steps, int k) {
    const double r0 = std::sqrt(eps);
    const double span = std::sqrt(t) - r0;
    const double du = 1.0 / steps;
    const double r = r0 + span * (k - 0.5) * du;
    return {r * r, 2.0 * r * span * du};
}

} // namespace detail

/// Time-ordered product of exp(-i H_th(s) ds) over [eps, t], composed with
/// the closed-form U(eps, 0), on the graded mesh of detail::graded_step.
inline ComplexMatrix reconstruct_unitary_from_h(const ThermalizerSpec &spec, double t, int steps) {
    spec.validate();
    if (steps < 1) {
        throw std::invalid_argument("reconstruct_unitary_from_h: steps must be >= 1");
    }
    require_nonnegative_time(t, "reconstruct_unitary_from_h");
    const double eps = kSingularityCutoff;
    if (t <= eps) {
        return thermal_unitary(spec, t);
    }
    ComplexMatrix u = thermal_unitary(spec, eps);
    for (int k = 1; k <= steps; ++k) {
        const auto step = detail::graded_step(eps, t, steps, k);
        u = exp_i_hermitian(h_th(spec, step.s_mid), step.ds) * u;
    }
    return u;
}

} // namespace qthermo
