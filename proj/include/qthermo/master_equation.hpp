#pragma once

// Quantum-optical master equation for a qubit in a bosonic thermal bath:
//
//   drho/dt = gamma0 (N+1) D[sigma_-] rho + gamma0 N D[sigma_+] rho
//
// with gamma0 (N+1) = gamma (1+g)/2 and gamma0 N = gamma (1-g)/2, so g = 0
// (infinite temperature) needs no special casing. The free evolution is
// omitted; an optional H0 term can be supplied to rk4_lindblad.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "qthermo/linalg.hpp"
#include "qthermo/qubit.hpp"

namespace qthermo {

/// Qubit channel in Bloch form: r -> M r + C.
struct AffineChannel {
    std::array<std::array<double, 3>, 3> M{};
    std::array<double, 3> C{};

    static AffineChannel identity() {
        AffineChannel ch;
        for (int i = 0; i < 3; ++i) {
            ch.M[i][i] = 1.0;
        }
        return ch;
    }

    BlochVector apply(const BlochVector &r) const {
        const std::array<double, 3> in{r.r1, r.r2, r.r3};
        std::array<double, 3> out = C;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                out[i] += M[i][j] * in[j];
            }
        }
        return {out[0], out[1], out[2]};
    }

    /// Linear extension to arbitrary 2x2 operators X = (a0 I + a.sigma)/2.
    ComplexMatrix apply(const ComplexMatrix &x) const {
        const complex a0 = x(0, 0) + x(1, 1);
        const std::array<complex, 3> a{x(0, 1) + x(1, 0), kI * (x(0, 1) - x(1, 0)), x(0, 0) - x(1, 1)};
        std::array<complex, 3> b{};
        for (int i = 0; i < 3; ++i) {
            b[i] = a0 * C[i];
            for (int j = 0; j < 3; ++j) {
                b[i] += M[i][j] * a[j];
            }
        }
        return ComplexMatrix{{0.5 * (a0 + b[2]), 0.5 * (b[0] - kI * b[1])},
                             {0.5 * (b[0] + kI * b[1]), 0.5 * (a0 - b[2])}};
    }

    double max_abs_diff(const AffineChannel &o) const {
        double m = 0.0;
        for (int i = 0; i < 3; ++i) {
            m = std::max(m, std::abs(C[i] - o.C[i]));
            for (int j = 0; j < 3; ++j) {
                m = std::max(m, std::abs(M[i][j] - o.M[i][j]));
            }
        }
        return m;
    }
};

/// Generalized amplitude damping parameters; p is absent when B = 0.
struct GadParams {
    double B = 0.0;
    std::optional<double> p;
};

inline void require_nonnegative_time(double t, const char *who) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument(std::string(who) + ": time must be >= 0");
    }
}

inline BlochVector analytic_bloch(const BlochVector &r0, const ThermalParam &th, double t) {
    th.validate();
    require_nonnegative_time(t, "analytic_bloch");
    const double half = std::exp(-0.5 * th.gamma * t);
    const double full = std::exp(-th.gamma * t);
    return {r0.r1 * half, r0.r2 * half, r0.r3 * full + th.g * std::expm1(-th.gamma * t)};
}

inline AffineChannel affine_from_master(const ThermalParam &th, double t) {
    th.validate();
    require_nonnegative_time(t, "affine_from_master");
    const double half = std::exp(-0.5 * th.gamma * t);
    const double full = std::exp(-th.gamma * t);
    AffineChannel ch;
    ch.M[0][0] = half;
    ch.M[1][1] = half;
    ch.M[2][2] = full;
    ch.C[2] = th.g * std::expm1(-th.gamma * t);
    return ch;
}

/// Default RK4 step count: ceil(1e4 * gamma * t), at least 1, at most 1e6.
inline int default_rk4_steps(const ThermalParam &th, double t) {
    const double n = std::ceil(1e4 * th.gamma * t);
    return static_cast<int>(std::clamp(n, 1.0, 1e6));
}

namespace detail {

/// Stack-allocated 2x2 operator for the RK4 inner loop.
struct Mat2 {
    std::array<complex, 4> a{};

    static Mat2 from(const ComplexMatrix &m) { return {{m(0, 0), m(0, 1), m(1, 0), m(1, 1)}}; }
    ComplexMatrix to_matrix() const { return ComplexMatrix{{a[0], a[1]}, {a[2], a[3]}}; }
    Mat2 adjoint() const { return {{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}}; }

    friend Mat2 operator*(const Mat2 &x, const Mat2 &y) {
        return {{x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
                 x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]}};
    }
    friend Mat2 operator+(const Mat2 &x, const Mat2 &y) {
        return {{x.a[0] + y.a[0], x.a[1] + y.a[1], x.a[2] + y.a[2], x.a[3] + y.a[3]}};
    }
    friend Mat2 operator-(const Mat2 &x, const Mat2 &y) {
        return {{x.a[0] - y.a[0], x.a[1] - y.a[1], x.a[2] - y.a[2], x.a[3] - y.a[3]}};
    }
    friend Mat2 operator*(complex s, const Mat2 &x) { return {{s * x.a[0], s * x.a[1], s * x.a[2], s * x.a[3]}}; }
    friend Mat2 operator*(double s, const Mat2 &x) { return {{s * x.a[0], s * x.a[1], s * x.a[2], s * x.a[3]}}; }
};

/// D[L] rho = L rho L^dag - {L^dag L, rho}/2, summed with rates, plus -i[H0, rho].
struct LindbladGenerator {
    Mat2 jump[2];
    Mat2 jump_dag[2];
    Mat2 decay[2]; // L^dag L
    double rate[2];
    bool has_h = false;
    Mat2 h;

    LindbladGenerator(const ThermalParam &th, const ComplexMatrix *free_hamiltonian) {
        jump[0] = Mat2::from(pauli::lower());
        jump[1] = Mat2::from(pauli::raise());
        for (int k = 0; k < 2; ++k) {
            jump_dag[k] = jump[k].adjoint();
            decay[k] = jump_dag[k] * jump[k];
        }
        rate[0] = 0.5 * th.gamma * (1.0 + th.g);
        rate[1] = 0.5 * th.gamma * (1.0 - th.g);
        if (free_hamiltonian != nullptr) {
            has_h = true;
            h = Mat2::from(*free_hamiltonian);
        }
    }

    Mat2 operator()(const Mat2 &rho) const {
        Mat2 d;
        for (int k = 0; k < 2; ++k) {
            d = d + rate[k] * (jump[k] * rho * jump_dag[k] - 0.5 * (decay[k] * rho + rho * decay[k]));
        }
        if (has_h) {
            d = d + (-kI) * (h * rho - rho * h);
        }
        return d;
    }
};

} // namespace detail

/// Right-hand side of the master equation (plus -i[H0, rho] when given).
inline ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, const ThermalParam &th,
                                  const ComplexMatrix *free_hamiltonian = nullptr) {
    return detail::LindbladGenerator(th, free_hamiltonian)(detail::Mat2::from(rho)).to_matrix();
}

/// Fixed-step classical RK4 integration of the master equation from 0 to t.
inline ComplexMatrix rk4_lindblad(const ComplexMatrix &rho0, const ThermalParam &th, double t, int steps,
                                  const ComplexMatrix *free_hamiltonian = nullptr) {
    th.validate();
    require_nonnegative_time(t, "rk4_lindblad");
    if (steps < 1) {
        throw std::invalid_argument("rk4_lindblad: steps must be >= 1");
    }
    if (rho0.rows() != 2 || !is_density_matrix(rho0, 1e-10)) {
        throw std::invalid_argument("rk4_lindblad: initial state is not a valid qubit density matrix");
    }
    if (t == 0.0) {
        return rho0;
    }
    const detail::LindbladGenerator rhs(th, free_hamiltonian);
    const double h = t / steps;
    detail::Mat2 rho = detail::Mat2::from(rho0);
    for (int k = 0; k < steps; ++k) {
        const auto k1 = rhs(rho);
        const auto k2 = rhs(rho + (0.5 * h) * k1);
        const auto k3 = rhs(rho + (0.5 * h) * k2);
        const auto k4 = rhs(rho + h * k3);
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (const auto &x : rho.a) {
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
                throw std::runtime_error("rk4_lindblad: non-finite state at step " + std::to_string(k));
            }
        }
    }
    return rho.to_matrix();
}

inline ComplexMatrix rk4_lindblad(const ComplexMatrix &rho0, const ThermalParam &th, double t) {
    return rk4_lindblad(rho0, th, t, default_rk4_steps(th, t));
}

/// Reads (B, p) off a channel of generalized-amplitude-damping shape:
/// M = diag(sqrt(1-B), sqrt(1-B), 1-B), C = (0, 0, B(2p-1)).
inline GadParams gad_identify(const AffineChannel &ch) {
    constexpr double tol = 1e-10;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j && std::abs(ch.M[i][j]) > tol) {
                throw std::invalid_argument("gad_identify: M is not diagonal");
            }
        }
    }
    const double m33 = ch.M[2][2];
    if (m33 < -tol || m33 > 1.0 + tol) {
        throw std::invalid_argument("gad_identify: M33 outside [0, 1]");
    }
    const double root = std::sqrt(std::max(m33, 0.0));
    if (std::abs(ch.M[0][0] - root) > tol || std::abs(ch.M[1][1] - root) > tol) {
        throw std::invalid_argument("gad_identify: transverse entries are not sqrt(M33)");
    }
    if (std::abs(ch.C[0]) > tol || std::abs(ch.C[1]) > tol) {
        throw std::invalid_argument("gad_identify: C has transverse components");
    }
    GadParams out;
    out.B = std::clamp(1.0 - m33, 0.0, 1.0);
    if (out.B > 0.0) {
        const double p = 0.5 * (ch.C[2] / out.B + 1.0);
        if (p < -tol || p > 1.0 + tol) {
            throw std::invalid_argument("gad_identify: implied p outside [0, 1]");
        }
        out.p = p;
    }
    return out;
}

} // namespace qthermo
