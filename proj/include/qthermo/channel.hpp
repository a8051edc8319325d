#pragma once

// Single-qubit channels simulable with a single-qubit mixed ancilla.
//
// Tensor order is always system (x) ancilla. The ancilla is
//   rho_e = (1 - lambda) I/2 + lambda |phi><phi|,
//   |phi> = cos(xi/2)|0> + exp(-i eta) sin(xi/2)|1>,
// whose Bloch vector is lambda (sin xi cos eta, -sin xi sin eta, cos xi).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qthermo/linalg.hpp"
#include "qthermo/master_equation.hpp"
#include "qthermo/qubit.hpp"

namespace qthermo {

struct ChannelParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double xi = 0.0;
    double lambda = 0.0;

    void validate() const {
        if (!(lambda >= 0.0 && lambda <= 1.0)) {
            throw std::invalid_argument("ChannelParams: lambda must lie in [0, 1]");
        }
    }
};

struct AncillaState {
    double lambda = 0.0;
    double xi = 0.0;
    double eta = 0.0;

    static AncillaState of(const ChannelParams &p) { return {p.lambda, p.xi, p.eta}; }
};

using KrausSet = std::vector<ComplexMatrix>;

/// 4x4 Choi state (Lambda (x) id)(|phi+><phi+|); the identity channel maps to
/// |phi+><phi+| itself. Index (a, i) -> 2a + i with a the output, i the
/// reference qubit.
struct ChoiMatrix {
    ComplexMatrix matrix;
};

/// The two-qubit unitary in its block form.
inline ComplexMatrix parametrized_unitary(const ChannelParams &p) {
    const double cp = std::cos(0.5 * (p.alpha + p.delta));
    const double sp = std::sin(0.5 * (p.alpha + p.delta));
    const double cm = std::cos(0.5 * (p.alpha - p.delta));
    const double sm = std::sin(0.5 * (p.alpha - p.delta));
    const complex e = std::exp(-kI * p.beta);
    return ComplexMatrix{{cp, 0.0, 0.0, kI * sp},
                         {0.0, e * cm, kI * e * sm, 0.0},
                         {0.0, kI * e * sm, e * cm, 0.0},
                         {kI * sp, 0.0, 0.0, cp}};
}

/// Same unitary as K0 I(x)I + K1 s1(x)s1 + K2 s2(x)s2 + K3 s3(x)s3.
inline ComplexMatrix parametrized_unitary_pauli(const ChannelParams &p) {
    const double cp = std::cos(0.5 * (p.alpha + p.delta));
    const double sp = std::sin(0.5 * (p.alpha + p.delta));
    const double cm = std::cos(0.5 * (p.alpha - p.delta));
    const double sm = std::sin(0.5 * (p.alpha - p.delta));
    const complex e = std::exp(-kI * p.beta);
    const complex k0 = 0.5 * (cp + e * cm);
    const complex k1 = 0.5 * kI * (sp + e * sm);
    const complex k2 = -0.5 * kI * (sp - e * sm);
    const complex k3 = 0.5 * (cp - e * cm);
    return k0 * kron(pauli::I(), pauli::I()) + k1 * kron(pauli::X(), pauli::X()) +
           k2 * kron(pauli::Y(), pauli::Y()) + k3 * kron(pauli::Z(), pauli::Z());
}

inline ComplexMatrix ancilla_density(const AncillaState &a) {
    if (!(a.lambda >= 0.0 && a.lambda <= 1.0)) {
        throw std::invalid_argument("ancilla_density: lambda must lie in [0, 1]");
    }
    const std::vector<complex> phi{std::cos(0.5 * a.xi), std::exp(-kI * a.eta) * std::sin(0.5 * a.xi)};
    return (0.5 * (1.0 - a.lambda)) * ComplexMatrix::identity(2) + a.lambda * ComplexMatrix::outer(phi, phi);
}

/// Closed-form (M, C) of the channel induced by parametrized_unitary(p) with
/// the ancilla of p.
inline AffineChannel affine_from_params(const ChannelParams &p) {
    const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    const double cb = std::cos(p.beta), sb = std::sin(p.beta);
    const double cd = std::cos(p.delta), sd = std::sin(p.delta);
    const double ce = std::cos(p.eta), se = std::sin(p.eta);
    const double cx = std::cos(p.xi), sx = std::sin(p.xi);
    const double l = p.lambda;

    AffineChannel ch;
    ch.M = {{
        {cd * cb, l * cd * sb * cx, -l * sd * cb * se * sx},
        {-l * ca * sb * cx, ca * cb, l * sa * cb * ce * sx},
        // M31 is +; checked against the direct Tr_e[U (rho (x) rho_e) U^dag].
        {l * ca * sd * se * sx, -l * sa * cd * sx * ce, ca * cd},
    }};
    ch.C = {-l * sd * sb * sx * ce, -l * sa * sb * sx * se, -l * sa * sd * cx};
    return ch;
}

/// Tr_e[U (rho_s (x) rho_e) U^dag]; rho_s may be any 2x2 operator.
inline ComplexMatrix evolve_system(const ComplexMatrix &u, const ComplexMatrix &rho_s, const ComplexMatrix &rho_e) {
    return partial_trace(u * kron(rho_s, rho_e) * u.adjoint(), {2, 2}, {0});
}

/// Tr_s[U (rho_s (x) rho_e) U^dag]: the ancilla after the interaction.
inline ComplexMatrix ancilla_after(const ComplexMatrix &u, const ComplexMatrix &rho_s, const ComplexMatrix &rho_e) {
    return partial_trace(u * kron(rho_s, rho_e) * u.adjoint(), {2, 2}, {1});
}

inline ChoiMatrix choi_from_map(const auto &channel_map) {
    ComplexMatrix choi(4, 4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            ComplexMatrix unit(2, 2);
            unit(i, j) = 1.0;
            const ComplexMatrix out = channel_map(unit);
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) {
                    choi(2 * a + i, 2 * b + j) = 0.5 * out(a, b);
                }
            }
        }
    }
    return {choi};
}

inline ChoiMatrix choi_of(const AffineChannel &ch) {
    return choi_from_map([&](const ComplexMatrix &x) { return ch.apply(x); });
}

inline ChoiMatrix choi_of(const KrausSet &kraus) {
    return choi_from_map([&](const ComplexMatrix &x) { return apply_kraus(kraus, x); });
}

inline double choi_distance(const ChoiMatrix &a, const ChoiMatrix &b) { return max_abs_diff(a.matrix, b.matrix); }

inline bool channels_equal(const ChoiMatrix &a, const ChoiMatrix &b, double tol) { return choi_distance(a, b) <= tol; }

template <class A, class B>
bool channels_equal(const A &a, const B &b, double tol) {
    return channels_equal(choi_of(a), choi_of(b), tol);
}

/// Kraus operators from the eigendecomposition of a Choi matrix; eigenvalues
/// below `cutoff` are dropped.
inline KrausSet kraus_from_choi(const ChoiMatrix &choi, double cutoff = 1e-14) {
    const auto eig = eig_hermitian(choi.matrix);
    KrausSet out;
    for (std::size_t k = eig.eigenvalues.size(); k-- > 0;) {
        const double ev = eig.eigenvalues[k];
        if (ev <= cutoff) {
            continue;
        }
        const double w = std::sqrt(2.0 * ev);
        ComplexMatrix kr(2, 2);
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t i = 0; i < 2; ++i) {
                kr(a, i) = w * eig.eigenvectors(2 * a + i, k);
            }
        }
        out.push_back(std::move(kr));
    }
    return out;
}

struct SimulatedChannel {
    AffineChannel affine;
    KrausSet kraus;
};

/// Channel on the system induced by a two-qubit unitary and a fixed ancilla.
inline SimulatedChannel channel_from_unitary(const ComplexMatrix &u, const ComplexMatrix &ancilla) {
    if (u.rows() != 4 || !is_unitary(u, 1e-10)) {
        throw std::invalid_argument("channel_from_unitary: expected a 4x4 unitary");
    }
    if (ancilla.rows() != 2 || !is_density_matrix(ancilla, 1e-10)) {
        throw std::invalid_argument("channel_from_unitary: ancilla is not a valid qubit state");
    }
    auto map = [&](const ComplexMatrix &x) { return evolve_system(u, x, ancilla); };

    SimulatedChannel out;
    const BlochVector offset = bloch_components(map(0.5 * ComplexMatrix::identity(2)));
    out.affine.C = {offset.r1, offset.r2, offset.r3};
    const BlochVector axes[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    for (int j = 0; j < 3; ++j) {
        const BlochVector image = bloch_components(map(bloch_to_density(axes[j])));
        out.affine.M[0][j] = image.r1 - offset.r1;
        out.affine.M[1][j] = image.r2 - offset.r2;
        out.affine.M[2][j] = image.r3 - offset.r3;
    }
    out.kraus = kraus_from_choi(choi_from_map(map));
    return out;
}

/// max |sum K^dag K - I|.
inline double kraus_completeness_error(const KrausSet &kraus) {
    ComplexMatrix s(2, 2);
    for (const auto &k : kraus) {
        s += k.adjoint() * k;
    }
    return max_abs_diff(s, ComplexMatrix::identity(2));
}

} // namespace qthermo
