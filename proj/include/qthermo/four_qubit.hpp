#pragma once

// Two system qubits A, B, each coupled to its own bath qubit (A1, B1) by a
// thermalizing Hamiltonian, plus an A-B coupling of the same form.
//
// Qubit order is A1 (x) A (x) B (x) B1 (A1 is the most significant bit).
// H(t) = a(t) X_{A1A} + b(t) X_{BB1} + c(t) X_{AB} with X = |00><11| + h.c.
// on the indicated pair, and the integrated Hamiltonian is
// Hbar(t) = theta_1 X_{A1A} + theta_2 X_{BB1} + theta_3 X_{AB}.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qthermo/linalg.hpp"
#include "qthermo/qubit.hpp"
#include "qthermo/thermal_hamiltonian.hpp"

namespace qthermo {

struct InitStateSpec {
    enum class Kind { ket00, bell_phi_plus, pure, thermal_pair };

    Kind kind = Kind::ket00;
    // pure: |Psi> = cos psi |00> + sin psi cos theta |01>
    //             + sin psi sin theta cos phi |10> + sin psi sin theta sin phi |11>
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    // thermal_pair: thermal_state(gA) (x) thermal_state(gB)
    double gA = 0.0;
    double gB = 0.0;

    static InitStateSpec ket00() { return {}; }
    static InitStateSpec bell() { return {.kind = Kind::bell_phi_plus}; }
    static InitStateSpec pure_state(double psi, double theta, double phi) {
        return {.kind = Kind::pure, .psi = psi, .theta = theta, .phi = phi};
    }
    static InitStateSpec thermal(double gA, double gB) { return {.kind = Kind::thermal_pair, .gA = gA, .gB = gB}; }

    void validate() const {
        constexpr double pi = std::numbers::pi;
        if (kind == Kind::pure) {
            if (!(psi >= 0.0 && psi <= pi) || !(theta >= 0.0 && theta <= pi) || !(phi >= 0.0 && phi <= 2.0 * pi)) {
                throw std::invalid_argument("InitStateSpec: pure-state angles out of range");
            }
        }
        if (kind == Kind::thermal_pair) {
            require_g_in_unit_interval(gA, "InitStateSpec");
            require_g_in_unit_interval(gB, "InitStateSpec");
        }
    }

    /// rho_AB(0).
    ComplexMatrix two_qubit_state() const {
        validate();
        switch (kind) {
        case Kind::ket00: {
            ComplexMatrix m(4, 4);
            m(0, 0) = 1.0;
            return m;
        }
        case Kind::bell_phi_plus: {
            const double s = 1.0 / std::numbers::sqrt2;
            const std::vector<complex> v{s, 0.0, 0.0, s};
            return ComplexMatrix::outer(v, v);
        }
        case Kind::pure: {
            const std::vector<complex> v{std::cos(psi), std::sin(psi) * std::cos(theta),
                                         std::sin(psi) * std::sin(theta) * std::cos(phi),
                                         std::sin(psi) * std::sin(theta) * std::sin(phi)};
            return ComplexMatrix::outer(v, v);
        }
        case Kind::thermal_pair:
            return kron(thermal_state(gA), thermal_state(gB));
        }
        throw std::logic_error("InitStateSpec: unknown kind");
    }
};

enum class Propagator {
    integrated,   ///< exp(-i Hbar(t))
    time_ordered, ///< product of short-time exponentials of H(s)
};

struct GRange {
    double lo = 0.05;
    double hi = 0.95;
};

struct SweepConfig {
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double gamma3 = 1.0;
    double t_final = 1000.0;
    int grid_n = 16;
    GRange g1_range;
    GRange g2_range;
    InitStateSpec init;
    Propagator propagator = Propagator::integrated;
    int time_ordered_steps = 100000;
    double tol_class = 1e-9;
    double coherence_threshold = 1e-6;
    ThermalAssignment assignment = ThermalAssignment::populations;
    /// Worker threads for run_sweep; 0 means hardware concurrency.
    unsigned threads = 0;

    void validate() const {
        for (double g : {gamma1, gamma2, gamma3}) {
            if (!(g >= 0.0) || !std::isfinite(g)) {
                throw std::invalid_argument("SweepConfig: rates must be finite and >= 0");
            }
        }
        if (!(t_final > 0.0)) {
            throw std::invalid_argument("SweepConfig: t_final must be > 0");
        }
        if (grid_n < 2) {
            throw std::invalid_argument("SweepConfig: grid_n must be >= 2");
        }
        for (const auto &r : {g1_range, g2_range}) {
            if (!(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 1.0)) {
                throw std::invalid_argument("SweepConfig: g ranges must be subintervals of (0, 1]");
            }
        }
        if (time_ordered_steps < 1) {
            throw std::invalid_argument("SweepConfig: time_ordered_steps must be >= 1");
        }
        init.validate();
    }
};

enum class PhaseClass { both_cool, a_cool_b_heat, a_heat_b_cool, both_heat, anomalous };

inline const char *to_string(PhaseClass c) {
    switch (c) {
    case PhaseClass::both_cool:
        return "both_cool";
    case PhaseClass::a_cool_b_heat:
        return "a_cool_b_heat";
    case PhaseClass::a_heat_b_cool:
        return "a_heat_b_cool";
    case PhaseClass::both_heat:
        return "both_heat";
    case PhaseClass::anomalous:
        return "anomalous";
    }
    return "anomalous";
}

struct PhaseCell {
    double g1 = 0.0;
    double g2 = 0.0;
    double T_bath_A = 0.0;
    double T_bath_B = 0.0;
    double gA_init = 0.0;
    double gB_init = 0.0;
    double gA_final = 0.0;
    double gB_final = 0.0;
    double coherA = 0.0;
    double coherB = 0.0;
    PhaseClass cls = PhaseClass::anomalous;
};

namespace detail {

inline const ComplexMatrix &pair_coupling(int which) {
    static const ComplexMatrix x4 = coupling_operator(ThermalizerVariant::phi);
    static const ComplexMatrix a1a = kron(x4, ComplexMatrix::identity(4));
    static const ComplexMatrix bb1 = kron(ComplexMatrix::identity(4), x4);
    static const ComplexMatrix ab = kron({pauli::I(), x4, pauli::I()});
    switch (which) {
    case 0:
        return a1a;
    case 1:
        return bb1;
    default:
        return ab;
    }
}

inline double rate_or_zero(double gamma, double t) { return gamma == 0.0 ? 0.0 : coupling_rate(gamma, t); }

inline ComplexMatrix combine(double a, double b, double c) {
    return a * pair_coupling(0) + b * pair_coupling(1) + c * pair_coupling(2);
}

} // namespace detail

/// X_{A1A}, X_{BB1}, X_{AB} as 16x16 operators.
inline const ComplexMatrix &coupling_a1a() { return detail::pair_coupling(0); }
inline const ComplexMatrix &coupling_bb1() { return detail::pair_coupling(1); }
inline const ComplexMatrix &coupling_ab() { return detail::pair_coupling(2); }

inline ComplexMatrix total_hbar(double gamma1, double gamma2, double gamma3, double t) {
    require_nonnegative_time(t, "total_hbar");
    return detail::combine(integrated_angle(gamma1, t), integrated_angle(gamma2, t), integrated_angle(gamma3, t));
}

inline ComplexMatrix total_hbar(const SweepConfig &cfg, double t) {
    return total_hbar(cfg.gamma1, cfg.gamma2, cfg.gamma3, t);
}

/// H(t) itself (t > 0).
inline ComplexMatrix total_h(const SweepConfig &cfg, double t) {
    return detail::combine(detail::rate_or_zero(cfg.gamma1, t), detail::rate_or_zero(cfg.gamma2, t),
                           detail::rate_or_zero(cfg.gamma3, t));
}

/// U(t, 0) under the configured propagator.
inline ComplexMatrix propagator(const SweepConfig &cfg, double t) {
    require_nonnegative_time(t, "propagator");
    if (cfg.propagator == Propagator::integrated || t <= kSingularityCutoff) {
        return exp_i_hermitian(total_hbar(cfg, t), 1.0);
    }
    const double eps = kSingularityCutoff;
    ComplexMatrix u = exp_i_hermitian(total_hbar(cfg, eps), 1.0);
    const int steps = cfg.time_ordered_steps;
    for (int k = 1; k <= steps; ++k) {
        const auto step = detail::graded_step(eps, t, steps, k);
        u = exp_i_hermitian(total_h(cfg, step.s_mid), step.ds) * u;
    }
    return u;
}

inline ComplexMatrix evolve(const SweepConfig &cfg, const ComplexMatrix &rho0, double t) {
    if (rho0.rows() != 16 || rho0.cols() != 16) {
        throw std::invalid_argument("evolve: expected a 16x16 density matrix");
    }
    const ComplexMatrix u = propagator(cfg, t);
    return u * rho0 * u.adjoint();
}

/// rho_A1(0) (x) rho_AB(0) (x) rho_B1(0) with bath qubits at Bloch (0,0,+g).
inline ComplexMatrix initial_state(const SweepConfig &cfg, double g1, double g2) {
    require_g_in_unit_interval(g1, "initial_state");
    require_g_in_unit_interval(g2, "initial_state");
    const ComplexMatrix bath_a = bloch_to_density({0.0, 0.0, g1});
    const ComplexMatrix bath_b = bloch_to_density({0.0, 0.0, g2});
    return kron({bath_a, cfg.init.two_qubit_state(), bath_b});
}

inline ComplexMatrix reduced_a(const ComplexMatrix &rho) { return partial_trace(rho, {2, 2, 2, 2}, {1}); }
inline ComplexMatrix reduced_b(const ComplexMatrix &rho) { return partial_trace(rho, {2, 2, 2, 2}, {2}); }

/// Classification given a precomputed U(t_final, 0).
///
/// A qubit is cooled when its effective g rises by more than tol_class and
/// heated when it falls by more than tol_class. The cell is anomalous when a
/// final effective g is negative, a final coherence residue exceeds the
/// threshold, or a qubit's change lies inside the +-tol_class band.
inline PhaseCell classify_with(const SweepConfig &cfg, const ComplexMatrix &u, double g1, double g2) {
    const ComplexMatrix rho0 = initial_state(cfg, g1, g2);
    const ComplexMatrix rho = u * rho0 * u.adjoint();

    const EffectiveG a0 = effective_g(reduced_a(rho0), cfg.assignment);
    const EffectiveG b0 = effective_g(reduced_b(rho0), cfg.assignment);
    const EffectiveG a1 = effective_g(reduced_a(rho), cfg.assignment);
    const EffectiveG b1 = effective_g(reduced_b(rho), cfg.assignment);

    PhaseCell cell;
    cell.g1 = g1;
    cell.g2 = g2;
    cell.T_bath_A = temperature_from_g(g1);
    cell.T_bath_B = temperature_from_g(g2);
    cell.gA_init = a0.g_eff;
    cell.gB_init = b0.g_eff;
    cell.gA_final = a1.g_eff;
    cell.gB_final = b1.g_eff;
    cell.coherA = a1.coherence_residue;
    cell.coherB = b1.coherence_residue;

    // +1 cooled, -1 heated, 0 unresolved
    auto trend = [&](double before, double after) {
        if (after > before + cfg.tol_class) {
            return 1;
        }
        if (after < before - cfg.tol_class) {
            return -1;
        }
        return 0;
    };
    const int ta = trend(cell.gA_init, cell.gA_final);
    const int tb = trend(cell.gB_init, cell.gB_final);
    const bool anomalous = cell.gA_final < 0.0 || cell.gB_final < 0.0 || cell.coherA > cfg.coherence_threshold ||
                           cell.coherB > cfg.coherence_threshold || ta == 0 || tb == 0;
    if (anomalous) {
        cell.cls = PhaseClass::anomalous;
    } else if (ta > 0 && tb > 0) {
        cell.cls = PhaseClass::both_cool;
    } else if (ta > 0) {
        cell.cls = PhaseClass::a_cool_b_heat;
    } else if (tb > 0) {
        cell.cls = PhaseClass::a_heat_b_cool;
    } else {
        cell.cls = PhaseClass::both_heat;
    }
    return cell;
}

inline PhaseCell classify_cell(const SweepConfig &cfg, double g1, double g2) {
    cfg.validate();
    if (!(g1 > 0.0 && g1 <= 1.0) || !(g2 > 0.0 && g2 <= 1.0)) {
        throw std::invalid_argument("classify_cell: bath g values must lie in (0, 1]");
    }
    return classify_with(cfg, propagator(cfg, cfg.t_final), g1, g2);
}

/// n evenly spaced points from lo to hi inclusive.
inline std::vector<double> grid_axis(const GRange &r, int n) {
    std::vector<double> axis(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        axis[static_cast<std::size_t>(k)] = k == n - 1 ? r.hi : r.lo + (r.hi - r.lo) * k / (n - 1);
    }
    return axis;
}

/// All cells of the g1 x g2 grid, g1 outer ascending, g2 inner ascending.
///
/// The propagator depends only on the rates and t_final, so it is computed
/// once and shared; cells are then evaluated in parallel into fixed slots.
inline std::vector<PhaseCell> run_sweep(const SweepConfig &cfg) {
    cfg.validate();
    const ComplexMatrix u = propagator(cfg, cfg.t_final);
    const auto g1s = grid_axis(cfg.g1_range, cfg.grid_n);
    const auto g2s = grid_axis(cfg.g2_range, cfg.grid_n);
    const std::size_t n = g1s.size();
    const std::size_t total = n * n;

    std::vector<PhaseCell> cells(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                cells[k] = classify_with(cfg, u, g1s[k / n], g2s[k % n]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t k = 0; k < total; ++k) {
        if (errors[k]) {
            std::string what = "unknown error";
            try {
                std::rethrow_exception(errors[k]);
            } catch (const std::exception &e) {
                what = e.what();
            } catch (...) {
            }
            throw std::runtime_error("run_sweep: cell (" + std::to_string(k / n) + ", " + std::to_string(k % n) +
                                     ") at g1=" + std::to_string(g1s[k / n]) + ", g2=" + std::to_string(g2s[k % n]) +
                                     " failed: " + what);
        }
    }
    return cells;
}

} // namespace qthermo
