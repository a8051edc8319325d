#pragma once

// Dense complex linear algebra for 2-, 4- and 16-dimensional Hilbert spaces.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qthermo {

using complex = std::complex<double>;
inline constexpr complex kI{0.0, 1.0};

/// Row-major dense complex matrix with value semantics.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    /// Builds a matrix from nested rows; all rows must have equal length.
    ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto &row : rows) {
            if (row.size() != cols_) {
                throw std::invalid_argument("ComplexMatrix: ragged initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix diagonal(std::span<const complex> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(i, i) = d[i];
        }
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<complex> d) {
        return diagonal(std::span<const complex>(d.begin(), d.size()));
    }

    /// |v><w| for column vectors v, w.
    static ComplexMatrix outer(std::span<const complex> v, std::span<const complex> w) {
        ComplexMatrix m(v.size(), w.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = 0; j < w.size(); ++j) {
                m(i, j) = v[i] * std::conj(w[j]);
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    complex &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const complex &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const complex> data() const { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                m(j, i) = std::conj((*this)(i, j));
            }
        }
        return m;
    }

    complex trace() const {
        require_square("trace");
        complex t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_shape(o, "+");
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += o.data_[k];
        }
        return *this;
    }

    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_shape(o, "-");
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= o.data_[k];
        }
        return *this;
    }

    ComplexMatrix &operator*=(complex s) {
        for (auto &x : data_) {
            x *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
    friend ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= complex(s); }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("ComplexMatrix: product dimension mismatch");
        }
        ComplexMatrix m(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const complex aik = a(i, k);
                if (aik == complex(0.0)) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    m(i, j) += aik * b(k, j);
                }
            }
        }
        return m;
    }

    bool operator==(const ComplexMatrix &) const = default;

  private:
    void require_square(const char *what) const {
        if (!is_square()) {
            throw std::invalid_argument(std::string("ComplexMatrix: ") + what + " needs a square matrix");
        }
    }
    void require_same_shape(const ComplexMatrix &o, const char *what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw std::invalid_argument(std::string("ComplexMatrix: shape mismatch in ") + what);
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<complex> data_;
};

/// Largest entrywise |a_ij - b_ij|; infinity when shapes differ.
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return INFINITY;
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    }
    return m;
}

inline double frobenius_norm(const ComplexMatrix &a) {
    double s = 0.0;
    for (const auto &x : a.data()) {
        s += std::norm(x);
    }
    return std::sqrt(s);
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) { return a * b - b * a; }

inline bool is_hermitian(const ComplexMatrix &a, double tol) {
    return a.is_square() && max_abs_diff(a, a.adjoint()) <= tol;
}

inline bool is_unitary(const ComplexMatrix &u, double tol) {
    return u.is_square() && max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows())) <= tol;
}

namespace pauli {
inline ComplexMatrix I() { return ComplexMatrix::identity(2); }
inline ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix Y() { return {{0.0, -kI}, {kI, 0.0}}; }
inline ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
/// sigma_- = |1><0|, lowering towards the ground state |1> (Bloch z = -1).
inline ComplexMatrix lower() { return {{0.0, 0.0}, {1.0, 0.0}}; }
/// sigma_+ = |0><1|.
inline ComplexMatrix raise() { return {{0.0, 1.0}, {0.0, 0.0}}; }
} // namespace pauli

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return m;
}

inline ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
    ComplexMatrix m = ComplexMatrix::identity(1);
    for (const auto &f : factors) {
        m = kron(m, f);
    }
    return m;
}

/// Reduced operator on the subsystems listed in `keep` (any order; output
/// keeps them in ascending subsystem order). Subsystem 0 is the leftmost
/// tensor factor.
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
    if (!rho.is_square()) {
        throw std::invalid_argument("partial_trace: operator is not square");
    }
    const std::size_t total =
        std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    if (dims.empty() || total != rho.rows()) {
        throw std::invalid_argument("partial_trace: subsystem dimensions do not match operator size");
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size() || kept[k]) {
            throw std::invalid_argument("partial_trace: invalid kept subsystem index");
        }
        kept[k] = true;
    }

    const std::size_t n = dims.size();
    // strides of each subsystem in the full index, and in the kept index
    std::vector<std::size_t> stride(n), kept_stride(n, 0);
    std::size_t s = 1, ks = 1;
    for (std::size_t q = n; q-- > 0;) {
        stride[q] = s;
        s *= dims[q];
        if (kept[q]) {
            kept_stride[q] = ks;
            ks *= dims[q];
        }
    }
    const std::size_t out_dim = ks;

    ComplexMatrix out(out_dim, out_dim);
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = 0; j < total; ++j) {
            bool diagonal_in_traced = true;
            std::size_t oi = 0, oj = 0;
            for (std::size_t q = 0; q < n; ++q) {
                const std::size_t di = (i / stride[q]) % dims[q];
                const std::size_t dj = (j / stride[q]) % dims[q];
                if (kept[q]) {
                    oi += di * kept_stride[q];
                    oj += dj * kept_stride[q];
                } else if (di != dj) {
                    diagonal_in_traced = false;
                    break;
                }
            }
            if (diagonal_in_traced) {
                out(oi, oj) += rho(i, j);
            }
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::initializer_list<std::size_t> dims,
                                   std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(dims.begin(), dims.size()),
                         std::span<const std::size_t>(keep.begin(), keep.size()));
}

struct EigenDecomposition {
    std::vector<double> eigenvalues; // ascending
    ComplexMatrix eigenvectors;      // columns, orthonormal
};

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Sweeps over all (p, q) pairs in fixed order until the off-diagonal
/// Frobenius mass drops below 1e-14 (relative to max(1, ||h||_F)).
/// Eigenvalues come back ascending; each eigenvector column is rephased so
/// its largest-magnitude component (first one on ties) is real positive.
inline EigenDecomposition eig_hermitian(const ComplexMatrix &h) {
    if (!is_hermitian(h, 1e-10)) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    }
    const std::size_t n = h.rows();
    ComplexMatrix a = h;
    ComplexMatrix v = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
    }

    const double threshold = 1e-14 * std::max(1.0, frobenius_norm(h));
    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) {
                    s += std::norm(a(i, j));
                }
            }
        }
        return std::sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_mass() >= threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const complex apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) {
                    continue;
                }
                // Phase the pair so the coupling is real, then a real Jacobi rotation.
                const complex phase = std::conj(apq) / r;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // G = diag(1, phase) * [[c, s], [-s, c]]
                const complex g00 = c, g01 = s, g10 = -s * phase, g11 = c * phase;

                for (std::size_t k = 0; k < n; ++k) {
                    const complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * g00 + akq * g10;
                    a(k, q) = akp * g01 + akq * g11;
                    const complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * g00 + vkq * g10;
                    v(k, q) = vkp * g01 + vkq * g11;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
                    a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (off_mass() >= threshold) {
        throw std::runtime_error("eig_hermitian: Jacobi iteration did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        out.eigenvalues[col] = a(src, src).real();
        double biggest = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            biggest = std::max(biggest, std::abs(v(k, src)));
        }
        complex rephase = 1.0;
        std::size_t pivot = 0;
        double pivot_abs = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double m = std::abs(v(k, src));
            if (m >= biggest * (1.0 - 1e-12)) {
                rephase = std::conj(v(k, src)) / m;
                pivot = k;
                pivot_abs = m;
                break;
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            out.eigenvectors(k, col) = v(k, src) * rephase;
        }
        out.eigenvectors(pivot, col) = pivot_abs;
    }
    return out;
}

/// exp(-i * scale * h) for Hermitian h.
inline ComplexMatrix exp_i_hermitian(const ComplexMatrix &h, double scale) {
    const auto eig = eig_hermitian(h);
    const std::size_t n = h.rows();
    std::vector<complex> phases(n);
    for (std::size_t k = 0; k < n; ++k) {
        phases[k] = std::exp(-kI * (scale * eig.eigenvalues[k]));
    }
    const auto &v = eig.eigenvectors;
    return v * ComplexMatrix::diagonal(phases) * v.adjoint();
}

/// Sum of |eigenvalues| of a Hermitian operator (un-halved trace norm).
inline double trace_norm(const ComplexMatrix &a) {
    if (!is_hermitian(a, 1e-10)) {
        throw std::invalid_argument("trace_norm: operator is not Hermitian");
    }
    double s = 0.0;
    for (double ev : eig_hermitian(a).eigenvalues) {
        s += std::abs(ev);
    }
    return s;
}

inline bool is_psd(const ComplexMatrix &a, double tol) {
    if (!is_hermitian(a, tol)) {
        return false;
    }
    return eig_hermitian(a).eigenvalues.front() >= -tol;
}

/// Hermitian, unit trace and positive semidefinite, all within `tol`.
inline bool is_density_matrix(const ComplexMatrix &rho, double tol) {
    return is_hermitian(rho, tol) && std::abs(rho.trace() - 1.0) <= tol && is_psd(rho, tol);
}

} // namespace qthermo
