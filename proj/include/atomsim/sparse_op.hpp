#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace atomsim {

// Sparse operator as a flat triplet list with an optional reverse
// (conjugate-transpose) part. With `hermitian_pair` set, each stored
// triplet (r, c, v) also acts as (c, r, conj(v)); Hermitian operators
// store each pair once and must keep the stored part strictly
// off-diagonal. The dense equivalent of apply with coefficient m is
//   M = m * F + conj(m) * F^dagger        (hermitian_pair)
//   M = m * F                              (otherwise).
struct SparseOp {
    int dim = 0;
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<std::complex<double>> vals;
    bool hermitian_pair = false;

    explicit SparseOp(int d = 0, bool herm = false) : dim(d), hermitian_pair(herm) {}

    std::size_t nnz() const { return vals.size(); }

    void add(int r, int c, std::complex<double> v) {
        if (r < 0 || c < 0 || r >= dim || c >= dim) throw std::out_of_range("sparse op: index out of range");
        if (hermitian_pair && r == c)
            throw std::invalid_argument("sparse op: diagonal entry in a hermitian-pair operator");
        rows.push_back(r);
        cols.push_back(c);
        vals.push_back(v);
    }

    // y += m * (op x); allocation-free hot path of every solver step
    void apply_accum(std::complex<double> m, const std::complex<double>* x, std::complex<double>* y) const {
        const std::size_t n = vals.size();
        if (hermitian_pair) {
            const std::complex<double> mc = std::conj(m);
            for (std::size_t i = 0; i < n; ++i) {
                const auto v = vals[i];
                y[rows[i]] += m * v * x[cols[i]];
                y[cols[i]] += mc * std::conj(v) * x[rows[i]];
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) y[rows[i]] += m * vals[i] * x[cols[i]];
        }
    }
};

inline std::vector<std::complex<double>> apply(const SparseOp& op, std::span<const std::complex<double>> x) {
    if (static_cast<int>(x.size()) != op.dim) throw std::invalid_argument("apply: dimension mismatch");
    std::vector<std::complex<double>> y(x.size(), 0.0);
    op.apply_accum(1.0, x.data(), y.data());
    return y;
}

// dense row-major d x d equivalent (tests, tomography, introspection)
inline std::vector<std::complex<double>> dense(const SparseOp& op, std::complex<double> m = 1.0) {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(op.dim) * static_cast<std::size_t>(op.dim),
                                          0.0);
    for (std::size_t i = 0; i < op.nnz(); ++i) {
        out[static_cast<std::size_t>(op.rows[i]) * op.dim + op.cols[i]] += m * op.vals[i];
        if (op.hermitian_pair)
            out[static_cast<std::size_t>(op.cols[i]) * op.dim + op.rows[i]] += std::conj(m * op.vals[i]);
    }
    return out;
}

} // namespace atomsim
