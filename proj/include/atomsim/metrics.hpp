#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "basis.hpp"

namespace atomsim {

// Population of one atom's level from a state vector in a (possibly
// restricted) product basis.
inline double population(std::span<const cd> psi, const Basis& basis, int atom, int level) {
    double p = 0.0;
    for (int s = 0; s < basis.dim(); ++s)
        if (basis.config(s)[static_cast<std::size_t>(atom)] == level) p += std::norm(psi[static_cast<std::size_t>(s)]);
    return p;
}

// Reduced off-diagonal element <a| rho_atom |b>.
inline cd coherence(std::span<const cd> psi, const Basis& basis, int atom, int level_a, int level_b) {
    cd c = 0.0;
    for (int s = 0; s < basis.dim(); ++s) {
        const auto& cfg = basis.config(s);
        if (cfg[static_cast<std::size_t>(atom)] != level_a) continue;
        const int t = basis.index_with(cfg, atom, level_b);
        if (t >= 0) c += psi[static_cast<std::size_t>(s)] * std::conj(psi[static_cast<std::size_t>(t)]);
    }
    return c;
}

// Diagonal-approximation entanglement fidelity,
//   F_e = (1/d^2) | sum_j < sqrt(P_j) e^{i dphi_j} > |^2,
// from per-input ensembles of return probabilities and phase deviations
// (calibratable single-qubit biases already removed by the caller).
inline double entanglement_fidelity(const std::vector<std::vector<double>>& populations,
                                    const std::vector<std::vector<double>>& phase_deviations, int d) {
    if (populations.size() != phase_deviations.size())
        throw std::invalid_argument("entanglement_fidelity: input counts differ");
    cd total = 0.0;
    for (std::size_t j = 0; j < populations.size(); ++j) {
        const auto& p = populations[j];
        const auto& phi = phase_deviations[j];
        if (p.size() != phi.size() || p.empty())
            throw std::invalid_argument("entanglement_fidelity: sample shapes differ");
        cd mean = 0.0;
        for (std::size_t t = 0; t < p.size(); ++t) mean += std::sqrt(p[t]) * std::polar(1.0, phi[t]);
        total += mean / static_cast<double>(p.size());
    }
    const double dd = static_cast<double>(d);
    return std::norm(total) / (dd * dd);
}

// ---------------------------------------------------------------------------
// Stabilizer post-selection metrics on a qubit register.
// ---------------------------------------------------------------------------

// n-qubit Pauli string operator ("XZYI..."), first qubit = most
// significant bit of the register index.
inline Eigen::MatrixXcd pauli_string(const std::string& s) {
    Eigen::Matrix2cd p;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (char c : s) {
        switch (c) {
            case 'I': p << 1, 0, 0, 1; break;
            case 'X': p << 0, 1, 1, 0; break;
            case 'Y': p << 0, cd(0, -1), cd(0, 1), 0; break;
            case 'Z': p << 1, 0, 0, -1; break;
            default: throw std::invalid_argument("pauli_string: unknown letter");
        }
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        next.setZero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (p(a, b) != cd(0.0)) next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) = p(a, b) * out;
        out = std::move(next);
    }
    return out;
}

struct StabilizerMetrics {
    double f_raw = 0.0;       // mean |<target|psi>|^2
    double p_even = 0.0;      // mean Z-stabilizer acceptance
    double f_post = 0.0;      // fidelity after Z projection, acceptance weighted
    double f_syndrome = 0.0;  // fidelity after full-syndrome projection
    bool post_defined = true;      // false when the acceptance is zero
    bool syndrome_defined = true;
};

// F_raw, Z-stabilizer acceptance and the post-selected fidelities of an
// ensemble of register states against a target state. Stabilizers are
// +/-1-eigenvalue operators on the register; the projectors are (1+S)/2.
inline StabilizerMetrics stabilizer_metrics(const std::vector<Eigen::VectorXcd>& states,
                                            const Eigen::VectorXcd& target, const Eigen::MatrixXcd& z_stab,
                                            const Eigen::MatrixXcd& x_stab) {
    if (states.empty()) throw std::invalid_argument("stabilizer_metrics: empty ensemble");
    const auto dim = target.size();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    const Eigen::MatrixXcd pz = 0.5 * (id + z_stab);
    const Eigen::MatrixXcd pzx = 0.5 * (id + x_stab) * pz;

    StabilizerMetrics m;
    double post_num = 0.0, post_den = 0.0, syn_num = 0.0, syn_den = 0.0;
    for (const auto& psi : states) {
        if (psi.size() != dim) throw std::invalid_argument("stabilizer_metrics: dimension mismatch");
        m.f_raw += std::norm(target.dot(psi));
        const Eigen::VectorXcd zpsi = pz * psi;
        const Eigen::VectorXcd spsi = pzx * psi;
        m.p_even += zpsi.squaredNorm();
        post_num += std::norm(target.dot(zpsi));
        post_den += zpsi.squaredNorm();
        syn_num += std::norm(target.dot(spsi));
        syn_den += spsi.squaredNorm();
    }
    const auto n = static_cast<double>(states.size());
    m.f_raw /= n;
    m.p_even /= n;
    m.post_defined = post_den > 0.0;
    m.syndrome_defined = syn_den > 0.0;
    m.f_post = m.post_defined ? post_num / post_den : std::numeric_limits<double>::quiet_NaN();
    m.f_syndrome = m.syndrome_defined ? syn_num / syn_den : std::numeric_limits<double>::quiet_NaN();
    return m;
}

// Register extraction: amplitudes of the computational configurations
// (every atom in one of its two qubit levels), first atom as the most
// significant bit. Leakage amplitude is simply dropped.
inline Eigen::VectorXcd extract_register(std::span<const cd> psi, const Basis& basis,
                                         const std::vector<std::pair<int, int>>& qubit_levels) {
    const auto n = qubit_levels.size();
    Eigen::VectorXcd reg = Eigen::VectorXcd::Zero(1L << n);
    for (int s = 0; s < basis.dim(); ++s) {
        const auto& cfg = basis.config(s);
        long idx = 0;
        bool in_register = true;
        for (std::size_t a = 0; a < n; ++a) {
            const int lvl = cfg[a];
            if (lvl == qubit_levels[a].first) {
                idx = (idx << 1);
            } else if (lvl == qubit_levels[a].second) {
                idx = (idx << 1) | 1;
            } else {
                in_register = false;
                break;
            }
        }
        if (in_register) reg(idx) = psi[static_cast<std::size_t>(s)];
    }
    return reg;
}

// The four [[4,2,2]] codewords and the logical Bell state.
inline Eigen::VectorXcd codeword_422(int logical) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
    const double inv = 1.0 / std::sqrt(2.0);
    switch (logical) {
        case 0: v(0b0000) = inv; v(0b1111) = inv; break;  // |00_L>
        case 1: v(0b0011) = inv; v(0b1100) = inv; break;  // |01_L>
        case 2: v(0b0110) = inv; v(0b1001) = inv; break;  // |10_L>
        case 3: v(0b0101) = inv; v(0b1010) = inv; break;  // |11_L>
        default: throw std::invalid_argument("codeword_422: logical index 0..3");
    }
    return v;
}

inline Eigen::VectorXcd logical_bell_422() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
    v(0b0000) = 0.5;
    v(0b0101) = 0.5;
    v(0b1010) = 0.5;
    v(0b1111) = 0.5;
    return v;
}

} // namespace atomsim
