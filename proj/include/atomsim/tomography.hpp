#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "solvers.hpp"

namespace atomsim {

// Reduced 2x2 density matrix of one atom's (level0, level1) subspace.
// Amplitude outside the pair is dropped, so the trace reports leakage.
inline Eigen::Matrix2cd reduced_qubit_dm(const SimulationJob& job, const std::vector<cd>& state, int atom,
                                         int level0, int level1, bool density_matrix) {
    const int d = job.dim();
    const auto dz = static_cast<std::size_t>(d);
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    const int levels[2] = {level0, level1};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            cd sum = 0.0;
            for (int s = 0; s < d; ++s) {
                const auto& cfg = job.basis.config(s);
                if (cfg[static_cast<std::size_t>(atom)] != levels[i]) continue;
                const int t = job.basis.index_with(cfg, atom, levels[j]);
                if (t < 0) continue;
                if (density_matrix)
                    sum += state[static_cast<std::size_t>(s) + dz * static_cast<std::size_t>(t)];
                else
                    sum += state[static_cast<std::size_t>(s)] * std::conj(state[static_cast<std::size_t>(t)]);
            }
            rho(i, j) = sum;
        }
    }
    return rho;
}

struct ProcessResult {
    Eigen::Matrix4cd choi;                 // column-stacking convention, (output x input) ordering
    Eigen::Matrix4d ptm;                   // Pauli order I, X, Y, Z
    std::vector<Eigen::Matrix2cd> kraus;   // eigenvalue > 1e-10, descending
    double trace_defect = 0.0;             // max_j |tr E(rho_j) - 1|
    double completeness_defect = 0.0;      // || sum K^dag K - I ||_inf after truncation
    double choi_min_eigenvalue = 0.0;
    bool cp_ok = true;                     // min eigenvalue >= -1e-8
    int inputs_used = 4;
};

struct TomographyOptions {
    SolverOptions solver;
    std::vector<std::string> spectator_levels;  // initial level per atom; the qubit entry is ignored
    bool six_states = false;  // add |->, |-i> and reconstruct by least squares
};

// Single-qubit process tomography: runs the sequence on a complete input
// set ({|0>, |1>, |+>, |+i>}; optionally the overcomplete 6-state set),
// assembles the linear map on density matrices, and converts it to Choi,
// PTM and Kraus form. Deterministic solvers use one run per input; MCWF
// averages |psi><psi| over trajectories.
inline ProcessResult process_tomography(const System& sys, const Sequence& seq, AtomId qubit_atom,
                                        const std::string& level0, const std::string& level1,
                                        TomographyOptions opts = {}) {
    const auto& atom = sys.atom(qubit_atom);
    const int l0 = atom.level_index(level0);
    const int l1 = atom.level_index(level1);
    if (l0 < 0 || l1 < 0) throw std::invalid_argument("process_tomography: unknown qubit level");

    struct Input {
        cd a, b;  // amplitudes on (level0, level1)
    };
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Input> inputs{{1.0, 0.0}, {0.0, 1.0}, {inv_sqrt2, inv_sqrt2}, {inv_sqrt2, cd(0.0, inv_sqrt2)}};
    if (opts.six_states) {
        inputs.push_back({inv_sqrt2, -inv_sqrt2});
        inputs.push_back({inv_sqrt2, cd(0.0, -inv_sqrt2)});
    }

    // base product configuration for the spectator atoms
    std::vector<std::string> levels = opts.spectator_levels;
    if (levels.empty()) {
        if (sys.initial_levels)
            levels = *sys.initial_levels;
        else if (sys.atoms.size() == 1)
            levels = {level0};
        else
            throw std::invalid_argument("process_tomography: spectator levels required for multi-atom systems");
    }
    if (levels.size() != sys.atoms.size())
        throw std::invalid_argument("process_tomography: one spectator level per atom required");

    auto job = compile(sys, seq, levels, opts.solver);
    const bool me = job.solver == SolverKind::MasterEquation;

    // basis indices of the two qubit settings with spectators fixed
    std::vector<std::uint8_t> cfg(sys.atoms.size());
    for (std::size_t a = 0; a < sys.atoms.size(); ++a)
        cfg[a] = static_cast<std::uint8_t>(sys.atoms[a].level_index(levels[a]));
    cfg[static_cast<std::size_t>(qubit_atom.value)] = static_cast<std::uint8_t>(l0);
    const int idx0 = job.basis.index_of(cfg);
    cfg[static_cast<std::size_t>(qubit_atom.value)] = static_cast<std::uint8_t>(l1);
    const int idx1 = job.basis.index_of(cfg);
    if (idx0 < 0 || idx1 < 0)
        throw std::invalid_argument("process_tomography: qubit states excluded by maxoccupations");

    std::vector<Eigen::Matrix2cd> outputs;
    for (const auto& in : inputs) {
        std::fill(job.initial_amplitudes.begin(), job.initial_amplitudes.end(), cd(0.0));
        job.initial_amplitudes[static_cast<std::size_t>(idx0)] = in.a;
        job.initial_amplitudes[static_cast<std::size_t>(idx1)] = in.b;
        Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
        if (job.solver == SolverKind::Mcwf && job.options.shots > 1) {
            auto local = job;
            local.options.final_state = true;
            auto out = run_shots(local, sys);
            for (const auto& psi : out.final_states)
                rho += reduced_qubit_dm(job, psi, qubit_atom.value, l0, l1, false);
            rho /= static_cast<double>(out.final_states.size());
        } else {
            recompile(job, sys, job.options.overrides, 0);
            run(job);
            rho = reduced_qubit_dm(job, final_state_vector(job), qubit_atom.value, l0, l1, me);
        }
        outputs.push_back(rho);
    }

    ProcessResult res;
    res.inputs_used = static_cast<int>(inputs.size());
    for (const auto& e : outputs)
        res.trace_defect = std::max(res.trace_defect, std::abs(e.trace().real() - 1.0) + std::abs(e.trace().imag()));

    // superoperator S with vec_col(E(X)) = S vec_col(X), least squares
    // over the input set (exact solve for the minimal 4-state set)
    Eigen::MatrixXcd r_mat(4, static_cast<int>(inputs.size()));
    Eigen::MatrixXcd e_mat(4, static_cast<int>(inputs.size()));
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        Eigen::Matrix2cd rho_in;
        rho_in(0, 0) = inputs[k].a * std::conj(inputs[k].a);
        rho_in(1, 0) = inputs[k].b * std::conj(inputs[k].a);
        rho_in(0, 1) = inputs[k].a * std::conj(inputs[k].b);
        rho_in(1, 1) = inputs[k].b * std::conj(inputs[k].b);
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 2; ++r) {
                r_mat(r + 2 * c, static_cast<int>(k)) = rho_in(r, c);
                e_mat(r + 2 * c, static_cast<int>(k)) = outputs[k](r, c);
            }
    }
    const Eigen::MatrixXcd s_op =
        e_mat * r_mat.completeOrthogonalDecomposition().pseudoInverse();

    auto apply_map = [&](const Eigen::Matrix2cd& x) {
        Eigen::Vector4cd v;
        v << x(0, 0), x(1, 0), x(0, 1), x(1, 1);
        const Eigen::Vector4cd w = s_op * v;
        Eigen::Matrix2cd out;
        out << w(0), w(2), w(1), w(3);
        return out;
    };

    // Choi = sum_ij E(|i><j|) kron |i><j|, output factor first
    res.choi.setZero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Eigen::Matrix2cd eij = Eigen::Matrix2cd::Zero();
            eij(i, j) = 1.0;
            const Eigen::Matrix2cd out = apply_map(eij);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) res.choi(2 * a + i, 2 * b + j) += out(a, b);
        }

    // PTM R_ab = tr(P_a E(P_b)) / 2
    Eigen::Matrix2cd paulis[4];
    paulis[0] << 1, 0, 0, 1;
    paulis[1] << 0, 1, 1, 0;
    paulis[2] << 0, cd(0, -1), cd(0, 1), 0;
    paulis[3] << 1, 0, 0, -1;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            res.ptm(a, b) = 0.5 * (paulis[a] * apply_map(paulis[b])).trace().real();

    // Kraus operators from the eigendecomposition of the hermitized Choi
    const Eigen::Matrix4cd herm = 0.5 * (res.choi + res.choi.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(herm);
    res.choi_min_eigenvalue = eig.eigenvalues().minCoeff();
    res.cp_ok = res.choi_min_eigenvalue >= -1e-8;
    for (int m = 3; m >= 0; --m) {  // eigenvalues ascending; emit descending
        const double lambda = eig.eigenvalues()(m);
        if (lambda <= 1e-10) continue;
        Eigen::Matrix2cd k;
        const auto v = eig.eigenvectors().col(m);
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < 2; ++i) k(a, i) = std::sqrt(lambda) * v(2 * a + i);
        res.kraus.push_back(k);
    }
    Eigen::Matrix2cd completeness = Eigen::Matrix2cd::Zero();
    for (const auto& k : res.kraus) completeness += k.adjoint() * k;
    res.completeness_defect = (completeness - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    return res;
}

} // namespace atomsim
