#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>
#include <thread>
#include <vector>

#include "job.hpp"

namespace atomsim {

namespace engine {

// H|x> -> |y| for the current step coefficients. With with_decay, adds
// the anti-Hermitian MCWF part -(i/2) sum_k L_k^dag L_k (diagonal).
inline void apply_hamiltonian(const SimulationJob& job, const cd* x, cd* y, bool with_decay) {
    const int d = job.dim();
    std::memset(y, 0, sizeof(cd) * static_cast<std::size_t>(d));
    for (const auto& t : job.drives)
        if (t.coeff != cd(0.0)) t.op.apply_accum(t.coeff, x, y);
    for (const auto& t : job.interactions)
        if (t.coeff != cd(0.0)) t.op.apply_accum(t.coeff, x, y);
    if (with_decay) {
        const cd half_i(0.0, -0.5);
        for (int i = 0; i < d; ++i)
            if (job.k_diag[static_cast<std::size_t>(i)] != 0.0)
                y[i] += half_i * job.k_diag[static_cast<std::size_t>(i)] * x[i];
    }
}

// In-place order-N Taylor step: psi <- sum_{n<=N} (-i H dt)^n / n! psi.
// No matrix exponential is formed; N repeated sparse applications.
inline void taylor_step(SimulationJob& job, cd* psi, double dt, bool with_decay) {
    const int d = job.dim();
    cd* term = job.buf_term.data();
    cd* h = job.buf_h.data();
    std::memcpy(term, psi, sizeof(cd) * static_cast<std::size_t>(d));
    for (int n = 1; n <= job.options.taylor_order; ++n) {
        apply_hamiltonian(job, term, h, with_decay);
        const cd scale = cd(0.0, -dt / static_cast<double>(n));
        for (int i = 0; i < d; ++i) {
            term[i] = scale * h[i];
            psi[i] += term[i];
        }
    }
}

// Per-step coefficient refresh: AOD tones, position-dependent amplitudes
// and phases, phase noise, schedule multipliers.
inline void update_step(SimulationJob& job, int k) {
    const auto& tl = *job.timeline;
    for (const auto& [beam_idx, aod] : tl.aod) {
        auto& arr = std::get<TweezerArray>(job.beams[static_cast<std::size_t>(beam_idx)]);
        for (std::size_t t = 0; t < arr.row_tones.size(); ++t) {
            arr.row_tones[t].frequency = aod.row_freq[t][static_cast<std::size_t>(k)];
            arr.row_tones[t].amplitude = aod.row_amp[t][static_cast<std::size_t>(k)];
        }
        for (std::size_t t = 0; t < arr.col_tones.size(); ++t) {
            arr.col_tones[t].frequency = aod.col_freq[t][static_cast<std::size_t>(k)];
            arr.col_tones[t].amplitude = aod.col_amp[t][static_cast<std::size_t>(k)];
        }
    }
    const double t_mid = tl.t_end[static_cast<std::size_t>(k)] - 0.5 * tl.step_dt[static_cast<std::size_t>(k)];
    for (auto& t : job.drives) {
        const cd sched = tl.drive[static_cast<std::size_t>(t.slot)][static_cast<std::size_t>(k)];
        if (t.is_detuning) {
            t.coeff = t.base * sched.real();
            continue;
        }
        cd c = t.base * sched;
        if (c != cd(0.0)) {
            if (t.beam >= 0)
                c *= field_amplitude(job.beams[static_cast<std::size_t>(t.beam)],
                                     job.positions[static_cast<std::size_t>(t.atom)]);
            if (t.has_wavevector)
                c *= std::polar(1.0, dot(t.wavevector, job.positions[static_cast<std::size_t>(t.atom)]));
            if (t.phase_index >= 0) {
                const auto& traj = job.phase_trajs[static_cast<std::size_t>(t.phase_index)];
                const double u = t_mid / job.phase_grid_dt;
                const auto i0 = static_cast<std::size_t>(u);
                const double frac = u - static_cast<double>(i0);
                const std::size_t i1 = std::min(i0 + 1, traj.size() - 1);
                c *= std::polar(1.0, (1.0 - frac) * traj[i0] + frac * traj[i1]);
            }
        }
        t.coeff = c;
    }
    for (auto& t : job.interactions) {
        if (!t.vdw) {
            t.coeff = t.base;
            continue;
        }
        const Vec3 dr = job.positions[static_cast<std::size_t>(t.atom_a)] -
                        job.positions[static_cast<std::size_t>(t.atom_b)];
        const double r2 = dot(dr, dr);
        t.coeff = t.base / (r2 * r2 * r2);
    }
}

// Velocity update then position update with the new velocity, optionally
// sub-cycled during AOD moves.
inline void classical_step(SimulationJob& job, int k) {
    const auto& tl = *job.timeline;
    const int subs = tl.classical_substeps.empty() ? 1 : tl.classical_substeps[static_cast<std::size_t>(k)];
    const double dt = tl.step_dt[static_cast<std::size_t>(k)] / static_cast<double>(subs);
    for (int s = 0; s < subs; ++s) {
        for (std::size_t a = 0; a < job.positions.size(); ++a) {
            Vec3 f{};
            for (std::size_t b = 0; b < job.beams.size(); ++b) {
                const double alpha = job.alphas[a][b];
                if (std::isnan(alpha) || alpha == 0.0) continue;
                f += optical_force(job.beams[b], alpha, job.positions[a], job.force_step);
            }
            job.velocities[a] += (dt / job.masses[a]) * f;
            job.positions[a] += dt * job.velocities[a];
        }
    }
}

inline double norm2(const cd* x, int d) {
    double n = 0.0;
    for (int i = 0; i < d; ++i) n += std::norm(x[i]);
    return n;
}

inline void mcwf_step(SimulationJob& job, double dt, double t_now) {
    const int d = job.dim();
    taylor_step(job, job.psi.data(), dt, true);
    job.norm2 = norm2(job.psi.data(), d);
    if (job.norm2 >= job.mcwf_threshold) return;

    // quantum jump: channel probability ~ <psi|L^dag L|psi>
    double total = 0.0;
    for (std::size_t j = 0; j < job.jumps.size(); ++j) {
        const auto& jop = job.jumps[j];
        double w = 0.0;
        for (std::size_t i = 0; i < jop.op.nnz(); ++i) w += std::norm(job.psi[static_cast<std::size_t>(jop.op.cols[i])]);
        job.jump_weights[j] = w * jop.amp * jop.amp;
        total += job.jump_weights[j];
    }
    if (total <= 0.0) {
        // threshold crossed with no jump weight: numerical guard
        job.run_warnings.push_back("mcwf: zero jump weight at a triggered jump; threshold redrawn");
        job.mcwf_threshold = uniform01(job.rng) * job.norm2;
        return;
    }
    double pick = uniform01(job.rng) * total;
    std::size_t channel = 0;
    for (; channel + 1 < job.jumps.size(); ++channel) {
        pick -= job.jump_weights[channel];
        if (pick <= 0.0) break;
    }
    const auto& jop = job.jumps[channel];
    std::fill(job.buf_h.begin(), job.buf_h.end(), cd(0.0));
    for (std::size_t i = 0; i < jop.op.nnz(); ++i)
        job.buf_h[static_cast<std::size_t>(jop.op.rows[i])] += jop.amp * job.psi[static_cast<std::size_t>(jop.op.cols[i])];
    const double nn = norm2(job.buf_h.data(), d);
    const double inv = 1.0 / std::sqrt(nn);
    for (int i = 0; i < d; ++i) job.psi[static_cast<std::size_t>(i)] = job.buf_h[static_cast<std::size_t>(i)] * inv;
    job.norm2 = 1.0;
    if (job.options.record_jumps) job.jump_log.emplace_back(t_now, static_cast<int>(channel));
    job.mcwf_threshold = uniform01(job.rng);
}

// rho <- U rho U^dag by columns, then the first-order Euler dissipator
// applied to the post-unitary state, then re-symmetrization.
inline void lindblad_step(SimulationJob& job, double dt) {
    const int d = job.dim();
    const auto dz = static_cast<std::size_t>(d);
    cd* rho = job.rho.data();
    cd* tmp = job.rho_tmp.data();

    for (int j = 0; j < d; ++j) taylor_step(job, rho + static_cast<std::size_t>(j) * dz, dt, false);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            tmp[static_cast<std::size_t>(b) + dz * static_cast<std::size_t>(a)] =
                std::conj(rho[static_cast<std::size_t>(a) + dz * static_cast<std::size_t>(b)]);
    for (int j = 0; j < d; ++j) taylor_step(job, tmp + static_cast<std::size_t>(j) * dz, dt, false);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            rho[static_cast<std::size_t>(b) + dz * static_cast<std::size_t>(a)] =
                std::conj(tmp[static_cast<std::size_t>(a) + dz * static_cast<std::size_t>(b)]);

    if (!job.jumps.empty()) {
        cd* acc = job.rho_acc.data();
        std::memset(acc, 0, sizeof(cd) * dz * dz);
        for (const auto& jop : job.jumps) {
            const double a2 = jop.amp * jop.amp;
            if (a2 == 0.0) continue;
            const auto n = jop.op.nnz();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    acc[static_cast<std::size_t>(jop.op.rows[i]) + dz * static_cast<std::size_t>(jop.op.rows[j])] +=
                        a2 * rho[static_cast<std::size_t>(jop.op.cols[i]) + dz * static_cast<std::size_t>(jop.op.cols[j])];
        }
        for (int b = 0; b < d; ++b)
            for (int a = 0; a < d; ++a) {
                const std::size_t idx = static_cast<std::size_t>(a) + dz * static_cast<std::size_t>(b);
                acc[idx] -= 0.5 * (job.k_diag[static_cast<std::size_t>(a)] + job.k_diag[static_cast<std::size_t>(b)]) * rho[idx];
            }
        for (std::size_t i = 0; i < dz * dz; ++i) rho[i] += dt * acc[i];
    }

    // keep rho Hermitian against roundoff accumulation
    for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
            const std::size_t ab = static_cast<std::size_t>(a) + dz * static_cast<std::size_t>(b);
            const std::size_t ba = static_cast<std::size_t>(b) + dz * static_cast<std::size_t>(a);
            const cd avg = 0.5 * (rho[ab] + std::conj(rho[ba]));
            rho[ab] = avg;
            rho[ba] = std::conj(avg);
        }
    }
    double tr = 0.0;
    for (int a = 0; a < d; ++a) tr += rho[static_cast<std::size_t>(a) * (dz + 1)].real();
    job.norm2 = tr;
}

inline Vec3 beam_reference_point(const Beam& beam) {
    struct V {
        Vec3 operator()(const GaussianBeam& b) const { return b.focus; }
        Vec3 operator()(const GeneralGaussianBeam& b) const { return b.focus; }
        Vec3 operator()(const PlanarBeam&) const { return {}; }
        Vec3 operator()(const TweezerArray& b) const { return b.origin; }
    };
    return std::visit(V{}, beam);
}

inline void write_detectors(SimulationJob& job, int row) {
    const int d = job.dim();
    const bool me = job.solver == SolverKind::MasterEquation;
    const double renorm = job.solver == SolverKind::Mcwf && job.norm2 > 0.0 ? 1.0 / job.norm2 : 1.0;
    const auto dz = static_cast<std::size_t>(d);
    for (auto& det : job.detectors) {
        double* out = det.data.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(det.width);
        if (std::holds_alternative<PopulationDetector>(det.spec)) {
            double p = 0.0;
            if (me) {
                for (int s : det.idx_a) p += job.rho[static_cast<std::size_t>(s) * (dz + 1)].real();
            } else {
                for (int s : det.idx_a) p += std::norm(job.psi[static_cast<std::size_t>(s)]);
                p *= renorm;
            }
            out[0] = p;
        } else if (std::holds_alternative<CoherenceDetector>(det.spec)) {
            cd c = 0.0;
            if (me) {
                for (std::size_t i = 0; i < det.idx_a.size(); ++i)
                    c += job.rho[static_cast<std::size_t>(det.idx_a[i]) + dz * static_cast<std::size_t>(det.idx_b[i])];
            } else {
                for (std::size_t i = 0; i < det.idx_a.size(); ++i)
                    c += job.psi[static_cast<std::size_t>(det.idx_a[i])] *
                         std::conj(job.psi[static_cast<std::size_t>(det.idx_b[i])]);
                c *= renorm;
            }
            out[0] = c.real();
            out[1] = c.imag();
        } else if (std::holds_alternative<MotionDetector>(det.spec)) {
            const auto& p = job.positions[static_cast<std::size_t>(det.atom)];
            const auto& v = job.velocities[static_cast<std::size_t>(det.atom)];
            out[0] = p.x; out[1] = p.y; out[2] = p.z;
            out[3] = v.x; out[4] = v.y; out[5] = v.z;
        } else {
            cd f = 0.0;
            if (det.drive_term >= 0) {
                const auto& t = job.drives[static_cast<std::size_t>(det.drive_term)];
                f = t.is_detuning ? t.coeff : 2.0 * t.coeff;  // instantaneous complex Rabi amplitude
            } else {
                f = field_amplitude(job.beams[static_cast<std::size_t>(det.beam)],
                                    beam_reference_point(job.beams[static_cast<std::size_t>(det.beam)]));
            }
            out[0] = f.real();
            out[1] = f.imag();
        }
    }
}

} // namespace engine

// ---------------------------------------------------------------------------
// Single-shot execution: update -> classical -> quantum -> write, with
// all buffers preallocated by compile. Detector rows record the state
// after each step, so the first output sample sits at t = dt.
// ---------------------------------------------------------------------------
inline void run(SimulationJob& job) {
    const auto& tl = *job.timeline;
    const int d = job.dim();

    if (job.solver != SolverKind::Newton) {
        if (job.initial_amplitudes.empty())
            throw std::runtime_error("run: no initial state");
        std::memcpy(job.psi.data(), job.initial_amplitudes.data(), sizeof(cd) * static_cast<std::size_t>(d));
        if (job.solver == SolverKind::MasterEquation) {
            const auto dz = static_cast<std::size_t>(d);
            for (int b = 0; b < d; ++b)
                for (int a = 0; a < d; ++a)
                    job.rho[static_cast<std::size_t>(a) + dz * static_cast<std::size_t>(b)] =
                        job.psi[static_cast<std::size_t>(a)] * std::conj(job.psi[static_cast<std::size_t>(b)]);
        }
        job.norm2 = engine::norm2(job.psi.data(), d);
    }
    job.mcwf_threshold = job.solver == SolverKind::Mcwf ? uniform01(job.rng) : 0.0;
    job.jump_log.clear();

    int row = 0;
    const int ds = job.n_out > 0 ? tl.n_steps / job.n_out : tl.n_steps + 1;
    for (int k = 0; k < tl.n_steps; ++k) {
        engine::update_step(job, k);
        if (job.semiclassical) engine::classical_step(job, k);
        const double dt = tl.step_dt[static_cast<std::size_t>(k)];
        switch (job.solver) {
            case SolverKind::Schrodinger: {
                engine::taylor_step(job, job.psi.data(), dt, false);
                job.norm2 = engine::norm2(job.psi.data(), d);
                break;
            }
            case SolverKind::Mcwf:
                engine::mcwf_step(job, dt, tl.t_end[static_cast<std::size_t>(k)]);
                break;
            case SolverKind::MasterEquation:
                engine::lindblad_step(job, dt);
                break;
            case SolverKind::Newton:
                break;
        }
        if (job.solver != SolverKind::Newton && !std::isfinite(job.norm2))
            throw std::runtime_error("run: non-finite state detected at step " + std::to_string(k) +
                                     " (t = " + std::to_string(tl.t_end[static_cast<std::size_t>(k)]) + " s)");
        if ((k + 1) % ds == 0 && row < job.n_out) engine::write_detectors(job, row++);
    }
}

// MCWF states are renormalized for downstream analysis.
inline std::vector<cd> final_state_vector(const SimulationJob& job) {
    if (job.solver == SolverKind::MasterEquation) return job.rho;
    std::vector<cd> out = job.psi;
    if (job.solver == SolverKind::Mcwf && job.norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(job.norm2);
        for (auto& x : out) x *= inv;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multi-shot execution. Shots are independent: per-shot rng streams are
// derived from the master seed and the shot index, and outputs land in
// per-shot slabs, so serial and concurrent execution give identical
// results.
// ---------------------------------------------------------------------------
struct ShotOutputs {
    std::vector<double> times;
    struct Stack {
        std::string name;
        int width = 1;
        int n_out = 0;
        std::vector<double> data;  // [shot][row][width]
    };
    std::vector<Stack> detectors;
    std::vector<std::vector<cd>> final_states;
    std::vector<std::vector<std::pair<double, int>>> jumps;
    std::vector<std::string> warnings;
    int shots = 1;

    // mean over shots, [row][width]
    std::vector<double> mean(std::size_t det) const {
        const auto& st = detectors[det];
        std::vector<double> m(static_cast<std::size_t>(st.n_out) * static_cast<std::size_t>(st.width), 0.0);
        const std::size_t per_shot = m.size();
        for (int s = 0; s < shots; ++s)
            for (std::size_t i = 0; i < per_shot; ++i)
                m[i] += st.data[static_cast<std::size_t>(s) * per_shot + i];
        for (auto& x : m) x /= static_cast<double>(shots);
        return m;
    }

    const Stack& detector(const std::string& name) const {
        for (const auto& st : detectors)
            if (st.name == name) return st;
        throw std::invalid_argument("no detector named '" + name + "'");
    }
    std::vector<double> mean(const std::string& name) const {
        for (std::size_t i = 0; i < detectors.size(); ++i)
            if (detectors[i].name == name) return mean(i);
        throw std::invalid_argument("no detector named '" + name + "'");
    }
};

inline ShotOutputs run_shots(SimulationJob& job, const System& sys) {
    const int shots = job.options.shots;
    ShotOutputs out;
    out.shots = shots;
    out.times = job.out_times;
    for (const auto& det : job.detectors) {
        ShotOutputs::Stack st;
        st.name = det.name;
        st.width = det.width;
        st.n_out = job.n_out;
        st.data.assign(static_cast<std::size_t>(shots) * det.data.size(), 0.0);
        out.detectors.push_back(std::move(st));
    }
    if (job.options.final_state) out.final_states.resize(static_cast<std::size_t>(shots));
    if (job.options.record_jumps) out.jumps.resize(static_cast<std::size_t>(shots));
    std::vector<std::vector<std::string>> shot_warnings(static_cast<std::size_t>(shots));

    auto collect = [&](SimulationJob& j, int shot) {
        for (std::size_t di = 0; di < j.detectors.size(); ++di) {
            const auto& src = j.detectors[di].data;
            std::memcpy(out.detectors[di].data.data() + static_cast<std::size_t>(shot) * src.size(),
                        src.data(), src.size() * sizeof(double));
        }
        if (job.options.final_state) out.final_states[static_cast<std::size_t>(shot)] = final_state_vector(j);
        if (job.options.record_jumps) out.jumps[static_cast<std::size_t>(shot)] = j.jump_log;
        shot_warnings[static_cast<std::size_t>(shot)] = j.run_warnings;
    };
    auto merge_warnings = [&] {
        for (const auto& ws : shot_warnings)
            for (const auto& w : ws) out.warnings.push_back(w);
    };

    int workers = job.options.threads > 0 ? job.options.threads
                                          : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min(workers, shots);

    bool concurrent = shots >= job.options.shot_parallel_threshold && workers > 1;
    if (concurrent) {
        const double estimate = static_cast<double>(job.state_bytes()) * workers;
        if (estimate > job.options.memory_budget) {
            out.warnings.push_back("estimated concurrent memory footprint exceeds the budget; running serially");
            concurrent = false;
        }
    }

    if (!concurrent) {
        for (int s = 0; s < shots; ++s) {
            recompile(job, sys, job.options.overrides, s);
            run(job);
            collect(job, s);
        }
        merge_warnings();
        return out;
    }

    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::string> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            SimulationJob local = job;  // independent buffers per worker
            try {
                for (int s = next.fetch_add(1); s < shots; s = next.fetch_add(1)) {
                    recompile(local, sys, local.options.overrides, s);
                    run(local);
                    collect(local, s);
                }
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(w)] = e.what();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    merge_warnings();
    return out;
}

} // namespace atomsim
