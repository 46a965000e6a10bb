#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "basis.hpp"
#include "sequence.hpp"
#include "sparse_op.hpp"

namespace atomsim {

enum class SolverKind { Schrodinger, MasterEquation, Mcwf, Newton };

inline const char* solver_name(SolverKind k) {
    switch (k) {
        case SolverKind::Schrodinger: return "schrodinger";
        case SolverKind::MasterEquation: return "master_equation";
        case SolverKind::Mcwf: return "mcwf";
        case SolverKind::Newton: return "newton";
    }
    return "?";
}

struct SolverOptions {
    int taylor_order = 4;
    bool density_matrix = false;
    int shots = 1;
    int shot_parallel_threshold = 4;  // below this, shots run serially
    int threads = 0;                  // 0: hardware concurrency
    std::uint64_t seed = 0;
    std::optional<SolverKind> force_solver;
    bool final_state = false;
    bool record_jumps = false;
    double memory_budget = 2.0e9;  // bytes; concurrent launch falls back to serial above this
    std::map<std::string, double> overrides;
};

// none -> classical-only; labels -> product state; amplitudes -> explicit
// vector in the restricted basis
using InitialState = std::variant<std::monostate, std::vector<std::string>, std::vector<cd>>;

// ---------------------------------------------------------------------------
// Topological order of the node list: dependencies (couplings after the
// beams they reference) first, ties in insertion order.
// ---------------------------------------------------------------------------
inline std::vector<int> topo_order(const std::vector<std::vector<int>>& deps) {
    const int n = static_cast<int>(deps.size());
    std::vector<int> order;
    std::vector<char> placed(static_cast<std::size_t>(n), 0);
    order.reserve(static_cast<std::size_t>(n));
    bool progress = true;
    while (static_cast<int>(order.size()) < n && progress) {
        progress = false;
        for (int i = 0; i < n; ++i) {
            if (placed[static_cast<std::size_t>(i)]) continue;
            bool ready = true;
            for (int d : deps[static_cast<std::size_t>(i)]) {
                if (d == i) { ready = false; break; }
                if (d >= 0 && d < n && !placed[static_cast<std::size_t>(d)]) { ready = false; break; }
            }
            if (ready) {
                order.push_back(i);
                placed[static_cast<std::size_t>(i)] = 1;
                progress = true;
            }
        }
    }
    if (static_cast<int>(order.size()) < n) {
        std::string cyc;
        for (int i = 0; i < n; ++i)
            if (!placed[static_cast<std::size_t>(i)]) cyc += (cyc.empty() ? "" : ", ") + std::to_string(i);
        throw std::invalid_argument("topo_order: dependency cycle among nodes {" + cyc + "}");
    }
    return order;
}

inline std::vector<int> topo_order(const System& sys) {
    // BeamNode index per beam id
    std::vector<int> beam_node(sys.beams.size(), -1);
    for (std::size_t i = 0; i < sys.nodes.size(); ++i)
        if (const auto* bn = std::get_if<BeamNode>(&sys.nodes[i]))
            beam_node[static_cast<std::size_t>(bn->beam.value)] = static_cast<int>(i);
    std::vector<std::vector<int>> deps(sys.nodes.size());
    for (std::size_t i = 0; i < sys.nodes.size(); ++i) {
        if (const auto* c = std::get_if<CouplingNode>(&sys.nodes[i])) {
            if (c->beam) {
                if (c->beam->value < 0 || c->beam->value >= static_cast<int>(sys.beams.size()))
                    throw std::invalid_argument("compile: coupling references an unknown beam");
                deps[i].push_back(beam_node[static_cast<std::size_t>(c->beam->value)]);
            }
        }
    }
    return topo_order(deps);
}

// ---------------------------------------------------------------------------
// Compiled, preallocated run state for one shot at a time.
// ---------------------------------------------------------------------------
struct SimulationJob {
    // structure (fixed after compile)
    SolverKind solver = SolverKind::Schrodinger;
    SolverOptions options;
    Basis basis;
    std::shared_ptr<const Timeline> timeline;
    double total_time = 0.0;

    struct DriveTerm {
        SparseOp op;  // |upper><lower| pattern, hermitian pair
        int node_index = -1;
        int slot = -1;
        int atom = -1;
        int beam = -1;  // position-dependent amplitude when >= 0
        bool has_wavevector = false;
        Vec3 wavevector{};
        int phase_index = -1;  // phase-noise trajectory
        cd base = 0.0;         // 0.5 * Omega * cg * e_q (per shot)
        cd coeff = 0.0;        // per-step scratch
        bool is_detuning = false;
    };
    struct DiagTerm {
        SparseOp op;  // diagonal pattern
        int node_index = -1;
        bool vdw = false;
        int atom_a = -1, atom_b = -1;
        double base = 0.0;  // V or C6 (per shot)
        cd coeff = 0.0;
    };
    struct JumpTerm {
        SparseOp op;  // pattern entries 1.0
        int node_index = -1;
        double amp = 0.0;  // sqrt(branch * rate), per shot
    };
    std::vector<DriveTerm> drives;      // couplings and pulsed detunings
    std::vector<DiagTerm> interactions; // two-body terms (slotless)
    std::vector<JumpTerm> jumps;
    std::vector<double> k_diag;  // sum_k L_k^dag L_k (diagonal), MCWF

    // classical state
    bool semiclassical = false;
    std::vector<Vec3> positions, velocities;
    std::vector<double> masses;
    std::vector<std::vector<double>> alphas;  // [atom][beam]; NaN when undefined
    std::vector<Beam> beams;                  // working copy; AOD tones follow the timeline
    double force_step = 1e-8;

    // quantum state + preallocated work buffers
    std::vector<cd> psi, buf_term, buf_h;
    std::vector<cd> rho, rho_tmp, rho_acc;  // column-major, ME only
    double norm2 = 1.0;                     // running norm/trace tracker
    double mcwf_threshold = 0.0;
    std::vector<double> jump_weights;

    // initial state (resolved per shot)
    std::vector<cd> initial_amplitudes;

    // phase noise (per shot)
    std::vector<std::vector<double>> phase_trajs;
    double phase_grid_dt = 0.0;

    // detectors
    struct CompiledDetector {
        DetectorSpec spec;
        std::string name;
        int width = 1;
        std::vector<int> idx_a, idx_b;  // population states / coherence pairs
        int atom = -1;
        int drive_term = -1;  // field detector on a coupling
        int beam = -1;        // field detector on a beam
        std::vector<double> data;  // n_out rows x width
    };
    std::vector<CompiledDetector> detectors;
    std::vector<double> out_times;
    int n_out = 0;

    // per-shot bookkeeping
    int shot_index = 0;
    std::uint64_t master_seed = 0;
    std::mt19937_64 rng;
    std::vector<std::string> run_warnings;
    std::vector<std::pair<double, int>> jump_log;

    int dim() const { return basis.dim(); }

    std::size_t state_bytes() const {
        std::size_t b = (psi.size() + buf_term.size() + buf_h.size() + rho.size() + rho_tmp.size() +
                         rho_acc.size() + initial_amplitudes.size()) *
                        sizeof(cd);
        for (const auto& d : detectors) b += d.data.size() * sizeof(double);
        for (const auto& p : phase_trajs) b += p.size() * sizeof(double);
        return b;
    }
};

namespace detail {

inline double resolve_rate(const Value& v, ResolveContext& ctx, const char* what,
                           std::vector<std::string>& warnings) {
    double r = resolve(v, ctx);
    if (r < 0.0) {
        warnings.push_back(std::string(what) + ": sampled rate was negative, clamped to 0");
        r = 0.0;
    }
    return r;
}

inline Vec3 sample_position(const PositionInit& p, std::mt19937_64& rng) {
    if (const auto* v = std::get_if<Vec3>(&p)) return *v;
    const auto& g = std::get<GaussianPosition>(p);
    return {g.center.x + g.sigma.x * gaussian(rng), g.center.y + g.sigma.y * gaussian(rng),
            g.center.z + g.sigma.z * gaussian(rng)};
}

inline Vec3 sample_velocity(const VelocityInit& v, double mass, std::mt19937_64& rng) {
    if (const auto* fixed = std::get_if<Vec3>(&v)) return *fixed;
    const auto& mb = std::get<MaxwellBoltzmann>(v);
    const double s = std::sqrt(constants::k_B * mb.temperature / mass);
    return {s * gaussian(rng), s * gaussian(rng), s * gaussian(rng)};
}

inline bool has_distribution(const AtomSpec& a) {
    const bool pos = !std::holds_alternative<Vec3>(a.position);
    const bool vel = !std::holds_alternative<Vec3>(a.velocity);
    const bool moving = vel || (std::holds_alternative<Vec3>(a.velocity) &&
                                norm(std::get<Vec3>(a.velocity)) > 0.0);
    return pos || moving;
}

} // namespace detail

// Per-shot value refresh: samples parameters, noise realizations,
// polarization draws and initial motional state in place. Operator
// sparsity patterns and buffer sizes never change here.
inline void recompile(SimulationJob& job, const System& sys, const std::map<std::string, double>& overrides,
                      int shot) {
    job.shot_index = shot;
    job.rng.seed(shot_seed(job.master_seed, static_cast<std::uint64_t>(shot)));
    job.run_warnings.clear();
    ResolveContext ctx{&overrides, &sys.parameters, &job.rng, {}};

    // phase 1: beams (reset the working copies; AOD tones follow the
    // timeline during the run)
    for (std::size_t b = 0; b < sys.beams.size(); ++b) job.beams[b] = sys.beams[b];

    // phase 2: atoms: initial positions and velocities
    for (std::size_t a = 0; a < sys.atoms.size(); ++a) {
        job.positions[a] = detail::sample_position(sys.atoms[a].position, job.rng);
        job.velocities[a] = detail::sample_velocity(sys.atoms[a].velocity, sys.atoms[a].mass, job.rng);
    }

    // phase 3: node values in compile order
    for (auto& d : job.drives) {
        const auto& node = sys.nodes[static_cast<std::size_t>(d.node_index)];
        if (d.is_detuning) {
            d.base = resolve(std::get<DetuningNode>(node).shift, ctx);
            continue;
        }
        const auto& c = std::get<CouplingNode>(node);
        cd amp = resolve(c.amplitude, ctx) * c.cg;
        if (c.use_polarization) {
            const auto pol = resolve_polarization(c.polarization, ctx);
            amp *= spherical_components(pol, c.quantization_axis).q(c.q);
        }
        d.base = 0.5 * amp;
        if (d.phase_index >= 0) {
            auto& traj = job.phase_trajs[static_cast<std::size_t>(d.phase_index)];
            // one sample beyond the last midpoint so interpolation never clamps
            const double duration = (static_cast<double>(traj.size())) * job.phase_grid_dt;
            traj = synthesize_phase_noise(*c.phase_noise, duration, job.phase_grid_dt, job.rng);
        }
    }
    for (auto& t : job.interactions) {
        const auto& node = std::get<InteractionNode>(sys.nodes[static_cast<std::size_t>(t.node_index)]);
        t.base = resolve(node.strength, ctx);
    }
    std::fill(job.k_diag.begin(), job.k_diag.end(), 0.0);
    for (auto& jop : job.jumps) {
        const auto& node = sys.nodes[static_cast<std::size_t>(jop.node_index)];
        double rate = 0.0, branch = 1.0;
        if (const auto* dec = std::get_if<DecayNode>(&node)) {
            rate = detail::resolve_rate(dec->rate, ctx, "decay", job.run_warnings);
            branch = dec->branch;
        } else {
            rate = detail::resolve_rate(std::get<DephasingNode>(node).rate, ctx, "dephasing",
                                        job.run_warnings);
        }
        jop.amp = std::sqrt(branch * rate);
        for (std::size_t i = 0; i < jop.op.nnz(); ++i)
            job.k_diag[static_cast<std::size_t>(jop.op.cols[i])] += jop.amp * jop.amp;
    }
}

inline SimulationJob compile(const System& sys, const Sequence& seq, InitialState initial = std::monostate{},
                             SolverOptions options = {}) {
    SimulationJob job;
    job.options = options;
    job.master_seed = options.seed;
    if (options.taylor_order < 1) throw std::invalid_argument("compile: taylor order must be >= 1");
    if (options.shots < 1) throw std::invalid_argument("compile: shots must be >= 1");

    const auto order = topo_order(sys);  // validates beam references / acyclicity
    job.timeline = std::make_shared<const Timeline>(expand_timeline(seq, sys));
    job.total_time = job.timeline->t_end.empty() ? 0.0 : job.timeline->t_end.back();

    // default initial state from the system when none is passed
    if (std::holds_alternative<std::monostate>(initial) && sys.initial_levels)
        initial = *sys.initial_levels;

    // solver selection
    bool dissipative = false;
    for (const auto& n : sys.nodes)
        if (std::holds_alternative<DecayNode>(n) || std::holds_alternative<DephasingNode>(n))
            dissipative = true;
    const bool classical_only = std::holds_alternative<std::monostate>(initial);
    if (options.force_solver) {
        job.solver = *options.force_solver;
        if (job.solver != SolverKind::Newton && classical_only)
            throw std::invalid_argument("compile: quantum solver requested without an initial state");
    } else if (classical_only) {
        job.solver = SolverKind::Newton;
    } else if (options.density_matrix) {
        job.solver = SolverKind::MasterEquation;
    } else if (dissipative) {
        job.solver = SolverKind::Mcwf;
    } else {
        job.solver = SolverKind::Schrodinger;
    }

    // semiclassical participation
    job.positions.resize(sys.atoms.size());
    job.velocities.resize(sys.atoms.size());
    job.masses.resize(sys.atoms.size());
    job.alphas.assign(sys.atoms.size(), std::vector<double>(sys.beams.size(),
                                                            std::numeric_limits<double>::quiet_NaN()));
    double min_scale = 0.0;
    for (std::size_t a = 0; a < sys.atoms.size(); ++a) {
        job.masses[a] = sys.atoms[a].mass;
        if (detail::has_distribution(sys.atoms[a])) job.semiclassical = true;
        for (std::size_t b = 0; b < sys.beams.size(); ++b) {
            double lambda = 0.0;
            std::visit(
                [&](const auto& beam) {
                    using T = std::decay_t<decltype(beam)>;
                    if constexpr (std::is_same_v<T, PlanarBeam>) {
                        const double k = norm(beam.wavevector);
                        lambda = k > 0 ? constants::two_pi / k : 0.0;
                    } else {
                        lambda = beam.wavelength;
                    }
                },
                sys.beams[b]);
            const auto alpha = sys.atoms[a].polarizability_at(lambda);
            if (alpha) {
                job.alphas[a][b] = *alpha;
                job.semiclassical = true;
            }
            const double s = force_length_scale(sys.beams[b]);
            if (s > 0 && (min_scale == 0 || s < min_scale)) min_scale = s;
        }
    }
    job.force_step = (min_scale > 0 ? min_scale : 1e-6) / 100.0;
    job.beams = sys.beams;
    if (job.solver == SolverKind::Newton && !job.semiclassical)
        job.run_warnings.push_back("classical-only run without any motion source");

    // basis and operators
    if (job.solver != SolverKind::Newton) {
        job.basis = build_basis(sys.atoms, sys.maxoccupations);
        const int d = job.basis.dim();

        for (int ni : order) {
            const auto& node = sys.nodes[static_cast<std::size_t>(ni)];
            if (const auto* c = std::get_if<CouplingNode>(&node)) {
                SimulationJob::DriveTerm t;
                t.op = SparseOp(d, true);
                for (int s = 0; s < d; ++s) {
                    const auto& cfg = job.basis.config(s);
                    if (cfg[static_cast<std::size_t>(c->atom.value)] != c->lower) continue;
                    const int target = job.basis.index_with(cfg, c->atom.value, c->upper);
                    if (target >= 0) t.op.add(target, s, 1.0);
                }
                t.node_index = ni;
                t.slot = job.timeline->slot(NodeId{ni});
                t.atom = c->atom.value;
                t.beam = c->beam ? c->beam->value : -1;
                if (c->wavevector) {
                    t.has_wavevector = true;
                    t.wavevector = *c->wavevector;
                }
                if (c->phase_noise) {
                    t.phase_index = static_cast<int>(job.phase_trajs.size());
                    job.phase_trajs.emplace_back();
                }
                job.drives.push_back(std::move(t));
            } else if (const auto* dn = std::get_if<DetuningNode>(&node)) {
                SimulationJob::DriveTerm t;
                t.op = SparseOp(d, false);
                for (int s = 0; s < d; ++s)
                    if (job.basis.config(s)[static_cast<std::size_t>(dn->atom.value)] == dn->level)
                        t.op.add(s, s, 1.0);
                t.node_index = ni;
                t.slot = job.timeline->slot(NodeId{ni});
                t.atom = dn->atom.value;
                t.is_detuning = true;
                job.drives.push_back(std::move(t));
            } else if (const auto* in = std::get_if<InteractionNode>(&node)) {
                SimulationJob::DiagTerm t;
                t.op = SparseOp(d, false);
                for (int s = 0; s < d; ++s) {
                    const auto& cfg = job.basis.config(s);
                    if (cfg[static_cast<std::size_t>(in->atom_a.value)] == in->level_a &&
                        cfg[static_cast<std::size_t>(in->atom_b.value)] == in->level_b)
                        t.op.add(s, s, 1.0);
                }
                t.node_index = ni;
                t.vdw = in->vdw;
                t.atom_a = in->atom_a.value;
                t.atom_b = in->atom_b.value;
                job.interactions.push_back(std::move(t));
            } else if (const auto* dec = std::get_if<DecayNode>(&node)) {
                SimulationJob::JumpTerm t;
                t.op = SparseOp(d, false);
                for (int s = 0; s < d; ++s) {
                    const auto& cfg = job.basis.config(s);
                    if (cfg[static_cast<std::size_t>(dec->atom.value)] != dec->upper) continue;
                    const int target = job.basis.index_with(cfg, dec->atom.value, dec->lower);
                    if (target >= 0) t.op.add(target, s, 1.0);
                }
                t.node_index = ni;
                job.jumps.push_back(std::move(t));
            } else if (const auto* dep = std::get_if<DephasingNode>(&node)) {
                SimulationJob::JumpTerm t;
                t.op = SparseOp(d, false);
                for (int s = 0; s < d; ++s) {
                    const int lvl = job.basis.config(s)[static_cast<std::size_t>(dep->atom.value)];
                    for (int sel : dep->levels)
                        if (sel == lvl) {
                            t.op.add(s, s, 1.0);
                            break;
                        }
                }
                t.node_index = ni;
                job.jumps.push_back(std::move(t));
            }
        }
        job.k_diag.assign(static_cast<std::size_t>(d), 0.0);

        // state buffers
        job.psi.assign(static_cast<std::size_t>(d), 0.0);
        job.buf_term.assign(static_cast<std::size_t>(d), 0.0);
        job.buf_h.assign(static_cast<std::size_t>(d), 0.0);
        if (job.solver == SolverKind::MasterEquation) {
            const std::size_t d2 = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
            job.rho.assign(d2, 0.0);
            job.rho_tmp.assign(d2, 0.0);
            job.rho_acc.assign(d2, 0.0);
        }
        job.jump_weights.assign(job.jumps.size(), 0.0);

        // initial state
        if (const auto* labels = std::get_if<std::vector<std::string>>(&initial)) {
            if (labels->size() != sys.atoms.size())
                throw std::invalid_argument("compile: initial state needs one level per atom");
            std::vector<std::uint8_t> cfg(sys.atoms.size());
            for (std::size_t a = 0; a < sys.atoms.size(); ++a) {
                const int idx = sys.atoms[a].level_index((*labels)[a]);
                if (idx < 0)
                    throw std::invalid_argument("compile: initial level '" + (*labels)[a] +
                                                "' not in the simulated subset of atom '" + sys.atoms[a].name +
                                                "'");
                cfg[a] = static_cast<std::uint8_t>(idx);
            }
            const int s = job.basis.index_of(cfg);
            if (s < 0) throw std::invalid_argument("compile: initial state excluded by maxoccupations");
            job.initial_amplitudes.assign(static_cast<std::size_t>(d), 0.0);
            job.initial_amplitudes[static_cast<std::size_t>(s)] = 1.0;
        } else if (const auto* amps = std::get_if<std::vector<cd>>(&initial)) {
            if (static_cast<int>(amps->size()) != d)
                throw std::invalid_argument("compile: initial amplitude vector has dimension " +
                                            std::to_string(amps->size()) + ", basis has " + std::to_string(d));
            job.initial_amplitudes = *amps;
        }
    }

    // phase-noise grid: uniform at the base sequence dt, one sample past
    // the end so midpoint interpolation never leaves the grid
    job.phase_grid_dt = seq.dt;
    const auto traj_len = static_cast<std::size_t>(
        job.timeline->n_steps > 0 ? std::llround(job.total_time / seq.dt) + 2 : 0);
    for (auto& traj : job.phase_trajs) traj.assign(traj_len, 0.0);

    // detectors
    job.n_out = job.timeline->n_steps / seq.downsample;
    job.out_times.resize(static_cast<std::size_t>(job.n_out));
    int row = 0;
    for (int k = 0; k < job.timeline->n_steps; ++k)
        if ((k + 1) % seq.downsample == 0) job.out_times[static_cast<std::size_t>(row++)] = job.timeline->t_end[static_cast<std::size_t>(k)];

    for (const auto& spec : sys.detectors) {
        SimulationJob::CompiledDetector det;
        det.spec = spec;
        det.name = detector_name(spec);
        if (const auto* p = std::get_if<PopulationDetector>(&spec)) {
            if (job.solver == SolverKind::Newton)
                throw std::invalid_argument("compile: population detector in a classical-only run");
            const int lvl = sys.atom(p->atom).level_index(p->level);
            if (lvl < 0) throw std::invalid_argument("detector '" + det.name + "': unknown level");
            det.width = 1;
            for (int s = 0; s < job.basis.dim(); ++s)
                if (job.basis.config(s)[static_cast<std::size_t>(p->atom.value)] == lvl) det.idx_a.push_back(s);
        } else if (const auto* c = std::get_if<CoherenceDetector>(&spec)) {
            if (job.solver == SolverKind::Newton)
                throw std::invalid_argument("compile: coherence detector in a classical-only run");
            const int la = sys.atom(c->atom).level_index(c->level_a);
            const int lb = sys.atom(c->atom).level_index(c->level_b);
            if (la < 0 || lb < 0) throw std::invalid_argument("detector '" + det.name + "': unknown level");
            det.width = 2;
            for (int s = 0; s < job.basis.dim(); ++s) {
                const auto& cfg = job.basis.config(s);
                if (cfg[static_cast<std::size_t>(c->atom.value)] != la) continue;
                const int t = job.basis.index_with(cfg, c->atom.value, lb);
                if (t >= 0) {
                    det.idx_a.push_back(s);
                    det.idx_b.push_back(t);
                }
            }
        } else if (const auto* m = std::get_if<MotionDetector>(&spec)) {
            sys.atom(m->atom);
            det.width = 6;
            det.atom = m->atom.value;
        } else if (const auto* f = std::get_if<FieldDetector>(&spec)) {
            det.width = 2;
            if (const auto* nid = std::get_if<NodeId>(&f->source)) {
                for (std::size_t t = 0; t < job.drives.size(); ++t)
                    if (job.drives[t].node_index == nid->value) det.drive_term = static_cast<int>(t);
                if (det.drive_term < 0)
                    throw std::invalid_argument("detector '" + det.name + "': handle is not a drive node");
            } else {
                det.beam = std::get<BeamId>(f->source).value;
                sys.beam(BeamId{det.beam});
            }
        }
        det.data.assign(static_cast<std::size_t>(job.n_out) * static_cast<std::size_t>(det.width), 0.0);
        job.detectors.push_back(std::move(det));
    }

    recompile(job, sys, options.overrides, 0);
    return job;
}

// Basis dimension, operator fill, solver choice: debugging and golden
// tests.
inline nlohmann::json job_summary(const SimulationJob& job) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& d : job.drives)
        ops.push_back({{"kind", d.is_detuning ? "detuning" : "coupling"}, {"nnz", d.op.nnz()}});
    for (const auto& t : job.interactions)
        ops.push_back({{"kind", t.vdw ? "vdw" : "interaction"}, {"nnz", t.op.nnz()}});
    nlohmann::json jumps = nlohmann::json::array();
    for (const auto& jop : job.jumps) jumps.push_back({{"nnz", jop.op.nnz()}});
    return {
        {"basis_dimension", job.dim()},
        {"solver", solver_name(job.solver)},
        {"steps", job.timeline ? job.timeline->n_steps : 0},
        {"semiclassical", job.semiclassical},
        {"operators", ops},
        {"jump_operators", jumps},
    };
}

} // namespace atomsim
