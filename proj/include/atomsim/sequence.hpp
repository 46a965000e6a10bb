#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "system.hpp"

namespace atomsim {

enum class Interp { PiecewiseConstant, Linear };

// Drive a coupling (or pulsed detuning) for a fixed duration, optionally
// with a shaped complex amplitude profile.
struct Pulse {
    std::vector<NodeId> targets;
    double duration = 0.0;
    std::vector<cd> envelope;  // empty: constant multiplier 1
    Interp interp = Interp::PiecewiseConstant;

    Pulse() = default;
    Pulse(NodeId target, double dur) : targets{target}, duration(dur) {}
    Pulse(std::vector<NodeId> t, double dur) : targets(std::move(t)), duration(dur) {}
};

struct Wait {
    double duration = 0.0;
};

// Zero-duration activity toggles; they take effect from the step that
// begins at the toggle time.
struct On {
    NodeId target;
};
struct Off {
    NodeId target;
};

enum class AodAxis { Row, Col };

// Linear AOD tone-frequency ramp by delta_freq over `duration`,
// translating the corresponding trap row/column. An optional finer
// classical step sub-cycles the motion integrator during the move.
struct AodMove {
    BeamId array;
    AodAxis axis = AodAxis::Row;
    int tone = 0;
    double delta_freq = 0.0;  // Hz
    double duration = 0.0;
    double classical_dt = 0.0;  // 0: same step as the quantum solver
};

// Zero-duration set of a tone frequency or amplitude.
struct AodSet {
    BeamId array;
    AodAxis axis = AodAxis::Row;
    int tone = 0;
    bool set_amplitude = false;  // false: frequency
    double value = 0.0;
};

// Linear tone-amplitude ramp.
struct AodRamp {
    BeamId array;
    AodAxis axis = AodAxis::Row;
    int tone = 0;
    double delta_amplitude = 0.0;
    double duration = 0.0;
};

struct Instruction;

// All members start at the same step; the block lasts as long as its
// longest member. Nested Parallel blocks are flattened.
struct Parallel {
    std::vector<Instruction> body;
};

struct Instruction {
    std::variant<Pulse, Wait, On, Off, AodMove, AodSet, AodRamp, Parallel> op;
    double dt = 0.0;  // per-instruction step override (0: sequence default)

    template <typename T>
    Instruction(T v) : op(std::move(v)) {}
    template <typename T>
    Instruction(T v, double dt_override) : op(std::move(v)), dt(dt_override) {}
};

inline Instruction MoveRow(BeamId array, int tone, double df, double duration, double step_dt = 0.0,
                           double classical_dt = 0.0) {
    return Instruction(AodMove{array, AodAxis::Row, tone, df, duration, classical_dt}, step_dt);
}
inline Instruction MoveCol(BeamId array, int tone, double df, double duration, double step_dt = 0.0,
                           double classical_dt = 0.0) {
    return Instruction(AodMove{array, AodAxis::Col, tone, df, duration, classical_dt}, step_dt);
}
inline Instruction FreqRow(BeamId array, int tone, double f) { return Instruction(AodSet{array, AodAxis::Row, tone, false, f}); }
inline Instruction FreqCol(BeamId array, int tone, double f) { return Instruction(AodSet{array, AodAxis::Col, tone, false, f}); }
inline Instruction AmplRow(BeamId array, int tone, double a) { return Instruction(AodSet{array, AodAxis::Row, tone, true, a}); }
inline Instruction AmplCol(BeamId array, int tone, double a) { return Instruction(AodSet{array, AodAxis::Col, tone, true, a}); }
inline Instruction RampRow(BeamId array, int tone, double da, double duration) {
    return Instruction(AodRamp{array, AodAxis::Row, tone, da, duration});
}
inline Instruction RampCol(BeamId array, int tone, double da, double duration) {
    return Instruction(AodRamp{array, AodAxis::Col, tone, da, duration});
}

// Time-ordered instruction program on a fixed step grid. Detectors
// record every `downsample`-th step.
struct Sequence {
    double dt = 0.0;
    int downsample = 1;
    std::vector<Instruction> instructions;

    Sequence() = default;
    explicit Sequence(double step, int ds = 1) : dt(step), downsample(ds) {
        if (dt <= 0) throw std::invalid_argument("sequence: dt must be positive");
        if (downsample < 1) throw std::invalid_argument("sequence: downsample must be >= 1");
    }
};

inline void append(Sequence& seq, Instruction instr) { seq.instructions.push_back(std::move(instr)); }

namespace detail {

inline double instruction_duration(const Instruction& instr);

inline double body_duration(const std::vector<Instruction>& body) {
    double d = 0.0;
    for (const auto& i : body) d = std::max(d, instruction_duration(i));
    return d;
}

inline double instruction_duration(const Instruction& instr) {
    struct V {
        const Instruction& outer;
        double operator()(const Pulse& p) const { return p.duration; }
        double operator()(const Wait& w) const { return w.duration; }
        double operator()(const On&) const { return 0.0; }
        double operator()(const Off&) const { return 0.0; }
        double operator()(const AodMove& m) const { return m.duration; }
        double operator()(const AodSet&) const { return 0.0; }
        double operator()(const AodRamp& r) const { return r.duration; }
        double operator()(const Parallel& p) const { return body_duration(p.body); }
    };
    return std::visit(V{instr}, instr.op);
}

} // namespace detail

// Total program duration: serial instructions add, Parallel takes the
// maximum of its members, toggles are free.
inline double total_duration(const Sequence& seq) {
    double d = 0.0;
    for (const auto& i : seq.instructions) d += detail::instruction_duration(i);
    return d;
}

// ---------------------------------------------------------------------------
// Expanded timeline: the per-step coefficient schedule for every
// drivable node plus AOD tone schedules of every touched array. The
// expansion is deterministic; per-shot phase noise multiplies on top at
// run time.
// ---------------------------------------------------------------------------
struct AodTimeline {
    std::vector<std::vector<double>> row_freq, row_amp, col_freq, col_amp;  // [tone][step]
};

struct Timeline {
    int n_steps = 0;
    std::vector<double> step_dt;  // per step
    std::vector<double> t_end;    // time after step k (first output sample is t_end[0] = dt)
    std::vector<int> slot_of_node;          // node index -> drive slot, -1 if not drivable
    std::vector<int> node_of_slot;          // slot -> node index
    std::vector<std::vector<cd>> drive;     // [slot][step] complex multiplier
    std::map<int, AodTimeline> aod;         // beam index -> tone schedules
    std::vector<int> classical_substeps;    // empty: 1 everywhere
    std::vector<std::string> warnings;

    int slot(NodeId id) const {
        if (id.value < 0 || id.value >= static_cast<int>(slot_of_node.size())) return -1;
        return slot_of_node[static_cast<std::size_t>(id.value)];
    }
};

namespace detail {

struct PulseWindow {
    int slot;
    long start, steps;
    const Pulse* pulse;
    double dt;
};
struct ToggleEvent {
    int slot;
    long step;
    bool state;
};
struct AodEvent {
    int beam;
    AodAxis axis;
    int tone;
    bool amplitude;
    long step;
    double value;  // for Set
};
struct AodRampWindow {
    int beam;
    AodAxis axis;
    int tone;
    bool amplitude;  // false: frequency (Move), true: amplitude (Ramp)
    long start, steps;
    double delta;
    double dt;
    double classical_dt;
};

struct ExpansionState {
    const System* sys;
    std::vector<double> seg_dt;  // one entry per step (built serially)
    std::vector<PulseWindow> pulses;
    std::vector<ToggleEvent> toggles;
    std::vector<AodEvent> sets;
    std::vector<AodRampWindow> ramps;
    std::vector<const Pulse*> pulse_storage_check;
};

inline long duration_to_steps(double duration, double dt, const char* what) {
    if (duration < 0) throw std::invalid_argument(std::string(what) + ": negative duration");
    if (duration == 0) return 0;
    const long n = std::llround(duration / dt);
    if (n == 0) throw std::invalid_argument(std::string(what) + ": duration shorter than half a step");
    if (std::abs(static_cast<double>(n) * dt - duration) > 1e-6 * duration)
        throw std::invalid_argument(std::string(what) + ": duration is not a whole number of steps (dt=" +
                                    std::to_string(dt) + ", duration=" + std::to_string(duration) + ")");
    return n;
}

inline int drive_slot(const System& sys, std::vector<int>& slot_of_node, std::vector<int>& node_of_slot,
                      NodeId id, const char* what) {
    if (id.value < 0 || id.value >= static_cast<int>(sys.nodes.size()))
        throw std::invalid_argument(std::string(what) + ": unknown node handle");
    const auto& node = sys.nodes[static_cast<std::size_t>(id.value)];
    if (!std::holds_alternative<CouplingNode>(node) && !std::holds_alternative<DetuningNode>(node))
        throw std::invalid_argument(std::string(what) + ": handle is not a coupling or detuning");
    int& slot = slot_of_node[static_cast<std::size_t>(id.value)];
    if (slot < 0) {
        slot = static_cast<int>(node_of_slot.size());
        node_of_slot.push_back(id.value);
    }
    return slot;
}

inline const TweezerArray& aod_array(const System& sys, BeamId id, AodAxis axis, int tone, const char* what) {
    const auto& beam = sys.beam(id);
    const auto* arr = std::get_if<TweezerArray>(&beam);
    if (!arr) throw std::invalid_argument(std::string(what) + ": beam is not a tweezer array");
    const auto& tones = axis == AodAxis::Row ? arr->row_tones : arr->col_tones;
    if (tone < 0 || tone >= static_cast<int>(tones.size()))
        throw std::invalid_argument(std::string(what) + ": tone index out of range");
    return *arr;
}

// Expands one instruction starting at `cursor` with step size `dt`;
// returns the number of steps consumed. Only the outermost serial walk
// appends to the step grid (`grow`).
inline long expand_instruction(ExpansionState& st, Timeline& tl, const Instruction& instr, long cursor,
                               double dt, bool grow, bool in_parallel);

inline long expand_body(ExpansionState& st, Timeline& tl, const std::vector<Instruction>& body, long cursor,
                        double dt, bool grow) {
    long max_steps = 0;
    for (const auto& i : body)
        max_steps = std::max(max_steps, expand_instruction(st, tl, i, cursor, dt, false, true));
    if (grow)
        for (long k = 0; k < max_steps; ++k) st.seg_dt.push_back(dt);
    return max_steps;
}

inline long expand_instruction(ExpansionState& st, Timeline& tl, const Instruction& instr, long cursor,
                               double dt, bool grow, bool in_parallel) {
    if (instr.dt != 0.0) {
        if (in_parallel)
            throw std::invalid_argument("sequence: dt override inside a Parallel block is ambiguous");
        if (instr.dt < 0) throw std::invalid_argument("sequence: negative dt override");
        dt = instr.dt;
    }
    struct V {
        ExpansionState& st;
        Timeline& tl;
        long cursor;
        double dt;
        bool grow;

        long operator()(const Pulse& p) const {
            if (p.targets.empty()) throw std::invalid_argument("pulse: no targets");
            if (p.interp == Interp::Linear && !p.envelope.empty() && p.envelope.size() < 2)
                throw std::invalid_argument("pulse: linear interpolation needs at least 2 envelope samples");
            const long steps = duration_to_steps(p.duration, dt, "pulse");
            for (const auto id : p.targets) {
                const int slot = drive_slot(*st.sys, tl.slot_of_node, tl.node_of_slot, id, "pulse");
                st.pulses.push_back({slot, cursor, steps, &p, dt});
            }
            grow_steps(steps);
            return steps;
        }
        long operator()(const Wait& w) const {
            const long steps = duration_to_steps(w.duration, dt, "wait");
            grow_steps(steps);
            return steps;
        }
        long operator()(const On& t) const {
            st.toggles.push_back({drive_slot(*st.sys, tl.slot_of_node, tl.node_of_slot, t.target, "on"),
                                  cursor, true});
            return 0;
        }
        long operator()(const Off& t) const {
            st.toggles.push_back({drive_slot(*st.sys, tl.slot_of_node, tl.node_of_slot, t.target, "off"),
                                  cursor, false});
            return 0;
        }
        long operator()(const AodMove& m) const {
            aod_array(*st.sys, m.array, m.axis, m.tone, "move");
            const long steps = duration_to_steps(m.duration, dt, "move");
            st.ramps.push_back({m.array.value, m.axis, m.tone, false, cursor, steps, m.delta_freq, dt,
                                m.classical_dt});
            grow_steps(steps);
            return steps;
        }
        long operator()(const AodSet& s) const {
            aod_array(*st.sys, s.array, s.axis, s.tone, "aod set");
            st.sets.push_back({s.array.value, s.axis, s.tone, s.set_amplitude, cursor, s.value});
            return 0;
        }
        long operator()(const AodRamp& r) const {
            aod_array(*st.sys, r.array, r.axis, r.tone, "aod ramp");
            const long steps = duration_to_steps(r.duration, dt, "aod ramp");
            st.ramps.push_back({r.array.value, r.axis, r.tone, true, cursor, steps, r.delta_amplitude, dt, 0.0});
            grow_steps(steps);
            return steps;
        }
        long operator()(const Parallel& p) const { return expand_body(st, tl, p.body, cursor, dt, grow); }

        void grow_steps(long steps) const {
            if (grow)
                for (long k = 0; k < steps; ++k) st.seg_dt.push_back(dt);
        }
    };
    return std::visit(V{st, tl, cursor, dt, grow}, instr.op);
}

} // namespace detail

// Expands a sequence against a system into the full per-step schedule.
inline Timeline expand_timeline(const Sequence& seq, const System& sys) {
    if (seq.dt <= 0) throw std::invalid_argument("sequence: dt must be positive");
    Timeline tl;
    tl.slot_of_node.assign(sys.nodes.size(), -1);

    detail::ExpansionState st;
    st.sys = &sys;

    long cursor = 0;
    for (const auto& instr : seq.instructions)
        cursor += detail::expand_instruction(st, tl, instr, cursor, seq.dt, true, false);

    tl.n_steps = static_cast<int>(st.seg_dt.size());
    tl.step_dt = std::move(st.seg_dt);
    tl.t_end.resize(tl.step_dt.size());
    double t = 0.0;
    for (std::size_t k = 0; k < tl.step_dt.size(); ++k) {
        t += tl.step_dt[k];
        tl.t_end[k] = t;
    }

    // every coupling/detuning node participates in the schedule so that
    // activity flags apply even without pulses
    for (std::size_t i = 0; i < sys.nodes.size(); ++i) {
        if (std::holds_alternative<CouplingNode>(sys.nodes[i]) ||
            std::holds_alternative<DetuningNode>(sys.nodes[i]))
            detail::drive_slot(sys, tl.slot_of_node, tl.node_of_slot, NodeId{static_cast<int>(i)}, "schedule");
    }

    // base activity: node flag, modified by On/Off events
    const auto n = static_cast<std::size_t>(tl.n_steps);
    tl.drive.assign(tl.node_of_slot.size(), {});
    for (std::size_t s = 0; s < tl.node_of_slot.size(); ++s) {
        const auto& node = sys.nodes[static_cast<std::size_t>(tl.node_of_slot[s])];
        const bool active = std::holds_alternative<CouplingNode>(node)
                                ? std::get<CouplingNode>(node).active
                                : std::get<DetuningNode>(node).active;
        tl.drive[s].assign(n, active ? cd(1.0) : cd(0.0));
    }
    std::stable_sort(st.toggles.begin(), st.toggles.end(),
                     [](const auto& a, const auto& b) { return a.step < b.step; });
    for (const auto& ev : st.toggles) {
        auto& row = tl.drive[static_cast<std::size_t>(ev.slot)];
        for (std::size_t k = static_cast<std::size_t>(ev.step); k < n; ++k) row[k] = ev.state ? cd(1.0) : cd(0.0);
    }

    // pulses overwrite their windows; overlapping windows on one slot are
    // ambiguous
    std::map<int, std::vector<std::pair<long, long>>> windows;
    for (const auto& pw : st.pulses) {
        auto& w = windows[pw.slot];
        for (const auto& [a, b] : w)
            if (pw.start < b && a < pw.start + pw.steps)
                throw std::invalid_argument("sequence: overlapping pulses on one coupling handle");
        w.emplace_back(pw.start, pw.start + pw.steps);

        auto& row = tl.drive[static_cast<std::size_t>(pw.slot)];
        bool was_active = false;
        for (long k = 0; k < pw.steps; ++k) {
            const std::size_t idx = static_cast<std::size_t>(pw.start + k);
            if (row[idx] != cd(0.0)) was_active = true;
            row[idx] = pw.pulse->envelope.empty() ? cd(1.0)
                                                  : [&] {
                const auto& env = pw.pulse->envelope;
                const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(pw.steps);
                if (pw.pulse->interp == Interp::PiecewiseConstant) {
                    const auto m = static_cast<std::size_t>(env.size());
                    auto j = static_cast<std::size_t>(u * static_cast<double>(m));
                    if (j >= m) j = m - 1;
                    return env[j];
                }
                const double x = u * static_cast<double>(env.size() - 1);
                const auto j0 = static_cast<std::size_t>(x);
                const std::size_t j1 = std::min(j0 + 1, env.size() - 1);
                const double frac = x - static_cast<double>(j0);
                return (1.0 - frac) * env[j0] + frac * env[j1];
            }();
        }
        if (was_active)
            tl.warnings.push_back("pulse overlaps a window where its target is already active (slot " +
                                  std::to_string(pw.slot) + "); the pulse multiplier wins");
    }

    // AOD tone schedules for touched arrays
    auto ensure_aod = [&](int beam) -> AodTimeline& {
        auto it = tl.aod.find(beam);
        if (it != tl.aod.end()) return it->second;
        const auto& arr = std::get<TweezerArray>(sys.beams[static_cast<std::size_t>(beam)]);
        AodTimeline a;
        auto fill = [&](const std::vector<AodTone>& tones, bool amp) {
            std::vector<std::vector<double>> v;
            for (const auto& tone : tones) v.emplace_back(n, amp ? tone.amplitude : tone.frequency);
            return v;
        };
        a.row_freq = fill(arr.row_tones, false);
        a.row_amp = fill(arr.row_tones, true);
        a.col_freq = fill(arr.col_tones, false);
        a.col_amp = fill(arr.col_tones, true);
        return tl.aod.emplace(beam, std::move(a)).first->second;
    };
    auto tone_row = [&](AodTimeline& a, AodAxis axis, bool amp, int tone) -> std::vector<double>& {
        auto& grid = axis == AodAxis::Row ? (amp ? a.row_amp : a.row_freq) : (amp ? a.col_amp : a.col_freq);
        return grid[static_cast<std::size_t>(tone)];
    };

    struct Touch {
        long start, end;
    };
    std::map<std::tuple<int, int, int, bool>, std::vector<Touch>> ramp_spans;
    for (const auto& r : st.ramps) {
        auto& spans = ramp_spans[{r.beam, static_cast<int>(r.axis), r.tone, r.amplitude}];
        for (const auto& sp : spans)
            if (r.start < sp.end && sp.start < r.start + r.steps)
                throw std::invalid_argument("sequence: overlapping AOD ramps on one tone");
        spans.push_back({r.start, r.start + r.steps});
    }

    // chronological fill: each event writes from its start to the end of
    // the timeline, so later events take precedence
    struct AnyEvent {
        long step;
        int order;
        const detail::AodEvent* set = nullptr;
        const detail::AodRampWindow* ramp = nullptr;
    };
    std::vector<AnyEvent> events;
    int order = 0;
    for (const auto& s : st.sets) events.push_back({s.step, order++, &s, nullptr});
    for (const auto& r : st.ramps) events.push_back({r.start, order++, nullptr, &r});
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return a.step != b.step ? a.step < b.step : a.order < b.order;
    });
    for (const auto& ev : events) {
        if (ev.set) {
            const auto& s = *ev.set;
            auto& row = tone_row(ensure_aod(s.beam), s.axis, s.amplitude, s.tone);
            for (std::size_t k = static_cast<std::size_t>(s.step); k < n; ++k) row[k] = s.value;
        } else {
            const auto& r = *ev.ramp;
            auto& row = tone_row(ensure_aod(r.beam), r.axis, r.amplitude, r.tone);
            const double start_value = r.start > 0 ? row[static_cast<std::size_t>(r.start - 1)]
                                                   : row.empty() ? 0.0 : row[0];
            const double total = r.dt * static_cast<double>(r.steps);
            for (long k = 0; k < r.steps; ++k)
                row[static_cast<std::size_t>(r.start + k)] =
                    start_value + r.delta * ((static_cast<double>(k) + 0.5) * r.dt) / total;
            for (std::size_t k = static_cast<std::size_t>(r.start + r.steps); k < n; ++k)
                row[k] = start_value + r.delta;
        }
    }

    // classical sub-cycling during moves
    bool any_substep = false;
    for (const auto& r : st.ramps)
        if (r.classical_dt > 0.0) any_substep = true;
    if (any_substep) {
        tl.classical_substeps.assign(n, 1);
        for (const auto& r : st.ramps) {
            if (r.classical_dt <= 0.0) continue;
            const int sub = std::max(1, static_cast<int>(std::llround(r.dt / r.classical_dt)));
            for (long k = r.start; k < r.start + r.steps; ++k)
                tl.classical_substeps[static_cast<std::size_t>(k)] =
                    std::max(tl.classical_substeps[static_cast<std::size_t>(k)], sub);
        }
    }

    return tl;
}

} // namespace atomsim
