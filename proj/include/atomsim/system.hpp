#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "angular.hpp"
#include "atoms.hpp"
#include "beams.hpp"
#include "detectors.hpp"
#include "parameter.hpp"
#include "phase_noise.hpp"
#include "polarization.hpp"

namespace atomsim {

// ---------------------------------------------------------------------------
// Process nodes. The ordered node list implicitly encodes the compile
// DAG: couplings depend on the beams they reference; everything else is
// independent and compiles in insertion order.
// ---------------------------------------------------------------------------

struct BeamNode {
    BeamId beam;
};

// Coherent drive between two levels of one atom,
//   H = (amp/2) m(t) |upper><lower| + h.c.,  amp = Omega * cg * e_q.
// Optional features: a beam reference makes the amplitude follow the
// atom's position, a wavevector adds a plane-wave position phase, and a
// phase-noise model attaches a per-shot stochastic phase e^{i phi(t)}.
struct CouplingNode {
    AtomId atom;
    int lower = -1, upper = -1;  // level indices within the atom
    Value amplitude;             // Omega, rad/s
    double cg = 1.0;
    // polarization-distributed amplitude (manifold route): amp *= e_q
    bool use_polarization = false;
    int q = 0;
    Polarization polarization;
    Vec3 quantization_axis{0, 0, 1};
    std::optional<BeamId> beam;
    std::optional<Vec3> wavevector;
    std::optional<LaserPhaseNoiseModel> phase_noise;
    bool active = true;
};

struct DetuningNode {
    AtomId atom;
    int level = -1;
    Value shift;  // rad/s
    bool active = true;
};

struct DecayNode {
    AtomId atom;
    int upper = -1, lower = -1;
    Value rate;           // total manifold rate Gamma, rad/s
    double branch = 1.0;  // CG^2 branching fraction of this line
};

struct DephasingNode {
    AtomId atom;
    std::vector<int> levels;
    Value rate;  // gamma, rad/s; jump operator sqrt(gamma) * P_levels
};

struct InteractionNode {
    AtomId atom_a, atom_b;
    int level_a = -1, level_b = -1;
    Value strength;    // constant V (rad/s) or C6 (rad/s m^6)
    bool vdw = false;  // true: V = C6 / r^6 from instantaneous separation
};

using Node = std::variant<BeamNode, CouplingNode, DetuningNode, DecayNode, DephasingNode, InteractionNode>;

struct MaxOccupation {
    std::string level;  // label, matched per atom
    int max_count = 0;
};

// ---------------------------------------------------------------------------
// System: the declared device. Atoms, beams, process nodes, detectors,
// occupation constraints, named parameters and a default initial state.
// ---------------------------------------------------------------------------
class System {
  public:
    std::vector<AtomSpec> atoms;
    std::vector<Beam> beams;
    std::vector<Node> nodes;
    std::vector<DetectorSpec> detectors;
    std::vector<MaxOccupation> maxoccupations;
    std::map<std::string, Parameter> parameters;
    std::optional<std::vector<std::string>> initial_levels;  // product state, one label per atom

    AtomId add_atom(AtomSpec a) {
        if (a.name.empty()) a.name = "atom" + std::to_string(atoms.size());
        atoms.push_back(std::move(a));
        return {static_cast<int>(atoms.size() - 1)};
    }

    BeamId add_beam(Beam b) {
        beams.push_back(std::move(b));
        const BeamId id{static_cast<int>(beams.size() - 1)};
        nodes.push_back(BeamNode{id});
        return id;
    }

    const AtomSpec& atom(AtomId id) const {
        if (id.value < 0 || id.value >= static_cast<int>(atoms.size()))
            throw std::invalid_argument("unknown atom handle");
        return atoms[static_cast<std::size_t>(id.value)];
    }

    const Beam& beam(BeamId id) const {
        if (id.value < 0 || id.value >= static_cast<int>(beams.size()))
            throw std::invalid_argument("unknown beam handle");
        return beams[static_cast<std::size_t>(id.value)];
    }

    const Node& node(NodeId id) const {
        if (id.value < 0 || id.value >= static_cast<int>(nodes.size()))
            throw std::invalid_argument("unknown node handle");
        return nodes[static_cast<std::size_t>(id.value)];
    }

    NodeId push_node(Node n) {
        nodes.push_back(std::move(n));
        return {static_cast<int>(nodes.size() - 1)};
    }

    Parameter declare_parameter(std::string name, double default_value, double std_dev = 0.0) {
        Parameter p(std::move(name), default_value, std_dev);
        parameters[p.name] = p;
        return p;
    }
};

struct CouplingOptions {
    std::optional<BeamId> beam;
    bool active = true;
    std::optional<LaserPhaseNoiseModel> phase_noise;
    std::optional<Vec3> wavevector;
    std::optional<Vec3> quantization_axis;
    std::optional<Polarization> polarization;  // overrides the beam's polarization
};

// Bare two-level coupling.
inline NodeId add_coupling(System& sys, AtomId atom, const std::string& lower, const std::string& upper,
                           Value rabi, CouplingOptions opts = {}) {
    const auto& a = sys.atom(atom);
    CouplingNode n;
    n.atom = atom;
    n.lower = a.level_index(lower);
    n.upper = a.level_index(upper);
    if (n.lower < 0) throw std::invalid_argument("add_coupling: unknown level '" + lower + "'");
    if (n.upper < 0) throw std::invalid_argument("add_coupling: unknown level '" + upper + "'");
    if (n.lower == n.upper) throw std::invalid_argument("add_coupling: lower and upper coincide");
    n.amplitude = std::move(rabi);
    if (opts.beam) sys.beam(*opts.beam);  // validate
    n.beam = opts.beam;
    n.wavevector = opts.wavevector;
    n.phase_noise = opts.phase_noise;
    n.active = opts.active;
    return sys.push_node(std::move(n));
}

namespace detail {

// Sublevels of a manifold that are part of the atom's simulated subset.
inline std::vector<std::pair<HalfInt, int>> present_sublevels(const AtomSpec& a, const Manifold& m) {
    std::vector<std::pair<HalfInt, int>> out;
    for (const auto& lv : m.levels()) {
        const int idx = a.level_index(lv.label);
        if (idx >= 0) out.emplace_back(lv.m, idx);
    }
    return out;
}

inline int index_of_m(const std::vector<std::pair<HalfInt, int>>& levels, HalfInt m) {
    for (const auto& [lm, idx] : levels)
        if (lm == m) return idx;
    return -1;
}

} // namespace detail

// Manifold coupling with the amplitude distributed over sublevel pairs:
// one node per selection-rule-allowed pair and polarization component,
// with amplitude Omega * CG * e_q. The polarization (from the options or
// the referenced beam) fixes which q components participate; e_q itself
// is evaluated at compile time so stochastic polarizations resample per
// shot.
inline std::vector<NodeId> add_coupling(System& sys, AtomId atom, const Manifold& lower, const Manifold& upper,
                                        Value rabi, CouplingOptions opts) {
    const auto& a = sys.atom(atom);
    if (!opts.quantization_axis)
        throw std::invalid_argument("add_coupling: manifold coupling requires a quantization axis");
    Polarization pol;
    if (opts.polarization) {
        pol = *opts.polarization;
    } else if (opts.beam) {
        pol = beam_polarization(sys.beam(*opts.beam));
    } else {
        throw std::invalid_argument("add_coupling: manifold coupling requires a polarization or a beam");
    }

    const auto lo = detail::present_sublevels(a, lower);
    const auto up = detail::present_sublevels(a, upper);

    std::vector<NodeId> handles;
    std::string tried;
    for (int q = -1; q <= 1; ++q) {
        bool component_present = true;
        if (!pol.mixed) {
            const auto e = spherical_components(pol, *opts.quantization_axis);
            component_present = std::abs(e.q(q)) > 1e-14;
        }
        if (!component_present) continue;
        tried += (tried.empty() ? "" : ", ") + std::string("q=") + std::to_string(q);
        for (const auto& tr : transition_amplitudes(lower.momentum(), upper.momentum(), q)) {
            const int li = detail::index_of_m(lo, tr.m_lower);
            const int ui = detail::index_of_m(up, tr.m_upper);
            if (li < 0 || ui < 0) continue;
            CouplingNode n;
            n.atom = atom;
            n.lower = li;
            n.upper = ui;
            n.amplitude = rabi;
            n.cg = tr.amplitude;
            n.use_polarization = true;
            n.q = q;
            n.polarization = pol;
            n.quantization_axis = *opts.quantization_axis;
            n.beam = opts.beam;
            n.wavevector = opts.wavevector;
            n.phase_noise = opts.phase_noise;
            n.active = opts.active;
            handles.push_back(sys.push_node(std::move(n)));
        }
    }
    if (handles.empty())
        throw std::invalid_argument("add_coupling: no allowed transitions " + lower.label() + " -> " +
                                    upper.label() + " for polarization components {" + tried + "}");
    return handles;
}

// Manifold coupling with explicit per-component peak Rabi amplitudes
// (e.g. from rabi_frequencies); one node per allowed pair with amplitude
// Omega_q * CG.
struct SphericalAmplitudes {
    Value pi = 0.0;
    Value plus = 0.0;
    Value minus = 0.0;
};

inline std::vector<NodeId> add_coupling(System& sys, AtomId atom, const Manifold& lower, const Manifold& upper,
                                        const SphericalAmplitudes& amps, CouplingOptions opts = {}) {
    const auto& a = sys.atom(atom);
    const auto lo = detail::present_sublevels(a, lower);
    const auto up = detail::present_sublevels(a, upper);

    std::vector<NodeId> handles;
    std::string tried;
    for (int q = -1; q <= 1; ++q) {
        const Value& amp = q == 0 ? amps.pi : (q > 0 ? amps.plus : amps.minus);
        if (amp.is_number() && amp.number() == 0.0) continue;
        tried += (tried.empty() ? "" : ", ") + std::string("q=") + std::to_string(q);
        for (const auto& tr : transition_amplitudes(lower.momentum(), upper.momentum(), q)) {
            const int li = detail::index_of_m(lo, tr.m_lower);
            const int ui = detail::index_of_m(up, tr.m_upper);
            if (li < 0 || ui < 0) continue;
            CouplingNode n;
            n.atom = atom;
            n.lower = li;
            n.upper = ui;
            n.amplitude = amp;
            n.cg = tr.amplitude;
            n.q = q;
            n.beam = opts.beam;
            n.wavevector = opts.wavevector;
            n.phase_noise = opts.phase_noise;
            n.active = opts.active;
            handles.push_back(sys.push_node(std::move(n)));
        }
    }
    if (handles.empty())
        throw std::invalid_argument("add_coupling: no allowed transitions " + lower.label() + " -> " +
                                    upper.label() + " for polarization components {" + tried + "}");
    return handles;
}

inline NodeId add_detuning(System& sys, AtomId atom, const std::string& level, Value shift, bool active = true) {
    const auto& a = sys.atom(atom);
    DetuningNode n;
    n.atom = atom;
    n.level = a.level_index(level);
    if (n.level < 0) throw std::invalid_argument("add_detuning: unknown level '" + level + "'");
    n.shift = std::move(shift);
    n.active = active;
    return sys.push_node(std::move(n));
}

// One DetuningNode per manifold sublevel present on the atom, shifted by
// its linear Zeeman energy plus an optional common offset.
inline std::vector<NodeId> add_zeeman_detunings(System& sys, AtomId atom, const Manifold& manifold,
                                                double b_field_tesla, Value offset = 0.0) {
    const auto& a = sys.atom(atom);
    std::vector<NodeId> handles;
    for (const auto& lv : manifold.levels()) {
        const int idx = a.level_index(lv.label);
        if (idx < 0) continue;
        DetuningNode n;
        n.atom = atom;
        n.level = idx;
        n.shift = offset + Value(zeeman_shift(lv, b_field_tesla));
        handles.push_back(sys.push_node(std::move(n)));
    }
    if (handles.empty())
        throw std::invalid_argument("add_zeeman_detunings: no sublevels of '" + manifold.label() +
                                    "' in atom '" + a.name + "'");
    return handles;
}

inline NodeId add_decay(System& sys, AtomId atom, const std::string& upper, const std::string& lower,
                        Value rate) {
    const auto& a = sys.atom(atom);
    DecayNode n;
    n.atom = atom;
    n.upper = a.level_index(upper);
    n.lower = a.level_index(lower);
    if (n.upper < 0) throw std::invalid_argument("add_decay: unknown level '" + upper + "'");
    if (n.lower < 0) throw std::invalid_argument("add_decay: unknown level '" + lower + "'");
    n.rate = std::move(rate);
    return sys.push_node(std::move(n));
}

// Manifold decay: one branch per dipole-allowed sublevel pair with
// branching fraction CG^2 (the fractions from one upper sublevel sum to
// 1, so each sublevel decays at the total rate).
inline std::vector<NodeId> add_decay(System& sys, AtomId atom, const Manifold& upper, const Manifold& lower,
                                     Value rate) {
    const auto& a = sys.atom(atom);
    const auto lo = detail::present_sublevels(a, lower);
    const auto up = detail::present_sublevels(a, upper);
    std::vector<NodeId> handles;
    for (int q = -1; q <= 1; ++q) {
        for (const auto& tr : transition_amplitudes(lower.momentum(), upper.momentum(), q)) {
            const int li = detail::index_of_m(lo, tr.m_lower);
            const int ui = detail::index_of_m(up, tr.m_upper);
            if (li < 0 || ui < 0) continue;
            DecayNode n;
            n.atom = atom;
            n.upper = ui;
            n.lower = li;
            n.rate = rate;
            n.branch = tr.amplitude * tr.amplitude;
            handles.push_back(sys.push_node(std::move(n)));
        }
    }
    if (handles.empty())
        throw std::invalid_argument("add_decay: no allowed branches " + upper.label() + " -> " + lower.label());
    return handles;
}

inline NodeId add_dephasing(System& sys, AtomId atom, const std::vector<std::string>& levels, Value rate) {
    const auto& a = sys.atom(atom);
    DephasingNode n;
    n.atom = atom;
    for (const auto& label : levels) {
        const int idx = a.level_index(label);
        if (idx < 0) throw std::invalid_argument("add_dephasing: unknown level '" + label + "'");
        n.levels.push_back(idx);
    }
    if (n.levels.empty()) throw std::invalid_argument("add_dephasing: empty level set");
    n.rate = std::move(rate);
    return sys.push_node(std::move(n));
}

inline NodeId add_interaction(System& sys, AtomId a, AtomId b, const std::string& level_a,
                              const std::string& level_b, Value strength) {
    if (a == b) throw std::invalid_argument("add_interaction: an atom cannot interact with itself");
    InteractionNode n;
    n.atom_a = a;
    n.atom_b = b;
    n.level_a = sys.atom(a).level_index(level_a);
    n.level_b = sys.atom(b).level_index(level_b);
    if (n.level_a < 0) throw std::invalid_argument("add_interaction: unknown level '" + level_a + "'");
    if (n.level_b < 0) throw std::invalid_argument("add_interaction: unknown level '" + level_b + "'");
    n.strength = std::move(strength);
    return sys.push_node(std::move(n));
}

// C6 / r^6 interaction; the pair separation is re-evaluated every step.
inline NodeId add_vdw_interaction(System& sys, AtomId a, AtomId b, const std::string& level_a,
                                  const std::string& level_b, Value c6) {
    const NodeId id = add_interaction(sys, a, b, level_a, level_b, std::move(c6));
    std::get<InteractionNode>(sys.nodes[static_cast<std::size_t>(id.value)]).vdw = true;
    return id;
}

inline void add_detector(System& sys, DetectorSpec spec) {
    const auto& name = detector_name(spec);
    if (name.empty()) throw std::invalid_argument("detector needs a name");
    for (const auto& d : sys.detectors)
        if (detector_name(d) == name) throw std::invalid_argument("duplicate detector name '" + name + "'");
    sys.detectors.push_back(std::move(spec));
}

inline void add_max_occupation(System& sys, const std::string& level, int n) {
    if (n < 0) throw std::invalid_argument("maxoccupations: negative count");
    sys.maxoccupations.push_back({level, n});
}

inline void set_initial_state(System& sys, std::vector<std::string> levels) {
    if (levels.size() != sys.atoms.size())
        throw std::invalid_argument("initial state needs one level per atom");
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (sys.atoms[i].level_index(levels[i]) < 0)
            throw std::invalid_argument("initial state: level '" + levels[i] + "' not simulated on atom '" +
                                        sys.atoms[i].name + "'");
    sys.initial_levels = std::move(levels);
}

} // namespace atomsim
