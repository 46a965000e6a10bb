#pragma once

#include <string>
#include <variant>

namespace atomsim {

struct AtomId {
    int value = -1;
    friend constexpr bool operator==(AtomId, AtomId) = default;
};
struct BeamId {
    int value = -1;
    friend constexpr bool operator==(BeamId, BeamId) = default;
};
struct NodeId {
    int value = -1;
    friend constexpr bool operator==(NodeId, NodeId) = default;
};

// Observables recorded once per (downsampled) step.
struct PopulationDetector {
    AtomId atom;
    std::string level;
    std::string name;
};
struct CoherenceDetector {
    AtomId atom;
    std::string level_a, level_b;  // records the reduced element <a|rho|b>
    std::string name;
};
struct MotionDetector {
    AtomId atom;
    std::string name;  // six columns: position and velocity
};
struct FieldDetector {
    std::variant<NodeId, BeamId> source;  // coupling drive envelope, or beam amplitude at its focus
    std::string name;
};

using DetectorSpec = std::variant<PopulationDetector, CoherenceDetector, MotionDetector, FieldDetector>;

inline const std::string& detector_name(const DetectorSpec& d) {
    return std::visit([](const auto& s) -> const std::string& { return s.name; }, d);
}

} // namespace atomsim
