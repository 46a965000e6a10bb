#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "constants.hpp"

namespace atomsim {

// Thrown for malformed scenario documents (syntax, schema, units);
// semantic errors surface as std::invalid_argument from the model layer.
struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace units {

enum class Kind {
    AngularFrequency,  // "1 MHz" -> 2 pi x 1e6 rad/s (hardware convention: values quote f = omega / 2 pi)
    Frequency,         // plain Hz (AOD tones, noise-model frequencies)
    Time,
    Length,
    Power,
    MagneticField,
    Temperature,
    Velocity,
    Calibration,       // m per Hz
    C6,                // rad/s m^6
    Dimensionless,
};

inline double suffix_scale(Kind kind, const std::string& unit) {
    static const std::map<std::string, double> freq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const std::map<std::string, double> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
    static const std::map<std::string, double> length{{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
    static const std::map<std::string, double> power{{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}};
    static const std::map<std::string, double> field{{"T", 1.0}, {"mT", 1e-3}, {"G", 1e-4}, {"mG", 1e-7}};
    static const std::map<std::string, double> temp{{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}, {"nK", 1e-9}};

    const std::map<std::string, double>* table = nullptr;
    switch (kind) {
        case Kind::AngularFrequency:
        case Kind::Frequency: table = &freq; break;
        case Kind::Time: table = &time; break;
        case Kind::Length: table = &length; break;
        case Kind::Power: table = &power; break;
        case Kind::MagneticField: table = &field; break;
        case Kind::Temperature: table = &temp; break;
        case Kind::Velocity: {
            if (unit == "m/s") return 1.0;
            if (unit == "mm/s") return 1e-3;
            if (unit == "um/s") return 1e-6;
            throw ScenarioParseError("unknown velocity unit '" + unit + "'");
        }
        case Kind::Calibration: {
            // deflection calibration, meters per hertz
            if (unit == "um/MHz") return 1e-12;
            if (unit == "m/Hz") return 1.0;
            throw ScenarioParseError("unknown calibration unit '" + unit + "' (use um/MHz or m/Hz)");
        }
        case Kind::C6: {
            // quoted as f * volume: C6 = 2 pi value
            if (unit == "MHz um^6") return constants::two_pi * 1e6 * 1e-36;
            if (unit == "GHz um^6") return constants::two_pi * 1e9 * 1e-36;
            if (unit == "Hz m^6") return constants::two_pi;
            throw ScenarioParseError("unknown C6 unit '" + unit + "'");
        }
        case Kind::Dimensionless:
            if (unit.empty()) return 1.0;
            throw ScenarioParseError("value should be dimensionless, got unit '" + unit + "'");
    }
    auto it = table->find(unit);
    if (it == table->end()) throw ScenarioParseError("unknown unit '" + unit + "'");
    double scale = it->second;
    if (kind == Kind::AngularFrequency) scale *= constants::two_pi;
    return scale;
}

// "1.5 MHz", "0.8um", "3 uK" -> SI (frequencies of Kind::AngularFrequency
// convert to rad/s). Units are mandatory on dimensioned quantities.
inline double parse_quantity(const std::string& text, Kind kind) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ScenarioParseError("cannot parse quantity '" + text + "'");
    }
    while (pos < text.size() && text[pos] == ' ') ++pos;
    const std::string unit = text.substr(pos);
    if (unit.empty() && kind != Kind::Dimensionless)
        throw ScenarioParseError("missing unit on '" + text + "' (units are mandatory)");
    return value * suffix_scale(kind, unit);
}

} // namespace units
} // namespace atomsim
