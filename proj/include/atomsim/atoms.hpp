#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "constants.hpp"
#include "halfint.hpp"
#include "vec3.hpp"

namespace atomsim {

enum class LevelKind { Generic, Fine, Hyperfine };

// One internal atomic state. Fine levels carry (J, mJ, gJ), hyperfine
// levels (F, mF, gF); generic levels have no angular-momentum structure.
struct Level {
    std::string label;
    LevelKind kind = LevelKind::Generic;
    HalfInt momentum;  // J or F
    HalfInt m;         // mJ or mF
    double g = 0.0;    // Lande g-factor

    static Level generic(std::string label) { return {std::move(label), LevelKind::Generic, 0, 0, 0.0}; }

    static Level fine(HalfInt j, HalfInt mj, double gj, std::string label) {
        check(j, mj);
        return {std::move(label), LevelKind::Fine, j, mj, gj};
    }

    static Level hyperfine(HalfInt f, HalfInt mf, double gf, std::string label) {
        check(f, mf);
        return {std::move(label), LevelKind::Hyperfine, f, mf, gf};
    }

  private:
    static void check(HalfInt j, HalfInt m) {
        if (abs(m) > j) throw std::invalid_argument("level: |m| exceeds J/F");
        if (!(j - m).is_integer()) throw std::invalid_argument("level: m not compatible with J/F");
    }
};

// Linear Zeeman shift of a structured level: g * m * mu_B * B / hbar,
// i.e. the level energy relative to the manifold center, as an angular
// frequency. Quadratic contributions are not modeled.
inline double zeeman_shift(const Level& level, double b_field_tesla) {
    if (level.kind == LevelKind::Generic)
        throw std::invalid_argument("zeeman_shift: level '" + level.label + "' has no m quantum number or g-factor");
    return level.g * level.m.value() * constants::mu_B * b_field_tesla / constants::hbar;
}

// A full set of 2F+1 sublevels sharing F (or J) and a g-factor, ordered
// by ascending m. Sublevels are addressed by their m value, not by list
// position.
class Manifold {
  public:
    Manifold(LevelKind kind, HalfInt momentum, double g, std::string label)
        : kind_(kind), momentum_(momentum), g_(g), label_(std::move(label)) {
        if (momentum_.twice() < 0) throw std::invalid_argument("manifold: negative momentum");
        if (kind_ == LevelKind::Generic) throw std::invalid_argument("manifold: must be fine or hyperfine");
        const char* mname = kind_ == LevelKind::Fine ? ",mJ=" : ",mF=";
        for (int tm = -momentum_.twice(); tm <= momentum_.twice(); tm += 2) {
            const HalfInt m = HalfInt::from_twice(tm);
            Level lv;
            lv.label = label_ + mname + m.str();
            lv.kind = kind_;
            lv.momentum = momentum_;
            lv.m = m;
            lv.g = g_;
            levels_.push_back(std::move(lv));
        }
    }

    static Manifold fine(HalfInt j, double gj, std::string label) {
        return Manifold(LevelKind::Fine, j, gj, std::move(label));
    }
    static Manifold hyperfine(HalfInt f, double gf, std::string label) {
        return Manifold(LevelKind::Hyperfine, f, gf, std::move(label));
    }

    const Level& operator[](HalfInt m) const {
        if (abs(m) > momentum_ || !(momentum_ - m).is_integer())
            throw std::out_of_range("manifold '" + label_ + "': no sublevel m=" + m.str());
        return levels_[static_cast<std::size_t>((m.twice() + momentum_.twice()) / 2)];
    }

    const std::vector<Level>& levels() const { return levels_; }
    HalfInt momentum() const { return momentum_; }
    double g() const { return g_; }
    const std::string& label() const { return label_; }
    LevelKind kind() const { return kind_; }

  private:
    LevelKind kind_;
    HalfInt momentum_;
    double g_;
    std::string label_;
    std::vector<Level> levels_;
};

enum class Species { Generic, Yb171, Rb87, Sr88, K39 };

struct GaussianPosition {
    Vec3 center;
    Vec3 sigma;  // per-axis std dev, m
};
struct MaxwellBoltzmann {
    double temperature;  // K
};
using PositionInit = std::variant<Vec3, GaussianPosition>;
using VelocityInit = std::variant<Vec3, MaxwellBoltzmann>;

// One atom of the simulated register: species data, the selected subset
// of internal levels (which fixes the local Hilbert dimension), initial
// motional state, and a scalar polarizability table by wavelength.
struct AtomSpec {
    Species species = Species::Generic;
    std::string name;
    double mass = constants::atomic_mass_unit;  // kg
    HalfInt nuclear_spin = 0;
    std::vector<Level> levels;
    PositionInit position = Vec3{};
    VelocityInit velocity = Vec3{};
    std::map<double, double> polarizability;  // wavelength m -> SI polarizability, C m^2 / V

    int level_index(const std::string& label) const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i].label == label) return static_cast<int>(i);
        return -1;
    }

    const Level& level(const std::string& label) const {
        const int i = level_index(label);
        if (i < 0) throw std::invalid_argument("atom '" + name + "': unknown level '" + label + "'");
        return levels[static_cast<std::size_t>(i)];
    }

    // Polarizability at a wavelength (1 ppm relative match); throws
    // naming the wavelength when the table has no entry.
    std::optional<double> polarizability_at(double wavelength) const {
        for (const auto& [lam, alpha] : polarizability)
            if (std::abs(lam - wavelength) <= 1e-6 * wavelength) return alpha;
        return std::nullopt;
    }
};

namespace species_data {
inline double mass(Species s) {
    using constants::atomic_mass_unit;
    switch (s) {
        case Species::Yb171: return 170.9363302 * atomic_mass_unit;
        case Species::Rb87: return 86.9091805 * atomic_mass_unit;
        case Species::Sr88: return 87.9056125 * atomic_mass_unit;
        case Species::K39: return 38.9637065 * atomic_mass_unit;
        case Species::Generic: return atomic_mass_unit;
    }
    return atomic_mass_unit;
}
inline HalfInt nuclear_spin(Species s) {
    switch (s) {
        case Species::Yb171: return half(1);
        case Species::Rb87: return half(3);
        case Species::Sr88: return 0;
        case Species::K39: return half(3);
        case Species::Generic: return 0;
    }
    return 0;
}
inline const char* tag(Species s) {
    switch (s) {
        case Species::Yb171: return "Yb171";
        case Species::Rb87: return "Rb87";
        case Species::Sr88: return "Sr88";
        case Species::K39: return "K39";
        case Species::Generic: return "generic";
    }
    return "generic";
}
} // namespace species_data

inline AtomSpec make_atom(Species species, std::vector<Level> levels, std::string name = "") {
    if (levels.empty()) throw std::invalid_argument("atom must carry at least one level");
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t j = i + 1; j < levels.size(); ++j)
            if (levels[i].label == levels[j].label)
                throw std::invalid_argument("duplicate level label '" + levels[i].label + "'");
    AtomSpec a;
    a.species = species;
    a.name = std::move(name);
    a.mass = species_data::mass(species);
    a.nuclear_spin = species_data::nuclear_spin(species);
    a.levels = std::move(levels);
    return a;
}

} // namespace atomsim
