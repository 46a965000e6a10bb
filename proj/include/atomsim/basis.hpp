#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "atoms.hpp"
#include "system.hpp"

namespace atomsim {

// Enumeration of the admissible product states under maxoccupations
// constraints, in lexicographic order of per-atom level indices.
// Configurations map bijectively to dense indices 0 .. dim-1.
class Basis {
  public:
    Basis() = default;

    int dim() const { return static_cast<int>(configs_.size()); }
    int atom_count() const { return static_cast<int>(dims_.size()); }
    int levels_of(int atom) const { return dims_[static_cast<std::size_t>(atom)]; }

    const std::vector<std::uint8_t>& config(int index) const {
        return configs_[static_cast<std::size_t>(index)];
    }

    // dense index of a configuration, or -1 if it is excluded
    int index_of(const std::vector<std::uint8_t>& config) const {
        const auto it = index_.find(pack(config));
        return it == index_.end() ? -1 : it->second;
    }

    // index of the configuration equal to `config` except that `atom` is
    // moved to `level`; -1 if outside the restricted set
    int index_with(const std::vector<std::uint8_t>& config, int atom, int level) const {
        std::uint64_t key = pack(config);
        key += static_cast<std::uint64_t>(level - config[static_cast<std::size_t>(atom)]) *
               strides_[static_cast<std::size_t>(atom)];
        const auto it = index_.find(key);
        return it == index_.end() ? -1 : it->second;
    }

    friend Basis build_basis(const std::vector<AtomSpec>& atoms, const std::vector<MaxOccupation>& constraints);

  private:
    std::uint64_t pack(const std::vector<std::uint8_t>& config) const {
        std::uint64_t key = 0;
        for (std::size_t a = 0; a < config.size(); ++a) key += config[a] * strides_[a];
        return key;
    }

    std::vector<int> dims_;
    std::vector<std::uint64_t> strides_;
    std::vector<std::vector<std::uint8_t>> configs_;
    std::unordered_map<std::uint64_t, int> index_;
};

inline Basis build_basis(const std::vector<AtomSpec>& atoms, const std::vector<MaxOccupation>& constraints) {
    if (atoms.empty()) throw std::invalid_argument("build_basis: no atoms");
    Basis b;
    const auto n = atoms.size();
    b.dims_.resize(n);
    for (std::size_t a = 0; a < n; ++a) b.dims_[a] = static_cast<int>(atoms[a].levels.size());

    b.strides_.assign(n, 1);
    double full_dim = 1.0;
    for (std::size_t a = n; a-- > 0;) {
        if (a + 1 < n) b.strides_[a] = b.strides_[a + 1] * static_cast<std::uint64_t>(b.dims_[a + 1]);
        full_dim *= b.dims_[a];
    }
    if (full_dim > 9e15) throw std::invalid_argument("build_basis: unconstrained dimension too large");

    // per constraint: the matching level index on each atom (-1 if absent)
    struct Constraint {
        std::vector<int> level;
        int max;
    };
    std::vector<Constraint> cs;
    for (const auto& mo : constraints) {
        if (mo.max_count < 0) throw std::invalid_argument("build_basis: negative occupation bound");
        Constraint c;
        c.max = mo.max_count;
        c.level.resize(n);
        bool found = false;
        for (std::size_t a = 0; a < n; ++a) {
            c.level[a] = atoms[a].level_index(mo.level);
            found = found || c.level[a] >= 0;
        }
        if (!found)
            throw std::invalid_argument("build_basis: maxoccupations level '" + mo.level +
                                        "' not present on any atom");
        cs.push_back(std::move(c));
    }

    std::vector<std::uint8_t> config(n, 0);
    std::vector<int> counts(cs.size(), 0);
    // depth-first enumeration with constraint pruning; lexicographic order
    auto enumerate = [&](auto&& self, std::size_t atom) -> void {
        if (atom == n) {
            b.index_.emplace(b.pack(config), static_cast<int>(b.configs_.size()));
            b.configs_.push_back(config);
            return;
        }
        for (int lvl = 0; lvl < b.dims_[atom]; ++lvl) {
            bool ok = true;
            for (std::size_t c = 0; c < cs.size(); ++c) {
                if (cs[c].level[atom] == lvl && counts[c] + 1 > cs[c].max) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            config[atom] = static_cast<std::uint8_t>(lvl);
            for (std::size_t c = 0; c < cs.size(); ++c)
                if (cs[c].level[atom] == lvl) ++counts[c];
            self(self, atom + 1);
            for (std::size_t c = 0; c < cs.size(); ++c)
                if (cs[c].level[atom] == lvl) --counts[c];
        }
        config[atom] = 0;
    };
    enumerate(enumerate, 0);
    return b;
}

} // namespace atomsim
