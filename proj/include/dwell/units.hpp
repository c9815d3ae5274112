#pragma once

#include <string>

namespace dwell {

// Physical constants of the active unit system. Every physics routine takes
// one of these; the default is the natural system hbar = m = 1.
struct UnitSystem {
    double hbar = 1.0;
    double mass = 1.0;
    double length = 1.0;  // size of one length unit in metres, informational
    std::string name = "natural";

    double nu() const { return hbar / mass; }          // hbar/m
    double kappa2(double energy) const { return 2.0 * mass * energy / (hbar * hbar); }

    static UnitSystem natural() { return {}; }
    // Cs atoms with energies in s^-1 (hbar = 1), lengths in metres.
    static UnitSystem caesium();
};

inline constexpr double caesium_mass_kg = 2.2069e-25;
inline constexpr double hbar_si = 1.054571817e-34;

inline UnitSystem UnitSystem::caesium() {
    return UnitSystem{1.0, caesium_mass_kg / hbar_si, 1.0, "caesium"};
}

}  // namespace dwell
