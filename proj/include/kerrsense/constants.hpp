#pragma once

#include "kerrsense/units.hpp"

#include <numbers>

namespace kerrsense::constants {

using namespace kerrsense::units;

inline constexpr double pi = std::numbers::pi;

// CODATA 2018, pinned to 10 significant digits.
inline constexpr JouleSeconds hbar{1.054571817e-34};
inline constexpr Coulombs elementary_charge{1.602176634e-19};
inline constexpr FaradsPerMeter vacuum_permittivity{8.854187813e-12};
inline constexpr GravitationalConstantUnit gravitational_constant{6.674300000e-11};
inline constexpr MetersPerSecondSquared standard_gravity{9.806650000};

inline constexpr KilogramsPerCubicMeter gold_density{19300.0};
inline constexpr KilogramsPerCubicMeter silicon_nitride_density{3184.0};

// Coherent input above this photon number drives the waveguides nonlinear.
inline constexpr double max_photon_number = 1e7;

} // namespace kerrsense::constants
