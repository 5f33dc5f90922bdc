#pragma once

#include "kerrsense/constants.hpp"
#include "kerrsense/units.hpp"

namespace kerrsense::metrology {

using namespace kerrsense::units;

struct Cantilever {
    Meters length = micrometers(200.0);
    Meters width = micrometers(70.0);
    Meters thickness = micrometers(0.8);
    KilogramsPerCubicMeter density = constants::silicon_nitride_density;
    Pascals youngs_modulus{250e9};
    Kilograms added_mass{0.0};
};

void validate(const Cantilever& c);

// End-loaded rectangular beam: k = E w t³ / (4 l³).
NewtonsPerMeter spring_constant(const Cantilever& c);

Kilograms beam_mass(const Cantilever& c);

// Tip-loaded effective mass m_added + 0.24 m_beam.
Kilograms effective_mass(const Cantilever& c);

// √(k / m_eff)
AngularFrequency resonance_frequency(const Cantilever& c);

Kilograms added_mass_cube(Meters side, KilogramsPerCubicMeter density);

// δF = k · δ(rt)
NewtonSeconds min_detectable_force(NewtonsPerMeter k, MeterSeconds delta_rt);

// δa/g = δF / (m g), in units of standard gravity.
double gravity_resolution(NewtonSeconds delta_force, Kilograms sensing_mass);

// G m₁ m₂ / d²
Newtons gravitational_force(Kilograms m1, Kilograms m2, Meters distance);

// √(ħ / (2 m Ω))
Meters zero_point_motion(Kilograms mass, AngularFrequency omega);

struct ForceSensitivity {
    NewtonsPerMeter spring_constant;
    Kilograms sensing_mass;
    NewtonSeconds min_force;
    double gravity_resolution = 0.0;
    // pull of a 1 kg mass at 1 m on the sensing mass
    Newtons reference_force;
};

ForceSensitivity force_sensitivity(const Cantilever& c, MeterSeconds delta_rt);

} // namespace kerrsense::metrology
