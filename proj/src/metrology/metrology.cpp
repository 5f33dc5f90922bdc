#include "kerrsense/metrology.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrsense::metrology {

namespace {

template <typename Q>
void require_positive(Q q, const char* what) {
    if (!(q.value() > 0.0) || !std::isfinite(q.value())) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

} // namespace

void validate(const Cantilever& c) {
    require_positive(c.length, "cantilever length");
    require_positive(c.width, "cantilever width");
    require_positive(c.thickness, "cantilever thickness");
    require_positive(c.density, "cantilever density");
    require_positive(c.youngs_modulus, "Young's modulus");
    if (!(c.added_mass.value() >= 0.0)) {
        throw std::invalid_argument("added mass must be non-negative");
    }
}

NewtonsPerMeter spring_constant(const Cantilever& c) {
    validate(c);
    return c.youngs_modulus * c.width * c.thickness * c.thickness * c.thickness /
           (4.0 * c.length * c.length * c.length);
}

Kilograms beam_mass(const Cantilever& c) { return c.density * c.length * c.width * c.thickness; }

Kilograms effective_mass(const Cantilever& c) { return c.added_mass + 0.24 * beam_mass(c); }

AngularFrequency resonance_frequency(const Cantilever& c) { return sqrt(spring_constant(c) / effective_mass(c)); }

Kilograms added_mass_cube(Meters side, KilogramsPerCubicMeter density) {
    if (!(side.value() >= 0.0)) {
        throw std::invalid_argument("cube side must be non-negative");
    }
    return density * side * side * side;
}

NewtonSeconds min_detectable_force(NewtonsPerMeter k, MeterSeconds delta_rt) {
    require_positive(k, "spring constant");
    require_positive(delta_rt, "displacement precision");
    return k * delta_rt;
}

double gravity_resolution(NewtonSeconds delta_force, Kilograms sensing_mass) {
    require_positive(sensing_mass, "sensing mass");
    // δF carries the per-Hz time factor; dividing by m·g leaves s, reported per Hz.
    return delta_force.value() / (sensing_mass * constants::standard_gravity).value();
}

Newtons gravitational_force(Kilograms m1, Kilograms m2, Meters distance) {
    require_positive(distance, "distance");
    return constants::gravitational_constant * m1 * m2 / (distance * distance);
}

Meters zero_point_motion(Kilograms mass, AngularFrequency omega) {
    require_positive(mass, "mass");
    require_positive(omega, "frequency");
    return sqrt(constants::hbar / (2.0 * mass * omega));
}

ForceSensitivity force_sensitivity(const Cantilever& c, MeterSeconds delta_rt) {
    ForceSensitivity f;
    f.spring_constant = spring_constant(c);
    f.sensing_mass = effective_mass(c);
    f.min_force = min_detectable_force(f.spring_constant, delta_rt);
    f.gravity_resolution = gravity_resolution(f.min_force, f.sensing_mass);
    f.reference_force = gravitational_force(Kilograms(1.0), f.sensing_mass, Meters(1.0));
    return f;
}

} // namespace kerrsense::metrology
