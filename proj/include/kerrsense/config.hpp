#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "kerrsense/device.hpp"
#include "kerrsense/interferometer.hpp"
#include "kerrsense/metrology.hpp"

namespace kerrsense::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InterferometerSettings {
    double n_bar = 1e7;
    double theta_t = constants::pi / 4.0;
    // fixed operating phase; optimised per quadrature when empty
    std::optional<double> phi_t;
    // Kerr phase ηt, interaction time t: when both are empty the operating
    // point follows the small-time manifold n̄ |η| t = n_bar_eta_t.
    std::optional<double> eta_t;
    std::optional<double> t;
    double n_bar_eta_t = 1e-3;
    double r = 0.0;  // plate displacement operating point [m]
    interferometer::OutputPort port = interferometer::OutputPort::A;
    interferometer::Quadrature quadrature = interferometer::Quadrature::X;
    // estimate the Kerr phase ηt, or the linear phase φt (shot-noise control)
    interferometer::Target target = interferometer::Target::KerrPhase;
};

enum class SweepVariable { R, NBar, EtaT, PhiT };
enum class SweepScale { Linear, Log };

struct SweepSettings {
    std::optional<SweepVariable> variable;
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<int> points;
    std::optional<SweepScale> scale;
};

struct CantileverSettings {
    metrology::Cantilever beam;
    units::Meters gold_side = units::micrometers(50.0);
    units::KilogramsPerCubicMeter gold_density = constants::gold_density;

    // beam with the gold cube attached
    metrology::Cantilever loaded() const;
};

struct Configuration {
    device::DeviceParams device;
    device::PlateGeometry geometry;
    InterferometerSettings interferometer;
    SweepSettings sweep;
    CantileverSettings cantilever;
};

// Plain-text `key = value` with [device], [geometry], [interferometer],
// [sweep] and [cantilever] sections. '#' starts a comment. Every key not
// given keeps its default, so an empty file is the reference device.
Configuration parse_config(const std::filesystem::path& path);
Configuration parse_config_text(const std::string& text, const std::string& source = "<string>");

// Numeric value with an optional unit suffix (GHz, MHz, kHz, Hz, um, nm, fF)
// and an optional "2pi*" prefix; returns SI (rad/s for 2pi*...Hz).
enum class Dimension { Dimensionless, AngularFrequency, Length, Capacitance, Time, Density, Pressure, Mass };
double parse_quantity(const std::string& text, Dimension dim);

std::string to_string(SweepVariable v);

} // namespace kerrsense::config
