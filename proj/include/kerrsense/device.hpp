#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kerrsense/interferometer.hpp"
#include "kerrsense/units.hpp"

namespace kerrsense::device {

using namespace kerrsense::units;

enum class CapacitanceModel { ParallelPlate, ParallelPlateWithFringe };

struct PlateGeometry {
    Meters width = micrometers(200.0);
    Meters length = micrometers(70.0);
    Meters thickness = micrometers(0.16);
    Meters r0 = micrometers(1.01);  // gap at zero displacement
    CapacitanceModel model = CapacitanceModel::ParallelPlate;
};

struct DeviceParams {
    AngularFrequency josephson_energy = two_pi_ghz(15.0);
    Farads self_capacitance = femtofarads(100.0);
    AngularFrequency g1 = two_pi_mhz(100.0);
    AngularFrequency g2 = two_pi_mhz(100.0);
    AngularFrequency omega_c = two_pi_mhz(1500.0);
    AngularFrequency Delta0 = two_pi_mhz(-60.0);
    AngularFrequency delta0 = two_pi_mhz(-60.0);
    AngularFrequency gamma_21 = two_pi_mhz(0.1);
    AngularFrequency gamma_23 = two_pi_mhz(0.1);
    AngularFrequency gamma_43 = two_pi_mhz(0.1);
    AngularFrequency kappa = two_pi_mhz(1000.0);
    // drive strength; carried for the record, does not enter the Kerr coefficient
    AngularFrequency drive = two_pi_mhz(5.0);
};

// Ratio above which g/Ω_c is no longer small enough for the adiabatic Kerr formula.
inline constexpr double weak_coupling_limit = 0.2;

void validate(const PlateGeometry& geom);
void validate(const DeviceParams& dev);

class UnobservableDisplacement : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ε₀·w·l/gap, optionally with the first-order edge-field correction
// (1 + gap/(π w)(1 + ln(2π w/gap))).
Farads coupling_capacitance(const PlateGeometry& geom, Meters gap);

struct Detunings {
    AngularFrequency delta;  // |1⟩-|2⟩ probe detuning
    AngularFrequency Delta;  // |3⟩-|4⟩ detuning
};

// Transmon frequency √(8 E_J E_C) − E_C with E_C = e²/(2 C_self ħ).
AngularFrequency transmon_frequency(const DeviceParams& dev);
// J = C_c/(C_c + C_self) · ω_q/2
AngularFrequency capacitive_coupling(Farads c_c, const DeviceParams& dev);

// Map from coupling capacitance to the N-system detunings. Swappable so that
// other device models can replace the default without touching the Kerr or
// displacement code.
class DetuningMap {
public:
    virtual ~DetuningMap() = default;
    virtual Detunings operator()(Farads c_c) const = 0;
};

// δ = δ₀ − (J − J₀), Δ = Δ₀ + (J − J₀) with J₀ the coupling at the baseline gap.
class DressedCouplingMap final : public DetuningMap {
public:
    DressedCouplingMap(DeviceParams dev, Farads baseline_capacitance);
    Detunings operator()(Farads c_c) const override;

private:
    DeviceParams dev_;
    AngularFrequency baseline_coupling_;
};

Detunings detunings_from_capacitance(Farads c_c, const DeviceParams& dev, Farads baseline_capacitance);

struct KerrCoefficient {
    AngularFrequency eta;
    double eta_over_kappa = 0.0;
    // g/Ω_c exceeded weak_coupling_limit
    bool outside_weak_coupling = false;
};

// η = (g₁/Ω_c)² (g₂²Δ/(γ₄₃² + Δ²) − g₁²δ/((γ₂₁ + γ₂₃)² + δ²))
KerrCoefficient kerr_eta(AngularFrequency delta, AngularFrequency Delta, const DeviceParams& dev);

struct EtaPoint {
    Meters gap;
    Farads capacitance;
    Detunings detunings;
    KerrCoefficient kerr;
};

// Displacement r → gap r0 + r → capacitance → detunings → η.
class DeviceModel {
public:
    using CapacitanceFn = std::function<Farads(Meters gap)>;

    DeviceModel(PlateGeometry geom, DeviceParams dev);
    DeviceModel(PlateGeometry geom, DeviceParams dev, CapacitanceFn capacitance,
                std::shared_ptr<const DetuningMap> detuning_map);

    const PlateGeometry& geometry() const { return geom_; }
    const DeviceParams& params() const { return dev_; }

    // Throws std::domain_error when the gap r0 + r is not positive.
    EtaPoint at(Meters r) const;
    AngularFrequency eta(Meters r) const { return at(r).kerr.eta; }

    // Finite-difference step h = max(1 nm, 1e-4·gap).
    Meters derivative_step(Meters r) const;
    // dη/dr by Richardson-extrapolated central differences.
    AngularFrequencyPerMeter d_eta_dr(Meters r) const;

private:
    PlateGeometry geom_;
    DeviceParams dev_;
    CapacitanceFn capacitance_;
    std::shared_ptr<const DetuningMap> detuning_map_;
};

struct EtaCurve {
    std::vector<double> r;               // m
    std::vector<double> eta_over_kappa;  // 1
    std::vector<double> eta;             // rad/s
    std::vector<double> d_eta_dr;        // rad/s/m
};

// Grid must be strictly increasing with every gap positive. Interior points
// use central differences, the two ends one-sided ones.
EtaCurve eta_curve(const DeviceModel& model, std::span<const double> r_grid);

struct PhaseChoice {
    // Operating phase φt; optimised per quadrature when empty.
    std::optional<double> phi_t;
};

struct DisplacementPrecision {
    AngularFrequency eta;
    AngularFrequencyPerMeter d_eta_dr;
    double eta_t = 0.0;
    double phi_t_x = 0.0;
    double phi_t_y = 0.0;
    interferometer::PrecisionResult delta_eta_t;
    // δ(rt) in m·s (m/Hz); empty where the quadrature carries no signal
    std::optional<double> delta_rt_x;
    std::optional<double> delta_rt_y;
    // δr at the given t (only when t > 0)
    std::optional<double> delta_r_x;
    std::optional<double> delta_r_y;

    double at(interferometer::Quadrature q) const;
};

// δ(rt) = δ(ηt) / |dη/dr| with δ(ηt) from the rederived closed form at
// ηt = η(r)·t. Throws UnobservableDisplacement where dη/dr vanishes.
DisplacementPrecision displacement_precision(double n_bar, const DeviceModel& model, Meters r, Seconds t,
                                             PhaseChoice phase = {});

} // namespace kerrsense::device
