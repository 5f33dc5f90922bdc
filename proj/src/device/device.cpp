#include "kerrsense/device.hpp"

#include <cmath>
#include <sstream>

#include "kerrsense/constants.hpp"

namespace kerrsense::device {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

} // namespace

void validate(const PlateGeometry& geom) {
    require_positive(geom.width.value(), "plate width");
    require_positive(geom.length.value(), "plate length");
    require_positive(geom.thickness.value(), "plate thickness");
    require_positive(geom.r0.value(), "baseline gap r0");
}

void validate(const DeviceParams& dev) {
    require_positive(dev.josephson_energy.value(), "E_J");
    require_positive(dev.self_capacitance.value(), "C_self");
    require_positive(dev.kappa.value(), "kappa");
    if (dev.omega_c.value() == 0.0) {
        throw std::invalid_argument("Omega_c must be nonzero");
    }
}

Farads coupling_capacitance(const PlateGeometry& geom, Meters gap) {
    if (!(gap.value() > 0.0)) {
        std::ostringstream msg;
        msg << "plate gap must be positive (got " << gap.value() << " m)";
        throw std::domain_error(msg.str());
    }
    const Farads parallel = constants::vacuum_permittivity * (geom.width * geom.length) / gap;
    if (geom.model == CapacitanceModel::ParallelPlate) {
        return parallel;
    }
    const double w = geom.width.value();
    const double d = gap.value();
    const double correction = 1.0 + d / (constants::pi * w) * (1.0 + std::log(2.0 * constants::pi * w / d));
    return parallel * correction;
}

AngularFrequency transmon_frequency(const DeviceParams& dev) {
    const AngularFrequency e_c =
        constants::elementary_charge * constants::elementary_charge / (2.0 * dev.self_capacitance * constants::hbar);
    return sqrt(8.0 * dev.josephson_energy * e_c) - e_c;
}

AngularFrequency capacitive_coupling(Farads c_c, const DeviceParams& dev) {
    const double fraction = c_c.value() / (c_c.value() + dev.self_capacitance.value());
    return transmon_frequency(dev) * (0.5 * fraction);
}

DressedCouplingMap::DressedCouplingMap(DeviceParams dev, Farads baseline_capacitance)
    : dev_(dev), baseline_coupling_(capacitive_coupling(baseline_capacitance, dev)) {}

Detunings DressedCouplingMap::operator()(Farads c_c) const {
    if (c_c.value() < 0.0) {
        throw std::invalid_argument("coupling capacitance must be non-negative");
    }
    const AngularFrequency shift = capacitive_coupling(c_c, dev_) - baseline_coupling_;
    return {dev_.delta0 - shift, dev_.Delta0 + shift};
}

Detunings detunings_from_capacitance(Farads c_c, const DeviceParams& dev, Farads baseline_capacitance) {
    return DressedCouplingMap(dev, baseline_capacitance)(c_c);
}

KerrCoefficient kerr_eta(AngularFrequency delta, AngularFrequency Delta, const DeviceParams& dev) {
    const double g1 = dev.g1.value();
    const double g2 = dev.g2.value();
    const double omega = dev.omega_c.value();
    if (omega == 0.0) {
        throw std::invalid_argument("Omega_c must be nonzero");
    }
    const double d = delta.value();
    const double big_d = Delta.value();
    const double g43 = dev.gamma_43.value();
    const double g2x = dev.gamma_21.value() + dev.gamma_23.value();

    const double ratio = g1 / omega;
    const double eta = ratio * ratio * (g2 * g2 * big_d / (g43 * g43 + big_d * big_d) - g1 * g1 * d / (g2x * g2x + d * d));

    KerrCoefficient k;
    k.eta = AngularFrequency(eta);
    k.eta_over_kappa = eta / dev.kappa.value();
    k.outside_weak_coupling = std::max(std::fabs(g1), std::fabs(g2)) / std::fabs(omega) > weak_coupling_limit;
    return k;
}

DeviceModel::DeviceModel(PlateGeometry geom, DeviceParams dev)
    : geom_(geom), dev_(dev) {
    validate(geom_);
    validate(dev_);
    capacitance_ = [g = geom_](Meters gap) { return coupling_capacitance(g, gap); };
    detuning_map_ = std::make_shared<DressedCouplingMap>(dev_, coupling_capacitance(geom_, geom_.r0));
}

DeviceModel::DeviceModel(PlateGeometry geom, DeviceParams dev, CapacitanceFn capacitance,
                         std::shared_ptr<const DetuningMap> detuning_map)
    : geom_(geom), dev_(dev), capacitance_(std::move(capacitance)), detuning_map_(std::move(detuning_map)) {
    validate(geom_);
    validate(dev_);
    if (!capacitance_ || !detuning_map_) {
        throw std::invalid_argument("DeviceModel needs a capacitance model and a detuning map");
    }
}

EtaPoint DeviceModel::at(Meters r) const {
    const Meters gap = geom_.r0 + r;
    if (!(gap.value() > 0.0)) {
        std::ostringstream msg;
        msg << "displacement r = " << r.value() << " m closes the gap (r0 = " << geom_.r0.value() << " m)";
        throw std::domain_error(msg.str());
    }
    EtaPoint p;
    p.gap = gap;
    p.capacitance = capacitance_(gap);
    p.detunings = (*detuning_map_)(p.capacitance);
    p.kerr = kerr_eta(p.detunings.delta, p.detunings.Delta, dev_);
    return p;
}

Meters DeviceModel::derivative_step(Meters r) const {
    return Meters(std::max(1e-9, 1e-4 * (geom_.r0 + r).value()));
}

namespace {

double central(const DeviceModel& m, double r, double h) {
    return (m.eta(Meters(r + h)).value() - m.eta(Meters(r - h)).value()) / (2.0 * h);
}

// (4 D(h/2) − D(h)) / 3 removes the O(h²) term of the central difference.
double central_richardson(const DeviceModel& m, double r, double h) {
    return (4.0 * central(m, r, 0.5 * h) - central(m, r, h)) / 3.0;
}

// One-sided difference toward `direction` (+1 forward, −1 backward),
// extrapolated twice to third order.
double one_sided_richardson(const DeviceModel& m, double r, double h, double direction) {
    const double f0 = m.eta(Meters(r)).value();
    auto diff = [&](double step) { return (m.eta(Meters(r + direction * step)).value() - f0) / (direction * step); };
    const double d1 = diff(h);
    const double d2 = diff(0.5 * h);
    const double d4 = diff(0.25 * h);
    const double coarse = 2.0 * d2 - d1;
    const double fine = 2.0 * d4 - d2;
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace

AngularFrequencyPerMeter DeviceModel::d_eta_dr(Meters r) const {
    return AngularFrequencyPerMeter(central_richardson(*this, r.value(), derivative_step(r).value()));
}

EtaCurve eta_curve(const DeviceModel& model, std::span<const double> r_grid) {
    for (std::size_t i = 1; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > r_grid[i - 1])) {
            throw std::invalid_argument("eta_curve: grid must be strictly increasing");
        }
    }
    EtaCurve curve;
    const std::size_t n = r_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = r_grid[i];
        const EtaPoint p = model.at(Meters(r));
        const double h = model.derivative_step(Meters(r)).value();
        double d = 0.0;
        if (n == 1 || (i > 0 && i + 1 < n)) {
            d = central_richardson(model, r, h);
        } else if (i == 0) {
            d = one_sided_richardson(model, r, h, +1.0);
        } else {
            d = one_sided_richardson(model, r, h, -1.0);
        }
        curve.r.push_back(r);
        curve.eta.push_back(p.kerr.eta.value());
        curve.eta_over_kappa.push_back(p.kerr.eta_over_kappa);
        curve.d_eta_dr.push_back(d);
    }
    return curve;
}

double DisplacementPrecision::at(interferometer::Quadrature q) const {
    const auto& v = q == interferometer::Quadrature::X ? delta_rt_x : delta_rt_y;
    if (!v) {
        throw interferometer::UnobservablePhase("quadrature " + interferometer::to_string(q) +
                                                " carries no displacement signal at this operating point");
    }
    return *v;
}

DisplacementPrecision displacement_precision(double n_bar, const DeviceModel& model, Meters r, Seconds t,
                                             PhaseChoice phase) {
    using interferometer::ClosedFormVariant;
    using interferometer::InterferometerConfig;
    using interferometer::Quadrature;

    if (!(t.value() >= 0.0)) {
        throw std::invalid_argument("interaction time must be non-negative");
    }
    DisplacementPrecision out;
    out.eta = model.eta(r);
    out.d_eta_dr = model.d_eta_dr(r);
    if (!(std::fabs(out.d_eta_dr.value()) > 0.0)) {
        std::ostringstream msg;
        msg << "d eta/dr vanishes at r = " << r.value() << " m; displacement is unobservable there";
        throw UnobservableDisplacement(msg.str());
    }
    out.eta_t = out.eta.value() * t.value();

    InterferometerConfig config = InterferometerConfig::from_photons(n_bar, 0.0, out.eta_t);
    interferometer::validate(config);
    const double slope = std::fabs(out.d_eta_dr.value());

    for (Quadrature q : {Quadrature::X, Quadrature::Y}) {
        config.quadrature = q;
        config.phi_t = phase.phi_t ? *phase.phi_t : interferometer::optimal_phase(config, q);
        const auto res = interferometer::precision_closed_form(config, ClosedFormVariant::Rederived);
        out.delta_eta_t.method = res.method;
        const auto& d = q == Quadrature::X ? res.delta_x : res.delta_y;
        auto& dst_eta = q == Quadrature::X ? out.delta_eta_t.delta_x : out.delta_eta_t.delta_y;
        auto& dst_rt = q == Quadrature::X ? out.delta_rt_x : out.delta_rt_y;
        auto& dst_r = q == Quadrature::X ? out.delta_r_x : out.delta_r_y;
        (q == Quadrature::X ? out.phi_t_x : out.phi_t_y) = config.phi_t;
        dst_eta = d;
        if (d) {
            dst_rt = *d / slope;
            if (t.value() > 0.0) {
                dst_r = *dst_rt / t.value();
            }
        }
    }
    return out;
}

} // namespace kerrsense::device
