#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "kerrsense/device.hpp"

using namespace kerrsense::device;
using namespace kerrsense::units;
using kerrsense::constants::pi;

namespace {

constexpr double two_pi_mhz_unit = 2.0 * pi * 1e6;

// Independent long-double chain: gap → C → J → (δ, Δ).
struct Reference {
    long double capacitance;
    long double delta;
    long double Delta;
};

Reference reference_chain(long double gap) {
    const long double eps0 = 8.854187813e-12L;
    const long double e = 1.602176634e-19L;
    const long double hbar = 1.054571817e-34L;
    const long double area = 200e-6L * 70e-6L;
    const long double c_self = 100e-15L;
    const long double e_j = 2.0L * 3.14159265358979323846L * 15e9L;
    const long double e_c = e * e / (2.0L * c_self * hbar);
    const long double omega_q = std::sqrt(8.0L * e_j * e_c) - e_c;
    auto coupling = [&](long double c) { return c / (c + c_self) * omega_q / 2.0L; };
    const long double c0 = eps0 * area / 1.01e-6L;
    const long double c = eps0 * area / gap;
    const long double shift = coupling(c) - coupling(c0);
    const long double base = -2.0L * 3.14159265358979323846L * 60e6L;
    return {c, base - shift, base + shift};
}

class ConstantMap final : public DetuningMap {
public:
    Detunings operator()(Farads) const override { return {two_pi_mhz(-300.0), two_pi_mhz(250.0)}; }
};

// Δ = 2π·250 MHz + slope·(C − C_ref), so every slope agrees at C_ref.
class LinearMap final : public DetuningMap {
public:
    LinearMap(double slope, double c_ref = 0.0) : slope_(slope), c_ref_(c_ref) {}
    Detunings operator()(Farads c) const override {
        return {two_pi_mhz(-300.0), two_pi_mhz(250.0) + AngularFrequency(slope_ * (c.value() - c_ref_))};
    }

private:
    double slope_;
    double c_ref_;
};

} // namespace

TEST_CASE("parallel-plate capacitance at the baseline gap") {
    const double c = coupling_capacitance(PlateGeometry{}, micrometers(1.01)).value();
    CHECK(c == doctest::Approx(8.854187813e-12 * 200e-6 * 70e-6 / 1.01e-6).epsilon(1e-14));
    CHECK(c == doctest::Approx(1.2273e-13).epsilon(1e-4));
    CHECK_THROWS_AS(coupling_capacitance(PlateGeometry{}, Meters(0.0)), std::domain_error);
}

TEST_CASE("capacitance falls strictly with the gap for both models") {
    for (auto model : {CapacitanceModel::ParallelPlate, CapacitanceModel::ParallelPlateWithFringe}) {
        PlateGeometry g;
        g.model = model;
        double previous = INFINITY;
        for (double gap = 0.01e-6; gap < 20e-6; gap *= 1.1) {
            const double c = coupling_capacitance(g, Meters(gap)).value();
            CHECK(c > 0.0);
            CHECK(c < previous);
            previous = c;
        }
    }
    PlateGeometry fringe;
    fringe.model = CapacitanceModel::ParallelPlateWithFringe;
    CHECK(coupling_capacitance(fringe, micrometers(1.0)) > coupling_capacitance(PlateGeometry{}, micrometers(1.0)));
}

TEST_CASE("transmon frequency and coupling follow the long-double chain") {
    const DeviceParams dev;
    const long double e = 1.602176634e-19L;
    const long double hbar = 1.054571817e-34L;
    const long double e_c = e * e / (2.0L * 100e-15L * hbar);
    const long double omega_q = std::sqrt(8.0L * 2.0L * 3.14159265358979323846L * 15e9L * e_c) - e_c;
    CHECK(transmon_frequency(dev).value() == doctest::Approx(static_cast<double>(omega_q)).epsilon(1e-12));
    CHECK(transmon_frequency(dev).value() / (2.0 * pi * 1e9) == doctest::Approx(4.6275).epsilon(1e-4));
}

TEST_CASE("detunings at a 0.5 um gap") {
    const DeviceModel model(PlateGeometry{}, DeviceParams{});
    const auto p = model.at(micrometers(0.5 - 1.01));
    const auto ref = reference_chain(0.5e-6L);
    CHECK(p.capacitance.value() == doctest::Approx(static_cast<double>(ref.capacitance)).epsilon(1e-12));
    CHECK(p.detunings.delta.value() == doctest::Approx(static_cast<double>(ref.delta)).epsilon(1e-10));
    CHECK(p.detunings.Delta.value() == doctest::Approx(static_cast<double>(ref.Delta)).epsilon(1e-10));
    // frozen golden values
    CHECK(p.detunings.delta.value() / two_pi_mhz_unit == doctest::Approx(-433.781239375232).epsilon(1e-9));
    CHECK(p.detunings.Delta.value() / two_pi_mhz_unit == doctest::Approx(313.781239375232).epsilon(1e-9));
}

TEST_CASE("baseline gap reproduces the configured detunings exactly") {
    const DeviceParams dev;
    const DeviceModel model(PlateGeometry{}, dev);
    const auto p = model.at(Meters(0.0));
    CHECK(p.detunings.delta.value() == dev.delta0.value());
    CHECK(p.detunings.Delta.value() == dev.Delta0.value());
}

TEST_CASE("Kerr coefficient") {
    DeviceParams dev;
    SUBCASE("symmetric detunings cancel when the linewidths match") {
        dev.gamma_21 = two_pi_mhz(0.05);
        dev.gamma_23 = two_pi_mhz(0.05);
        CHECK(kerr_eta(dev.delta0, dev.Delta0, dev).eta.value() == 0.0);
    }
    SUBCASE("hand evaluation") {
        const double g = 2.0 * pi * 100e6;
        const double om = 2.0 * pi * 1500e6;
        const double d = 2.0 * pi * -200e6;
        const double big = 2.0 * pi * 300e6;
        const double g43 = 2.0 * pi * 0.1e6;
        const double g2x = 2.0 * pi * 0.2e6;
        const double expected = (g / om) * (g / om) * (g * g * big / (g43 * g43 + big * big) - g * g * d / (g2x * g2x + d * d));
        const auto k = kerr_eta(AngularFrequency(d), AngularFrequency(big), dev);
        CHECK(k.eta.value() == doctest::Approx(expected).epsilon(1e-13));
        CHECK(k.eta_over_kappa == doctest::Approx(expected / dev.kappa.value()).epsilon(1e-13));
        CHECK_FALSE(k.outside_weak_coupling);
    }
    SUBCASE("kappa never enters eta") {
        DeviceParams wide = dev;
        wide.kappa = wide.kappa * 1e3;
        const auto a = kerr_eta(two_pi_mhz(-123.0), two_pi_mhz(77.0), dev);
        const auto b = kerr_eta(two_pi_mhz(-123.0), two_pi_mhz(77.0), wide);
        CHECK(a.eta.value() == b.eta.value());
        CHECK(a.eta_over_kappa / b.eta_over_kappa == doctest::Approx(1e3));
    }
    SUBCASE("strong pump coupling is flagged") {
        dev.g1 = two_pi_mhz(600.0);
        CHECK(kerr_eta(dev.delta0, dev.Delta0, dev).outside_weak_coupling);
    }
}

TEST_CASE("derivative of eta against an analytic stub") {
    // C(gap) = c0·r0/gap through a linear Δ map gives a closed-form dη/dr.
    const double slope = 1e22;
    const PlateGeometry geom;
    const DeviceParams dev;
    const double c0 = 1e-13;
    auto cap = [&](Meters gap) { return Farads(c0 * geom.r0.value() / gap.value()); };
    const DeviceModel model(geom, dev, cap, std::make_shared<LinearMap>(slope));
    for (double r : {-0.5e-6, 0.0, 0.7e-6}) {
        const double gap = geom.r0.value() + r;
        const double big = 2.0 * pi * 250e6 + slope * c0 * geom.r0.value() / gap;
        const double g = dev.g2.value();
        const double ratio = dev.g1.value() / dev.omega_c.value();
        const double g43 = dev.gamma_43.value();
        const double d_eta_d_big = ratio * ratio * g * g * (g43 * g43 - big * big) / std::pow(g43 * g43 + big * big, 2);
        const double d_big_dr = -slope * c0 * geom.r0.value() / (gap * gap);
        CHECK(model.d_eta_dr(Meters(r)).value() == doctest::Approx(d_eta_d_big * d_big_dr).epsilon(1e-7));
    }
}

TEST_CASE("eta curve") {
    const DeviceModel model(PlateGeometry{}, DeviceParams{});
    const std::vector<double> grid{-0.5e-6, -0.4e-6, -0.3e-6, -0.2e-6};
    const auto curve = eta_curve(model, grid);
    REQUIRE(curve.r.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(curve.eta[i] == model.eta(Meters(grid[i])).value());
        const double central = model.d_eta_dr(Meters(grid[i])).value();
        const bool interior = i > 0 && i + 1 < grid.size();
        CHECK(curve.d_eta_dr[i] == doctest::Approx(central).epsilon(interior ? 1e-15 : 1e-6));
    }
    const std::vector<double> unsorted{0.0, -1e-7};
    CHECK_THROWS_AS(eta_curve(model, unsorted), std::invalid_argument);
    const std::vector<double> closing{-1.2e-6, 0.0};
    CHECK_THROWS_AS(eta_curve(model, closing), std::domain_error);
}

TEST_CASE("constant capacitance gives a flat eta and an unobservable displacement") {
    const DeviceModel model(PlateGeometry{}, DeviceParams{}, [](Meters) { return Farads(1e-13); },
                            std::make_shared<ConstantMap>());
    const double eta0 = model.eta(Meters(-0.5e-6)).value();
    for (double r : {-0.3e-6, 0.0, 0.5e-6}) {
        CHECK(model.eta(Meters(r)).value() == eta0);
        CHECK(model.d_eta_dr(Meters(r)).value() == 0.0);
    }
    CHECK_THROWS_AS(displacement_precision(1e4, model, Meters(0.0), Seconds(1e-9)), UnobservableDisplacement);
}

TEST_CASE("displacement precision is delta(eta t) over |d eta/dr|") {
    const PlateGeometry geom;
    const DeviceParams dev;
    auto cap = [&](Meters gap) { return Farads(1e-13 * geom.r0.value() / gap.value()); };
    const DeviceModel slow(geom, dev, cap, std::make_shared<LinearMap>(1e21, 1e-13));
    const DeviceModel fast(geom, dev, cap, std::make_shared<LinearMap>(2e21, 1e-13));
    const double t = 1e-12;
    const auto a = displacement_precision(1e4, slow, Meters(0.0), Seconds(t), {0.7});
    CHECK(*a.delta_rt_x == doctest::Approx(*a.delta_eta_t.delta_x / std::fabs(a.d_eta_dr.value())).epsilon(1e-14));
    CHECK(*a.delta_r_x == doctest::Approx(*a.delta_rt_x / t).epsilon(1e-14));

    // same ηt at r = 0 for both maps, twice the slope
    const auto b = displacement_precision(1e4, fast, Meters(0.0), Seconds(t), {0.7});
    CHECK(b.eta.value() == a.eta.value());
    CHECK(b.d_eta_dr.value() == doctest::Approx(2.0 * a.d_eta_dr.value()).epsilon(1e-6));
    CHECK(*b.delta_rt_x == doctest::Approx(0.5 * *a.delta_rt_x).epsilon(1e-6));
}

TEST_CASE("default device structure along r") {
    const DeviceModel model(PlateGeometry{}, DeviceParams{});
    // Δ crosses zero between −0.12 and −0.10 µm, δ between +0.10 and +0.12 µm
    CHECK(model.at(micrometers(-0.12)).detunings.Delta.value() > 0.0);
    CHECK(model.at(micrometers(-0.10)).detunings.Delta.value() < 0.0);
    CHECK(model.at(micrometers(0.10)).detunings.delta.value() < 0.0);
    CHECK(model.at(micrometers(0.12)).detunings.delta.value() > 0.0);
    // away from the crossings |dη/dr| decays monotonically toward the open end
    double previous = INFINITY;
    for (double r = 0.3e-6; r <= 1.0e-6; r += 0.05e-6) {
        const double s = std::fabs(model.d_eta_dr(Meters(r)).value());
        CHECK(s < previous);
        previous = s;
    }
}

TEST_CASE("parameter validation") {
    PlateGeometry g;
    g.width = Meters(-1.0);
    CHECK_THROWS_AS(DeviceModel(g, DeviceParams{}), std::invalid_argument);
    DeviceParams d;
    d.kappa = AngularFrequency(0.0);
    CHECK_THROWS_AS(DeviceModel(PlateGeometry{}, d), std::invalid_argument);
    const DeviceModel model(PlateGeometry{}, DeviceParams{});
    CHECK_THROWS_AS(model.at(micrometers(-1.01)), std::domain_error);
    CHECK(model.derivative_step(Meters(0.0)).value() == doctest::Approx(1.01e-10));
    CHECK(model.derivative_step(micrometers(-1.0)).value() == doctest::Approx(1e-9));
}
