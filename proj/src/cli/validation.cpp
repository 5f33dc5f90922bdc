#include "kerrsense/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "kerrsense/device.hpp"
#include "kerrsense/metrology.hpp"
#include "kerrsense/sweep.hpp"

namespace kerrsense::validation {

using interferometer::InterferometerConfig;
using interferometer::OutputPort;
using interferometer::Quadrature;
using interferometer::Target;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

// Uniform [0, 1) from the top 53 bits, so the draws do not depend on the
// standard library's distribution implementation.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
    double log(double lo, double hi) { return std::exp((*this)(std::log(lo), std::log(hi))); }

private:
    std::mt19937_64 engine_;
};

std::string sci(double v, int digits = 4) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(digits) << v;
    return s.str();
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

template <typename F>
Entry timed(int criterion, std::string name, F body) {
    const auto start = std::chrono::steady_clock::now();
    Entry e = body();
    e.criterion = criterion;
    e.name = std::move(name);
    e.tag = Tag::Must;
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
}

Entry info(std::string name, std::string summary) {
    Entry e;
    e.tag = Tag::Info;
    e.name = std::move(name);
    e.summary = std::move(summary);
    return e;
}

// The printed formula's radicand can go negative; say so instead of printing nan.
std::string printed_value(const std::optional<double>& v) {
    if (!v) {
        return "unobservable";
    }
    return std::isnan(*v) ? "not real (negative radicand)" : sci(*v, 9);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) {
        g.push_back(std::pow(10.0, std::log10(lo) + i * (std::log10(hi) - std::log10(lo)) / (points - 1)));
    }
    return g;
}

double quadrature_mean(const InterferometerConfig& c, Quadrature q) {
    const auto m = interferometer::analytic_moments(c);
    return q == Quadrature::X ? m.mean_x : m.mean_y;
}

double best_displacement_precision(const std::vector<sweep::SweepRow>& rows, double* where) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        for (const auto& d : {row.delta_rt_x, row.delta_rt_y}) {
            if (d && *d < best) {
                best = *d;
                if (where) {
                    *where = row.r;
                }
            }
        }
    }
    return best;
}

std::vector<sweep::SweepRow> displacement_rows(double n_bar, const device::DeviceParams& dev, unsigned jobs) {
    config::Configuration cfg;
    cfg.device = dev;
    cfg.interferometer.n_bar = n_bar;
    return sweep::run_sweep(sweep::make_spec(cfg, config::SweepVariable::R), jobs);
}

} // namespace

bool Report::passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.tag != Tag::Must || e.passed; });
}

const Entry* Report::find(int criterion) const {
    for (const auto& e : entries) {
        if (e.tag == Tag::Must && e.criterion == criterion) {
            return &e;
        }
    }
    return nullptr;
}

Entry check_oracle_equivalence(const Options& opt) {
    return timed(1, "oracle equivalence of the closed-form moments", [&] {
        Uniform u(opt.seed ^ 0x01);
        double worst = 0.0;
        std::string worst_at;
        for (int i = 0; i < 200; ++i) {
            InterferometerConfig c = InterferometerConfig::from_photons(u(0.0, 9.0), u(0.0, two_pi), u(0.0, 0.3));
            c.alpha *= std::polar(1.0, u(0.0, two_pi));
            c.port = u() < 0.5 ? OutputPort::A : OutputPort::B;
            const auto ref = opt.oracle(c);
            const auto got = interferometer::analytic_moments(c);
            for (double d : {ref.mean_x - got.mean_x, ref.mean_y - got.mean_y, ref.var_x - got.var_x,
                             ref.var_y - got.var_y}) {
                if (!(std::fabs(d) <= worst)) {
                    worst = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::fabs(d);
                    worst_at = "n=" + fixed(c.n_bar(), 3) + " phi_t=" + fixed(c.phi_t, 3) + " eta_t=" + fixed(c.eta_t, 3);
                }
            }
        }
        Entry e;
        e.passed = worst <= 1e-8;
        e.summary = "200 configs, max |deviation| = " + sci(worst) + " (limit 1e-08) at " + worst_at;
        return e;
    });
}

Entry check_closed_form_vs_numeric(const Options& opt) {
    return timed(2, "rederived closed form against finite differences", [&] {
        Uniform u(opt.seed ^ 0x02);
        double worst = 0.0;
        int compared = 0;
        int excluded = 0;
        for (int i = 0; i < 1000; ++i) {
            const double n = u.log(1.0, 1e7);
            const double eta_t = u() < 0.1 ? 0.0 : u.log(1e-6, 3.0) / n;
            InterferometerConfig c = InterferometerConfig::from_photons(n, u(0.0, two_pi), eta_t);
            c.port = u() < 0.5 ? OutputPort::A : OutputPort::B;
            const Target target = u() < 0.8 ? Target::KerrPhase : Target::LinearPhase;
            const double h = interferometer::default_step(c, target);
            const auto closed =
                interferometer::precision_closed_form(c, interferometer::ClosedFormVariant::Rederived, {}, target);
            const auto numeric = interferometer::precision_numeric(c, h, interferometer::Engine::Analytic, target);
            for (auto [a, b] : {std::pair{closed.delta_x, numeric.delta_x}, std::pair{closed.delta_y, numeric.delta_y}}) {
                if (!a || !b) {
                    ++excluded;
                    continue;
                }
                ++compared;
                const double rel = std::fabs(*a - *b) / *a;
                worst = std::max(worst, std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel);
            }
        }
        Entry e;
        e.passed = worst <= 1e-6;
        e.summary = "1000 configs with n_bar eta_t <= 3 (" + std::to_string(compared) + " quadratures compared, " + std::to_string(excluded) +
                    " unobservable), max relative deviation = " + sci(worst) + " (limit 1e-06)";
        return e;
    });
}

Entry check_kerr_scaling(const Options&) {
    return timed(3, "super-Heisenberg scaling of the Kerr-phase precision", [] {
        const auto grid = log_grid(1e2, 1e6, 9);
        const InterferometerConfig tmpl = InterferometerConfig::from_photons(1.0, 0.0, 0.0);
        const auto fit = interferometer::scaling_exponent(grid, tmpl, {});
        Entry e;
        const bool slope_ok = std::fabs(fit.slope + 1.5) <= 0.02;
        const bool prefactor_ok = std::fabs(fit.prefactor - 2.0) <= 0.05 * 2.0;
        e.passed = slope_ok && prefactor_ok;
        e.summary = "slope = " + fixed(fit.slope, 5) + " (target -1.50 +/- 0.02: " + (slope_ok ? "ok" : "out") +
                    "), prefactor = " + fixed(fit.prefactor, 5) + " (target 2 +/- 5%: " + (prefactor_ok ? "ok" : "out") +
                    ")";
        return e;
    });
}

Entry check_shot_noise_scaling(const Options&) {
    return timed(4, "shot-noise scaling of the linear phase at eta_t = 0", [] {
        const auto grid = log_grid(1e2, 1e6, 9);
        interferometer::ScalingOptions so;
        so.target = Target::LinearPhase;
        so.n_bar_eta_t = 0.0;
        const auto fit =
            interferometer::scaling_exponent(grid, InterferometerConfig::from_photons(1.0, 0.0, 0.0), so);
        Entry e;
        e.passed = std::fabs(fit.slope + 0.5) <= 0.02;
        e.summary = "slope = " + fixed(fit.slope, 5) + " (target -0.50 +/- 0.02), prefactor = " + fixed(fit.prefactor, 5);
        return e;
    });
}

Entry check_spring_constant(const Options&) {
    return timed(5, "spring constant of the default cantilever", [] {
        const double k = metrology::spring_constant(metrology::Cantilever{}).value();
        Entry e;
        e.passed = k >= 0.255 && k <= 0.345;
        e.summary = "k = " + fixed(k, 5) + " N/m (window [0.255, 0.345])";
        return e;
    });
}

Entry check_zero_point_motion(const Options&) {
    return timed(6, "zero-point motion of LIGO mirror and loaded cantilever", [] {
        using namespace units;
        const double ligo = metrology::zero_point_motion(Kilograms(10.7), AngularFrequency(two_pi * 1.0)).value();
        const config::CantileverSettings settings;
        const metrology::Cantilever loaded = settings.loaded();
        const double cant =
            metrology::zero_point_motion(metrology::effective_mass(loaded), metrology::resonance_frequency(loaded))
                .value();
        Entry e;
        const bool ligo_ok = ligo >= 4e-19 && ligo <= 2e-18;
        const bool cant_ok = cant >= 3e-16 && cant <= 3e-15;
        e.passed = ligo_ok && cant_ok;
        e.summary = "LIGO x_zpm = " + sci(ligo) + " m (window [4e-19, 2e-18]), loaded cantilever x_zpm = " + sci(cant) +
                    " m (window [3e-16, 3e-15])";
        return e;
    });
}

Entry check_displacement_order(const Options& opt) {
    return timed(7, "displacement precision order at n_bar = 1e7", [&] {
        const auto rows = displacement_rows(1e7, device::DeviceParams{}, opt.jobs);
        double where = 0.0;
        const double best = best_displacement_precision(rows, &where);
        double edge = std::numeric_limits<double>::infinity();
        for (const auto* row : {&rows.front(), &rows.back()}) {
            for (const auto& d : {row->delta_rt_x, row->delta_rt_y}) {
                edge = std::min(edge, d.value_or(edge));
            }
        }
        Entry e;
        e.passed = best >= 1e-22 && best <= 1e-20;
        e.summary = "best delta(rt) = " + sci(best) + " m/Hz at r = " + sci(where, 3) +
                    " m (window [1e-22, 1e-20]); grid-end value " + sci(edge) + " m/Hz";
        return e;
    });
}

Entry check_kappa_invariance(const Options&) {
    return timed(8, "eta independent of kappa", [] {
        device::DeviceParams scaled;
        scaled.kappa = scaled.kappa * 1e3;
        const device::DeviceModel base(device::PlateGeometry{}, device::DeviceParams{});
        const device::DeviceModel wide(device::PlateGeometry{}, scaled);
        int identical = 0;
        int ratio_ok = 0;
        const auto grid = sweep::default_r_grid();
        for (double r : grid) {
            const auto a = base.at(units::Meters(r)).kerr;
            const auto b = wide.at(units::Meters(r)).kerr;
            identical += a.eta.value() == b.eta.value();
            ratio_ok += a.eta_over_kappa == 0.0 ? b.eta_over_kappa == 0.0
                                                : std::fabs(a.eta_over_kappa / b.eta_over_kappa - 1e3) <= 1e-9;
        }
        Entry e;
        const int n = static_cast<int>(grid.size());
        e.passed = identical == n && ratio_ok == n;
        e.summary = std::to_string(identical) + "/" + std::to_string(n) +
                    " grid points with bit-identical eta under kappa x 1e3; eta/kappa scaled by 1e-3 at " +
                    std::to_string(ratio_ok) + "/" + std::to_string(n);
        return e;
    });
}

Entry check_chain_rule(const Options&) {
    return timed(9, "chained displacement precision against direct differences", [] {
        const device::DeviceModel model(device::PlateGeometry{}, device::DeviceParams{});
        constexpr double n_bar = 1e7;
        constexpr int points = 50;
        double worst = 0.0;
        std::string worst_at;
        int compared = 0;
        for (int k = 0; k < points; ++k) {
            const double r = -0.9e-6 + k * (1.9e-6 / (points - 1));
            const double eta = model.eta(units::Meters(r)).value();
            const double t = 1e-3 / (n_bar * std::fabs(eta));
            const auto dp = device::displacement_precision(n_bar, model, units::Meters(r), units::Seconds(t));
            const double h = model.derivative_step(units::Meters(r)).value();
            for (Quadrature q : {Quadrature::X, Quadrature::Y}) {
                const auto chained = q == Quadrature::X ? dp.delta_rt_x : dp.delta_rt_y;
                if (!chained) {
                    continue;
                }
                InterferometerConfig c =
                    InterferometerConfig::from_photons(n_bar, q == Quadrature::X ? dp.phi_t_x : dp.phi_t_y, 0.0);
                auto mean_at = [&](double rr) {
                    c.eta_t = model.eta(units::Meters(rr)).value() * t;
                    return quadrature_mean(c, q);
                };
                auto central = [&](double step) { return (mean_at(r + step) - mean_at(r - step)) / (2.0 * step); };
                const double d_mean_dr = (4.0 * central(0.5 * h) - central(h)) / 3.0;
                c.eta_t = eta * t;
                const auto m = interferometer::analytic_moments(c);
                const double spread = std::sqrt(q == Quadrature::X ? m.var_x : m.var_y);
                const double direct = spread / std::fabs(d_mean_dr / t);
                const double rel = std::fabs(direct - *chained) / *chained;
                ++compared;
                if (!(rel <= worst)) {
                    worst = std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel;
                    worst_at = "r = " + sci(r, 3) + " m, " + interferometer::to_string(q);
                }
            }
        }
        Entry e;
        e.passed = compared > 0 && worst <= 1e-4;
        e.summary = std::to_string(points) + " grid points (" + std::to_string(compared) +
                    " quadratures), max relative deviation = " + sci(worst) + " (limit 1e-04) at " + worst_at;
        return e;
    });
}

Entry check_determinism(const Options& opt) {
    return timed(10, "photon-sweep output is deterministic", [&] {
        const config::Configuration cfg;
        const auto spec = sweep::make_spec(cfg, config::SweepVariable::NBar);
        auto csv = [&](unsigned jobs) {
            std::ostringstream out;
            sweep::write_csv(out, sweep::run_sweep(spec, jobs));
            return out.str();
        };
        const unsigned workers = std::max(4u, opt.jobs == 0 ? sweep::default_jobs() : opt.jobs);
        const std::string first = csv(1);
        const std::string second = csv(1);
        const std::string parallel = csv(workers);
        Entry e;
        e.passed = first == second && first == parallel && !first.empty();
        e.summary = std::string("serial repeat ") + (first == second ? "identical" : "differs") + ", " +
                    std::to_string(workers) + " workers " + (first == parallel ? "identical" : "differs") + " (" +
                    std::to_string(first.size()) + " bytes)";
        return e;
    });
}

std::vector<Entry> discrepancy_notes() {
    std::vector<Entry> notes;
    using interferometer::ClosedFormVariant;

    {
        InterferometerConfig c = InterferometerConfig::from_photons(32.0, 0.4, 0.02);
        const auto red = interferometer::precision_closed_form(c, ClosedFormVariant::Rederived);
        const auto literal = interferometer::precision_closed_form(c, ClosedFormVariant::Paper);
        const auto phi = interferometer::precision_closed_form(c, ClosedFormVariant::Paper, {c.phi_t});
        notes.push_back(info(
            "phi_2 symbol ambiguity",
            "printed phi_2 = 2(delta+eta)t + n sin(4 eta t) has an undefined delta. At n_bar = 32, phi_t = 0.4, "
            "eta_t = 0.02 (n = Kerr-arm photons 16): rederived delta_X = " +
                sci(red.at(Quadrature::X), 9) + ", delta_Y = " + sci(red.at(Quadrature::Y), 9) +
                "; literal (delta t = 0) delta_X = " + printed_value(literal.delta_x) +
                ", delta_Y = " + printed_value(literal.delta_y) + "; with delta t = phi_t delta_X = " +
                printed_value(phi.delta_x) + ", delta_Y = " + printed_value(phi.delta_y) +
                ". The rederived moments fix delta = phi."));
    }
    {
        device::DeviceParams sym;
        sym.gamma_21 = units::two_pi_mhz(0.05);
        sym.gamma_23 = units::two_pi_mhz(0.05);
        const device::DeviceParams dev;
        const double exact = device::kerr_eta(sym.delta0, sym.Delta0, sym).eta.value();
        const double with_defaults = device::kerr_eta(dev.delta0, dev.Delta0, dev).eta.value();
        const device::DeviceModel model(device::PlateGeometry{}, dev);
        const double at_half = model.eta(units::micrometers(-0.5)).value();
        notes.push_back(info(
            "Kerr coefficient symmetric cancellation",
            "with delta = Delta = -2pi*60 MHz and g1 = g2, eta vanishes when gamma_21 + gamma_23 = gamma_43: eta/2pi = " +
                sci(exact / two_pi) + " Hz; with the default linewidths eta/2pi = " + sci(with_defaults / two_pi) +
                " Hz at r = 0. A nonzero eta comes from the capacitive detuning split: eta/2pi = " +
                sci(at_half / two_pi) + " Hz at r = -0.5 um."));
    }
    const double best_rt = [] {
        return best_displacement_precision(displacement_rows(1e7, device::DeviceParams{}, 1), nullptr);
    }();
    {
        const config::CantileverSettings settings;
        const auto loaded = settings.loaded();
        const auto k = metrology::spring_constant(metrology::Cantilever{});
        const double at_published = metrology::min_detectable_force(k, units::MeterSeconds(1e-22)).value();
        const auto fs = metrology::force_sensitivity(loaded, units::MeterSeconds(best_rt));
        notes.push_back(info(
            "6.6e-17 N/Hz force figure",
            "published 6.6e-17 N/Hz at delta(rt) = 1e-22 m/Hz; k * delta(rt) = " + sci(at_published) + " N/Hz with k = " +
                fixed(k.value(), 4) + " N/m; at the model's best delta(rt) = " + sci(best_rt) +
                " m/Hz, delta F = " + sci(fs.min_force.value()) +
                " N/Hz. Pull of 1 kg at 1 m on the loaded sensing mass (" + sci(fs.sensing_mass.value()) +
                " kg): " + sci(fs.reference_force.value()) + " N. Neither reproduces 6.6e-17."));
        const auto at_published_fs = metrology::force_sensitivity(loaded, units::MeterSeconds(1e-22));
        notes.push_back(info("1e-9 g gravity claim",
                             "delta a/g = delta F/(m g): " + sci(at_published_fs.gravity_resolution) +
                                 " at delta(rt) = 1e-22 m/Hz, " + sci(fs.gravity_resolution) +
                                 " at the model's best delta(rt); published claim 1e-9"));
    }
    {
        const auto fit = interferometer::scaling_exponent(log_grid(1e2, 1e6, 9),
                                                          InterferometerConfig::from_photons(1.0, 0.0, 0.0), {});
        interferometer::ScalingOptions y;
        y.quadrature = Quadrature::Y;
        const auto fit_y = interferometer::scaling_exponent(log_grid(1e2, 1e6, 9),
                                                            InterferometerConfig::from_photons(1.0, 0.0, 0.0), y);
        notes.push_back(info("prefactor of the n^-3/2 law",
                             "at the scanned optimum delta(eta t) = " + fixed(fit.prefactor, 5) + " n^" +
                                 fixed(fit.slope, 5) + " (X), " + fixed(fit_y.prefactor, 5) + " n^" +
                                 fixed(fit_y.slope, 5) + " (Y); the published constant 2 is not reached"));
    }
    {
        const device::DeviceModel model(device::PlateGeometry{}, device::DeviceParams{});
        double peak = 0.0;
        for (double r : sweep::default_r_grid()) {
            peak = std::max(peak, std::fabs(model.eta(units::Meters(r)).value()));
        }
        const double kappa = device::DeviceParams{}.kappa.value();
        notes.push_back(info("eta/kappa range",
                             "max |eta|/2pi on the r grid = " + sci(peak / two_pi) + " Hz; |eta|/kappa = " +
                                 sci(peak / kappa) + " at kappa = 2pi*" + sci(kappa / two_pi / 1e6, 3) +
                                 " MHz. eta/kappa = 1e3 would need kappa <= 2pi*" + sci(peak / 1e3 / two_pi, 3) +
                                 " Hz, far below g"));
    }
    {
        std::string text = "best delta(rt) at n_bar = 1e7 for gamma scaled by";
        for (double f : {0.5, 1.0, 2.0}) {
            device::DeviceParams dev;
            dev.gamma_21 = dev.gamma_21 * f;
            dev.gamma_23 = dev.gamma_23 * f;
            dev.gamma_43 = dev.gamma_43 * f;
            const device::DeviceModel model(device::PlateGeometry{}, dev);
            text += " " + fixed(f, 1) + ": " + sci(best_displacement_precision(displacement_rows(1e7, dev, 1), nullptr)) +
                    " m/Hz (eta/2pi at r = -0.5 um " + sci(model.eta(units::micrometers(-0.5)).value() / two_pi) +
                    " Hz);";
        }
        text.pop_back();
        notes.push_back(info("linewidth sensitivity", text));
    }
    return notes;
}

Report run_validation(const Options& opt) {
    Report report;
    for (auto check : {check_oracle_equivalence, check_closed_form_vs_numeric, check_kerr_scaling,
                       check_shot_noise_scaling, check_spring_constant, check_zero_point_motion,
                       check_displacement_order, check_kappa_invariance, check_chain_rule, check_determinism}) {
        report.entries.push_back(check(opt));
    }
    auto& runtime_1 = report.entries[0];
    auto& runtime_2 = report.entries[1];
    if (runtime_1.seconds >= 60.0) {
        runtime_1.passed = false;
    }
    if (runtime_2.seconds >= 30.0) {
        runtime_2.passed = false;
    }
    for (auto& e : discrepancy_notes()) {
        report.entries.push_back(std::move(e));
    }
    return report;
}

void write_report(std::ostream& out, const Report& report) {
    out << "kerrsense validation report\n";
    for (const auto& e : report.entries) {
        if (e.tag == Tag::Must) {
            out << "[must] " << std::setw(2) << e.criterion << ' ' << (e.passed ? "PASS" : "FAIL") << "  " << e.name
                << ": " << e.summary << " (" << fixed(e.seconds, 2) << " s)\n";
        } else {
            out << "[info] " << e.name << ": " << e.summary << '\n';
        }
    }
    out << "overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

} // namespace kerrsense::validation
