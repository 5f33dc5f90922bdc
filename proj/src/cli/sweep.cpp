#include "kerrsense/sweep.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace kerrsense::sweep {

using config::SweepScale;
using config::SweepVariable;
using interferometer::InterferometerConfig;
using interferometer::Quadrature;
using interferometer::Target;

namespace {

constexpr double mhz_angular = 2.0 * constants::pi * 1e6;

void add_flag(std::string& status, const std::string& flag) {
    status = status == "ok" ? flag : status + "+" + flag;
}

struct Point {
    double r;
    double n_bar;
    std::optional<double> eta_t;
    std::optional<double> phi_t;
};

Point point_for(const SweepSpec& spec, double x) {
    const auto& s = spec.fixed.interferometer;
    Point p{s.r, s.n_bar, s.eta_t, s.phi_t};
    switch (spec.variable) {
    case SweepVariable::R: p.r = x; break;
    case SweepVariable::NBar: p.n_bar = x; break;
    case SweepVariable::EtaT: p.eta_t = x; break;
    case SweepVariable::PhiT: p.phi_t = x; break;
    }
    return p;
}

} // namespace

SweepRow evaluate_point(const SweepSpec& spec, const device::DeviceModel& model, double x) {
    const auto& s = spec.fixed.interferometer;
    const Point p = point_for(spec, x);
    SweepRow row;
    row.r = p.r;
    row.n_bar = p.n_bar;
    try {
        const device::EtaPoint ep = model.at(units::Meters(p.r));
        const double eta = ep.kerr.eta.value();
        row.eta = eta;
        row.eta_over_kappa = ep.kerr.eta_over_kappa;
        row.d_eta_dr = model.d_eta_dr(units::Meters(p.r)).value();
        if (ep.kerr.outside_weak_coupling) {
            add_flag(row.status, "weak_coupling_exceeded");
        }

        if (p.eta_t) {
            row.eta_t = *p.eta_t;
            row.t = eta != 0.0 ? row.eta_t / eta : missing;
        } else if (s.t) {
            row.t = *s.t;
            row.eta_t = eta * row.t;
        } else {
            if (!(p.n_bar > 0.0)) {
                throw std::invalid_argument("the small-time operating point needs n_bar > 0");
            }
            row.eta_t = std::copysign(s.n_bar_eta_t / p.n_bar, eta);
            row.t = eta != 0.0 ? row.eta_t / eta : missing;
        }

        InterferometerConfig c = InterferometerConfig::from_photons(p.n_bar, 0.0, row.eta_t);
        c.theta_t = s.theta_t;
        c.port = s.port;
        interferometer::validate(c);

        const double slope = std::fabs(row.d_eta_dr);
        const bool chained = s.target == Target::KerrPhase && slope > 0.0 && std::isfinite(slope);
        if (s.target == Target::KerrPhase && !chained) {
            add_flag(row.status, "flat_eta");
        }
        for (Quadrature q : {Quadrature::X, Quadrature::Y}) {
            const bool is_x = q == Quadrature::X;
            c.quadrature = q;
            c.phi_t = p.phi_t ? *p.phi_t : interferometer::optimal_phase(c, q, s.target);
            (is_x ? row.phi_t_x : row.phi_t_y) = c.phi_t;

            const auto res = interferometer::precision_closed_form(c, interferometer::ClosedFormVariant::Rederived, {},
                                                                   s.target);
            const auto& delta = is_x ? res.delta_x : res.delta_y;
            if (!delta) {
                add_flag(row.status, is_x ? "unobservable_X" : "unobservable_Y");
                continue;
            }
            InterferometerConfig resolved = c;
            resolved.port = interferometer::resolve_port(c, s.target);
            const auto m = interferometer::analytic_moments(resolved);
            (is_x ? row.delta_eta_t_x : row.delta_eta_t_y) = *delta;
            (is_x ? row.dmean_x : row.dmean_y) = std::sqrt(is_x ? m.var_x : m.var_y) / *delta;
            if (chained) {
                (is_x ? row.delta_rt_x : row.delta_rt_y) = *delta / slope;
            }
        }
    } catch (const std::domain_error&) {
        row.status = "gap_closed";
    } catch (const std::invalid_argument&) {
        row.status = "invalid_point";
    }
    return row;
}

namespace {

void write_number(std::ostream& out, double v) { out << format_number(v); }

} // namespace

void validate(const SweepSpec& spec) {
    if (spec.points < 2) {
        throw std::invalid_argument("sweep needs at least 2 points");
    }
    if (!std::isfinite(spec.start) || !std::isfinite(spec.stop) || !(spec.start < spec.stop)) {
        throw std::invalid_argument("sweep start must be below stop");
    }
    if (spec.scale == SweepScale::Log && !(spec.start > 0.0)) {
        throw std::invalid_argument("a log-scale sweep must start above zero");
    }
}

std::vector<double> grid(const SweepSpec& spec) {
    validate(spec);
    std::vector<double> g(static_cast<std::size_t>(spec.points));
    const double last = spec.points - 1;
    for (int i = 0; i < spec.points; ++i) {
        const double f = i / last;
        g[static_cast<std::size_t>(i)] =
            spec.scale == SweepScale::Log
                ? std::exp(std::log(spec.start) + f * (std::log(spec.stop) - std::log(spec.start)))
                : spec.start + f * (spec.stop - spec.start);
    }
    g.front() = spec.start;
    g.back() = spec.stop;
    return g;
}

std::vector<double> default_r_grid() {
    std::vector<double> g;
    for (int i = -90; i <= 100; ++i) {
        g.push_back(i * 1e-8);
    }
    return g;
}

SweepSpec make_spec(const config::Configuration& cfg, SweepVariable default_variable) {
    SweepSpec spec;
    spec.fixed = cfg;
    spec.variable = cfg.sweep.variable.value_or(default_variable);
    struct Defaults {
        double start, stop;
        int points;
        SweepScale scale;
    };
    Defaults d{};
    switch (spec.variable) {
    case SweepVariable::R: d = {-0.9e-6, 1.0e-6, 191, SweepScale::Linear}; break;
    case SweepVariable::NBar: d = {1e2, 1e7, 26, SweepScale::Log}; break;
    case SweepVariable::EtaT: d = {1e-9, 1e-1, 41, SweepScale::Log}; break;
    case SweepVariable::PhiT: d = {0.0, 2.0 * constants::pi, 73, SweepScale::Linear}; break;
    }
    spec.start = cfg.sweep.start.value_or(d.start);
    spec.stop = cfg.sweep.stop.value_or(d.stop);
    spec.points = cfg.sweep.points.value_or(d.points);
    spec.scale = cfg.sweep.scale.value_or(d.scale);
    validate(spec);
    return spec;
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const device::DeviceModel& model, unsigned jobs) {
    const std::vector<double> g = grid(spec);
    return parallel_map(g.size(), jobs == 0 ? default_jobs() : jobs,
                        [&](std::size_t i) { return evaluate_point(spec, model, g[i]); });
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs) {
    const device::DeviceModel model(spec.fixed.geometry, spec.fixed.device);
    return run_sweep(spec, model, jobs);
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
    return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "r[m],n_bar[-],eta_t[rad],t[s],phi_t_X[rad],phi_t_Y[rad],eta[2pi*MHz],eta_over_kappa[-],"
           "d_eta_dr[2pi*MHz/m],dmean_X[1/rad],dmean_Y[1/rad],delta_eta_t_X[rad],delta_eta_t_Y[rad],"
           "delta_rt_X[m/Hz],delta_rt_Y[m/Hz],status[-]\n";
    for (const auto& r : rows) {
        const double values[] = {r.r, r.n_bar, r.eta_t, r.t, r.phi_t_x, r.phi_t_y, r.eta / mhz_angular,
                                 r.eta_over_kappa, r.d_eta_dr / mhz_angular};
        for (double v : values) {
            write_number(out, v);
            out << ',';
        }
        for (const auto* v : {&r.dmean_x, &r.dmean_y, &r.delta_eta_t_x, &r.delta_eta_t_y, &r.delta_rt_x,
                              &r.delta_rt_y}) {
            out << format_number(*v) << ',';
        }
        out << r.status << '\n';
    }
}

std::vector<EtaCurveRow> eta_curve_rows(const device::DeviceModel& model, const std::vector<double>& r_grid) {
    const device::EtaCurve curve = device::eta_curve(model, r_grid);
    std::vector<EtaCurveRow> rows(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const device::EtaPoint p = model.at(units::Meters(r_grid[i]));
        auto& row = rows[i];
        row.r = curve.r[i];
        row.gap = p.gap.value();
        row.capacitance = p.capacitance.value();
        row.delta = p.detunings.delta.value();
        row.Delta = p.detunings.Delta.value();
        row.eta = curve.eta[i];
        row.eta_over_kappa = curve.eta_over_kappa[i];
        row.d_eta_dr = curve.d_eta_dr[i];
        row.outside_weak_coupling = p.kerr.outside_weak_coupling;
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<EtaCurveRow>& rows) {
    out << "r[m],gap[m],C_c[F],delta[2pi*MHz],Delta[2pi*MHz],eta[2pi*MHz],eta_over_kappa[-],"
           "d_eta_dr[2pi*MHz/m],status[-]\n";
    for (const auto& r : rows) {
        for (double v : {r.r, r.gap, r.capacitance, r.delta / mhz_angular, r.Delta / mhz_angular,
                         r.eta / mhz_angular, r.eta_over_kappa, r.d_eta_dr / mhz_angular}) {
            write_number(out, v);
            out << ',';
        }
        out << (r.outside_weak_coupling ? "weak_coupling_exceeded" : "ok") << '\n';
    }
}

} // namespace kerrsense::sweep
