#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "kerrsense/config.hpp"
#include "kerrsense/metrology.hpp"
#include "kerrsense/plot.hpp"
#include "kerrsense/sweep.hpp"
#include "kerrsense/validation.hpp"

namespace {

using namespace kerrsense;

constexpr int exit_usage = 1;
constexpr int exit_validation = 2;

struct Common {
    std::string config_path;
    std::string out = "-";
    unsigned jobs = 0;
    std::string plot_path;
};

config::Configuration load(const Common& c) {
    return c.config_path.empty() ? config::Configuration{} : config::parse_config(c.config_path);
}

void emit(const Common& c, const std::string& text) {
    if (c.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + c.out + "'");
    }
    out << text;
}

void add_common(CLI::App* app, Common& c, bool with_plot) {
    app->add_option("-c,--config", c.config_path, "configuration file (defaults to the reference device)")
        ->check(CLI::ExistingFile);
    app->add_option("-o,--out", c.out, "output file, '-' for stdout");
    app->add_option("-j,--jobs", c.jobs, "worker threads (default: available parallelism)");
    if (with_plot) {
        app->add_option("--plot", c.plot_path, "also write an SVG plot");
    }
}

std::vector<double> slice(const std::vector<sweep::SweepRow>& rows, std::optional<double> sweep::SweepRow::*field) {
    std::vector<double> v;
    for (const auto& r : rows) {
        v.push_back((r.*field).value_or(sweep::missing));
    }
    return v;
}

std::vector<double> slice(const std::vector<sweep::SweepRow>& rows, double sweep::SweepRow::*field) {
    std::vector<double> v;
    for (const auto& r : rows) {
        v.push_back(r.*field);
    }
    return v;
}

int run_sweep_command(const Common& c, config::SweepVariable variable) {
    const auto spec = sweep::make_spec(load(c), variable);
    const auto rows = sweep::run_sweep(spec, c.jobs);
    std::ostringstream csv;
    sweep::write_csv(csv, rows);
    emit(c, csv.str());

    if (!c.plot_path.empty()) {
        plot::Figure fig;
        const bool by_r = spec.variable == config::SweepVariable::R;
        const bool rt = spec.fixed.interferometer.target == interferometer::Target::KerrPhase;
        fig.title = by_r ? "displacement precision vs r" : "precision vs " + config::to_string(spec.variable);
        fig.x = {by_r ? "r [m]" : config::to_string(spec.variable),
                 spec.scale == config::SweepScale::Log ? plot::Scale::Log : plot::Scale::Linear};
        fig.y = {rt ? "delta(rt) [m/Hz]" : "delta(phi t) [rad]", plot::Scale::Log};
        std::vector<double> x;
        switch (spec.variable) {
        case config::SweepVariable::R: x = slice(rows, &sweep::SweepRow::r); break;
        case config::SweepVariable::NBar: x = slice(rows, &sweep::SweepRow::n_bar); break;
        case config::SweepVariable::EtaT: x = slice(rows, &sweep::SweepRow::eta_t); break;
        case config::SweepVariable::PhiT: x = slice(rows, &sweep::SweepRow::phi_t_x); break;
        }
        auto field_x = rt ? &sweep::SweepRow::delta_rt_x : &sweep::SweepRow::delta_eta_t_x;
        auto field_y = rt ? &sweep::SweepRow::delta_rt_y : &sweep::SweepRow::delta_eta_t_y;
        fig.series = {{"X", x, slice(rows, field_x), false}, {"Y", x, slice(rows, field_y), true}};
        plot::render_plot(fig, c.plot_path);
    }
    return 0;
}

int eta_curve_command(const Common& c) {
    const auto cfg = load(c);
    const auto spec = sweep::make_spec(cfg, config::SweepVariable::R);
    if (spec.variable != config::SweepVariable::R) {
        throw config::ConfigError("eta-curve sweeps r; [sweep] variable must be r");
    }
    const device::DeviceModel model(cfg.geometry, cfg.device);
    const auto rows = sweep::eta_curve_rows(model, sweep::grid(spec));
    std::ostringstream csv;
    sweep::write_csv(csv, rows);
    emit(c, csv.str());
    if (!c.plot_path.empty()) {
        plot::Figure fig;
        fig.title = "Kerr nonlinearity vs r";
        fig.x = {"r [m]", plot::Scale::Linear};
        fig.y = {"eta/kappa", plot::Scale::Linear};
        plot::Series s{"eta/kappa", {}, {}, false};
        for (const auto& r : rows) {
            s.x.push_back(r.r);
            s.y.push_back(r.eta_over_kappa);
        }
        fig.series = {s};
        plot::render_plot(fig, c.plot_path);
    }
    return 0;
}

int precision_command(const Common& c) {
    using namespace interferometer;
    const auto cfg = load(c);
    const auto& s = cfg.interferometer;
    InterferometerConfig ic = InterferometerConfig::from_photons(s.n_bar, 0.0, 0.0);
    ic.theta_t = s.theta_t;
    ic.port = s.port;
    if (s.eta_t) {
        ic.eta_t = *s.eta_t;
    } else if (s.t) {
        const device::DeviceModel model(cfg.geometry, cfg.device);
        ic.eta_t = model.eta(units::Meters(s.r)).value() * *s.t;
    } else if (s.n_bar > 0.0) {
        ic.eta_t = s.n_bar_eta_t / s.n_bar;
    }
    validate(ic);

    std::ostringstream out;
    out << "method[-],quadrature[-],port[-],n_bar[-],eta_t[rad],phi_t[rad],delta[rad]\n";
    for (Quadrature q : {Quadrature::X, Quadrature::Y}) {
        ic.quadrature = q;
        ic.phi_t = s.phi_t ? *s.phi_t : optimal_phase(ic, q, s.target);
        const std::string port = resolve_port(ic, s.target) == OutputPort::A ? "A" : "B";
        auto row = [&](const std::string& method, const PrecisionResult& r) {
            out << method << ',' << to_string(q) << ',' << port << ',' << sweep::format_number(s.n_bar) << ','
                << sweep::format_number(ic.eta_t) << ',' << sweep::format_number(ic.phi_t) << ','
                << sweep::format_number(q == Quadrature::X ? r.delta_x : r.delta_y) << '\n';
        };
        row("closed_form_rederived", precision_closed_form(ic, ClosedFormVariant::Rederived, {}, s.target));
        row("finite_difference",
            precision_numeric(ic, default_step(ic, s.target), Engine::Analytic, s.target));
        if (s.target == Target::KerrPhase && resolve_port(ic, s.target) == OutputPort::A) {
            row("closed_form_paper", precision_closed_form(ic, ClosedFormVariant::Paper));
        }
        if (s.n_bar <= oracle_photon_ceiling) {
            row("oracle", precision_numeric(ic, 1e-5, Engine::Oracle, s.target));
        }
    }
    emit(c, out.str());
    return 0;
}

int gravimeter_command(const Common& c, std::optional<double> delta_rt) {
    const auto cfg = load(c);
    double used = 0.0;
    if (delta_rt) {
        used = *delta_rt;
    } else {
        sweep::SweepSpec spec;
        spec.fixed = cfg;
        spec.variable = config::SweepVariable::R;
        const device::DeviceModel model(cfg.geometry, cfg.device);
        const auto row = sweep::evaluate_point(spec, model, cfg.interferometer.r);
        const double x = row.delta_rt_x.value_or(INFINITY);
        const double y = row.delta_rt_y.value_or(INFINITY);
        used = std::min(x, y);
        if (!std::isfinite(used)) {
            throw std::invalid_argument("displacement is unobservable at the configured r (status " + row.status + ")");
        }
    }
    const auto loaded = cfg.cantilever.loaded();
    const auto fs = metrology::force_sensitivity(loaded, units::MeterSeconds(used));
    std::ostringstream out;
    out << "k[N/m],m_eff[kg],Omega[rad/s],delta_rt[m/Hz],delta_F[N/Hz],gravity_resolution[g],"
           "force_1kg_at_1m[N]\n";
    for (double v : {fs.spring_constant.value(), fs.sensing_mass.value(),
                     metrology::resonance_frequency(loaded).value(), used, fs.min_force.value(),
                     fs.gravity_resolution}) {
        out << sweep::format_number(v) << ',';
    }
    out << sweep::format_number(fs.reference_force.value()) << '\n';
    emit(c, out.str());
    return 0;
}

int zpm_command(const Common& c, std::optional<double> mass, std::optional<double> omega) {
    const auto cfg = load(c);
    std::ostringstream out;
    out << "case[-],mass[kg],omega[rad/s],x_zpm[m]\n";
    auto row = [&](const std::string& name, double m, double w) {
        const double x = metrology::zero_point_motion(units::Kilograms(m), units::AngularFrequency(w)).value();
        out << name << ',' << sweep::format_number(m) << ',' << sweep::format_number(w) << ','
            << sweep::format_number(x) << '\n';
    };
    if (mass || omega) {
        if (!mass || !omega) {
            throw std::invalid_argument("--mass and --omega go together");
        }
        row("custom", *mass, *omega);
    } else {
        row("ligo_mirror", 10.7, 2.0 * constants::pi);
        const auto loaded = cfg.cantilever.loaded();
        row("loaded_cantilever", metrology::effective_mass(loaded).value(),
            metrology::resonance_frequency(loaded).value());
    }
    emit(c, out.str());
    return 0;
}

int validate_command(const Common& c, const std::string& report_path) {
    validation::Options opt;
    opt.jobs = c.jobs;
    const auto report = validation::run_validation(opt);
    std::ostringstream text;
    validation::write_report(text, report);
    std::ofstream out(report_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + report_path + "'");
    }
    out << text.str();
    std::cout << text.str();
    return report.passed() ? 0 : exit_validation;
}

int plot_command(const std::string& in, const std::string& x, const std::vector<std::string>& ys, bool logx,
                 bool logy, const std::string& title, const std::string& out) {
    const auto table = plot::read_csv(in);
    plot::Figure fig;
    fig.title = title;
    fig.x = {table.full_name(x), logx ? plot::Scale::Log : plot::Scale::Linear};
    fig.y = {ys.size() == 1 ? table.full_name(ys.front()) : "", logy ? plot::Scale::Log : plot::Scale::Linear};
    bool dashed = false;
    for (const auto& y : ys) {
        fig.series.push_back({table.full_name(y), table.column(x), table.column(y), dashed});
        dashed = !dashed;
    }
    plot::render_plot(fig, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr-interferometer displacement sensing: precision sweeps, device model and validation"};
    app.require_subcommand(1);

    Common common;
    auto* precision = app.add_subcommand("precision", "Kerr-phase precision at one operating point");
    add_common(precision, common, false);

    auto* eta = app.add_subcommand("eta-curve", "eta and eta/kappa against plate displacement r");
    add_common(eta, common, true);

    auto* disp = app.add_subcommand("displacement-curve", "displacement precision delta(rt) against r");
    add_common(disp, common, true);

    auto* photons = app.add_subcommand("photon-sweep", "precision against input photon number");
    add_common(photons, common, true);

    auto* grav = app.add_subcommand("gravimeter", "force and gravity sensitivity of the loaded cantilever");
    add_common(grav, common, false);
    std::optional<double> delta_rt;
    grav->add_option("--delta-rt", delta_rt, "use this delta(rt) [m/Hz] instead of the model value");

    auto* zpm = app.add_subcommand("zpm", "zero-point motion sqrt(hbar/(2 m Omega))");
    add_common(zpm, common, false);
    std::optional<double> mass;
    std::optional<double> omega;
    zpm->add_option("--mass", mass, "mass [kg]");
    zpm->add_option("--omega", omega, "angular frequency [rad/s]");

    auto* val = app.add_subcommand("validate", "run the acceptance checks and write a report");
    std::string report_path = "validation_report.txt";
    val->add_option("-r,--report", report_path, "report file");
    val->add_option("-j,--jobs", common.jobs, "worker threads");

    auto* plt = app.add_subcommand("plot", "render columns of a CSV as an SVG plot");
    std::string plot_in;
    std::string plot_x;
    std::vector<std::string> plot_y;
    bool logx = false;
    bool logy = false;
    std::string title;
    std::string plot_out;
    plt->add_option("-i,--in", plot_in, "CSV file")->required()->check(CLI::ExistingFile);
    plt->add_option("-x", plot_x, "x column")->required();
    plt->add_option("-y", plot_y, "y column (repeatable)")->required();
    plt->add_flag("--logx", logx, "log x axis");
    plt->add_flag("--logy", logy, "log y axis");
    plt->add_option("--title", title, "plot title");
    plt->add_option("-o,--out", plot_out, "SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*precision) return precision_command(common);
        if (*eta) return eta_curve_command(common);
        if (*disp) return run_sweep_command(common, config::SweepVariable::R);
        if (*photons) return run_sweep_command(common, config::SweepVariable::NBar);
        if (*grav) return gravimeter_command(common, delta_rt);
        if (*zpm) return zpm_command(common, mass, omega);
        if (*val) return validate_command(common, report_path);
        if (*plt) return plot_command(plot_in, plot_x, plot_y, logx, logy, title, plot_out);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
