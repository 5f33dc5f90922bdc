#include "kerrsense/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "moments.hpp"

namespace kerrsense::interferometer {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::optional<double> ratio(double variance, double derivative) {
    if (!(std::fabs(derivative) >= unobservable_derivative)) {
        return std::nullopt;
    }
    return std::sqrt(variance) / std::fabs(derivative);
}

PrecisionResult rederived(const InterferometerConfig& config, OutputPort port, Target target) {
    const QuadratureMoments m = detail::output_moments(config, port);
    double dx = m.d_mean_x;
    double dy = m.d_mean_y;
    if (target == Target::LinearPhase) {
        const cplx d = detail::output_phase_derivative(config, port);
        dx = d.real();
        dy = d.imag();
    }
    return {ratio(m.var_x, dx), ratio(m.var_y, dy), Method::ClosedFormRederived};
}

double value_or_inf(const std::optional<double>& v) { return v.value_or(inf); }

double rederived_delta(const InterferometerConfig& config, OutputPort port, Quadrature q, Target target) {
    const PrecisionResult r = rederived(config, port, target);
    return value_or_inf(q == Quadrature::X ? r.delta_x : r.delta_y);
}

// Minimise δ over φt for a fixed port. Returns (φt, δ).
std::pair<double, double> optimise_phase_for_port(InterferometerConfig config, OutputPort port, Quadrature q,
                                                  Target target) {
    constexpr int scan_points = 720;
    const double two_pi = 2.0 * constants::pi;
    const double step = two_pi / scan_points;
    auto objective = [&](double phi) {
        config.phi_t = phi;
        return rederived_delta(config, port, q, target);
    };

    double best_phi = 0.0;
    double best = inf;
    for (int i = 0; i < scan_points; ++i) {
        const double phi = i * step;
        const double d = objective(phi);
        if (d < best) {
            best = d;
            best_phi = phi;
        }
    }
    if (!std::isfinite(best)) {
        return {0.0, inf};
    }

    // golden-section on [best - step, best + step]
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_phi - step;
    double b = best_phi + step;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-13; ++iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = objective(x2);
        }
    }
    const double refined = 0.5 * (a + b);
    const double f = objective(refined);
    if (f <= best) {
        const double wrapped = std::fmod(refined + two_pi, two_pi);
        return {wrapped, f};
    }
    return {best_phi, best};
}

} // namespace

double PrecisionResult::at(Quadrature q) const {
    const auto& v = q == Quadrature::X ? delta_x : delta_y;
    if (!v) {
        throw UnobservablePhase("d<" + to_string(q) + ">/d(phase) vanishes at this operating point; the phase is "
                                "unobservable in this quadrature");
    }
    return *v;
}

OutputPort resolve_port(const InterferometerConfig& config, Target target) {
    if (config.port != OutputPort::Auto) {
        return config.port;
    }
    const double a = rederived_delta(config, OutputPort::A, config.quadrature, target);
    const double b = rederived_delta(config, OutputPort::B, config.quadrature, target);
    return b < a ? OutputPort::B : OutputPort::A;
}

double default_step(const InterferometerConfig& config, Target target) {
    return target == Target::KerrPhase ? 1e-6 / std::max(1.0, config.n_bar()) : 1e-6;
}

PrecisionResult precision_numeric(const InterferometerConfig& config, double h, Engine engine, Target target) {
    validate(config);
    if (!(h > 0.0)) {
        throw std::invalid_argument("precision_numeric: step h must be positive");
    }
    const OutputPort port = resolve_port(config, target);
    auto point = [&](const InterferometerConfig& c) {
        return engine == Engine::Oracle ? detail::oracle_point(c, port) : detail::output_moments(c, port);
    };
    InterferometerConfig lo = config;
    InterferometerConfig hi = config;
    double& lo_param = target == Target::KerrPhase ? lo.eta_t : lo.phi_t;
    double& hi_param = target == Target::KerrPhase ? hi.eta_t : hi.phi_t;
    lo_param -= h;
    hi_param += h;

    const QuadratureMoments centre = point(config);
    const QuadratureMoments m_lo = point(lo);
    const QuadratureMoments m_hi = point(hi);
    const double dx = (m_hi.mean_x - m_lo.mean_x) / (2.0 * h);
    const double dy = (m_hi.mean_y - m_lo.mean_y) / (2.0 * h);
    return {ratio(centre.var_x, dx), ratio(centre.var_y, dy),
            engine == Engine::Oracle ? Method::Oracle : Method::Analytic};
}

PrecisionResult precision_closed_form(const InterferometerConfig& config, ClosedFormVariant variant,
                                      PaperFormulaOptions paper, Target target) {
    validate(config);
    if (variant == ClosedFormVariant::Rederived) {
        return rederived(config, resolve_port(config, target), target);
    }
    if (target != Target::KerrPhase) {
        throw std::invalid_argument("the printed closed form only covers the Kerr phase");
    }
    const double n = config.kerr_arm_photons();
    const double et = config.eta_t;
    const double s = std::sin(et);
    const double a = std::exp(-4.0 * n * s * s) * n;
    const double phi1 = config.phi_t + n * std::sin(2.0 * et);
    const double phi2 = 2.0 * (paper.delta_t + et) + n * std::sin(4.0 * et);
    const double b = std::exp(n * (-1.0 + std::cos(4.0 * et))) * n * std::cos(phi2);
    const double prefactor = std::exp(2.0 * n * s * s);
    const double denom = 2.0 * std::sqrt(2.0) * std::pow(n, 1.5);
    const double cx = std::cos(phi1);
    const double sx = std::sin(phi1);

    auto make = [&](double radicand, double trig) -> std::optional<double> {
        if (!(denom * std::fabs(trig) >= unobservable_derivative)) {
            return std::nullopt;
        }
        return prefactor * std::sqrt(radicand) / (denom * std::fabs(trig));
    };
    return {make(1.0 + n - 2.0 * a * cx * cx + b, std::sin(phi1 + 2.0 * et)),
            make(1.0 + n - 2.0 * a * sx * sx - b, std::cos(phi1 + 2.0 * et)), Method::ClosedFormPaper};
}

double optimal_phase(const InterferometerConfig& config, Quadrature q, Target target) {
    validate(config);
    if (config.port != OutputPort::Auto) {
        return optimise_phase_for_port(config, config.port, q, target).first;
    }
    const auto a = optimise_phase_for_port(config, OutputPort::A, q, target);
    const auto b = optimise_phase_for_port(config, OutputPort::B, q, target);
    return b.second < a.second ? b.first : a.first;
}

ScalingFit scaling_exponent(std::span<const double> n_bar_grid, const InterferometerConfig& config_template,
                            const ScalingOptions& options) {
    if (n_bar_grid.size() < 2) {
        throw std::invalid_argument("scaling_exponent: need at least two grid points");
    }
    const auto [lo, hi] = std::minmax_element(n_bar_grid.begin(), n_bar_grid.end());
    if (!(*lo > 0.0) || std::log10(*hi / *lo) < 3.0 - 1e-12) {
        throw std::invalid_argument("scaling_exponent: photon-number grid must span at least three decades");
    }

    ScalingFit fit;
    const double arg = std::arg(config_template.alpha);
    for (double n : n_bar_grid) {
        InterferometerConfig c = config_template;
        c.alpha = std::polar(std::sqrt(n), arg);
        c.quadrature = options.quadrature;
        if (options.target == Target::KerrPhase) {
            c.eta_t = options.n_bar_eta_t / n;
        }
        if (options.optimize_phase) {
            c.phi_t = optimal_phase(c, options.quadrature, options.target);
        }
        const PrecisionResult r = precision_closed_form(c, ClosedFormVariant::Rederived, {}, options.target);
        fit.n_bar.push_back(n);
        fit.delta.push_back(r.at(options.quadrature));
    }

    const std::size_t count = fit.n_bar.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = std::log(fit.n_bar[i]);
        const double y = std::log(fit.delta[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nd = static_cast<double>(count);
    fit.slope = (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
    fit.prefactor = std::exp((sy - fit.slope * sx) / nd);
    return fit;
}

} // namespace kerrsense::interferometer
