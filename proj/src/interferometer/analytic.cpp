#include "kerrsense/interferometer.hpp"

#include <cmath>
#include <sstream>

#include "moments.hpp"

namespace kerrsense::interferometer {

namespace {

// exp(z) - 1 without cancellation for small |z|.
cplx expm1(cplx z) {
    const double ex = std::expm1(z.real());
    const double s = std::sin(0.5 * z.imag());
    return {ex * std::cos(z.imag()) - 2.0 * s * s, (ex + 1.0) * std::sin(z.imag())};
}

// e^{-ix} - 1
cplx unit_phase_minus_one(double x) {
    const double s = std::sin(0.5 * x);
    return {-2.0 * s * s, -std::sin(x)};
}

} // namespace

double InterferometerConfig::kerr_arm_photons() const {
    const double c = std::cos(theta_t);
    return n_bar() * c * c;
}

InterferometerConfig InterferometerConfig::from_photons(double n_bar, double phi_t, double eta_t) {
    InterferometerConfig c;
    c.alpha = cplx(std::sqrt(n_bar), 0.0);
    c.phi_t = phi_t;
    c.eta_t = eta_t;
    return c;
}

void validate(const InterferometerConfig& config) {
    const double n = config.n_bar();
    if (!std::isfinite(n) || n < 0.0 || n > constants::max_photon_number * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "photon number " << n << " outside [0, " << constants::max_photon_number << "]";
        throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(config.theta_t) || !std::isfinite(config.phi_t) || !std::isfinite(config.eta_t)) {
        throw std::invalid_argument("interferometer angles must be finite");
    }
}

std::string to_string(Method m) {
    switch (m) {
    case Method::Oracle: return "oracle";
    case Method::Analytic: return "analytic";
    case Method::ClosedFormPaper: return "closed_form_paper";
    case Method::ClosedFormRederived: return "closed_form_rederived";
    }
    return "unknown";
}

std::string to_string(Quadrature q) { return q == Quadrature::X ? "X" : "Y"; }

namespace detail {

KerrArm kerr_arm(cplx beta, double phi_t, double eta_t) {
    const double nb = std::norm(beta);
    const cplx z2 = unit_phase_minus_one(2.0 * eta_t);
    const cplx z4 = unit_phase_minus_one(4.0 * eta_t);
    const cplx rot = std::polar(1.0, -phi_t);
    const double s = std::sin(eta_t);

    KerrArm k;
    k.mean = beta * rot * std::exp(nb * z2);
    k.mean_sq = beta * beta * rot * rot * std::polar(1.0, -2.0 * eta_t) * std::exp(nb * z4);
    k.photons = nb;
    // ⟨a²⟩ - ⟨a⟩² = ⟨a⟩² (exp(-2iηt + |β|²(e^{-2iηt} - 1)²) - 1)
    k.cov_sq = k.mean * k.mean * expm1(cplx(0.0, -2.0 * eta_t) + nb * z2 * z2);
    // ⟨n⟩ - |⟨a⟩|² = |β|² (1 - e^{-4|β|² sin²ηt})
    k.cov_n = -nb * std::expm1(-4.0 * nb * s * s);
    k.d_mean_eta = k.mean * nb * cplx(0.0, -2.0) * std::polar(1.0, -2.0 * eta_t);
    k.d_mean_phi = k.mean * cplx(0.0, -1.0);
    return k;
}

PortCoefficients port_coefficients(double theta_t, OutputPort port) {
    const double c = std::cos(theta_t);
    const double s = std::sin(theta_t);
    // Heisenberg map of the coupler: a → a cos − i b sin, b → b cos − i a sin.
    if (port == OutputPort::B) {
        return {cplx(0.0, -s), cplx(c, 0.0)};
    }
    return {cplx(c, 0.0), cplx(0.0, -s)};
}

QuadratureMoments output_moments(const InterferometerConfig& config, OutputPort port) {
    const cplx beta = config.alpha * std::cos(config.theta_t);
    const cplx reference = config.alpha * cplx(0.0, -std::sin(config.theta_t));
    const KerrArm k = kerr_arm(beta, config.phi_t, config.eta_t);
    const PortCoefficients pc = port_coefficients(config.theta_t, port);

    const cplx mean = pc.kerr * k.mean + pc.reference * reference;
    const cplx cov_sq = pc.kerr * pc.kerr * k.cov_sq;
    const double cov_n = std::norm(pc.kerr) * k.cov_n;
    const cplx d_mean = pc.kerr * k.d_mean_eta;

    QuadratureMoments m;
    m.mean_x = mean.real();
    m.mean_y = mean.imag();
    m.var_x = 0.25 + 0.5 * (cov_sq.real() + cov_n);
    m.var_y = 0.25 + 0.5 * (-cov_sq.real() + cov_n);
    m.d_mean_x = d_mean.real();
    m.d_mean_y = d_mean.imag();
    m.d_mean_d_eta_t = config.quadrature == Quadrature::X ? m.d_mean_x : m.d_mean_y;
    return m;
}

cplx output_phase_derivative(const InterferometerConfig& config, OutputPort port) {
    const cplx beta = config.alpha * std::cos(config.theta_t);
    const KerrArm k = kerr_arm(beta, config.phi_t, config.eta_t);
    return port_coefficients(config.theta_t, port).kerr * k.d_mean_phi;
}

} // namespace detail

QuadratureMoments analytic_moments(const InterferometerConfig& config) {
    validate(config);
    return detail::output_moments(config, resolve_port(config));
}

} // namespace kerrsense::interferometer
