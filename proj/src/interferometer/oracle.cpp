#include "kerrsense/interferometer.hpp"

#include <sstream>

#include "moments.hpp"

namespace kerrsense::interferometer {

namespace {

quantum::Mode port_mode(OutputPort port) { return port == OutputPort::B ? quantum::Mode::B : quantum::Mode::A; }

struct OracleReadout {
    cplx mean;
    cplx cov_sq;
    double cov_n;
};

OracleReadout read_port(const quantum::TwoModeState& out, OutputPort port) {
    const quantum::ModeMoments m = quantum::mode_moments(out, port_mode(port));
    return {m.mean, m.mean_sq - m.mean * m.mean, m.photons - std::norm(m.mean)};
}

} // namespace

quantum::TwoModeState output_state_oracle(const InterferometerConfig& config) {
    validate(config);
    const double n = config.n_bar();
    if (n > oracle_photon_ceiling) {
        std::ostringstream msg;
        msg << "exact oracle supports n_bar <= " << oracle_photon_ceiling << " (got " << n
            << "); use analytic_moments for larger photon numbers";
        throw OracleCeilingExceeded(msg.str());
    }
    const std::size_t cutoff = quantum::recommended_cutoff(n);
    const auto input = quantum::TwoModeState::product(quantum::coherent_state(config.alpha, cutoff),
                                                      quantum::coherent_state(0.0, cutoff));
    const auto split = quantum::apply_beamsplitter(input, config.theta_t);
    const auto kerr = quantum::apply_kerr(split, quantum::Mode::A, config.phi_t, config.eta_t);
    return quantum::apply_beamsplitter(kerr, config.theta_t);
}

namespace detail {

QuadratureMoments oracle_point(const InterferometerConfig& config, OutputPort port) {
    const OracleReadout r = read_port(output_state_oracle(config), port);
    QuadratureMoments m;
    m.mean_x = r.mean.real();
    m.mean_y = r.mean.imag();
    m.var_x = 0.25 + 0.5 * (r.cov_sq.real() + r.cov_n);
    m.var_y = 0.25 + 0.5 * (-r.cov_sq.real() + r.cov_n);
    return m;
}

} // namespace detail

QuadratureMoments oracle_moments(const InterferometerConfig& config, double h) {
    const OutputPort port = resolve_port(config);
    QuadratureMoments m = detail::oracle_point(config, port);

    InterferometerConfig lo = config;
    InterferometerConfig hi = config;
    lo.eta_t -= h;
    hi.eta_t += h;
    const cplx d_mean =
        (read_port(output_state_oracle(hi), port).mean - read_port(output_state_oracle(lo), port).mean) / (2.0 * h);
    m.d_mean_x = d_mean.real();
    m.d_mean_y = d_mean.imag();
    m.d_mean_d_eta_t = config.quadrature == Quadrature::X ? m.d_mean_x : m.d_mean_y;
    return m;
}

} // namespace kerrsense::interferometer
