#pragma once

#include "kerrsense/interferometer.hpp"

namespace kerrsense::interferometer::detail {

// Moments of a coherent state |β⟩ after exp(-i(φt n + ηt n(n-1))).
struct KerrArm {
    cplx mean;
    cplx mean_sq;
    double photons = 0.0;
    cplx cov_sq;   // ⟨a²⟩ - ⟨a⟩²
    double cov_n = 0.0;  // ⟨a†a⟩ - |⟨a⟩|²
    cplx d_mean_eta;
    cplx d_mean_phi;
};

KerrArm kerr_arm(cplx beta, double phi_t, double eta_t);

// Output mode c = kerr·a + reference·b.
struct PortCoefficients {
    cplx kerr;
    cplx reference;
};

PortCoefficients port_coefficients(double theta_t, OutputPort port);

// port must not be Auto.
QuadratureMoments output_moments(const InterferometerConfig& config, OutputPort port);

// d⟨c⟩/d(φt) for the given port.
cplx output_phase_derivative(const InterferometerConfig& config, OutputPort port);

// Means and variances of the exact oracle output; derivatives left at zero.
QuadratureMoments oracle_point(const InterferometerConfig& config, OutputPort port);

} // namespace kerrsense::interferometer::detail
