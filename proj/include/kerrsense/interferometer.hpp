#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrsense/constants.hpp"
#include "kerrsense/quantum/fock.hpp"

namespace kerrsense::interferometer {

using quantum::cplx;

enum class Quadrature { X, Y };
// Port A is the output of the Kerr-arm mode after the second coupler,
// port B the other one. Auto picks the port with the better precision.
enum class OutputPort { A, B, Auto };
// Which phase the homodyne signal is differentiated against.
enum class Target { KerrPhase, LinearPhase };

// Input |α, 0⟩ → coupler(θt) → Kerr arm on mode A (φt, ηt) → coupler(θt) → homodyne.
struct InterferometerConfig {
    cplx alpha{0.0, 0.0};
    double theta_t = constants::pi / 4.0;
    double phi_t = 0.0;
    double eta_t = 0.0;
    OutputPort port = OutputPort::A;
    Quadrature quadrature = Quadrature::X;

    // Photon number of the input coherent state, |α|².
    double n_bar() const { return std::norm(alpha); }
    // Photon number in the Kerr arm after the first coupler, |α cos θt|².
    double kerr_arm_photons() const;

    static InterferometerConfig from_photons(double n_bar, double phi_t, double eta_t);
};

// Throws std::invalid_argument on n̄ < 0, n̄ > 10⁷ or non-finite angles.
void validate(const InterferometerConfig& config);

class OracleCeilingExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnobservablePhase : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double oracle_photon_ceiling = 100.0;
inline constexpr double unobservable_derivative = 1e-30;

struct QuadratureMoments {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    double d_mean_x = 0.0;  // d⟨X⟩/d(ηt)
    double d_mean_y = 0.0;  // d⟨Y⟩/d(ηt)
    // derivative of the quadrature selected in the config
    double d_mean_d_eta_t = 0.0;
};

enum class Method { Oracle, Analytic, ClosedFormPaper, ClosedFormRederived };

std::string to_string(Method m);
std::string to_string(Quadrature q);

struct PrecisionResult {
    // Empty when the corresponding derivative is unobservably small.
    std::optional<double> delta_x;
    std::optional<double> delta_y;
    Method method = Method::Analytic;

    // Throws UnobservablePhase when the selected quadrature carries no signal.
    double at(Quadrature q) const;
};

// Exact truncated-Fock output state. Throws OracleCeilingExceeded above
// n̄ = 100; use analytic_moments there.
quantum::TwoModeState output_state_oracle(const InterferometerConfig& config);

// Moments of the output port read off the exact oracle state. Derivatives are
// central differences of the oracle with step h.
QuadratureMoments oracle_moments(const InterferometerConfig& config, double h = 1e-5);

// Closed-form moments of the Kerr-evolved coherent arm propagated through
// the second coupler. Valid for any n̄ up to the 10⁷ ceiling.
QuadratureMoments analytic_moments(const InterferometerConfig& config);

// Port actually used for a config (resolves OutputPort::Auto).
OutputPort resolve_port(const InterferometerConfig& config, Target target = Target::KerrPhase);

enum class Engine { Analytic, Oracle };

// Central-difference step matched to the scale on which ⟨Q⟩ varies:
// 10⁻⁶/max(1, n̄) in ηt, 10⁻⁶ in φt.
double default_step(const InterferometerConfig& config, Target target = Target::KerrPhase);

// δ = ΔQ / |d⟨Q⟩/dθ| with the derivative by central differences of step h.
PrecisionResult precision_numeric(const InterferometerConfig& config, double h, Engine engine = Engine::Analytic,
                                  Target target = Target::KerrPhase);

enum class ClosedFormVariant { Paper, Rederived };

struct PaperFormulaOptions {
    // The printed φ₂ = 2(δ+η)t + n̄ sin(4ηt) contains a δ that is not defined
    // anywhere else; it enters only as the product δt given here.
    double delta_t = 0.0;
};

// Rederived: ΔQ over the symbolic derivative of the closed-form means.
// Paper: the printed two-quadrature expressions with n̄ taken as the Kerr-arm
// photon number; only meaningful for port A.
PrecisionResult precision_closed_form(const InterferometerConfig& config, ClosedFormVariant variant,
                                      PaperFormulaOptions paper = {}, Target target = Target::KerrPhase);

// φt that minimises δ for the given quadrature: a 720-point scan followed by
// golden-section refinement.
double optimal_phase(const InterferometerConfig& config, Quadrature q, Target target = Target::KerrPhase);

// δη at fixed interaction time t.
inline double eta_precision_at_time(double delta_eta_t, double t) { return delta_eta_t / t; }

struct ScalingOptions {
    Target target = Target::KerrPhase;
    Quadrature quadrature = Quadrature::X;
    // Kerr phase is set per point to ηt = n_bar_eta_t / n̄.
    double n_bar_eta_t = 1e-3;
    bool optimize_phase = true;
};

struct ScalingFit {
    double slope = 0.0;
    double prefactor = 0.0;  // δ ≈ prefactor · n̄^slope
    std::vector<double> n_bar;
    std::vector<double> delta;
};

// Least-squares slope of log δ against log n̄. The grid must span at least
// three decades.
ScalingFit scaling_exponent(std::span<const double> n_bar_grid, const InterferometerConfig& config_template,
                            const ScalingOptions& options = {});

} // namespace kerrsense::interferometer
