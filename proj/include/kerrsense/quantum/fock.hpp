#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

namespace kerrsense::quantum {

using cplx = std::complex<double>;

inline constexpr double default_leak_tol = 1e-10;

enum class Mode { A, B };

// Raised when a truncated Fock basis cannot hold a state to the requested
// tolerance. Carries the norm the truncated state actually reached.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double achieved_norm)
        : std::runtime_error(what), achieved_norm_(achieved_norm) {}
    double achieved_norm() const { return achieved_norm_; }

private:
    double achieved_norm_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Σ_{n ≥ cutoff} e^{-n̄} n̄ⁿ/n!
double poisson_tail(double mean_photons, std::size_t cutoff);

// At least ceil(n̄ + 6√n̄ + 10), raised until the Poisson tail beyond it is
// below 1e-12.
std::size_t recommended_cutoff(double mean_photons);

// Single-mode state on the truncated basis |0⟩..|cutoff-1⟩.
class StateVector {
public:
    explicit StateVector(std::vector<cplx> amplitudes, double leak_tol = default_leak_tol);

    std::size_t cutoff() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx operator[](std::size_t n) const { return amps_[n]; }
    double norm_squared() const;

private:
    std::vector<cplx> amps_;
};

// Two-mode state, row-major over (n_a, n_b) with a shared per-mode cutoff.
class TwoModeState {
public:
    TwoModeState(std::size_t cutoff, std::vector<cplx> amplitudes, double leak_tol = default_leak_tol);

    static TwoModeState product(const StateVector& a, const StateVector& b);
    static TwoModeState vacuum(std::size_t cutoff);

    std::size_t cutoff() const { return cutoff_; }
    std::size_t dimension() const { return amps_.size(); }
    std::size_t index(std::size_t n_a, std::size_t n_b) const { return n_a * cutoff_ + n_b; }
    cplx at(std::size_t n_a, std::size_t n_b) const { return amps_[index(n_a, n_b)]; }
    std::span<const cplx> amplitudes() const { return amps_; }
    double norm_squared() const;

private:
    std::size_t cutoff_;
    std::vector<cplx> amps_;
};

// Sparse matrix on a single-mode (cutoff) or two-mode (cutoff²) space.
struct Operator {
    Eigen::SparseMatrix<cplx> matrix;
    bool hermitian = false;

    std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
};

Operator annihilation(std::size_t cutoff);
Operator creation(std::size_t cutoff);
Operator number(std::size_t cutoff);
// X = (a + a†)/2
Operator quadrature_x(std::size_t cutoff);
// Y = -i(a - a†)/2
Operator quadrature_y(std::size_t cutoff);
// op ⊗ 1 (Mode::A) or 1 ⊗ op (Mode::B)
Operator embed(const Operator& op, Mode mode);

StateVector coherent_state(cplx alpha, std::size_t cutoff, double leak_tol = default_leak_tol);

// exp(-iθt(a†b + ab†)) on the truncated two-mode space, exactly.
TwoModeState apply_beamsplitter(const TwoModeState& state, double theta_t);

// exp(-i(φt n + ηt n(n-1))) on the selected mode.
TwoModeState apply_kerr(const TwoModeState& state, Mode mode, double phi_t, double eta_t);

cplx expectation(const StateVector& state, const Operator& op);
cplx expectation(const TwoModeState& state, const Operator& op);

// ⟨c⟩, ⟨c²⟩ and ⟨c†c⟩ for one mode of a two-mode state.
struct ModeMoments {
    cplx mean;
    cplx mean_sq;
    double photons = 0.0;
};

ModeMoments mode_moments(const TwoModeState& state, Mode mode);
std::vector<double> photon_distribution(const TwoModeState& state, Mode mode);
double fidelity(const TwoModeState& a, const TwoModeState& b);

} // namespace kerrsense::quantum
