#include "kerrsense/quantum/fock.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace kerrsense::quantum {

namespace {

constexpr double norm_excess_tol = 1e-12;

double squared_norm(std::span<const cplx> amps) {
    return std::accumulate(amps.begin(), amps.end(), 0.0,
                           [](double acc, cplx z) { return acc + std::norm(z); });
}

void check_norm(double norm, double leak_tol, const char* what) {
    if (!(norm >= 1.0 - leak_tol && norm <= 1.0 + norm_excess_tol)) {
        std::ostringstream msg;
        msg << what << ": squared norm " << norm << " outside [1 - " << leak_tol << ", 1]";
        throw std::invalid_argument(msg.str());
    }
}

Operator from_triplets(std::size_t dim, const std::vector<Eigen::Triplet<cplx>>& triplets, bool hermitian) {
    Operator op;
    op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.hermitian = hermitian;
    return op;
}

void check_cutoff(std::size_t cutoff) {
    if (cutoff < 2) {
        throw std::invalid_argument("cutoff must be at least 2");
    }
}

} // namespace

double poisson_tail(double mean_photons, std::size_t cutoff) {
    if (mean_photons == 0.0) {
        return cutoff == 0 ? 1.0 : 0.0;
    }
    const double log_mean = std::log(mean_photons);
    double tail = 0.0;
    for (std::size_t n = cutoff;; ++n) {
        const double nd = static_cast<double>(n);
        const double p = std::exp(-mean_photons + nd * log_mean - std::lgamma(nd + 1.0));
        tail += p;
        if (nd > mean_photons && p <= 1e-6 * tail) {
            break;
        }
        if (tail == 0.0 && nd > mean_photons) {
            break;
        }
    }
    return tail;
}

std::size_t recommended_cutoff(double mean_photons) {
    if (!(mean_photons >= 0.0)) {
        throw std::invalid_argument("mean photon number must be non-negative");
    }
    auto cutoff = static_cast<std::size_t>(std::ceil(mean_photons + 6.0 * std::sqrt(mean_photons) + 10.0));
    // The Gaussian 6σ estimate undershoots the skewed Poisson tail for n̄ ≳ 20.
    while (poisson_tail(mean_photons, cutoff) > 1e-12) {
        ++cutoff;
    }
    return cutoff;
}

StateVector::StateVector(std::vector<cplx> amplitudes, double leak_tol) : amps_(std::move(amplitudes)) {
    check_cutoff(amps_.size());
    check_norm(norm_squared(), leak_tol, "StateVector");
}

double StateVector::norm_squared() const { return squared_norm(amps_); }

TwoModeState::TwoModeState(std::size_t cutoff, std::vector<cplx> amplitudes, double leak_tol)
    : cutoff_(cutoff), amps_(std::move(amplitudes)) {
    check_cutoff(cutoff_);
    if (amps_.size() != cutoff_ * cutoff_) {
        throw DimensionMismatch("TwoModeState: amplitude count must equal cutoff^2");
    }
    check_norm(norm_squared(), leak_tol, "TwoModeState");
}

TwoModeState TwoModeState::product(const StateVector& a, const StateVector& b) {
    if (a.cutoff() != b.cutoff()) {
        throw DimensionMismatch("TwoModeState::product: modes must share a cutoff");
    }
    const std::size_t c = a.cutoff();
    std::vector<cplx> amps(c * c);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            amps[i * c + j] = a[i] * b[j];
        }
    }
    // Inherit whatever leak the factors already carry.
    const double leak = 1.0 - a.norm_squared() * b.norm_squared();
    return TwoModeState(c, std::move(amps), std::max(default_leak_tol, leak + 1e-15));
}

TwoModeState TwoModeState::vacuum(std::size_t cutoff) {
    check_cutoff(cutoff);
    std::vector<cplx> amps(cutoff * cutoff);
    amps[0] = 1.0;
    return TwoModeState(cutoff, std::move(amps));
}

double TwoModeState::norm_squared() const { return squared_norm(amps_); }

Operator annihilation(std::size_t cutoff) {
    check_cutoff(cutoff);
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t n = 1; n < cutoff; ++n) {
        t.emplace_back(static_cast<int>(n - 1), static_cast<int>(n), std::sqrt(static_cast<double>(n)));
    }
    return from_triplets(cutoff, t, false);
}

Operator creation(std::size_t cutoff) {
    Operator op = annihilation(cutoff);
    op.matrix = Eigen::SparseMatrix<cplx>(op.matrix.adjoint());
    return op;
}

Operator number(std::size_t cutoff) {
    check_cutoff(cutoff);
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t n = 1; n < cutoff; ++n) {
        t.emplace_back(static_cast<int>(n), static_cast<int>(n), static_cast<double>(n));
    }
    return from_triplets(cutoff, t, true);
}

Operator quadrature_x(std::size_t cutoff) {
    const Operator a = annihilation(cutoff);
    Operator x;
    x.matrix = 0.5 * (a.matrix + Eigen::SparseMatrix<cplx>(a.matrix.adjoint()));
    x.hermitian = true;
    return x;
}

Operator quadrature_y(std::size_t cutoff) {
    const Operator a = annihilation(cutoff);
    Operator y;
    y.matrix = cplx(0.0, -0.5) * (a.matrix - Eigen::SparseMatrix<cplx>(a.matrix.adjoint()));
    y.hermitian = true;
    return y;
}

Operator embed(const Operator& op, Mode mode) {
    const std::size_t c = op.dimension();
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(op.matrix.nonZeros()) * c);
    for (int k = 0; k < op.matrix.outerSize(); ++k) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(op.matrix, k); it; ++it) {
            const auto row = static_cast<std::size_t>(it.row());
            const auto col = static_cast<std::size_t>(it.col());
            for (std::size_t other = 0; other < c; ++other) {
                const std::size_t r = mode == Mode::A ? row * c + other : other * c + row;
                const std::size_t s = mode == Mode::A ? col * c + other : other * c + col;
                t.emplace_back(static_cast<int>(r), static_cast<int>(s), it.value());
            }
        }
    }
    return from_triplets(c * c, t, op.hermitian);
}

StateVector coherent_state(cplx alpha, std::size_t cutoff, double leak_tol) {
    check_cutoff(cutoff);
    std::vector<cplx> amps(cutoff);
    const double r = std::abs(alpha);
    if (r == 0.0) {
        amps[0] = 1.0;
        return StateVector(std::move(amps), leak_tol);
    }
    const double log_r = std::log(r);
    const double arg = std::arg(alpha);
    for (std::size_t n = 0; n < cutoff; ++n) {
        const double nd = static_cast<double>(n);
        const double log_mag = -0.5 * r * r + nd * log_r - 0.5 * std::lgamma(nd + 1.0);
        amps[n] = std::polar(std::exp(log_mag), nd * arg);
    }
    const double norm = squared_norm(amps);
    if (norm < 1.0 - leak_tol) {
        std::ostringstream msg;
        msg << "coherent_state: cutoff " << cutoff << " holds only " << norm << " of the norm for |alpha|^2 = " << r * r
            << " (recommended cutoff " << recommended_cutoff(r * r) << ")";
        throw TruncationError(msg.str(), norm);
    }
    return StateVector(std::move(amps), leak_tol);
}

TwoModeState apply_kerr(const TwoModeState& state, Mode mode, double phi_t, double eta_t) {
    const std::size_t c = state.cutoff();
    std::vector<cplx> phases(c);
    for (std::size_t n = 0; n < c; ++n) {
        const double nd = static_cast<double>(n);
        phases[n] = std::polar(1.0, -(phi_t * nd + eta_t * nd * (nd - 1.0)));
    }
    auto in = state.amplitudes();
    std::vector<cplx> out(in.size());
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const std::size_t k = i * c + j;
            out[k] = in[k] * phases[mode == Mode::A ? i : j];
        }
    }
    return TwoModeState(c, std::move(out), 1.0 - state.norm_squared() + default_leak_tol);
}

cplx expectation(const StateVector& state, const Operator& op) {
    if (op.dimension() != state.cutoff()) {
        throw DimensionMismatch("expectation: operator dimension does not match state cutoff");
    }
    Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(), static_cast<Eigen::Index>(state.cutoff()));
    const Eigen::VectorXcd op_psi = op.matrix * psi;
    return psi.dot(op_psi);
}

cplx expectation(const TwoModeState& state, const Operator& op) {
    if (op.dimension() != state.dimension()) {
        throw DimensionMismatch("expectation: operator dimension does not match two-mode dimension");
    }
    Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(), static_cast<Eigen::Index>(state.dimension()));
    const Eigen::VectorXcd op_psi = op.matrix * psi;
    return psi.dot(op_psi);
}

ModeMoments mode_moments(const TwoModeState& state, Mode mode) {
    const std::size_t c = state.cutoff();
    ModeMoments m{};
    // c|n⟩ = √n|n-1⟩, so ⟨c⟩ = Σ conj(ψ[n-1]) √n ψ[n] over the other index.
    for (std::size_t other = 0; other < c; ++other) {
        auto amp = [&](std::size_t n) { return mode == Mode::A ? state.at(n, other) : state.at(other, n); };
        for (std::size_t n = 1; n < c; ++n) {
            const double nd = static_cast<double>(n);
            const cplx psi_n = amp(n);
            m.mean += std::conj(amp(n - 1)) * std::sqrt(nd) * psi_n;
            m.photons += nd * std::norm(psi_n);
            if (n >= 2) {
                m.mean_sq += std::conj(amp(n - 2)) * std::sqrt(nd * (nd - 1.0)) * psi_n;
            }
        }
    }
    return m;
}

std::vector<double> photon_distribution(const TwoModeState& state, Mode mode) {
    const std::size_t c = state.cutoff();
    std::vector<double> p(c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            p[mode == Mode::A ? i : j] += std::norm(state.at(i, j));
        }
    }
    return p;
}

double fidelity(const TwoModeState& a, const TwoModeState& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatch("fidelity: states have different dimensions");
    }
    cplx overlap = 0.0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t k = 0; k < x.size(); ++k) {
        overlap += std::conj(x[k]) * y[k];
    }
    return std::norm(overlap);
}

} // namespace kerrsense::quantum
