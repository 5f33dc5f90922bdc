#include "kerrsense/quantum/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace kerrsense::quantum {

// The generator a†b + ab† conserves n_a + n_b, so on the truncated space it
// splits into one real symmetric tridiagonal block per total photon number N.
// Each block is exponentiated through its eigendecomposition; blocks with
// N >= cutoff are the truncated ones and are exponentiated as truncated.
TwoModeState apply_beamsplitter(const TwoModeState& state, double theta_t) {
    if (!std::isfinite(theta_t)) {
        throw std::invalid_argument("apply_beamsplitter: theta_t must be finite");
    }
    const std::size_t c = state.cutoff();
    if (c > static_cast<std::size_t>(std::sqrt(static_cast<double>(std::numeric_limits<int>::max())))) {
        throw std::overflow_error("apply_beamsplitter: cutoff^2 overflows the index type");
    }
    auto in = state.amplitudes();
    std::vector<cplx> out(in.size());

    for (std::size_t total = 0; total <= 2 * (c - 1); ++total) {
        const std::size_t lo = total >= c ? total - (c - 1) : 0;
        const std::size_t hi = std::min(total, c - 1);
        const auto m = static_cast<Eigen::Index>(hi - lo + 1);
        auto flat = [&](Eigen::Index k) {
            const std::size_t na = lo + static_cast<std::size_t>(k);
            return state.index(na, total - na);
        };

        Eigen::VectorXcd block(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            block[k] = in[flat(k)];
        }
        if (m == 1 || block.squaredNorm() == 0.0) {
            // A 1x1 block of a zero-diagonal generator is the identity.
            for (Eigen::Index k = 0; k < m; ++k) {
                out[flat(k)] = block[k];
            }
            continue;
        }

        Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd sub(m - 1);
        for (Eigen::Index k = 0; k + 1 < m; ++k) {
            const double na = static_cast<double>(lo + static_cast<std::size_t>(k));
            const double nb = static_cast<double>(total) - na;
            // ⟨n_a+1, n_b-1| a†b |n_a, n_b⟩
            sub[k] = std::sqrt((na + 1.0) * nb);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
        eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const Eigen::MatrixXd& v = eig.eigenvectors();
        const Eigen::VectorXd& lambda = eig.eigenvalues();

        Eigen::VectorXcd rotated = v.transpose().cast<cplx>() * block;
        for (Eigen::Index k = 0; k < m; ++k) {
            rotated[k] *= std::polar(1.0, -theta_t * lambda[k]);
        }
        const Eigen::VectorXcd result = v.cast<cplx>() * rotated;
        for (Eigen::Index k = 0; k < m; ++k) {
            out[flat(k)] = result[k];
        }
    }
    return TwoModeState(c, std::move(out), 1.0 - state.norm_squared() + default_leak_tol);
}

} // namespace kerrsense::quantum
