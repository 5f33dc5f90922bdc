#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iosfwd>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kerrsense/config.hpp"
#include "kerrsense/device.hpp"

namespace kerrsense::sweep {

struct SweepSpec {
    config::SweepVariable variable = config::SweepVariable::R;
    double start = 0.0;  // SI units of the variable (m for r)
    double stop = 0.0;
    int points = 2;
    config::SweepScale scale = config::SweepScale::Linear;
    config::Configuration fixed;
};

// Throws std::invalid_argument on points < 2, start ≥ stop, or a log scale
// that does not start above zero.
void validate(const SweepSpec& spec);
std::vector<double> grid(const SweepSpec& spec);

// Displacement grid for η(r) and δ(rt) curves: −0.9 µm to +1.0 µm in 10 nm steps.
std::vector<double> default_r_grid();

// Fills unset [sweep] keys with per-command defaults.
SweepSpec make_spec(const config::Configuration& cfg, config::SweepVariable default_variable);

inline constexpr double missing = std::numeric_limits<double>::quiet_NaN();

struct SweepRow {
    double r = missing;
    double n_bar = missing;
    double eta_t = missing;
    double t = missing;
    double phi_t_x = missing;
    double phi_t_y = missing;
    double eta = missing;  // rad/s
    double eta_over_kappa = missing;
    double d_eta_dr = missing;  // rad/s/m
    std::optional<double> dmean_x;  // |d⟨X⟩/dθ|
    std::optional<double> dmean_y;
    std::optional<double> delta_eta_t_x;
    std::optional<double> delta_eta_t_y;
    std::optional<double> delta_rt_x;  // m/Hz
    std::optional<double> delta_rt_y;
    std::string status = "ok";
};

// Row for one value of the swept variable, everything else from spec.fixed.
SweepRow evaluate_point(const SweepSpec& spec, const device::DeviceModel& model, double x);

// One row per grid point, in grid order for any worker count. Points that
// violate a module precondition come back flagged in `status`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs = 0);
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const device::DeviceModel& model, unsigned jobs = 0);

// 12 significant digits in scientific notation; "nan" for missing values.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct EtaCurveRow {
    double r = 0.0;
    double gap = 0.0;
    double capacitance = 0.0;
    double delta = 0.0;
    double Delta = 0.0;
    double eta = 0.0;
    double eta_over_kappa = 0.0;
    double d_eta_dr = 0.0;
    bool outside_weak_coupling = false;
};

std::vector<EtaCurveRow> eta_curve_rows(const device::DeviceModel& model, const std::vector<double>& r_grid);
void write_csv(std::ostream& out, const std::vector<EtaCurveRow>& rows);

unsigned default_jobs();

// Evaluates f(0..n-1) on up to `jobs` threads and gathers the results by
// index. The first exception stops further work and is rethrown.
template <typename F>
auto parallel_map(std::size_t n, unsigned jobs, F f) -> std::vector<decltype(f(std::size_t{}))> {
    using Result = decltype(f(std::size_t{}));
    std::vector<std::optional<Result>> slots(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };

    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    std::vector<Result> out;
    out.reserve(n);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace kerrsense::sweep
