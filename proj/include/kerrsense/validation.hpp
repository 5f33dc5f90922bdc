#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kerrsense/interferometer.hpp"

namespace kerrsense::validation {

enum class Tag { Must, Info };

struct Entry {
    Tag tag = Tag::Must;
    int criterion = 0;  // 0 for informational entries
    std::string name;
    bool passed = true;
    std::string summary;  // measured values
    double seconds = 0.0;
};

struct Report {
    std::vector<Entry> entries;

    bool passed() const;
    const Entry* find(int criterion) const;
};

using MomentsFn = std::function<interferometer::QuadratureMoments(const interferometer::InterferometerConfig&)>;

struct Options {
    // Reference the closed-form moments are checked against; replaceable for
    // fault-injection tests.
    MomentsFn oracle = [](const interferometer::InterferometerConfig& c) {
        return interferometer::oracle_moments(c);
    };
    std::uint64_t seed = 0x5eed2010;
    unsigned jobs = 0;  // 0 = available parallelism
};

Entry check_oracle_equivalence(const Options& opt);
Entry check_closed_form_vs_numeric(const Options& opt);
Entry check_kerr_scaling(const Options& opt);
Entry check_shot_noise_scaling(const Options& opt);
Entry check_spring_constant(const Options& opt);
Entry check_zero_point_motion(const Options& opt);
Entry check_displacement_order(const Options& opt);
Entry check_kappa_invariance(const Options& opt);
Entry check_chain_rule(const Options& opt);
Entry check_determinism(const Options& opt);

// Entries comparing published figures with the model, each with the computed counterpart.
std::vector<Entry> discrepancy_notes();

Report run_validation(const Options& opt = {});

// Plain text, one "[must]" or "[info]" line per entry.
void write_report(std::ostream& out, const Report& report);

} // namespace kerrsense::validation
