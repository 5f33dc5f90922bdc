#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "kerrsense/interferometer.hpp"

using namespace kerrsense::interferometer;
using kerrsense::constants::pi;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

InterferometerConfig make(double n, double phi, double eta, OutputPort port = OutputPort::A) {
    InterferometerConfig c = InterferometerConfig::from_photons(n, phi, eta);
    c.port = port;
    return c;
}

} // namespace

TEST_CASE("balanced interferometer at zero phase routes everything to one port") {
    const auto c = make(4.0, 0.0, 0.0);
    const auto out = output_state_oracle(c);
    const auto a = kerrsense::quantum::mode_moments(out, kerrsense::quantum::Mode::A);
    const auto b = kerrsense::quantum::mode_moments(out, kerrsense::quantum::Mode::B);
    CHECK(a.photons < 1e-8);
    CHECK(b.photons == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("vacuum in, vacuum out") {
    const auto out = output_state_oracle(make(0.0, 0.3, 0.2));
    CHECK(std::norm(out.at(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("oracle and closed-form moments agree") {
    for (auto [n, phi, eta] : {std::tuple{1.0, 0.0, 0.05}, std::tuple{4.0, 0.0, 0.01}, std::tuple{9.0, 2.1, 0.3},
                               std::tuple{6.5, 5.0, 0.17}}) {
        for (OutputPort port : {OutputPort::A, OutputPort::B}) {
            const auto c = make(n, phi, eta, port);
            const auto o = oracle_moments(c);
            const auto a = analytic_moments(c);
            CHECK(std::fabs(o.mean_x - a.mean_x) < 1e-8);
            CHECK(std::fabs(o.mean_y - a.mean_y) < 1e-8);
            CHECK(std::fabs(o.var_x - a.var_x) < 1e-8);
            CHECK(std::fabs(o.var_y - a.var_y) < 1e-8);
            CHECK(o.d_mean_x == doctest::Approx(a.d_mean_x).epsilon(1e-6));
        }
    }
}

TEST_CASE("oracle refuses large photon numbers") {
    CHECK_THROWS_AS(output_state_oracle(make(101.0, 0.0, 0.0)), OracleCeilingExceeded);
    CHECK_NOTHROW(analytic_moments(make(1e7, 0.0, 1e-10)));
    CHECK_THROWS_AS(analytic_moments(make(2e7, 0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("zero Kerr phase gives linear-interferometer moments") {
    const double n = 25.0;
    const double phi = 0.8;
    const auto m = analytic_moments(make(n, phi, 0.0));
    // port A: cosθ·α e^{−iφ} cosθ − α sin²θ at θ = π/4
    const std::complex<double> expected = 0.5 * std::sqrt(n) * (std::polar(1.0, -phi) - 1.0);
    CHECK(m.mean_x == doctest::Approx(expected.real()).epsilon(1e-12));
    CHECK(m.mean_y == doctest::Approx(expected.imag()).epsilon(1e-12));
    CHECK(m.var_x == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m.var_y == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("output mean matches a 50-digit Poisson sum") {
    const double n = 30.0;
    const double phi = 1.1;
    const double eta = 0.013;
    const auto m = analytic_moments(make(n, phi, eta));
    const double beta2 = n / 2.0;
    big re = 0;
    big im = 0;
    big p = boost::multiprecision::exp(-big(beta2));
    for (int k = 0; k < 400; ++k) {
        re += p * boost::multiprecision::cos(big(2) * eta * k + phi);
        im -= p * boost::multiprecision::sin(big(2) * eta * k + phi);
        p *= big(beta2) / (k + 1);
    }
    // cosθ · β⟨e^{−iφ}…⟩ − α sin²θ with β = α cosθ
    const double scale = std::sqrt(n) * 0.5;
    CHECK(m.mean_x == doctest::Approx(static_cast<double>(re) * scale - scale).epsilon(1e-12));
    CHECK(m.mean_y == doctest::Approx(static_cast<double>(im) * scale).epsilon(1e-12));
}

TEST_CASE("mean damping follows exp(−2 n sin² ηt)") {
    for (double n : {2.0, 50.0, 1e4}) {
        for (double eta : {1e-3, 0.01, 0.1}) {
            auto c = make(n, 0.0, eta);
            c.theta_t = 0.0;  // whole beam in the Kerr arm
            const auto m = analytic_moments(c);
            const double mag = std::hypot(m.mean_x, m.mean_y);
            const double s = std::sin(eta);
            CHECK(mag == doctest::Approx(std::sqrt(n) * std::exp(-2.0 * n * s * s)).epsilon(1e-10));
        }
    }
}

TEST_CASE("uncertainty floor holds") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto m = analytic_moments(make(std::pow(10.0, 7.0 * u(rng)), 2.0 * pi * u(rng), 0.3 * u(rng),
                                             u(rng) < 0.5 ? OutputPort::A : OutputPort::B));
        CHECK(m.var_x >= 0.0);
        CHECK(m.var_y >= 0.0);
        CHECK(m.var_x * m.var_y >= 1.0 / 16.0 - 1e-9);
    }
}

TEST_CASE("phase shift by pi flips the Kerr-arm signal only") {
    const double n = 16.0;
    const double eta = 0.02;
    for (double phi : {0.3, 1.7, 4.0}) {
        const auto a = analytic_moments(make(n, phi, eta));
        const auto b = analytic_moments(make(n, phi + pi, eta));
        const double ref = -0.5 * std::sqrt(n);  // reference-arm contribution to port A
        CHECK(b.mean_x - ref == doctest::Approx(-(a.mean_x - ref)).epsilon(1e-10));
        CHECK(b.mean_y == doctest::Approx(-a.mean_y).epsilon(1e-10));
        CHECK(b.var_x == doctest::Approx(a.var_x).epsilon(1e-12));
    }
    auto c = make(n, 0.0, eta);
    const double best = precision_closed_form(c, ClosedFormVariant::Rederived).delta_x.value_or(0.0);
    c.phi_t = optimal_phase(c, Quadrature::X);
    const double at_opt = precision_closed_form(c, ClosedFormVariant::Rederived).at(Quadrature::X);
    c.phi_t += pi;
    CHECK(precision_closed_form(c, ClosedFormVariant::Rederived).at(Quadrature::X) ==
          doctest::Approx(at_opt).epsilon(1e-9));
    CHECK(at_opt <= best);
}

TEST_CASE("vanishing derivative is an unobservable phase") {
    // ηt = 0, φt = 0: the Kerr signal at port A is purely in Y
    const auto r = precision_closed_form(make(9.0, 0.0, 0.0), ClosedFormVariant::Rederived);
    CHECK(r.delta_x.has_value() == false);
    CHECK_THROWS_AS(r.at(Quadrature::X), UnobservablePhase);
    CHECK(r.delta_y.has_value());
}

TEST_CASE("closed form matches finite differences") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double n = std::pow(10.0, 6.0 * u(rng));
        auto c = make(n, 2.0 * pi * u(rng), u(rng) / n, u(rng) < 0.5 ? OutputPort::A : OutputPort::B);
        const auto closed = precision_closed_form(c, ClosedFormVariant::Rederived);
        const auto numeric = precision_numeric(c, default_step(c));
        if (closed.delta_x && numeric.delta_x) {
            CHECK(*numeric.delta_x == doctest::Approx(*closed.delta_x).epsilon(1e-6));
        }
    }
}

TEST_CASE("oracle engine agrees with the analytic engine") {
    const auto c = make(9.0, 0.9, 0.04);
    const auto o = precision_numeric(c, 1e-5, Engine::Oracle);
    const auto a = precision_numeric(c, 1e-5, Engine::Analytic);
    CHECK(o.method == Method::Oracle);
    CHECK(*o.delta_x == doctest::Approx(*a.delta_x).epsilon(1e-7));
    CHECK(*o.delta_y == doctest::Approx(*a.delta_y).epsilon(1e-7));
}

TEST_CASE("printed formulas reproduce the rederived ones when delta t = phi t") {
    const auto c = make(32.0, 0.4, 0.02);
    const auto red = precision_closed_form(c, ClosedFormVariant::Rederived);
    const auto paper = precision_closed_form(c, ClosedFormVariant::Paper, {c.phi_t});
    CHECK(red.method == Method::ClosedFormRederived);
    CHECK(paper.method == Method::ClosedFormPaper);
    CHECK(*paper.delta_x == doctest::Approx(*red.delta_x).epsilon(1e-11));
    CHECK(*paper.delta_y == doctest::Approx(*red.delta_y).epsilon(1e-11));
    CHECK(*red.delta_x == doctest::Approx(0.00660761734932).epsilon(1e-10));

    // ηt = 0: A = n, exponential prefactor 1
    const auto flat = precision_closed_form(make(32.0, 0.4, 0.0), ClosedFormVariant::Paper);
    const double n = 16.0;
    const double phi1 = 0.4;
    const double expected = std::sqrt(1.0 + n - 2.0 * n * std::cos(phi1) * std::cos(phi1) + n * std::cos(0.0)) /
                            (2.0 * std::sqrt(2.0) * std::pow(n, 1.5) * std::fabs(std::sin(phi1)));
    CHECK(*flat.delta_x == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("precision falls with photon number along the small-time manifold") {
    double previous = INFINITY;
    for (double n = 10.0; n <= 1e7; n *= 3.0) {
        auto c = make(n, 0.0, 1e-3 / n);
        c.phi_t = optimal_phase(c, Quadrature::X);
        const double d = precision_closed_form(c, ClosedFormVariant::Rederived).at(Quadrature::X);
        CHECK(d < previous);
        previous = d;
    }
}

TEST_CASE("scaling exponents") {
    std::vector<double> grid;
    for (int k = 0; k <= 8; ++k) {
        grid.push_back(std::pow(10.0, 2.0 + 0.5 * k));
    }
    const auto tmpl = make(1.0, 0.0, 0.0);
    const auto x = scaling_exponent(grid, tmpl);
    CHECK(x.slope == doctest::Approx(-1.5).epsilon(0.02 / 1.5));
    ScalingOptions yopt;
    yopt.quadrature = Quadrature::Y;
    const auto y = scaling_exponent(grid, tmpl, yopt);
    CHECK(std::fabs(y.slope - x.slope) <= 0.02);

    ScalingOptions sql;
    sql.target = Target::LinearPhase;
    sql.n_bar_eta_t = 0.0;
    CHECK(scaling_exponent(grid, tmpl, sql).slope == doctest::Approx(-0.5).epsilon(0.02 / 0.5));

    const std::vector<double> narrow{100.0, 1000.0};
    CHECK_THROWS_AS(scaling_exponent(narrow, tmpl), std::invalid_argument);
}

TEST_CASE("auto port picks the better port") {
    auto c = make(100.0, 1.0, 1e-4);
    c.port = OutputPort::Auto;
    const OutputPort chosen = resolve_port(c);
    auto a = c;
    a.port = OutputPort::A;
    auto b = c;
    b.port = OutputPort::B;
    const double da = precision_closed_form(a, ClosedFormVariant::Rederived).delta_x.value_or(INFINITY);
    const double db = precision_closed_form(b, ClosedFormVariant::Rederived).delta_x.value_or(INFINITY);
    CHECK(chosen == (db < da ? OutputPort::B : OutputPort::A));
}
