#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kerrsense/config.hpp"
#include "kerrsense/plot.hpp"
#include "kerrsense/sweep.hpp"
#include "kerrsense/validation.hpp"

using namespace kerrsense;
using kerrsense::constants::pi;

namespace {

std::string error_of(const std::string& text) {
    try {
        config::parse_config_text(text, "test.cfg");
    } catch (const config::ConfigError& e) {
        return e.what();
    }
    return {};
}

class ConstantMap final : public device::DetuningMap {
public:
    device::Detunings operator()(units::Farads) const override {
        return {units::two_pi_mhz(-300.0), units::two_pi_mhz(250.0)};
    }
};

std::string csv(const std::vector<sweep::SweepRow>& rows) {
    std::ostringstream out;
    sweep::write_csv(out, rows);
    return out.str();
}

} // namespace

TEST_CASE("empty configuration is the reference device") {
    const auto cfg = config::parse_config_text("");
    CHECK(cfg.device.g1.value() == device::DeviceParams{}.g1.value());
    CHECK(cfg.geometry.r0.value() == doctest::Approx(1.01e-6));
    CHECK(cfg.interferometer.n_bar == 1e7);
    CHECK_FALSE(cfg.interferometer.eta_t.has_value());
}

TEST_CASE("configuration values and units") {
    const auto cfg = config::parse_config_text(R"(
# comment
[device]
g1 = 2pi*50MHz   # trailing comment
kappa = 6.2e9
C_self = 80fF
[geometry]
r0 = 900nm
model = parallel_plate_with_fringe
[interferometer]
n_bar = 1e4
phi_t = optimal
t = small_time
port = B
quadrature = Y
[sweep]
variable = n_bar
start = 10
stop = 1e5
points = 5
scale = log
)");
    CHECK(cfg.device.g1.value() == doctest::Approx(2.0 * pi * 50e6).epsilon(1e-15));
    CHECK(cfg.device.kappa.value() == 6.2e9);
    CHECK(cfg.device.self_capacitance.value() == doctest::Approx(80e-15));
    CHECK(cfg.geometry.r0.value() == doctest::Approx(0.9e-6));
    CHECK(cfg.geometry.model == device::CapacitanceModel::ParallelPlateWithFringe);
    CHECK(cfg.interferometer.n_bar == 1e4);
    CHECK_FALSE(cfg.interferometer.phi_t.has_value());
    CHECK_FALSE(cfg.interferometer.t.has_value());
    CHECK(cfg.interferometer.port == interferometer::OutputPort::B);
    CHECK(cfg.interferometer.quadrature == interferometer::Quadrature::Y);
    CHECK(cfg.sweep.variable == config::SweepVariable::NBar);
    CHECK(*cfg.sweep.points == 5);
    CHECK(cfg.sweep.scale == config::SweepScale::Log);
}

TEST_CASE("configuration errors name the key and line") {
    const auto e = error_of("[device]\n\ng1 = fifty\n");
    CHECK(e.find("test.cfg:3") != std::string::npos);
    CHECK(e.find("'g1'") != std::string::npos);
    CHECK(error_of("[device]\nbogus = 1\n").find("'bogus'") != std::string::npos);
    CHECK_FALSE(error_of("[nowhere]\n").empty());
    CHECK_FALSE(error_of("g1 = 1\n").empty());
    CHECK_FALSE(error_of("[device]\ng1 = 50MHz\n").empty());
    CHECK_FALSE(error_of("[geometry]\nwidth = 2pi*5um\n").empty());
    CHECK_FALSE(error_of("[interferometer]\nport = C\n").empty());
    CHECK_FALSE(error_of("[sweep]\npoints = 2.5\n").empty());
    CHECK_THROWS_AS(config::parse_config("/nonexistent/kerrsense.cfg"), config::ConfigError);
}

TEST_CASE("sweep grids") {
    sweep::SweepSpec spec;
    spec.start = 0.0;
    spec.stop = 1.0;
    spec.points = 5;
    const auto g = sweep::grid(spec);
    REQUIRE(g.size() == 5);
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK(g.back() == 1.0);
    spec.scale = config::SweepScale::Log;
    CHECK_THROWS_AS(sweep::validate(spec), std::invalid_argument);
    spec.start = 1.0;
    spec.stop = 1e4;
    const auto lg = sweep::grid(spec);
    CHECK(lg[1] == doctest::Approx(10.0));
    CHECK(lg.back() == doctest::Approx(1e4));
    spec.points = 1;
    CHECK_THROWS_AS(sweep::validate(spec), std::invalid_argument);
    spec.points = 3;
    spec.stop = 0.5;
    CHECK_THROWS_AS(sweep::validate(spec), std::invalid_argument);

    const auto r = sweep::default_r_grid();
    CHECK(r.size() == 191);
    CHECK(r.front() == doctest::Approx(-0.9e-6));
    CHECK(r.back() == doctest::Approx(1.0e-6));
}

TEST_CASE("number format and CSV header") {
    CHECK(sweep::format_number(1.0) == "1.00000000000e+00");
    CHECK(sweep::format_number(-2.5e-17) == "-2.50000000000e-17");
    CHECK(sweep::format_number(std::optional<double>{}) == "nan");
    CHECK(sweep::format_number(sweep::missing) == "nan");

    sweep::SweepSpec spec = sweep::make_spec(config::Configuration{}, config::SweepVariable::NBar);
    spec.points = 3;
    const auto text = csv(sweep::run_sweep(spec, 1));
    const auto header = text.substr(0, text.find('\n'));
    CHECK(header.rfind("r[m],n_bar[-],eta_t[rad],t[s]", 0) == 0);
    CHECK(header.find("delta_rt_X[m/Hz]") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("sweep rows along the small-time manifold") {
    auto spec = sweep::make_spec(config::Configuration{}, config::SweepVariable::NBar);
    spec.points = 6;
    const auto rows = sweep::run_sweep(spec, 2);
    for (const auto& row : rows) {
        CHECK(row.status == "ok");
        CHECK(row.n_bar * std::fabs(row.eta_t) == doctest::Approx(1e-3).epsilon(1e-12));
        REQUIRE(row.delta_rt_x.has_value());
        CHECK(*row.delta_rt_x == doctest::Approx(*row.delta_eta_t_x / std::fabs(row.d_eta_dr)).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(*rows[i].delta_eta_t_x < *rows[i - 1].delta_eta_t_x);
    }
}

TEST_CASE("points past the plate are flagged, not fatal") {
    auto cfg = config::Configuration{};
    cfg.sweep.start = -1.2e-6;
    cfg.sweep.stop = 0.0;
    cfg.sweep.points = 4;
    const auto spec = sweep::make_spec(cfg, config::SweepVariable::R);
    const auto rows = sweep::run_sweep(spec, 1);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].status == "gap_closed");
    CHECK(std::isnan(rows[0].eta));
    CHECK(rows[3].status.find("gap_closed") == std::string::npos);
    CHECK(csv(rows).find("gap_closed") != std::string::npos);
}

TEST_CASE("parallel sweep equals the serial one byte for byte") {
    const auto spec = sweep::make_spec(config::Configuration{}, config::SweepVariable::R);
    const auto serial = csv(sweep::run_sweep(spec, 1));
    CHECK(csv(sweep::run_sweep(spec, 8)) == serial);
    CHECK(csv(sweep::run_sweep(spec, 3)) == serial);
}

TEST_CASE("parallel map keeps order and rethrows") {
    const auto v = sweep::parallel_map(100, 7, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(v[i] == i * i);
    }
    CHECK_THROWS_AS(sweep::parallel_map(10, 4,
                                        [](std::size_t i) {
                                            if (i == 6) {
                                                throw std::runtime_error("boom");
                                            }
                                            return i;
                                        }),
                    std::runtime_error);
}

TEST_CASE("a flat device model gives a flat eta column") {
    const auto cfg = config::Configuration{};
    const device::DeviceModel model(cfg.geometry, cfg.device, [](units::Meters) { return units::Farads(1e-13); },
                                    std::make_shared<ConstantMap>());
    auto spec = sweep::make_spec(cfg, config::SweepVariable::R);
    spec.points = 5;
    const auto rows = sweep::run_sweep(spec, model, 2);
    for (const auto& row : rows) {
        CHECK(row.eta == rows[0].eta);
        CHECK(row.d_eta_dr == 0.0);
        CHECK(row.status.find("flat_eta") != std::string::npos);
        CHECK_FALSE(row.delta_rt_x.has_value());
    }
}

TEST_CASE("axis ranges") {
    const std::vector<double> v{1.0, 3.0, NAN};
    auto r = plot::axis_range(v, plot::Scale::Linear);
    CHECK(r.lo == doctest::Approx(0.9));
    CHECK(r.hi == doctest::Approx(3.1));
    const std::vector<double> one{2.0};
    r = plot::axis_range(one, plot::Scale::Linear);
    CHECK(r.lo == doctest::Approx(1.45));
    CHECK(r.hi == doctest::Approx(2.55));
    const std::vector<double> decades{1.0, 1e4, -5.0};
    r = plot::axis_range(decades, plot::Scale::Log);
    CHECK(std::log10(r.lo) == doctest::Approx(-0.2));
    CHECK(std::log10(r.hi) == doctest::Approx(4.2));
    const std::vector<double> none{NAN};
    CHECK_THROWS_AS(plot::axis_range(none, plot::Scale::Linear), plot::EmptyPlot);
}

TEST_CASE("svg rendering") {
    plot::Figure fig;
    fig.title = "eta";
    fig.series.push_back({"single", {1.0}, {2.0}, false});
    const auto svg = plot::render_svg(fig);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);

    plot::Figure gaps;
    gaps.series.push_back({"broken", {1.0, 2.0, 3.0, 4.0, 5.0}, {1.0, 2.0, NAN, 4.0, 5.0}, true});
    const auto g = plot::render_svg(gaps);
    std::size_t lines = 0;
    for (auto pos = g.find("<polyline"); pos != std::string::npos; pos = g.find("<polyline", pos + 1)) {
        ++lines;
    }
    CHECK(lines == 2);

    plot::Figure empty;
    empty.series.push_back({"nothing", {}, {}, false});
    CHECK_THROWS_AS(plot::render_svg(empty), plot::EmptyPlot);
    plot::Figure negative;
    negative.y.scale = plot::Scale::Log;
    negative.series.push_back({"neg", {1.0, 2.0}, {-1.0, -2.0}, false});
    CHECK_THROWS_AS(plot::render_svg(negative), plot::EmptyPlot);
}

TEST_CASE("csv tables round trip") {
    const auto path = std::filesystem::temp_directory_path() / "kerrsense_table_test.csv";
    {
        std::ofstream out(path);
        out << "r[m],eta[2pi*MHz],status[-]\n1e-7,2.5,ok\n2e-7,nan,gap_closed\n";
    }
    const auto t = plot::read_csv(path);
    CHECK(t.column("r")[0] == 1e-7);
    CHECK(t.column("eta[2pi*MHz]")[0] == 2.5);
    CHECK(std::isnan(t.column("eta")[1]));
    CHECK(std::isnan(t.column("status")[0]));
    CHECK(t.full_name("eta") == "eta[2pi*MHz]");
    CHECK_THROWS(t.column("missing"));
    std::filesystem::remove(path);
}

TEST_CASE("validation catches a wrong oracle") {
    validation::Options opt;
    opt.oracle = [](const interferometer::InterferometerConfig& c) {
        auto flipped = c;
        flipped.eta_t = -c.eta_t;
        return interferometer::oracle_moments(flipped);
    };
    const auto bad = validation::check_oracle_equivalence(opt);
    CHECK_FALSE(bad.passed);
    CHECK(bad.summary.find("max") != std::string::npos);
    CHECK(validation::check_oracle_equivalence(validation::Options{}).passed);
}

TEST_CASE("report format") {
    validation::Report report;
    report.entries.push_back({validation::Tag::Must, 4, "shot noise", true, "slope -0.5", 0.1});
    report.entries.push_back({validation::Tag::Info, 0, "note", true, "value 1", 0.0});
    std::ostringstream out;
    validation::write_report(out, report);
    const auto text = out.str();
    CHECK(text.find("[must]  4 PASS") != std::string::npos);
    CHECK(text.find("[info] note: value 1") != std::string::npos);
    CHECK(text.find("overall: PASS") != std::string::npos);
    report.entries[0].passed = false;
    CHECK_FALSE(report.passed());
    CHECK(report.find(4) != nullptr);
    CHECK(report.find(5) == nullptr);
}
