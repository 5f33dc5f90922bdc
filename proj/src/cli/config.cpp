#include "kerrsense/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace kerrsense::config {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

struct Suffix {
    const char* text;
    double scale;
    Dimension dim;
};

constexpr Suffix suffixes[] = {
    {"GHz", 1e9, Dimension::AngularFrequency}, {"MHz", 1e6, Dimension::AngularFrequency},
    {"kHz", 1e3, Dimension::AngularFrequency}, {"Hz", 1.0, Dimension::AngularFrequency},
    {"um", 1e-6, Dimension::Length},           {"nm", 1e-9, Dimension::Length},
    {"fF", 1e-15, Dimension::Capacitance},
};

using Setter = std::function<void(Configuration&, const std::string&)>;

template <typename Q>
Setter quantity(Q device::DeviceParams::*member, Dimension dim) {
    return [=](Configuration& c, const std::string& v) { c.device.*member = Q(parse_quantity(v, dim)); };
}

template <typename Q>
Setter geometry(Q device::PlateGeometry::*member) {
    return [=](Configuration& c, const std::string& v) { c.geometry.*member = Q(parse_quantity(v, Dimension::Length)); };
}

template <typename Q>
Setter beam(Q metrology::Cantilever::*member, Dimension dim) {
    return [=](Configuration& c, const std::string& v) { c.cantilever.beam.*member = Q(parse_quantity(v, dim)); };
}

Setter number(double InterferometerSettings::*member, Dimension dim = Dimension::Dimensionless) {
    return [=](Configuration& c, const std::string& v) { c.interferometer.*member = parse_quantity(v, dim); };
}

template <typename Enum>
Enum pick(const std::string& v, std::initializer_list<std::pair<const char*, Enum>> options) {
    for (const auto& [name, value] : options) {
        if (v == name) {
            return value;
        }
    }
    std::string allowed;
    for (const auto& o : options) {
        allowed += allowed.empty() ? o.first : std::string(", ") + o.first;
    }
    throw std::invalid_argument("'" + v + "' is not one of " + allowed);
}

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
    using device::DeviceParams;
    using D = Dimension;
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"device",
         {
             {"E_J", quantity(&DeviceParams::josephson_energy, D::AngularFrequency)},
             {"C_self", quantity(&DeviceParams::self_capacitance, D::Capacitance)},
             {"g1", quantity(&DeviceParams::g1, D::AngularFrequency)},
             {"g2", quantity(&DeviceParams::g2, D::AngularFrequency)},
             {"Omega_c", quantity(&DeviceParams::omega_c, D::AngularFrequency)},
             {"Delta0", quantity(&DeviceParams::Delta0, D::AngularFrequency)},
             {"delta0", quantity(&DeviceParams::delta0, D::AngularFrequency)},
             {"gamma_21", quantity(&DeviceParams::gamma_21, D::AngularFrequency)},
             {"gamma_23", quantity(&DeviceParams::gamma_23, D::AngularFrequency)},
             {"gamma_43", quantity(&DeviceParams::gamma_43, D::AngularFrequency)},
             {"kappa", quantity(&DeviceParams::kappa, D::AngularFrequency)},
             {"E_p", quantity(&DeviceParams::drive, D::AngularFrequency)},
         }},
        {"geometry",
         {
             {"width", geometry(&device::PlateGeometry::width)},
             {"length", geometry(&device::PlateGeometry::length)},
             {"thickness", geometry(&device::PlateGeometry::thickness)},
             {"r0", geometry(&device::PlateGeometry::r0)},
             {"model",
              [](Configuration& c, const std::string& v) {
                  c.geometry.model = pick<device::CapacitanceModel>(
                      v, {{"parallel_plate", device::CapacitanceModel::ParallelPlate},
                          {"parallel_plate_with_fringe", device::CapacitanceModel::ParallelPlateWithFringe}});
              }},
         }},
        {"interferometer",
         {
             {"n_bar", number(&InterferometerSettings::n_bar)},
             {"theta_t", number(&InterferometerSettings::theta_t)},
             {"eta_t",
              [](Configuration& c, const std::string& v) { c.interferometer.eta_t = parse_quantity(v, D::Dimensionless); }},
             {"n_bar_eta_t", number(&InterferometerSettings::n_bar_eta_t)},
             {"r", number(&InterferometerSettings::r, D::Length)},
             {"phi_t",
              [](Configuration& c, const std::string& v) {
                  if (v == "optimal") {
                      c.interferometer.phi_t.reset();
                  } else {
                      c.interferometer.phi_t = parse_quantity(v, D::Dimensionless);
                  }
              }},
             {"t",
              [](Configuration& c, const std::string& v) {
                  if (v == "small_time") {
                      c.interferometer.t.reset();
                  } else {
                      c.interferometer.t = parse_quantity(v, D::Time);
                  }
              }},
             {"port",
              [](Configuration& c, const std::string& v) {
                  using interferometer::OutputPort;
                  c.interferometer.port =
                      pick<OutputPort>(v, {{"A", OutputPort::A}, {"B", OutputPort::B}, {"auto", OutputPort::Auto}});
              }},
             {"estimate",
              [](Configuration& c, const std::string& v) {
                  using interferometer::Target;
                  c.interferometer.target =
                      pick<Target>(v, {{"eta_t", Target::KerrPhase}, {"phi_t", Target::LinearPhase}});
              }},
             {"quadrature",
              [](Configuration& c, const std::string& v) {
                  using interferometer::Quadrature;
                  c.interferometer.quadrature = pick<Quadrature>(v, {{"X", Quadrature::X}, {"Y", Quadrature::Y}});
              }},
         }},
        {"sweep",
         {
             {"variable",
              [](Configuration& c, const std::string& v) {
                  c.sweep.variable = pick<SweepVariable>(v, {{"r", SweepVariable::R},
                                                             {"n_bar", SweepVariable::NBar},
                                                             {"eta_t", SweepVariable::EtaT},
                                                             {"phi_t", SweepVariable::PhiT}});
              }},
             // units depend on the variable; lengths may carry um/nm
             {"start", [](Configuration& c, const std::string& v) { c.sweep.start = parse_quantity(v, D::Length); }},
             {"stop", [](Configuration& c, const std::string& v) { c.sweep.stop = parse_quantity(v, D::Length); }},
             {"points",
              [](Configuration& c, const std::string& v) {
                  int n = 0;
                  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
                  if (ec != std::errc{} || ptr != v.data() + v.size()) {
                      throw std::invalid_argument("'" + v + "' is not an integer");
                  }
                  c.sweep.points = n;
              }},
             {"scale",
              [](Configuration& c, const std::string& v) {
                  c.sweep.scale = pick<SweepScale>(v, {{"linear", SweepScale::Linear}, {"log", SweepScale::Log}});
              }},
         }},
        {"cantilever",
         {
             {"length", beam(&metrology::Cantilever::length, D::Length)},
             {"width", beam(&metrology::Cantilever::width, D::Length)},
             {"thickness", beam(&metrology::Cantilever::thickness, D::Length)},
             {"density", beam(&metrology::Cantilever::density, D::Density)},
             {"youngs_modulus", beam(&metrology::Cantilever::youngs_modulus, D::Pressure)},
             {"gold_side",
              [](Configuration& c, const std::string& v) {
                  c.cantilever.gold_side = units::Meters(parse_quantity(v, D::Length));
              }},
             {"gold_density",
              [](Configuration& c, const std::string& v) {
                  c.cantilever.gold_density = units::KilogramsPerCubicMeter(parse_quantity(v, D::Density));
              }},
         }},
    };
    return table;
}

} // namespace

double parse_quantity(const std::string& raw, Dimension dim) {
    std::string text = trim(raw);
    if (text.empty()) {
        throw std::invalid_argument("empty value");
    }
    double sign = 1.0;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
        sign = text[0] == '-' ? -1.0 : 1.0;
        pos = 1;
    }
    bool two_pi = false;
    if (text.compare(pos, 4, "2pi*") == 0) {
        two_pi = true;
        pos += 4;
    }
    double value = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) {
        throw std::invalid_argument("'" + text + "' is not a number");
    }
    const std::string suffix = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));

    const Suffix* match = nullptr;
    if (!suffix.empty()) {
        for (const auto& s : suffixes) {
            if (suffix == s.text) {
                match = &s;
            }
        }
        if (!match) {
            throw std::invalid_argument("unknown unit suffix '" + suffix + "' in '" + text + "'");
        }
        if (match->dim != dim) {
            throw std::invalid_argument("unit '" + suffix + "' does not fit this key");
        }
    }
    if (two_pi && dim != Dimension::AngularFrequency) {
        throw std::invalid_argument("'2pi*' only applies to angular frequencies");
    }
    if (dim == Dimension::AngularFrequency && match && !two_pi) {
        throw std::invalid_argument("angular frequency '" + text + "' needs the 2pi* prefix (or give rad/s without a unit)");
    }
    double si = sign * value * (match ? match->scale : 1.0);
    if (two_pi) {
        si *= 2.0 * constants::pi;
    }
    return si;
}

metrology::Cantilever CantileverSettings::loaded() const {
    metrology::Cantilever c = beam;
    c.added_mass = metrology::added_mass_cube(gold_side, gold_density);
    return c;
}

Configuration parse_config_text(const std::string& text, const std::string& source) {
    Configuration cfg;
    const auto& table = key_table();
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << source << ":" << line_no << ": " << what;
        throw ConfigError(msg.str());
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string content = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (content.empty()) {
            continue;
        }
        if (content.front() == '[') {
            if (content.back() != ']') {
                fail("malformed section header '" + content + "'");
            }
            section = trim(content.substr(1, content.size() - 2));
            if (!table.contains(section)) {
                fail("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            fail("expected 'key = value', got '" + content + "'");
        }
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (section.empty()) {
            fail("key '" + key + "' appears before any [section]");
        }
        const auto& keys = table.at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) {
            fail("unknown key '" + key + "' in [" + section + "]");
        }
        try {
            it->second(cfg, value);
        } catch (const std::invalid_argument& e) {
            fail("key '" + key + "': " + e.what());
        }
    }
    return cfg;
}

Configuration parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path.string());
}

std::string to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::R: return "r";
    case SweepVariable::NBar: return "n_bar";
    case SweepVariable::EtaT: return "eta_t";
    case SweepVariable::PhiT: return "phi_t";
    }
    return "?";
}

} // namespace kerrsense::config
