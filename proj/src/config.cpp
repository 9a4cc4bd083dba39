#include "qkh/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace qkh {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_quote = !in_quote;
        if (line[i] == '#' && !in_quote) return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& s, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

ConfigValue parse_scalar(const std::string& raw, int line_no) {
    ConfigValue v;
    const std::string s = trim(raw);
    if (s.empty()) throw validation_error("config line " + std::to_string(line_no) + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw validation_error("config line " + std::to_string(line_no) + ": unterminated string");
        v.kind = ConfigValue::Kind::string;
        v.str = s.substr(1, s.size() - 2);
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']')
            throw validation_error("config line " + std::to_string(line_no) + ": unterminated array");
        v.kind = ConfigValue::Kind::number_array;
        std::stringstream items(s.substr(1, s.size() - 2));
        std::string item;
        while (std::getline(items, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            double num = 0.0;
            if (!parse_number(item, num))
                throw validation_error("config line " + std::to_string(line_no) +
                                       ": array element is not a number: " + item);
            v.array.push_back(num);
        }
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = ConfigValue::Kind::boolean;
        v.flag = (s == "true");
        return v;
    }
    double num = 0.0;
    if (parse_number(s, num)) {
        v.kind = ConfigValue::Kind::number;
        v.num = num;
        return v;
    }
    // Bare word: treated as a string (enum-like values).
    v.kind = ConfigValue::Kind::string;
    v.str = s;
    return v;
}

}  // namespace

ConfigTree ConfigTree::parse(const std::string& text) {
    ConfigTree tree;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw validation_error("config line " + std::to_string(line_no) +
                                       ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw validation_error("config line " + std::to_string(line_no) + ": empty section");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line " + std::to_string(line_no) +
                                   ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw validation_error("config line " + std::to_string(line_no) + ": empty key");
        const std::string path = section.empty() ? key : section + "." + key;
        tree.values_[path] = parse_scalar(line.substr(eq + 1), line_no);
    }
    return tree;
}

ConfigTree ConfigTree::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ConfigTree::get_string(const std::string& path) const {
    const auto it = values_.find(path);
    if (it == values_.end()) throw validation_error("config: missing required key '" + path + "'");
    if (it->second.kind != ConfigValue::Kind::string)
        throw validation_error("config: key '" + path + "' must be a string");
    return it->second.str;
}

std::string ConfigTree::get_string_or(const std::string& path, const std::string& fallback) const {
    return has(path) ? get_string(path) : fallback;
}

double ConfigTree::get_number(const std::string& path) const {
    const auto it = values_.find(path);
    if (it == values_.end()) throw validation_error("config: missing required key '" + path + "'");
    if (it->second.kind != ConfigValue::Kind::number)
        throw validation_error("config: key '" + path + "' must be a number");
    return it->second.num;
}

double ConfigTree::get_number_or(const std::string& path, double fallback) const {
    return has(path) ? get_number(path) : fallback;
}

int ConfigTree::get_int_or(const std::string& path, int fallback) const {
    if (!has(path)) return fallback;
    const double num = get_number(path);
    const int rounded = int(std::lround(num));
    if (std::abs(num - rounded) > 1e-9)
        throw validation_error("config: key '" + path + "' must be an integer");
    return rounded;
}

bool ConfigTree::get_bool_or(const std::string& path, bool fallback) const {
    const auto it = values_.find(path);
    if (it == values_.end()) return fallback;
    if (it->second.kind != ConfigValue::Kind::boolean)
        throw validation_error("config: key '" + path + "' must be true or false");
    return it->second.flag;
}

std::vector<double> ConfigTree::get_array(const std::string& path) const {
    const auto it = values_.find(path);
    if (it == values_.end()) throw validation_error("config: missing required key '" + path + "'");
    if (it->second.kind != ConfigValue::Kind::number_array)
        throw validation_error("config: key '" + path + "' must be a numeric array");
    return it->second.array;
}

void ConfigTree::override_path(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw validation_error("override must look like path.key=value: " + assignment);
    const std::string path = trim(assignment.substr(0, eq));
    if (path.empty()) throw validation_error("override has an empty path: " + assignment);
    values_[path] = parse_scalar(assignment.substr(eq + 1), 0);
}

std::string ConfigTree::canonical_text() const {
    std::ostringstream out;
    out.precision(17);
    for (const auto& [path, value] : values_) {
        out << path << " = ";
        switch (value.kind) {
            case ConfigValue::Kind::string:
                out << '"' << value.str << '"';
                break;
            case ConfigValue::Kind::number:
                out << value.num;
                break;
            case ConfigValue::Kind::boolean:
                out << (value.flag ? "true" : "false");
                break;
            case ConfigValue::Kind::number_array: {
                out << '[';
                for (std::size_t i = 0; i < value.array.size(); ++i)
                    out << (i ? ", " : "") << value.array[i];
                out << ']';
                break;
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string ConfigTree::content_hash() const {
    // FNV-1a, 64-bit.
    const std::string text = canonical_text();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

// --------------------------------------------------------------------------

namespace {

Envelope envelope_from(const ConfigTree& tree, const std::string& prefix) {
    Envelope env;
    env.kind = envelope_kind_from_string(tree.get_string_or(prefix + ".kind", "sin_squared"));
    env.t_start = tree.get_number_or(prefix + ".t_start", 0.0);
    env.t_end = tree.get_number(prefix + ".t_end");
    env.ramp_fraction = tree.get_number_or(prefix + ".ramp_fraction", 0.25);
    env.sigma = tree.get_number_or(prefix + ".sigma", env.duration() / 13.0);
    env.validate();
    return env;
}

PotentialSpec potential_from(const ConfigTree& tree, double mass) {
    PotentialSpec pot;
    pot.kind = potential_kind_from_string(tree.get_string_or("physics.potential.kind", "harmonic"));
    pot.mass = mass;
    pot.omega_trap = tree.get_number_or("physics.potential.omega_trap", 1.0);
    pot.depth = tree.get_number_or("physics.potential.depth", 1.0);
    pot.width = tree.get_number_or("physics.potential.width", 1.0);
    pot.softening = tree.get_number_or("physics.potential.softening", 1.0);
    pot.validate();
    return pot;
}

}  // namespace

OptomechParams build_optomech(const ConfigTree& tree) {
    OptomechParams params;
    params.mass_kg = tree.get_number("physics.optomech.mass_kg");
    params.omega_mech = tree.get_number("physics.optomech.omega_mech");
    params.g0 = tree.get_number_or("physics.optomech.g0", 0.0);
    params.frequency_shift = tree.get_number_or("physics.optomech.frequency_shift", 0.0);
    params.omega_drive = tree.get_number("physics.optomech.omega_drive");
    params.kappa = tree.get_number("physics.optomech.kappa");
    params.n0 = tree.get_number("physics.optomech.n0");
    params.omega_mod = tree.get_number_or("physics.optomech.omega_mod", 0.0);
    const std::string conv = tree.get_string_or("physics.optomech.convention", "angular");
    if (conv == "angular")
        params.convention = FrequencyConvention::angular;
    else if (conv == "ordinary")
        params.convention = FrequencyConvention::ordinary;
    else
        throw validation_error("config: physics.optomech.convention must be angular or ordinary");
    params.strict_slow_modulation =
        tree.get_bool_or("physics.optomech.strict_slow_modulation", false);
    params.validate();
    return params;
}

RunSettings build_settings(const ConfigTree& tree) {
    RunSettings rs;

    const std::string frame = tree.get_string_or("experiment.frame", "lab");
    if (frame == "lab")
        rs.frame = FrameKind::lab;
    else if (frame == "final")
        rs.frame = FrameKind::final_frame;
    else if (frame == "continuum")
        rs.frame = FrameKind::continuum;
    else
        throw validation_error("config: experiment.frame must be lab, final, or continuum");

    rs.mass = tree.get_number_or("physics.mass", 1.0);
    rs.grid = SpatialGrid(tree.get_int_or("numerics.n_points", 256),
                          tree.get_number_or("numerics.x_min", -10.0),
                          tree.get_number_or("numerics.x_max", 10.0));
    rs.n_cut = tree.get_int_or("numerics.n_cut", 16);
    if (rs.n_cut < 2) throw validation_error("config: numerics.n_cut must be >= 2");

    rs.potential = potential_from(tree, rs.mass);

    if (tree.has("physics.drive.ell")) {
        rs.drive.ell = tree.get_number("physics.drive.ell");
        rs.drive.omega = tree.get_number_or("physics.drive.omega", 1.0);
        rs.drive.slow_envelope = tree.get_bool_or("physics.drive.slow_envelope", false);
        rs.drive.envelope = envelope_from(tree, "physics.drive.envelope");
        rs.drive.validate();
        rs.has_drive = true;
    }

    if (tree.has("physics.bath.modes")) {
        CouplingDensity density;
        density.kind = density_kind_from_string(tree.get_string_or("physics.bath.density", "flat"));
        density.amplitude = tree.get_number_or("physics.bath.amplitude", 0.0);
        density.center = tree.get_number_or("physics.bath.center", 1.0);
        density.width = tree.get_number_or("physics.bath.width", 0.1);
        if (density.kind == DensityKind::table) {
            if (tree.has("physics.bath.table_csv")) {
                // Two-column CSV of (omega, ell_omega) rows.
                const std::string path = tree.get_string("physics.bath.table_csv");
                std::ifstream csv(path);
                if (!csv) throw validation_error("config: cannot open density table " + path);
                std::string line;
                while (std::getline(csv, line)) {
                    if (line.empty() || line[0] == '#') continue;
                    const std::size_t comma = line.find(',');
                    if (comma == std::string::npos)
                        throw validation_error("config: density table rows must be omega,value");
                    density.table_omega.push_back(std::stod(line.substr(0, comma)));
                    density.table_value.push_back(std::stod(line.substr(comma + 1)));
                }
            } else {
                density.table_omega = tree.get_array("physics.bath.table_omega");
                density.table_value = tree.get_array("physics.bath.table_value");
            }
        }
        BathSpec bath = discretize(density, tree.get_number("physics.bath.omega_min"),
                                   tree.get_number("physics.bath.omega_max"),
                                   tree.get_int_or("physics.bath.modes", 1),
                                   tree.get_int_or("physics.bath.n_levels", 4));
        if (tree.has("physics.bath.packet_amplitude"))
            assign_gaussian_wavepacket(bath, tree.get_number("physics.bath.packet_amplitude"),
                                       tree.get_number("physics.bath.packet_center"),
                                       tree.get_number("physics.bath.packet_sigma"),
                                       tree.get_number_or("physics.bath.packet_arrival", 0.0));
        rs.bath = bath;
    }

    if (tree.has("physics.optomech.mass_kg")) rs.optomech = build_optomech(tree);

    rs.prop.dt = tree.get_number_or("numerics.dt", 1e-3);
    const std::string scheme = tree.get_string_or("numerics.scheme", "split_step_spectral");
    if (scheme == "split_step_spectral")
        rs.prop.scheme = Scheme::split_step_spectral;
    else if (scheme == "crank_nicolson")
        rs.prop.scheme = Scheme::crank_nicolson;
    else
        throw validation_error(
            "config: numerics.scheme must be split_step_spectral or crank_nicolson");
    const std::string coupling = tree.get_string_or("numerics.coupling", "exact_eigenbasis");
    if (coupling == "exact_eigenbasis")
        rs.prop.coupling = CouplingScheme::exact_eigenbasis;
    else if (coupling == "taylor")
        rs.prop.coupling = CouplingScheme::taylor;
    else
        throw validation_error("config: numerics.coupling must be exact_eigenbasis or taylor");
    rs.prop.taylor_order = tree.get_int_or("numerics.taylor_order", 2);
    rs.prop.sample_every = tree.get_int_or("numerics.sample_every", 16);
    rs.prop.max_steps = tree.get_int_or("numerics.max_steps", 20000000);
    rs.prop.stability_audit = tree.get_bool_or("numerics.stability_audit", true);
    rs.prop.leak_warn = tree.get_number_or("numerics.leak_warn", 1e-6);
    rs.prop.leak_error = tree.get_number_or("numerics.leak_error", 1e-3);
    rs.prop.absorber.enabled = tree.get_bool_or("numerics.absorber.enabled", false);
    rs.prop.absorber.strength = tree.get_number_or("numerics.absorber.strength", 1.0);
    rs.prop.absorber.onset_fraction = tree.get_number_or("numerics.absorber.onset_fraction", 0.8);
    rs.prop.validate();

    rs.stage.dt = tree.get_number_or("numerics.stage_dt", rs.prop.dt);
    rs.stage.midpoint = tree.get_bool_or("numerics.stage_midpoint", false);

    rs.order = tree.get_int_or("experiment.order", 1);
    if (rs.order < 0 || rs.order > 2) throw validation_error("config: experiment.order must be 0..2");
    rs.t0 = tree.get_number_or("experiment.t_start", 0.0);
    rs.t1 = tree.get_number("experiment.t_end");
    if (tree.has("experiment.trap_min") || tree.has("experiment.trap_max")) {
        rs.region = TrapRegion{tree.get_number("experiment.trap_min"),
                               tree.get_number("experiment.trap_max")};
    }

    const std::string pinit = tree.get_string_or("physics.particle.init", "ground_state");
    if (pinit == "ground_state")
        rs.particle.kind = ParticleInit::Kind::trap_ground_state;
    else if (pinit == "gaussian_packet") {
        rs.particle.kind = ParticleInit::Kind::gaussian_packet;
        rs.particle.x0 = tree.get_number_or("physics.particle.x0", 0.0);
        rs.particle.p0 = tree.get_number_or("physics.particle.p0", 0.0);
        rs.particle.sigma = tree.get_number_or("physics.particle.sigma", 1.0);
    } else
        throw validation_error(
            "config: physics.particle.init must be ground_state or gaussian_packet");

    const std::string oinit = tree.get_string_or("physics.oscillator.init", "vacuum");
    if (oinit == "vacuum")
        rs.oscillator.kind = OscillatorInit::Kind::vacuum;
    else if (oinit == "coherent") {
        rs.oscillator.kind = OscillatorInit::Kind::coherent;
        rs.oscillator.beta = cd(tree.get_number_or("physics.oscillator.beta_re", 0.0),
                                tree.get_number_or("physics.oscillator.beta_im", 0.0));
    } else if (oinit == "squeezed") {
        rs.oscillator.kind = OscillatorInit::Kind::squeezed;
        rs.oscillator.r = tree.get_number_or("physics.oscillator.r", 0.0);
        rs.oscillator.phi = tree.get_number_or("physics.oscillator.phi", 0.0);
    } else
        throw validation_error(
            "config: physics.oscillator.init must be vacuum, coherent, or squeezed");

    rs.write_snapshots = tree.get_bool_or("output.snapshots", false);

    if (rs.frame == FrameKind::continuum && !rs.bath)
        throw validation_error("config: continuum frame requires a physics.bath block");
    if (rs.frame != FrameKind::continuum && !rs.has_drive)
        throw validation_error("config: lab/final frames require a physics.drive block");

    return rs;
}

}  // namespace qkh
