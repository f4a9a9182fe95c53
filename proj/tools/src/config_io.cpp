#include "fracdamp/harness.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace fracdamp::harness {

namespace {

const std::set<std::string> kSections = {"model", "grid", "simulation", "spectrum", "resolvent", "sweep"};

void check_keys(const json& section, std::string_view name, const json& defaults) {
    if (!section.is_object()) throw ConfigError("config section '" + std::string(name) + "' must be an object");
    for (const auto& [key, _] : section.items()) {
        if (!defaults.contains(key)) throw ConfigError("unknown config key '" + std::string(name) + "." + key + "'");
    }
}

template <class T>
T get(const json& cfg, const char* section, const char* key) {
    const json& v = cfg.at(section).at(key);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ParameterError(std::string(section) + "." + key, "has the wrong type: " + v.dump());
    }
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    if (name == "simulate") return Command::Simulate;
    if (name == "spectrum") return Command::Spectrum;
    if (name == "resolvent") return Command::Resolvent;
    if (name == "validate-kernel") return Command::ValidateKernel;
    if (name == "fit-decay") return Command::FitDecay;
    if (name == "sweep") return Command::Sweep;
    return std::nullopt;
}

std::string_view to_string(Command c) {
    switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Spectrum: return "spectrum";
    case Command::Resolvent: return "resolvent";
    case Command::ValidateKernel: return "validate-kernel";
    case Command::FitDecay: return "fit-decay";
    case Command::Sweep: return "sweep";
    }
    return "unknown";
}

json default_config_json() { return ExperimentConfig{}.to_json(); }

json ExperimentConfig::to_json() const {
    return json{
        {"model", {{"alpha_deg", alpha_deg}, {"alpha_frac", alpha_frac}, {"wp", wp}, {"rho", rho}}},
        {"grid",
         {{"n_x", grid.n_x},
          {"n_xi", grid.n_xi},
          {"xi_min", grid.xi_min},
          {"xi_max", grid.xi_max},
          {"dt", grid.dt},
          {"t_final", grid.t_final},
          {"grading", grid.grading},
          {"output_every", grid.output_every}}},
        {"simulation", {{"initial_data", initial_data}}},
        {"spectrum", {{"k_min", spectrum_k_min}, {"k_max", spectrum_k_max}}},
        {"resolvent", {{"k_min", resolvent_k_min}, {"k_max", resolvent_k_max}, {"samples", resolvent_samples}}},
        {"sweep", {{"param", sweep_param}, {"values", sweep_values}}},
    };
}

ValidatedConfig ExperimentConfig::validated() const {
    return validate_config(make_model_config(alpha_deg, alpha_frac, wp, rho), grid);
}

json load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json user;
    try {
        user = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " does not parse: " + e.what());
    }
    if (!user.is_object()) throw ConfigError("config file must hold a JSON object");
    json cfg = default_config_json();
    for (const auto& [section, body] : user.items()) {
        if (!kSections.contains(section)) throw ConfigError("unknown config section '" + section + "'");
        check_keys(body, section, cfg[section]);
        for (const auto& [key, value] : body.items()) cfg[section][key] = value;
    }
    return cfg;
}

void apply_override(json& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError("override key '" + key + "' must be section.key");
    const std::string section = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    if (!cfg.contains(section) || !cfg[section].contains(field)) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    cfg[section][field] = value;
}

ExperimentConfig parse_config(const json& cfg) {
    const json defaults = default_config_json();
    for (const auto& [section, body] : cfg.items()) {
        if (!kSections.contains(section)) throw ConfigError("unknown config section '" + section + "'");
        check_keys(body, section, defaults[section]);
    }
    json full = defaults;
    for (const auto& [section, body] : cfg.items()) {
        for (const auto& [key, value] : body.items()) full[section][key] = value;
    }
    ExperimentConfig c;
    c.alpha_deg = get<double>(full, "model", "alpha_deg");
    c.alpha_frac = get<double>(full, "model", "alpha_frac");
    c.wp = get<double>(full, "model", "wp");
    c.rho = get<double>(full, "model", "rho");
    c.grid.n_x = get<int>(full, "grid", "n_x");
    c.grid.n_xi = get<int>(full, "grid", "n_xi");
    c.grid.xi_min = get<double>(full, "grid", "xi_min");
    c.grid.xi_max = get<double>(full, "grid", "xi_max");
    c.grid.dt = get<double>(full, "grid", "dt");
    c.grid.t_final = get<double>(full, "grid", "t_final");
    c.grid.grading = get<double>(full, "grid", "grading");
    c.grid.output_every = get<int>(full, "grid", "output_every");
    c.initial_data = get<std::string>(full, "simulation", "initial_data");
    if (c.initial_data != "edge" && c.initial_data != "recipe") {
        throw ParameterError("simulation.initial_data", "must be \"edge\" or \"recipe\"");
    }
    c.spectrum_k_min = get<int>(full, "spectrum", "k_min");
    c.spectrum_k_max = get<int>(full, "spectrum", "k_max");
    if (c.spectrum_k_min < 1 || c.spectrum_k_max < c.spectrum_k_min) {
        throw ParameterError("spectrum.k_min", "need 1 <= k_min <= k_max");
    }
    c.resolvent_k_min = get<int>(full, "resolvent", "k_min");
    c.resolvent_k_max = get<int>(full, "resolvent", "k_max");
    c.resolvent_samples = get<int>(full, "resolvent", "samples");
    if (c.resolvent_k_min < 1 || c.resolvent_k_max <= c.resolvent_k_min) {
        throw ParameterError("resolvent.k_min", "need 1 <= k_min < k_max");
    }
    if (c.resolvent_samples < 2) throw ParameterError("resolvent.samples", "must be >= 2");
    c.sweep_param = get<std::string>(full, "sweep", "param");
    c.sweep_values = get<std::vector<double>>(full, "sweep", "values");
    return c;
}

}  // namespace fracdamp::harness
