#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracdamp/config.hpp"
#include "fracdamp/evolution.hpp"
#include "fracdamp/spectral.hpp"

namespace fracdamp::harness {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class Command { Simulate, Spectrum, Resolvent, ValidateKernel, FitDecay, Sweep };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command c);

/// Malformed file, unknown key or bad override.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    double alpha_deg = 0.5;
    double alpha_frac = 0.5;
    double wp = 1.0;
    double rho = 1.0;
    GridConfig grid;
    std::string initial_data = "edge";  ///< "edge" or "recipe"
    int spectrum_k_min = 1;
    int spectrum_k_max = 40;
    int resolvent_k_min = 5;
    int resolvent_k_max = 30;
    int resolvent_samples = 400;
    std::string sweep_param = "alpha_frac";
    std::vector<double> sweep_values;

    ValidatedConfig validated() const;
    json to_json() const;
};

json default_config_json();

/// Reads a JSON config; sections not present keep their defaults.
json load_config_file(const fs::path& path);

/// "model.alpha_frac=0.75": the value is parsed as JSON when possible, else kept as a string.
void apply_override(json& cfg, std::string_view assignment);

/// Strict: unknown sections or keys raise ConfigError.
ExperimentConfig parse_config(const json& cfg);

struct ExperimentSpec {
    Command command = Command::Simulate;
    std::optional<fs::path> config_path;
    fs::path out_dir = ".";
    std::vector<std::string> overrides;
    std::optional<fs::path> trace_path;  ///< fit-decay on an existing energy_trace.csv
};

struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    json summary;
};

/// Runs one command, writes its artifacts and manifest.json into out_dir. Validation and
/// numerical failures give exit code 1 and an error.json report.
CommandResult run_command(const ExperimentSpec& spec);

struct SweepRow {
    double value = 0.0;
    std::optional<double> decay_exponent;
    std::optional<double> resolvent_exponent;
    std::optional<double> re_constant_fit;
    std::optional<double> re_constant_predicted;
    std::string error;
};

inline constexpr std::string_view kSweepParams[] = {"alpha_deg", "alpha_frac", "rho", "wp"};

/// Rows run concurrently and independently; a failing row records its error.
std::vector<SweepRow> sweep(std::string_view param, const std::vector<double>& values, const ExperimentConfig& base);

/// Peaks of the resolvent norm next to the discrete eigenvalues for k_min..k_max. On the
/// weak branch k follows the characteristic roots, otherwise the ordinal of |Im lambda|.
std::vector<ResolventEstimate> resolvent_peak_series(const AugmentedSystem& sys, int k_min, int k_max);

/// c_inf of the fit k^{2-2a} |Re lambda_k| = c_inf + c_1 / k over the given roots.
double extrapolated_re_constant(const std::vector<EigenvalueEstimate>& roots, double alpha_frac);

std::vector<cplx> initial_data(const AugmentedSystem& sys, std::string_view kind);

void write_energy_trace(const fs::path& path, const EnergyTrace& trace);
EnergyTrace read_energy_trace(const fs::path& path);
void write_final_state(const fs::path& path, const DegenerateGrid& grid, const State& state);
json spectrum_json(const std::vector<EigenvalueEstimate>& roots);

/// FRACDAMP_LOG = silent | info | debug (default silent).
void log_info(std::string_view msg);
void log_debug(std::string_view msg);

}  // namespace fracdamp::harness
