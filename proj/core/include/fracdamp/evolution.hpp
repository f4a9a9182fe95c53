#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracdamp/config.hpp"
#include "fracdamp/diffusive_kernel.hpp"
#include "fracdamp/generator.hpp"
#include "fracdamp/spatial_operator.hpp"

namespace fracdamp {

/// psi on all spatial nodes (pinned nodes stay zero), theta on the xi-nodes.
struct State {
    std::vector<cplx> psi;
    std::vector<cplx> theta;
    double t = 0.0;
};

struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> dissipation;  ///< E'(t) from the memory variables at each sample

    std::size_t size() const noexcept { return times.size(); }
};

/// Everything needed to evolve one configuration.
struct AugmentedSystem {
    ModelConfig model;
    GridConfig grid_config;
    DegenerateGrid grid;
    OperatorMatrix op;
    std::optional<DiffusiveQuadrature> quad;  ///< empty for direct damping
    DiscreteGenerator generator;

    const DiffusiveQuadrature* quadrature() const noexcept { return quad ? &*quad : nullptr; }
    State zero_state() const;
};

/// Builds grid, operator, certified quadrature (throws QuadratureError) and generator.
AugmentedSystem build_system(const ValidatedConfig& cfg);

/// 1/2 sum m_i |psi_i|^2 + zeta/2 sum w_j |theta_j|^2, with m the trapezoid weights.
double energy(const State& state, std::span<const double> node_mass, const DiffusiveQuadrature* quad, double zeta);
double energy(const AugmentedSystem& sys, const State& state);

/// -zeta sum w_j (xi_j^2 + wp) |theta_j|^2.
double dissipation_rate(const State& state, const DiffusiveQuadrature& quad, double zeta, double wp);
/// -rho |psi(1)|^2, the alpha_frac = 1 channel.
double direct_dissipation_rate(const State& state, double rho);
double dissipation_rate(const AugmentedSystem& sys, const State& state);

struct StepAudit {
    double energy_before = 0.0;
    double energy_after = 0.0;
    double midpoint_dissipation = 0.0;

    /// |E^{n+1} - E^n - dt D(mid)| / E^n (absolute when E^n == 0).
    double balance_residual(double dt) const;
};

/**
 * Implicit midpoint stepper. (I - dt/2 G) is factored once; each step is one bordered
 * tridiagonal solve followed by u^{n+1} = 2 u_mid - u^n.
 */
class CrankNicolson {
public:
    CrankNicolson(const AugmentedSystem& sys, double dt);

    double dt() const noexcept { return dt_; }

    /// Advances in place and reports the discrete energy balance of the step.
    StepAudit advance(State& state) const;

private:
    const AugmentedSystem* sys_;
    double dt_;
    ShiftedSolver solver_;
};

State step(const AugmentedSystem& sys, const State& state, double dt);

struct SimulationResult {
    EnergyTrace trace;
    State final_state;
    std::size_t steps = 0;
    double max_energy_increase = 0.0;   ///< largest E^{n+1} - E^n over all steps
    double max_balance_residual = 0.0;

    bool monotone(double tol = 1e-9) const noexcept { return max_energy_increase <= tol; }
};

/// Starts from (psi0, theta = 0). Samples every output_every steps and at the final step.
SimulationResult run_simulation(const AugmentedSystem& sys, std::span<const cplx> psi0, double dt, double t_final,
                                int output_every);
SimulationResult run_simulation(const AugmentedSystem& sys, std::span<const cplx> psi0);

class FitWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_spread = 0.0;  ///< change of the local slope across the window (quadratic fit)
    std::size_t samples = 0;
    double t_start = 0.0;
    double t_end = 0.0;
};

inline constexpr std::size_t kMinFitSamples = 20;
inline constexpr double kEnergyFloor = 1e-30;
inline constexpr double kMaxSlopeSpread = 0.25;

/// Least-squares log-log fit on the final decade of t. Rejects windows that are too short,
/// that touch the round-off floor, or whose local slope drifts by more than
/// kMaxSlopeSpread * |slope| (not a power law).
DecayFit fit_decay(const EnergyTrace& trace);

/// Least-squares slope of log y against log x (all entries positive).
double loglog_slope(std::span<const double> x, std::span<const double> y);
double fit_decay_exponent(const EnergyTrace& trace);

/// x^{(1-alpha)/2} sin(pi x^{(2-alpha)/2}) scaled to unit energy.
std::vector<cplx> recipe_initial_data(const AugmentedSystem& sys);

/// sum_n mu_n^{-1} n^{-1/2} phi_n over the undamped modes of the operator with zero
/// boundary flux, scaled to unit energy. Sits at the edge of the operator domain.
std::vector<cplx> edge_of_domain_initial_data(const AugmentedSystem& sys);

/// Active unknowns of the generator <-> nodal state.
std::vector<cplx> pack_state(const AugmentedSystem& sys, const State& state);
void unpack_state(const AugmentedSystem& sys, std::span<const cplx> u, State& state);

}  // namespace fracdamp
