#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracdamp {

/// Boundary condition at the degenerate endpoint x = 0.
enum class LeftBoundary {
    Dirichlet,    ///< psi(0) = 0, weakly degenerate (m_tau < 1)
    NeumannFlux,  ///< (tau psi_x)(0) = 0, strongly degenerate (1 <= m_tau < 2)
};

std::string_view to_string(LeftBoundary b);

/// Raised when a configuration value violates its documented range.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(std::string field, const std::string& what);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Physical parameters of the damped degenerate Schrodinger system,
/// together with the derived constants. Construct through make_model_config.
struct ModelConfig {
    double alpha_deg = 0.5;   ///< degeneracy exponent in tau(x) = x^alpha_deg
    double alpha_frac = 0.5;  ///< order of the fractional damping, in (0, 1]
    double wp = 1.0;          ///< exponential weight of the fractional integral
    double rho = 1.0;         ///< damping gain
    double zeta = 0.0;        ///< rho * sin(alpha_frac * pi) / pi
    double m_tau = 0.0;       ///< sup x|tau'|/tau, equal to alpha_deg for monomials
    LeftBoundary bc_branch = LeftBoundary::Dirichlet;

    /// alpha_frac == 1 means the boundary term acts on psi(1) directly.
    bool direct_damping() const noexcept { return alpha_frac == 1.0; }
};

/// Discretization and run-length settings.
struct GridConfig {
    int n_x = 256;
    int n_xi = 200;
    double xi_min = 1e-4;
    double xi_max = 1e4;
    double dt = 1e-3;
    double t_final = 200.0;
    double grading = 1.0;   ///< x_i = (i/n_x)^grading; 1 is uniform
    int output_every = 100; ///< steps between trace samples
};

struct ValidatedConfig {
    ModelConfig model;
    GridConfig grid;
};

double derive_zeta(double rho, double alpha_frac);

/// For tau(x) = x^alpha the supremum defining m_tau is exactly alpha.
double compute_m_tau(double alpha_deg);

LeftBoundary branch_for(double m_tau);

ModelConfig make_model_config(double alpha_deg, double alpha_frac, double wp, double rho);

void validate_grid(const GridConfig& grid);

ValidatedConfig validate_config(const ModelConfig& model, const GridConfig& grid);

}  // namespace fracdamp
