#include "fracdamp/config.hpp"

#include <cmath>
#include <numbers>

namespace fracdamp {

std::string_view to_string(LeftBoundary b) {
    switch (b) {
        case LeftBoundary::Dirichlet:
            return "DirichletLeft";
        case LeftBoundary::NeumannFlux:
            return "NeumannFluxLeft";
    }
    return "unknown";
}

ParameterError::ParameterError(std::string field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ParameterError(field, what);
}

}  // namespace

double derive_zeta(double rho, double alpha_frac) {
    require(std::isfinite(rho) && rho >= 0.0, "rho", "must be >= 0 (0 is the undamped reference)");
    require(std::isfinite(alpha_frac) && alpha_frac > 0.0 && alpha_frac <= 1.0, "alpha_frac",
            "order must be in (0,1]");
    if (alpha_frac == 1.0) return 0.0;
    return rho * std::sin(alpha_frac * std::numbers::pi) / std::numbers::pi;
}

double compute_m_tau(double alpha_deg) {
    require(std::isfinite(alpha_deg) && alpha_deg >= 0.0, "alpha_deg", "must be >= 0");
    require(alpha_deg < 2.0, "alpha_deg", "unsupported degeneracy, m_tau must be < 2");
    return alpha_deg;
}

LeftBoundary branch_for(double m_tau) {
    return m_tau < 1.0 ? LeftBoundary::Dirichlet : LeftBoundary::NeumannFlux;
}

ModelConfig make_model_config(double alpha_deg, double alpha_frac, double wp, double rho) {
    ModelConfig cfg;
    cfg.alpha_deg = alpha_deg;
    cfg.alpha_frac = alpha_frac;
    cfg.wp = wp;
    cfg.rho = rho;
    cfg.m_tau = compute_m_tau(alpha_deg);
    require(std::isfinite(wp) && wp >= 0.0, "wp", "must be >= 0");
    cfg.zeta = derive_zeta(rho, alpha_frac);
    cfg.bc_branch = branch_for(cfg.m_tau);
    return cfg;
}

void validate_grid(const GridConfig& g) {
    require(g.n_x >= 8, "n_x", "must be >= 8");
    require(g.n_xi >= 16, "n_xi", "must be >= 16");
    require(std::isfinite(g.xi_min) && g.xi_min > 0.0, "xi_min", "must be > 0");
    require(std::isfinite(g.xi_max) && g.xi_max > g.xi_min, "xi_max", "must exceed xi_min");
    require(std::isfinite(g.dt) && g.dt > 0.0, "dt", "must be > 0");
    require(std::isfinite(g.t_final) && g.t_final > 0.0, "t_final", "must be > 0");
    require(std::isfinite(g.grading) && g.grading >= 1.0, "grading", "must be >= 1");
    require(g.output_every >= 1, "output_every", "must be >= 1");
}

ValidatedConfig validate_config(const ModelConfig& model, const GridConfig& grid) {
    ValidatedConfig out;
    out.model = make_model_config(model.alpha_deg, model.alpha_frac, model.wp, model.rho);
    validate_grid(grid);
    out.grid = grid;
    return out;
}

}  // namespace fracdamp
