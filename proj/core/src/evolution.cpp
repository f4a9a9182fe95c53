#include "fracdamp/evolution.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fracdamp {

namespace {

double scaled_energy_norm(const AugmentedSystem& sys, std::vector<cplx>& psi) {
    State s = sys.zero_state();
    s.psi = psi;
    const double e = energy(sys, s);
    if (!(e > 0.0)) throw std::invalid_argument("initial data has zero energy");
    const double scale = 1.0 / std::sqrt(e);
    for (auto& v : psi) v *= scale;
    return scale;
}

}  // namespace

State AugmentedSystem::zero_state() const {
    State s;
    s.psi.assign(grid.x.size(), 0.0);
    s.theta.assign(generator.n_memory(), 0.0);
    return s;
}

AugmentedSystem build_system(const ValidatedConfig& cfg) {
    AugmentedSystem sys;
    sys.model = cfg.model;
    sys.grid_config = cfg.grid;
    sys.grid = build_grid(cfg.grid.n_x, cfg.model.alpha_deg, cfg.grid.grading);
    sys.op = assemble_operator(sys.grid, cfg.model.bc_branch, RightBoundary::FluxSlot);
    if (!cfg.model.direct_damping()) {
        sys.quad = build_quadrature(cfg.model.alpha_frac, cfg.model.wp, cfg.grid.n_xi, cfg.grid.xi_min,
                                    cfg.grid.xi_max);
    }
    sys.generator = build_generator(sys.model, sys.op, sys.quadrature());
    return sys;
}

double energy(const State& state, std::span<const double> node_mass, const DiffusiveQuadrature* quad,
              double zeta) {
    if (state.psi.size() != node_mass.size()) throw ShapeError("energy: psi does not match the grid");
    double e = 0.0;
    for (std::size_t i = 0; i < node_mass.size(); ++i) e += node_mass[i] * std::norm(state.psi[i]);
    e *= 0.5;
    if (quad == nullptr) {
        if (!state.theta.empty()) throw ShapeError("energy: theta given without a quadrature");
        return e;
    }
    if (state.theta.size() != quad->size()) throw ShapeError("energy: theta does not match the quadrature");
    double m = 0.0;
    for (std::size_t j = 0; j < quad->size(); ++j) m += quad->weights[j] * std::norm(state.theta[j]);
    return e + 0.5 * zeta * m;
}

double energy(const AugmentedSystem& sys, const State& state) {
    return energy(state, sys.grid.mass, sys.quadrature(), sys.model.zeta);
}

double dissipation_rate(const State& state, const DiffusiveQuadrature& quad, double zeta, double wp) {
    if (state.theta.size() != quad.size()) throw ShapeError("dissipation_rate: theta does not match the quadrature");
    double d = 0.0;
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const double xi = quad.nodes[j];
        d += quad.weights[j] * (xi * xi + wp) * std::norm(state.theta[j]);
    }
    return -zeta * d;
}

double direct_dissipation_rate(const State& state, double rho) {
    if (state.psi.empty()) throw ShapeError("direct_dissipation_rate: empty state");
    return -rho * std::norm(state.psi.back());
}

double dissipation_rate(const AugmentedSystem& sys, const State& state) {
    if (sys.model.direct_damping()) return direct_dissipation_rate(state, sys.model.rho);
    return dissipation_rate(state, *sys.quad, sys.model.zeta, sys.model.wp);
}

double StepAudit::balance_residual(double dt) const {
    const double gap = std::abs(energy_after - energy_before - dt * midpoint_dissipation);
    return energy_before > 0.0 ? gap / energy_before : gap;
}

std::vector<cplx> pack_state(const AugmentedSystem& sys, const State& state) {
    const std::size_t n = sys.generator.n_psi();
    const std::size_t m = sys.generator.n_memory();
    if (state.psi.size() != sys.grid.x.size() || state.theta.size() != m) {
        throw ShapeError("pack_state: state does not match the system");
    }
    std::vector<cplx> u(n + m);
    std::copy_n(state.psi.begin() + static_cast<std::ptrdiff_t>(sys.op.node_offset), n, u.begin());
    std::copy(state.theta.begin(), state.theta.end(), u.begin() + static_cast<std::ptrdiff_t>(n));
    return u;
}

void unpack_state(const AugmentedSystem& sys, std::span<const cplx> u, State& state) {
    const std::size_t n = sys.generator.n_psi();
    const std::size_t m = sys.generator.n_memory();
    if (u.size() != n + m) throw ShapeError("unpack_state: size mismatch");
    state.psi.assign(sys.grid.x.size(), 0.0);
    std::copy_n(u.begin(), n, state.psi.begin() + static_cast<std::ptrdiff_t>(sys.op.node_offset));
    state.theta.assign(u.begin() + static_cast<std::ptrdiff_t>(n), u.end());
}

CrankNicolson::CrankNicolson(const AugmentedSystem& sys, double dt)
    : sys_(&sys), dt_(dt), solver_(sys.generator, 1.0, 0.5 * dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt", "time step must be positive");
}

StepAudit CrankNicolson::advance(State& state) const {
    StepAudit audit;
    audit.energy_before = energy(*sys_, state);
    const std::vector<cplx> old = pack_state(*sys_, state);
    std::vector<cplx> mid = old;
    solver_.solve(mid);

    State mid_state;
    unpack_state(*sys_, mid, mid_state);
    audit.midpoint_dissipation = dissipation_rate(*sys_, mid_state);

    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 2.0 * mid[i] - old[i];
    unpack_state(*sys_, mid, state);
    state.t += dt_;
    audit.energy_after = energy(*sys_, state);
    return audit;
}

State step(const AugmentedSystem& sys, const State& state, double dt) {
    CrankNicolson cn(sys, dt);
    State next = state;
    cn.advance(next);
    return next;
}

SimulationResult run_simulation(const AugmentedSystem& sys, std::span<const cplx> psi0, double dt, double t_final,
                                int output_every) {
    if (psi0.size() != sys.grid.x.size()) throw ShapeError("run_simulation: psi0 does not match the grid");
    if (!(t_final > 0.0)) throw ParameterError("t_final", "must be positive");
    if (output_every < 1) throw ParameterError("output_every", "must be >= 1");
    double peak = 0.0;
    for (const auto& v : psi0) peak = std::max(peak, std::abs(v));
    if (sys.model.bc_branch == LeftBoundary::Dirichlet && std::abs(psi0[0]) > 1e-12 * std::max(peak, 1.0)) {
        throw ParameterError("psi0", "initial data must vanish at x = 0 on the Dirichlet branch");
    }

    CrankNicolson cn(sys, dt);
    SimulationResult res;
    State s = sys.zero_state();
    std::copy(psi0.begin(), psi0.end(), s.psi.begin());
    if (sys.model.bc_branch == LeftBoundary::Dirichlet) s.psi[0] = 0.0;

    const auto n_steps = static_cast<std::size_t>(std::llround(t_final / dt));
    auto sample = [&](const State& st, double e) {
        res.trace.times.push_back(st.t);
        res.trace.energy.push_back(e);
        res.trace.dissipation.push_back(dissipation_rate(sys, st));
    };
    sample(s, energy(sys, s));

    for (std::size_t k = 1; k <= n_steps; ++k) {
        const StepAudit a = cn.advance(s);
        if (!std::isfinite(a.energy_after)) {
            std::ostringstream msg;
            msg << "non-finite state at step " << k << " (t = " << s.t << ")";
            throw NumericalError(msg.str());
        }
        res.max_energy_increase = std::max(res.max_energy_increase, a.energy_after - a.energy_before);
        res.max_balance_residual = std::max(res.max_balance_residual, a.balance_residual(dt));
        if (k % static_cast<std::size_t>(output_every) == 0 || k == n_steps) sample(s, a.energy_after);
    }
    res.steps = n_steps;
    res.final_state = std::move(s);
    return res;
}

SimulationResult run_simulation(const AugmentedSystem& sys, std::span<const cplx> psi0) {
    return run_simulation(sys, psi0, sys.grid_config.dt, sys.grid_config.t_final, sys.grid_config.output_every);
}

DecayFit fit_decay(const EnergyTrace& trace) {
    if (trace.times.size() != trace.energy.size()) throw ShapeError("fit_decay: ragged trace");
    if (trace.times.empty()) throw FitWindowError("fit_decay: empty trace");
    const double t_end = trace.times.back();
    const double t_start = t_end / 10.0;
    if (!(t_end > 0.0)) throw FitWindowError("fit_decay: trace does not advance in time");
    const double e_ref = *std::max_element(trace.energy.begin(), trace.energy.end());

    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.times[i] < t_start || trace.times[i] <= 0.0) continue;
        const double e = trace.energy[i];
        if (!(e > kEnergyFloor * e_ref)) {
            throw FitWindowError("fit_decay: energy reached the round-off floor inside the fit window");
        }
        lx.push_back(std::log(trace.times[i]));
        ly.push_back(std::log(e));
    }
    if (lx.size() < kMinFitSamples) {
        std::ostringstream msg;
        msg << "fit_decay: final decade holds " << lx.size() << " samples, need " << kMinFitSamples;
        throw FitWindowError(msg.str());
    }

    const auto n = static_cast<Eigen::Index>(lx.size());
    double center = 0.0;
    for (double v : lx) center += v;
    center /= static_cast<double>(n);
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double l = lx[static_cast<std::size_t>(i)] - center;
        a(i, 0) = 1.0;
        a(i, 1) = l;
        a(i, 2) = l * l;
        b(i) = ly[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd lin = a.leftCols(2).colPivHouseholderQr().solve(b);
    const Eigen::VectorXd quad = a.colPivHouseholderQr().solve(b);

    DecayFit fit;
    fit.slope = lin(1);
    fit.intercept = lin(0) - lin(1) * center;
    const double span = lx.back() - lx.front();
    fit.slope_spread = std::abs(2.0 * quad(2) * span);
    fit.samples = lx.size();
    fit.t_start = std::exp(lx.front());
    fit.t_end = t_end;
    if (fit.slope_spread > kMaxSlopeSpread * std::abs(fit.slope)) {
        std::ostringstream msg;
        msg << "fit_decay: log-log curvature too large for a power law (slope " << fit.slope
            << ", local slope drift " << fit.slope_spread << ")";
        throw FitWindowError(msg.str());
    }
    return fit;
}

double fit_decay_exponent(const EnergyTrace& trace) { return fit_decay(trace).slope; }

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("loglog_slope: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: entries must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x values coincide");
    return sxy / sxx;
}

std::vector<cplx> recipe_initial_data(const AugmentedSystem& sys) {
    const double a = sys.model.alpha_deg;
    const double p = 0.5 * (1.0 - a);
    const double q = 0.5 * (2.0 - a);
    std::vector<cplx> psi(sys.grid.x.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = sys.grid.x[i];
        if (x == 0.0) {
            // x^p sin(pi x^q) ~ pi x^{p+q}
            const double e = p + q;
            if (e > 0.0) {
                psi[i] = 0.0;
            } else if (e == 0.0) {
                psi[i] = std::numbers::pi;
            } else {
                throw ParameterError("initial_data", "recipe datum is unbounded at x = 0 for alpha_deg > 1.5");
            }
            continue;
        }
        psi[i] = std::pow(x, p) * std::sin(std::numbers::pi * std::pow(x, q));
    }
    if (sys.model.bc_branch == LeftBoundary::Dirichlet) psi[0] = 0.0;
    scaled_energy_norm(sys, psi);
    return psi;
}

std::vector<cplx> edge_of_domain_initial_data(const AugmentedSystem& sys) {
    const OperatorModes modes = undamped_modes(sys.op);
    const auto n = modes.values.size();
    const double mu_max = modes.values(n - 1);
    std::vector<cplx> psi(sys.grid.x.size(), 0.0);
    const std::size_t off = sys.op.node_offset;
    int index = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double mu = modes.values(k);
        if (mu <= 1e-10 * mu_max) continue;
        ++index;
        const double sign = modes.vectors(n - 1, k) < 0.0 ? -1.0 : 1.0;
        const double c = sign / (mu * std::sqrt(static_cast<double>(index)));
        for (Eigen::Index i = 0; i < n; ++i) psi[off + static_cast<std::size_t>(i)] += c * modes.vectors(i, k);
    }
    scaled_energy_norm(sys, psi);
    return psi;
}

}  // namespace fracdamp
