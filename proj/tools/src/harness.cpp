#include "fracdamp/harness.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fracdamp::harness {

namespace {

constexpr const char* kVersion = "0.1.0";

int log_level() {
    static const int level = [] {
        const char* v = std::getenv("FRACDAMP_LOG");
        if (v == nullptr) return 0;
        const std::string s(v);
        if (s == "debug") return 2;
        if (s == "info") return 1;
        return 0;
    }();
    return level;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json derived_constants(const ModelConfig& m) {
    json d{{"zeta", m.zeta}, {"m_tau", m.m_tau}, {"bc_branch", std::string(to_string(m.bc_branch))}};
    if (m.bc_branch == LeftBoundary::Dirichlet) {
        const AsymptoticConstants c = asymptotic_constants(m);
        d["nu_alpha"] = c.nu_alpha;
        d["C0"] = c.C0;
        d["C1"] = c.C1;
        d["C2"] = c.C2;
        d["C3"] = c.C3;
        d["C4"] = c.C4;
        d["re_constant"] = m.alpha_frac == 0.5 ? json(nullptr) : json(c.re_constant());
    }
    return d;
}

json versions() {
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    std::ostringstream js;
    js << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
    return json{{"fracdamp", kVersion}, {"compiler", __VERSION__}, {"eigen", eigen.str()}, {"nlohmann_json", js.str()}};
}

struct Run {
    const ExperimentSpec& spec;
    json config;
    ExperimentConfig cfg;
    CommandResult result;

    fs::path file(const std::string& name) {
        result.artifacts.push_back(name);
        return spec.out_dir / name;
    }
};

void cmd_simulate(Run& run) {
    const AugmentedSystem sys = build_system(run.cfg.validated());
    const auto psi0 = initial_data(sys, run.cfg.initial_data);
    log_info("simulate: " + std::to_string(std::llround(sys.grid_config.t_final / sys.grid_config.dt)) + " steps");
    const SimulationResult res = run_simulation(sys, psi0);
    write_energy_trace(run.file("energy_trace.csv"), res.trace);
    write_final_state(run.file("final_state.csv"), sys.grid, res.final_state);
    {
        std::ofstream coo(run.file("operator.coo"));
        write_coo(coo, sys.op);
    }
    run.result.summary = {{"steps", res.steps},
                          {"final_energy", res.trace.energy.back()},
                          {"max_energy_increase", res.max_energy_increase},
                          {"max_balance_residual", res.max_balance_residual},
                          {"monotone", res.monotone()}};
}

void cmd_spectrum(Run& run) {
    const ModelConfig m = run.cfg.validated().model;
    const auto roots = compute_spectrum(run.cfg.spectrum_k_min, run.cfg.spectrum_k_max, m);
    write_json(run.file("spectrum.json"), spectrum_json(roots));
    double max_res = 0.0;
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
        max_res = std::max(max_res, r.residual);
        max_re = std::max(max_re, r.lambda.real());
    }
    json s{{"count", roots.size()}, {"max_residual", max_res}, {"max_re_lambda", max_re}};
    std::vector<EigenvalueEstimate> tail;
    for (const auto& r : roots) {
        if (r.k >= kAsymptoticThreshold) tail.push_back(r);
    }
    if (m.alpha_frac != 0.5 && tail.size() >= 3) {
        s["re_constant_fit"] = extrapolated_re_constant(tail, m.alpha_frac);
        s["re_constant_predicted"] = asymptotic_constants(m).re_constant();
    }
    run.result.summary = s;
}

void cmd_resolvent(Run& run) {
    const AugmentedSystem sys = build_system(run.cfg.validated());
    const auto peaks = resolvent_peak_series(sys, run.cfg.resolvent_k_min, run.cfg.resolvent_k_max);
    std::vector<double> lam;
    std::vector<double> val;
    std::string pk = "k,lambda,norm\n";
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        pk += std::to_string(run.cfg.resolvent_k_min + static_cast<int>(i)) + "," + fmt(peaks[i].lambda) + "," +
              fmt(peaks[i].norm) + "\n";
        lam.push_back(std::abs(peaks[i].lambda));
        val.push_back(peaks[i].norm);
    }
    write_text(run.file("resolvent_peaks.csv"), pk);

    double lo = peaks.front().lambda;
    double hi = peaks.front().lambda;
    for (const auto& p : peaks) {
        lo = std::min(lo, p.lambda);
        hi = std::max(hi, p.lambda);
    }
    const int n = run.cfg.resolvent_samples;
    std::string csv = "lambda,norm\n";
    bool warned = false;
    for (int i = 0; i < n; ++i) {
        const double l = lo + (hi - lo) * i / (n - 1);
        const ResolventEstimate e = resolvent_norm(l, sys.generator);
        warned = warned || e.ill_conditioned;
        csv += fmt(l) + "," + fmt(e.norm) + "\n";
    }
    write_text(run.file("resolvent.csv"), csv);
    if (warned) log_info("resolvent: sample point numerically on the spectrum, norm is a lower bound");
    run.result.summary = {{"peak_exponent", loglog_slope(lam, val)},
                          {"expected_exponent", 1.0 - sys.model.alpha_frac},
                          {"peaks", peaks.size()},
                          {"conditioning_warning", warned}};
}

void cmd_validate_kernel(Run& run) {
    const ValidatedConfig v = run.cfg.validated();
    const ModelConfig& m = v.model;
    if (m.direct_damping()) {
        json rep{{"direct_damping", true}, {"certified", true}};
        write_json(run.file("kernel_report.json"), rep);
        run.result.summary = rep;
        return;
    }
    constexpr double tol = 1e-6;
    json rep{{"alpha_frac", m.alpha_frac}, {"wp", m.wp}, {"n_xi", v.grid.n_xi}, {"tolerance", tol}};
    std::optional<DiffusiveQuadrature> quad;
    CertificationReport cert;
    try {
        quad = build_quadrature(m.alpha_frac, m.wp, v.grid.n_xi, v.grid.xi_min, v.grid.xi_max, tol);
        cert = certify(*quad, certification_lambdas());
    } catch (const QuadratureError& e) {
        cert = e.report();
    }
    rep["certified"] = quad.has_value();
    rep["max_rel_error"] = cert.max_rel_error;
    rep["worst_lambda"] = cert.worst_lambda;
    rep["lambdas"] = cert.lambdas;
    rep["rel_errors"] = cert.rel_errors;

    if (quad) {
        constexpr double dt = 1e-3;
        constexpr int steps = 5000;
        std::vector<cplx> u(steps + 1);
        for (int i = 0; i <= steps; ++i) u[i] = std::sin(i * dt);
        const double zeta = derive_zeta(1.0, m.alpha_frac);
        const auto diff = simulate_memory_response(*quad, u, dt, zeta);
        const auto oracle = fractional_integral_oracle(u, m.alpha_frac, m.wp, dt);
        std::string csv = "t,diffusive,oracle,abs_error\n";
        double worst = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double err = std::abs(diff[i] - oracle[i]);
            worst = std::max(worst, err);
            if (i % 10 == 0) csv += fmt(i * dt) + "," + fmt(diff[i].real()) + "," + fmt(oracle[i].real()) + "," + fmt(err) + "\n";
        }
        write_text(run.file("memory_oracle.csv"), csv);
        rep["oracle_max_abs_error"] = worst;
    }
    write_json(run.file("kernel_report.json"), rep);
    run.result.summary = rep;
    if (!quad) {
        run.result.exit_code = 1;
        write_json(run.spec.out_dir / "error.json",
                   json{{"error", {{"type", "quadrature"}, {"message", "quadrature certification failed"}}}});
    }
}

void cmd_fit_decay(Run& run) {
    EnergyTrace trace;
    std::optional<double> expected;
    if (run.spec.trace_path) {
        trace = read_energy_trace(*run.spec.trace_path);
    } else {
        const AugmentedSystem sys = build_system(run.cfg.validated());
        const SimulationResult res = run_simulation(sys, initial_data(sys, run.cfg.initial_data));
        trace = res.trace;
        write_energy_trace(run.file("energy_trace.csv"), trace);
    }
    if (run.cfg.alpha_frac < 1.0 && run.cfg.wp != 0.0) expected = -2.0 / (1.0 - run.cfg.alpha_frac);
    const DecayFit f = fit_decay(trace);
    json rep{{"slope", f.slope},         {"intercept", f.intercept}, {"slope_spread", f.slope_spread},
             {"samples", f.samples},     {"t_start", f.t_start},     {"t_end", f.t_end},
             {"expected", opt_json(expected)}};
    write_json(run.file("decay_fit.json"), rep);
    run.result.summary = rep;
}

void cmd_sweep(Run& run) {
    const auto rows = sweep(run.cfg.sweep_param, run.cfg.sweep_values, run.cfg);
    std::string csv = "param,value,decay_exponent,resolvent_exponent,re_constant_fit,re_constant_predicted,error\n";
    std::size_t failed = 0;
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        if (!r.error.empty()) ++failed;
        csv += run.cfg.sweep_param + "," + fmt(r.value) + "," + fmt(r.decay_exponent) + "," +
               fmt(r.resolvent_exponent) + "," + fmt(r.re_constant_fit) + "," + fmt(r.re_constant_predicted) + "," +
               err + "\n";
    }
    write_text(run.file("sweep.csv"), csv);
    run.result.summary = {{"rows", rows.size()}, {"rows_with_errors", failed}};
}

json error_report(std::string_view type, const std::string& message, const std::string& field = {}) {
    json e{{"type", type}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    return json{{"error", e}};
}

}  // namespace

void log_info(std::string_view msg) {
    if (log_level() >= 1) std::cerr << "[fracdamp] " << msg << '\n';
}

void log_debug(std::string_view msg) {
    if (log_level() >= 2) std::cerr << "[fracdamp:debug] " << msg << '\n';
}

std::vector<cplx> initial_data(const AugmentedSystem& sys, std::string_view kind) {
    if (kind == "edge") return edge_of_domain_initial_data(sys);
    if (kind == "recipe") return recipe_initial_data(sys);
    throw ParameterError("simulation.initial_data", "must be \"edge\" or \"recipe\"");
}

void write_energy_trace(const fs::path& path, const EnergyTrace& trace) {
    std::string csv = "t,E,E_dot_audit\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        csv += fmt(trace.times[i]) + "," + fmt(trace.energy[i]) + "," + fmt(trace.dissipation[i]) + "\n";
    }
    write_text(path, csv);
}

EnergyTrace read_energy_trace(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,E", 0) != 0) throw ConfigError("trace " + path.string() + " lacks the t,E header");
    EnergyTrace tr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a;
        std::string b;
        std::string c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        try {
            tr.times.push_back(std::stod(a));
            tr.energy.push_back(std::stod(b));
            tr.dissipation.push_back(c.empty() ? 0.0 : std::stod(c));
        } catch (const std::exception&) {
            throw ConfigError("malformed trace line: " + line);
        }
    }
    return tr;
}

void write_final_state(const fs::path& path, const DegenerateGrid& grid, const State& state) {
    std::string csv = "x,re_psi,im_psi\n";
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
        csv += fmt(grid.x[i]) + "," + fmt(state.psi[i].real()) + "," + fmt(state.psi[i].imag()) + "\n";
    }
    write_text(path, csv);
}

json spectrum_json(const std::vector<EigenvalueEstimate>& roots) {
    json arr = json::array();
    for (const auto& r : roots) {
        arr.push_back({{"k", r.k},
                       {"re_gamma", r.gamma.real()},
                       {"im_gamma", r.gamma.imag()},
                       {"re_lambda", r.lambda.real()},
                       {"im_lambda", r.lambda.imag()},
                       {"residual", r.residual}});
    }
    return arr;
}

std::vector<ResolventEstimate> resolvent_peak_series(const AugmentedSystem& sys, int k_min, int k_max) {
    if (k_min < 1 || k_max < k_min) throw ParameterError("resolvent.k_min", "need 1 <= k_min <= k_max");
    const GeneratorSpectrum gs = generator_spectrum(sys.generator);
    std::vector<cplx> centers;
    for (int k = k_min; k <= k_max; ++k) {
        if (sys.model.bc_branch == LeftBoundary::Dirichlet) {
            const auto root = refine_root(asymptotic_root(k, sys.model.alpha_deg), sys.model, k);
            centers.push_back(nearest_eigenvalue(gs.psi, root.lambda));
        } else {
            if (static_cast<std::size_t>(k) > gs.psi.size()) throw ParameterError("resolvent.k_max", "exceeds the grid");
            centers.push_back(gs.psi[static_cast<std::size_t>(k - 1)]);
        }
    }
    return resolvent_peaks(sys.generator, centers);
}

double extrapolated_re_constant(const std::vector<EigenvalueEstimate>& roots, double alpha_frac) {
    if (roots.size() < 2) throw std::invalid_argument("extrapolated_re_constant: need two roots");
    const double beta = 2.0 - 2.0 * alpha_frac;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(roots.size()), 2);
    Eigen::VectorXd b(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const auto& r = roots[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = 1.0 / r.k;
        b(i) = std::pow(r.k, beta) * std::abs(r.lambda.real());
    }
    return a.colPivHouseholderQr().solve(b)(0);
}

std::vector<SweepRow> sweep(std::string_view param, const std::vector<double>& values, const ExperimentConfig& base) {
    if (std::find(std::begin(kSweepParams), std::end(kSweepParams), param) == std::end(kSweepParams)) {
        throw ParameterError("sweep.param", "must be one of alpha_deg, alpha_frac, rho, wp");
    }
    auto row = [param, base](double value) {
        SweepRow r;
        r.value = value;
        ExperimentConfig c = base;
        if (param == "alpha_deg") c.alpha_deg = value;
        if (param == "alpha_frac") c.alpha_frac = value;
        if (param == "rho") c.rho = value;
        if (param == "wp") c.wp = value;
        auto note = [&r](const std::string& what, const std::exception& e) {
            if (!r.error.empty()) r.error += "; ";
            r.error += what + ": " + e.what();
        };
        std::optional<AugmentedSystem> sys;
        try {
            sys = build_system(c.validated());
        } catch (const std::exception& e) {
            note("setup", e);
            return r;
        }
        try {
            r.decay_exponent = fit_decay(run_simulation(*sys, initial_data(*sys, c.initial_data)).trace).slope;
        } catch (const std::exception& e) {
            note("decay", e);
        }
        try {
            const auto peaks = resolvent_peak_series(*sys, c.resolvent_k_min, c.resolvent_k_max);
            std::vector<double> lam;
            std::vector<double> val;
            for (const auto& p : peaks) {
                lam.push_back(std::abs(p.lambda));
                val.push_back(p.norm);
            }
            r.resolvent_exponent = loglog_slope(lam, val);
        } catch (const std::exception& e) {
            note("resolvent", e);
        }
        try {
            if (sys->model.bc_branch == LeftBoundary::Dirichlet && sys->model.alpha_frac != 0.5) {
                const int k_lo = std::max(c.spectrum_k_min, kAsymptoticThreshold);
                const auto roots = compute_spectrum(k_lo, std::max(c.spectrum_k_max, k_lo + 2), sys->model);
                r.re_constant_fit = extrapolated_re_constant(roots, sys->model.alpha_frac);
                r.re_constant_predicted = asymptotic_constants(sys->model).re_constant();
            }
        } catch (const std::exception& e) {
            note("spectrum", e);
        }
        return r;
    };
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(values.size());
    for (double v : values) jobs.push_back(std::async(std::launch::async, row, v));
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

CommandResult run_command(const ExperimentSpec& spec) {
    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec || !fs::is_directory(spec.out_dir)) {
        CommandResult r;
        r.exit_code = 1;
        std::cerr << error_report("io", "output directory " + spec.out_dir.string() + " is not writable").dump()
                  << '\n';
        return r;
    }
    Run run{spec, {}, {}, {}};
    try {
        run.config = spec.config_path ? load_config_file(*spec.config_path) : default_config_json();
        for (const auto& o : spec.overrides) apply_override(run.config, o);
        run.cfg = parse_config(run.config);
        run.config = run.cfg.to_json();
        const ModelConfig model = run.cfg.validated().model;

        switch (spec.command) {
        case Command::Simulate: cmd_simulate(run); break;
        case Command::Spectrum: cmd_spectrum(run); break;
        case Command::Resolvent: cmd_resolvent(run); break;
        case Command::ValidateKernel: cmd_validate_kernel(run); break;
        case Command::FitDecay: cmd_fit_decay(run); break;
        case Command::Sweep: cmd_sweep(run); break;
        }

        json manifest{{"command", std::string(to_string(spec.command))},
                      {"config", run.config},
                      {"derived", derived_constants(model)},
                      {"versions", versions()},
                      {"artifacts", run.result.artifacts},
                      {"summary", run.result.summary},
                      {"exit_code", run.result.exit_code}};
        write_json(spec.out_dir / "manifest.json", manifest);
        return run.result;
    } catch (const ParameterError& e) {
        run.result.summary = error_report("parameter", e.what(), e.field());
    } catch (const ConfigError& e) {
        run.result.summary = error_report("config", e.what());
    } catch (const QuadratureError& e) {
        run.result.summary = error_report("quadrature", e.what());
    } catch (const FitWindowError& e) {
        run.result.summary = error_report("fit_window", e.what());
    } catch (const RootLossError& e) {
        run.result.summary = error_report("root_loss", e.what());
    } catch (const NumericalError& e) {
        run.result.summary = error_report("numerical", e.what());
    } catch (const std::exception& e) {
        run.result.summary = error_report("error", e.what());
    }
    run.result.exit_code = 1;
    try {
        write_json(spec.out_dir / "error.json", run.result.summary);
    } catch (const std::exception&) {
    }
    std::cerr << run.result.summary.dump() << '\n';
    return run.result;
}

}  // namespace fracdamp::harness
