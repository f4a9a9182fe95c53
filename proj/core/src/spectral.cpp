#include "fracdamp/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracdamp/bessel.hpp"

namespace fracdamp {

namespace {

constexpr double kPi = std::numbers::pi;

void require_weak_branch(const ModelConfig& cfg) {
    if (cfg.bc_branch != LeftBoundary::Dirichlet) {
        throw std::domain_error("characteristic equation is only available on the weakly degenerate branch");
    }
}

cplx muller(cplx x0, cplx x1, cplx x2, const ModelConfig& cfg, double tol, int max_it, int& used, double& res) {
    cplx f0 = char_function(x0, cfg);
    cplx f1 = char_function(x1, cfg);
    cplx f2 = char_function(x2, cfg);
    for (used = 0; used < max_it; ++used) {
        if (std::abs(f2) <= tol) break;
        const cplx h1 = x1 - x0;
        const cplx h2 = x2 - x1;
        const cplx d1 = (f1 - f0) / h1;
        const cplx d2 = (f2 - f1) / h2;
        const cplx a = (d2 - d1) / (h2 + h1);
        const cplx b = a * h2 + d2;
        const cplx disc = std::sqrt(b * b - 4.0 * a * f2);
        const cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
        if (den == cplx(0.0)) break;
        const cplx x3 = x2 - 2.0 * f2 / den;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = char_function(x2, cfg);
        if (!std::isfinite(std::abs(f2))) break;
    }
    res = std::abs(f2);
    return x2;
}

std::vector<cplx> sort_by_frequency(std::vector<cplx> v) {
    std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
        const double ia = std::abs(a.imag());
        const double ib = std::abs(b.imag());
        if (ia != ib) return ia < ib;
        return a.real() < b.real();
    });
    return v;
}

}  // namespace

double AsymptoticConstants::damping_constant() const noexcept { return alpha_frac > 0.5 ? C3 : C4; }

double AsymptoticConstants::re_constant() const {
    if (alpha_frac == 0.5) throw UnsupportedCaseError("asymptotic expansion has no case for alpha_frac = 1/2");
    const double beta = 2.0 - 2.0 * alpha_frac;
    return 2.0 * std::cos(0.5 * kPi * (1.0 - alpha_frac)) * C0 * damping_constant() / std::pow(kPi, beta);
}

AsymptoticConstants asymptotic_constants(const ModelConfig& cfg) {
    const double a = cfg.alpha_deg;
    if (!(a >= 0.0 && a < 1.0)) {
        throw std::domain_error("asymptotic constants need the weakly degenerate branch 0 <= alpha < 1");
    }
    AsymptoticConstants c;
    c.alpha_frac = cfg.alpha_frac;
    c.nu_alpha = (1.0 - a) / (2.0 - a);
    const double nu = c.nu_alpha;
    c.C0 = -(2.0 - a) / 2.0;
    c.C1 = c.C0 * (nu / 2.0 + 1.25);
    c.C2 = (2.0 - a) / 4.0 * ((0.5 + nu) * (1.5 + nu) - 4.0 * (1.0 - a) / (2.0 - a));
    const double damp = -cfg.rho * std::pow(2.0 / (2.0 - a), 2.0 - 2.0 * cfg.alpha_frac);
    if (cfg.alpha_frac > 0.5) {
        c.C3 = damp;
    } else {
        c.C3 = -(2.0 - a) / 4.0 * (-(0.5 + nu) * (1.5 + nu) / 4.0 * (2.0 - a) + (1.0 - a)) * 2.0 * c.C1 /
               (c.C0 * c.C0);
        c.C4 = damp;
    }
    return c;
}

RootLossError::RootLossError(const std::string& what, cplx seed, cplx last)
    : std::runtime_error(what), seed_(seed), last_(last) {}

cplx char_function(cplx gamma, const ModelConfig& cfg) {
    require_weak_branch(cfg);
    const double a = cfg.alpha_deg;
    const double nu = (1.0 - a) / (2.0 - a);
    const cplx I(0.0, 1.0);
    const cplx lambda = I * gamma * gamma;
    const cplx z = 2.0 * I * gamma / (2.0 - a);
    const cplx jn = bessel_j(nu, z);
    const cplx jn1 = bessel_j(nu + 1.0, z);
    cplx damping = cfg.rho;
    if (!cfg.direct_damping()) {
        const cplx w = lambda + cfg.wp;
        if (w.imag() == 0.0 && w.real() <= 0.0) {
            throw BranchError("char_function: lambda + wp on the branch cut of the fractional power");
        }
        damping *= std::pow(w, cfg.alpha_frac - 1.0);
    }
    return (1.0 - a) * jn - I * gamma * jn1 - I * damping * jn;
}

cplx asymptotic_root(int k, double alpha_deg) {
    if (k < 1) throw std::invalid_argument("asymptotic_root: k must be >= 1");
    const double nu = (1.0 - alpha_deg) / (2.0 - alpha_deg);
    return cplx(0.0, -(2.0 - alpha_deg) / 2.0 * (k + nu / 2.0 + 1.25) * kPi);
}

cplx asymptotic_eigenvalue(int k, const ModelConfig& cfg, const AsymptoticConstants& c, int threshold) {
    if (cfg.alpha_frac == 0.5) {
        throw UnsupportedCaseError("asymptotic expansion has no case for alpha_frac = 1/2");
    }
    if (k < threshold) throw std::invalid_argument("asymptotic_eigenvalue: k below the expansion threshold");
    const double kp = k * kPi;
    double bracket = c.C0 * c.C0 * kp * kp + c.C1 * c.C1 * kPi * kPi + 2.0 * c.C0 * c.C1 * k * kPi * kPi +
                     2.0 * c.C0 * c.C2;
    if (cfg.alpha_frac < 0.5) bracket += 2.0 * c.C0 * c.C3 / k + 2.0 * c.C1 * c.C2 / k;
    const cplx i_pow = std::polar(1.0, 0.5 * kPi * (1.0 - cfg.alpha_frac));
    const double beta = 2.0 - 2.0 * cfg.alpha_frac;
    return cplx(0.0, -bracket) - 2.0 * i_pow * c.C0 * c.damping_constant() / std::pow(kp, beta);
}

EigenvalueEstimate refine_root(cplx seed, const ModelConfig& cfg, int k, const RefineOptions& opts) {
    EigenvalueEstimate est;
    est.k = k;
    cplx g = seed;
    cplx fg = char_function(g, cfg);
    bool stalled = false;
    int it = 0;
    for (; it < opts.max_iterations && std::abs(fg) > opts.tolerance; ++it) {
        const double h = 1e-6 * std::max(1.0, std::abs(g));
        const cplx df = (char_function(g + h, cfg) - char_function(g - h, cfg)) / (2.0 * h);
        if (df == cplx(0.0) || !std::isfinite(std::abs(df))) {
            stalled = true;
            break;
        }
        const cplx step = fg / df;
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 8; ++halving, t *= 0.5) {
            const cplx gn = g - t * step;
            const cplx fn = char_function(gn, cfg);
            if (std::abs(fn) < std::abs(fg)) {
                g = gn;
                fg = fn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            stalled = true;
            break;
        }
    }
    est.iterations = it;
    double res = std::abs(fg);
    if (res > opts.tolerance && (stalled || it >= opts.max_iterations)) {
        const double d = 0.05 / std::sqrt(std::max(k, 1));
        int used = 0;
        const cplx gm = muller(g - d, g + cplx(0.0, d), g, cfg, opts.tolerance, opts.max_iterations, used, res);
        est.used_muller = true;
        est.iterations += used;
        g = gm;
    }
    if (!(res <= opts.tolerance)) {
        std::ostringstream msg;
        msg << "refine_root: no convergence for k = " << k << " (|f| = " << res << ")";
        throw RootLossError(msg.str(), seed, g);
    }
    est.gamma = g;
    est.lambda = cplx(0.0, 1.0) * g * g;
    est.residual = res;
    if (k >= 1) est.left_ball = std::abs(g - seed) > 2.0 / std::sqrt(static_cast<double>(k));
    return est;
}

std::vector<EigenvalueEstimate> compute_spectrum(int k_min, int k_max, const ModelConfig& cfg) {
    if (k_min < 1) throw std::invalid_argument("compute_spectrum: k_min must be >= 1");
    std::vector<EigenvalueEstimate> out;
    for (int k = k_min; k <= k_max; ++k) out.push_back(refine_root(asymptotic_root(k, cfg.alpha_deg), cfg, k));
    std::sort(out.begin(), out.end(), [](const EigenvalueEstimate& a, const EigenvalueEstimate& b) {
        return std::abs(a.lambda.imag()) < std::abs(b.lambda.imag());
    });
    return out;
}

Eigen::MatrixXcd assemble_discrete_generator(const ModelConfig& cfg, const DegenerateGrid& grid,
                                             const DiffusiveQuadrature* quad) {
    if (grid.n_cells() > kMaxDenseNx || (quad != nullptr && quad->size() > static_cast<std::size_t>(kMaxDenseNxi))) {
        throw std::length_error("assemble_discrete_generator: dense assembly limited to n_x <= 512, n_xi <= 256");
    }
    const OperatorMatrix op = assemble_operator(grid, cfg.bc_branch, RightBoundary::FluxSlot);
    return build_generator(cfg, op, quad).dense();
}

std::vector<cplx> dense_eigenvalues(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw ShapeError("dense_eigenvalues: matrix is not square");
    Eigen::MatrixXcd a = m;
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<cplx> w(static_cast<std::size_t>(n));
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError("dense_eigenvalues: zgeev failed");
    return sort_by_frequency(std::move(w));
}

namespace {

std::vector<cplx> psi_block_eigenvalues_extended(const DiscreteGenerator& gen) {
    using xcplx = std::complex<long double>;
    using XMatrix = Eigen::Matrix<xcplx, Eigen::Dynamic, Eigen::Dynamic>;
    const auto n = static_cast<Eigen::Index>(gen.n_psi());
    std::vector<long double> s(gen.n_psi());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(static_cast<long double>(gen.weights[i]));
    auto entry = [](const cplx& v) { return xcplx(v.real(), v.imag()); };
    XMatrix b = XMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        b(i, i) = entry(gen.diag[u]);
        if (i > 0) b(i, i - 1) = entry(gen.lower[u]) * (s[u] / s[u - 1]);
        if (i + 1 < n) b(i, i + 1) = entry(gen.upper[u]) * (s[u] / s[u + 1]);
    }
    Eigen::ComplexEigenSolver<XMatrix> es(b, false);
    if (es.info() != Eigen::Success) throw NumericalError("generator_spectrum: extended eigensolver failed");
    std::vector<cplx> w;
    w.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const xcplx v = es.eigenvalues()(i);
        w.emplace_back(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    }
    return sort_by_frequency(std::move(w));
}

}  // namespace

GeneratorSpectrum generator_spectrum(const DiscreteGenerator& gen) {
    const bool decoupled = std::all_of(gen.row_coupling.begin(), gen.row_coupling.end(),
                                       [](const cplx& r) { return r == cplx(0.0, 0.0); });
    if (decoupled) {
        GeneratorSpectrum s;
        s.psi = psi_block_eigenvalues_extended(gen);
        s.memory = gen.memory_diag;
        return s;
    }
    std::vector<cplx> all = dense_eigenvalues(gen.energy_orthonormal_dense());
    std::vector<bool> taken(all.size(), false);
    GeneratorSpectrum s;
    for (const cplx& d : gen.memory_diag) {
        std::size_t best = all.size();
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (taken[i]) continue;
            const double r = std::abs(all[i] - d);
            if (r < dist) {
                dist = r;
                best = i;
            }
        }
        taken[best] = true;
        s.memory.push_back(all[best]);
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!taken[i]) s.psi.push_back(all[i]);
    }
    return s;
}

ResolventEstimate resolvent_norm(double lambda_im, const DiscreteGenerator& gen, int max_iterations, double tol) {
    const std::size_t n = gen.size();
    const cplx shift(0.0, lambda_im);
    const ShiftedSolver fwd(gen, shift, 1.0);
    const ShiftedSolver adj(gen.conjugate_transpose(), std::conj(shift), 1.0);
    std::vector<double> sw(n);
    for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(gen.weights[i]);

    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(n);
    auto normalize = [](std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& e : v) s += std::norm(e);
        s = std::sqrt(s);
        for (auto& e : v) e /= s;
        return s;
    };
    normalize(x);

    ResolventEstimate est;
    est.lambda = lambda_im;
    std::vector<cplx> y(n);
    double prev = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / sw[i];
        fwd.solve(y);
        double cx = 0.0;
        for (std::size_t i = 0; i < n; ++i) cx += gen.weights[i] * std::norm(y[i]);
        cx = std::sqrt(cx);
        for (std::size_t i = 0; i < n; ++i) y[i] *= gen.weights[i];
        adj.solve(y);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / sw[i];
        normalize(x);
        est.norm = cx;
        est.iterations = it;
        if (!std::isfinite(cx)) break;
        if (std::abs(cx - prev) <= tol * cx) {
            est.converged = true;
            break;
        }
        prev = cx;
    }
    est.ill_conditioned = !std::isfinite(est.norm) || est.norm > kResolventWarnLevel;
    return est;
}

ResolventEstimate resolvent_peak(const DiscreteGenerator& gen, double lo, double hi, double tol) {
    if (!(hi > lo)) throw std::invalid_argument("resolvent_peak: empty interval");
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    ResolventEstimate fc = resolvent_norm(c, gen);
    ResolventEstimate fd = resolvent_norm(d, gen);
    const double scale = std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    while (b - a > tol * scale) {
        if (fc.norm > fd.norm) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = resolvent_norm(c, gen);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = resolvent_norm(d, gen);
        }
    }
    return fc.norm > fd.norm ? fc : fd;
}

std::vector<ResolventEstimate> resolvent_peaks(const DiscreteGenerator& gen, std::span<const cplx> eigenvalues) {
    std::vector<ResolventEstimate> out;
    out.reserve(eigenvalues.size());
    for (const cplx& e : eigenvalues) {
        const double w = std::max(2.0 * std::abs(e.real()), 1e-6 * std::abs(e.imag()));
        out.push_back(resolvent_peak(gen, e.imag() - w, e.imag() + w));
    }
    return out;
}

cplx nearest_eigenvalue(std::span<const cplx> values, cplx target) {
    if (values.empty()) throw std::invalid_argument("nearest_eigenvalue: no values");
    return *std::min_element(values.begin(), values.end(), [&](const cplx& a, const cplx& b) {
        return std::abs(a - target) < std::abs(b - target);
    });
}

std::vector<ResolventEstimate> resolvent_sweep(const DiscreteGenerator& gen, std::span<const double> lambdas) {
    std::vector<ResolventEstimate> out;
    out.reserve(lambdas.size());
    for (double l : lambdas) out.push_back(resolvent_norm(l, gen));
    return out;
}

}  // namespace fracdamp
