#include "fracdamp/diffusive_kernel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracdamp/config.hpp"

namespace fracdamp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_order(double alpha_frac, bool allow_one) {
    const bool ok = std::isfinite(alpha_frac) && alpha_frac > 0.0 &&
                    (allow_one ? alpha_frac <= 1.0 : alpha_frac < 1.0);
    if (!ok) {
        throw ParameterError("alpha_frac", allow_one ? "order must be in (0,1]"
                                                     : "diffusive realization needs order in (0,1)");
    }
}

// (1 - e^{-x}) / x and (x - 1 + e^{-x}) / x^2, the exponential-integrator weights.
double phi1(double x) {
    if (x < 1e-3) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0;
    return -std::expm1(-x) / x;
}

double phi2(double x) {
    if (x < 1e-3) return 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0;
    return (x + std::expm1(-x)) / (x * x);
}

}  // namespace

double eta(double xi, double alpha_frac) {
    check_order(alpha_frac, true);
    const double expo = (2.0 * alpha_frac - 1.0) / 2.0;
    const double ax = std::abs(xi);
    if (ax == 0.0) {
        if (expo < 0.0) throw SingularityError("eta is singular at xi = 0 for alpha_frac < 1/2");
        return expo == 0.0 ? 1.0 : 0.0;
    }
    return std::pow(ax, expo);
}

cplx kernel_closed_form(cplx lambda, double alpha_frac, double wp) {
    check_order(alpha_frac, false);
    const cplx shifted = lambda + wp;
    if (shifted.imag() == 0.0 && shifted.real() <= 0.0) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " lies on the cut (-inf, -wp]";
        throw BranchError(msg.str());
    }
    return kPi / std::sin(alpha_frac * kPi) * std::pow(shifted, alpha_frac - 1.0);
}

cplx DiffusiveQuadrature::kernel_sum(cplx lambda) const {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        acc += weights[j] * eta_values[j] * eta_values[j] / (lambda + wp + nodes[j] * nodes[j]);
    }
    return acc;
}

std::span<const double> certification_lambdas() {
    static constexpr std::array<double, 5> grid{0.1, 1.0, 10.0, 100.0, 1000.0};
    return grid;
}

CertificationReport certify(const DiffusiveQuadrature& quad, std::span<const double> lambdas) {
    CertificationReport rep;
    for (double lam : lambdas) {
        const cplx exact = kernel_closed_form(lam, quad.alpha_frac, quad.wp);
        const double err = std::abs(quad.kernel_sum(lam) - exact) / std::abs(exact);
        rep.lambdas.push_back(lam);
        rep.rel_errors.push_back(err);
        if (err > rep.max_rel_error || rep.lambdas.size() == 1) {
            rep.max_rel_error = err;
            rep.worst_lambda = lam;
        }
    }
    return rep;
}

DiffusiveQuadrature build_quadrature(double alpha_frac, double wp, int n_xi, double xi_min,
                                     double xi_max, double tolerance) {
    check_order(alpha_frac, false);
    if (!(wp >= 0.0)) throw ParameterError("wp", "must be >= 0");
    if (!(xi_min > 0.0)) throw ParameterError("xi_min", "must be > 0");
    if (!(xi_max > xi_min)) throw ParameterError("xi_max", "must exceed xi_min");
    if (n_xi < 2) throw ParameterError("n_xi", "need at least two nodes");

    DiffusiveQuadrature quad;
    quad.alpha_frac = alpha_frac;
    quad.wp = wp;
    const auto n = static_cast<std::size_t>(n_xi);
    const double u0 = std::log(xi_min);
    const double h = (std::log(xi_max) - u0) / static_cast<double>(n - 1);

    std::vector<double> wlog(n, h);
    wlog.front() *= 0.5;
    wlog.back() *= 0.5;
    // Euler-Maclaurin: in u = ln xi the integrands behave like e^{2a u} at the left
    // end and e^{(2a-2) u} at the right end.
    wlog.front() += h * h / 12.0 * (2.0 * alpha_frac);
    wlog.back() += h * h / 12.0 * (2.0 - 2.0 * alpha_frac);

    quad.nodes.resize(n);
    quad.weights.resize(n);
    quad.eta_values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double xi = j + 1 == n ? xi_max : std::exp(u0 + h * static_cast<double>(j));
        quad.nodes[j] = xi;
        quad.weights[j] = 2.0 * xi * wlog[j];
        quad.eta_values[j] = eta(xi, alpha_frac);
    }
    // Tails (0, xi_min) and (xi_max, inf), lumped onto the end nodes.
    quad.weights.front() += 2.0 * xi_min / (2.0 * alpha_frac);
    quad.weights.back() += 2.0 * xi_max / (2.0 - 2.0 * alpha_frac);

    auto rep = certify(quad, certification_lambdas());
    quad.certified_error = rep.max_rel_error;
    if (!(rep.max_rel_error <= tolerance)) {
        std::ostringstream msg;
        msg << "quadrature certification failed: relative error " << rep.max_rel_error
            << " at lambda = " << rep.worst_lambda << " exceeds " << tolerance;
        throw QuadratureError(msg.str(), std::move(rep));
    }
    return quad;
}

std::vector<cplx> fractional_integral_oracle(std::span<const cplx> samples, double alpha_frac,
                                             double wp, double dt) {
    check_order(alpha_frac, true);
    if (!(dt > 0.0)) throw ParameterError("dt", "must be > 0");
    if (!(wp >= 0.0)) throw ParameterError("wp", "must be >= 0");
    if (alpha_frac == 1.0) return {samples.begin(), samples.end()};

    const std::size_t n = samples.size();
    std::vector<cplx> out(n, 0.0);
    if (n == 0) return out;

    const double a = 1.0 - alpha_frac;
    // G0(u) = int_0^u v^{a-1} e^{-wp v} dv / Gamma(a),  G1(u) = int_0^u v^a e^{-wp v} dv / Gamma(a)
    std::vector<double> g0(n), g1(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = dt * static_cast<double>(j);
        if (wp == 0.0) {
            g0[j] = std::pow(u, a) / std::tgamma(a + 1.0);
            g1[j] = std::pow(u, a + 1.0) / ((a + 1.0) * std::tgamma(a));
        } else {
            g0[j] = std::pow(wp, -a) * boost::math::gamma_p(a, wp * u);
            g1[j] = a * std::pow(wp, -a - 1.0) * boost::math::gamma_p(a + 1.0, wp * u);
        }
    }
    // Per lag J: weight on the left sample (i0 - k) and on the right sample (k).
    std::vector<double> left(n, 0.0), right(n, 0.0);
    for (std::size_t lag = 1; lag < n; ++lag) {
        const double i0 = g0[lag] - g0[lag - 1];
        const double i1 = g1[lag] - g1[lag - 1];
        const double k = (dt * static_cast<double>(lag) * i0 - i1) / dt;
        left[lag] = i0 - k;
        right[lag] = k;
    }
    for (std::size_t t = 1; t < n; ++t) {
        cplx acc = 0.0;
        for (std::size_t lag = 1; lag <= t; ++lag) {
            acc += left[lag] * samples[t - lag] + right[lag] * samples[t - lag + 1];
        }
        out[t] = acc;
    }
    return out;
}

cplx diffusive_output(const DiffusiveQuadrature& quad, std::span<const cplx> theta, double zeta) {
    if (theta.size() != quad.size()) {
        throw ShapeError("memory state has " + std::to_string(theta.size()) +
                         " entries, quadrature has " + std::to_string(quad.size()));
    }
    cplx acc = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) acc += quad.weights[j] * quad.eta_values[j] * theta[j];
    return zeta * acc;
}

std::vector<cplx> simulate_memory_response(const DiffusiveQuadrature& quad,
                                           std::span<const cplx> input, double dt, double zeta) {
    if (!(dt > 0.0)) throw ParameterError("dt", "must be > 0");
    const std::size_t m = quad.size();
    std::vector<double> decay(m), w_old(m), w_new(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double d = quad.nodes[j] * quad.nodes[j] + quad.wp;
        const double x = d * dt;
        decay[j] = std::exp(-x);
        w_new[j] = dt * phi2(x) * quad.eta_values[j];
        w_old[j] = dt * (phi1(x) - phi2(x)) * quad.eta_values[j];
    }
    std::vector<cplx> theta(m, 0.0);
    std::vector<cplx> out;
    out.reserve(input.size());
    if (input.empty()) return out;
    out.push_back(0.0);
    for (std::size_t n = 1; n < input.size(); ++n) {
        for (std::size_t j = 0; j < m; ++j) {
            theta[j] = decay[j] * theta[j] + w_old[j] * input[n - 1] + w_new[j] * input[n];
        }
        out.push_back(diffusive_output(quad, theta, zeta));
    }
    return out;
}

RpqConstants rpq_constants(double lambda, double alpha_frac, double wp) {
    check_order(alpha_frac, true);
    if (!(wp >= 0.0)) throw ParameterError("wp", "must be >= 0");
    const double base = std::abs(lambda) + wp;
    if (!(base > 0.0)) throw ParameterError("lambda", "|lambda| + wp must be > 0");

    // |1-2a|/4 * pi / |sin((2a+3) pi/4)| = |x| / |sin x| with x = pi (1-2a)/4; the
    // point a = 1/2 is a removable singularity with value 1.
    const double x = kPi * (1.0 - 2.0 * alpha_frac) / 4.0;
    double ratio = 1.0;
    if (x != 0.0) {
        const double s = std::sin(x);
        if (s == 0.0) throw std::domain_error("degenerate R constant: sin((2a+3)pi/4) = 0");
        ratio = std::abs(x / s);
    }
    RpqConstants c;
    c.r = ratio * std::pow(std::hypot(lambda, wp), (2.0 * alpha_frac - 5.0) / 4.0);
    c.p = std::sqrt(kPi / 2.0) * std::pow(base, -0.75);
    c.q = std::sqrt(kPi / 16.0 * std::pow(base, -2.5));
    return c;
}

}  // namespace fracdamp
