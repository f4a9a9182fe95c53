#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdamp {

using cplx = std::complex<double>;

class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class BranchError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// eta(xi) = |xi|^{(2 alpha_frac - 1)/2}, the input weight of the diffusive realization.
double eta(double xi, double alpha_frac);

/// Closed form of the kernel integral
///   int_R eta^2(xi) / (lambda + wp + xi^2) dxi = pi / sin(alpha_frac pi) * (lambda + wp)^{alpha_frac - 1},
/// principal branch, cut along (-inf, -wp].
cplx kernel_closed_form(cplx lambda, double alpha_frac, double wp);

/**
 * @brief Half-axis discretization of the xi-integral of the augmented system.
 *
 * Nodes are geometric on [xi_min, xi_max]. Weights are log-trapezoid weights with
 * Euler-Maclaurin endpoint corrections and analytic tail weights for (0, xi_min) and
 * (xi_max, inf), then doubled to account for the even integrands on the full line.
 */
struct DiffusiveQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> eta_values;  ///< eta(nodes[j]) cached
    double alpha_frac = 0.5;
    double wp = 1.0;
    double certified_error = 0.0;    ///< max relative error over the certification grid

    std::size_t size() const noexcept { return nodes.size(); }

    /// sum_j w_j eta_j^2 / (lambda + wp + xi_j^2)
    cplx kernel_sum(cplx lambda) const;
};

struct CertificationReport {
    double max_rel_error = 0.0;
    double worst_lambda = 0.0;
    std::vector<double> lambdas;
    std::vector<double> rel_errors;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, CertificationReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const CertificationReport& report() const noexcept { return report_; }

private:
    CertificationReport report_;
};

/// The lambda grid used to certify every quadrature.
std::span<const double> certification_lambdas();

CertificationReport certify(const DiffusiveQuadrature& quad, std::span<const double> lambdas);

/// Builds and certifies the quadrature; throws QuadratureError when the
/// relative error on the certification grid exceeds `tolerance`.
DiffusiveQuadrature build_quadrature(double alpha_frac, double wp, int n_xi, double xi_min,
                                     double xi_max, double tolerance = 1e-6);

/// Direct product-integration evaluation of the exponential fractional integral
/// I^{1-alpha_frac, wp} w on a uniform grid t_n = n dt. The data are interpolated
/// piecewise linearly and the kernel (t-s)^{-alpha_frac} e^{-wp (t-s)} is integrated
/// exactly against each linear piece. alpha_frac == 1 is the identity map.
std::vector<cplx> fractional_integral_oracle(std::span<const cplx> samples, double alpha_frac,
                                             double wp, double dt);

/// zeta * sum_j w_j eta_j theta_j
cplx diffusive_output(const DiffusiveQuadrature& quad, std::span<const cplx> theta, double zeta);

/// Integrates the node ODEs theta_j' = -(xi_j^2 + wp) theta_j + U(t) eta_j from theta = 0,
/// exactly for piecewise-linear U, and returns diffusive_output at every sample time.
std::vector<cplx> simulate_memory_response(const DiffusiveQuadrature& quad,
                                           std::span<const cplx> input, double dt, double zeta);

/// Constants R, P, Q bounding psi(1) in the resolvent estimate.
struct RpqConstants {
    double r = 0.0;
    double p = 0.0;
    double q = 0.0;
};

RpqConstants rpq_constants(double lambda, double alpha_frac, double wp);

}  // namespace fracdamp
