#include "fracdamp/bessel.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fracdamp/diffusive_kernel.hpp"

namespace fracdamp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool is_negative_integer(double nu) { return nu < 0.0 && nu == std::floor(nu); }

void check_argument(double nu, cplx z) {
    if (!(nu >= -1.0)) throw std::domain_error("bessel_j: order must be >= -1");
    if (z.imag() == 0.0 && z.real() < 0.0) {
        throw BranchError("bessel_j: argument on the negative real axis");
    }
}

// sum_m (-z^2/4)^m / (m! Gamma(m+nu+1)) with a caller-chosen real type.
template <typename Real>
cplx series_sum(double nu, cplx z) {
    const Real zr = Real(z.real());
    const Real zi = Real(z.imag());
    const Real wr = -(zr * zr - zi * zi) / 4;
    const Real wi = -(zr * zi) / 2;
    Real tr = Real(1) / Real(std::tgamma(nu + 1.0));
    Real ti = Real(0);
    Real sr = tr;
    Real si = ti;
    const double az2 = std::norm(z) / 4.0;
    const Real eps = Real(std::numeric_limits<double>::epsilon()) * Real(1e-3);
    for (int m = 0; m < 2000; ++m) {
        const Real denom = Real(m + 1) * (Real(m + 1) + Real(nu));
        const Real nr = (tr * wr - ti * wi) / denom;
        const Real ni = (tr * wi + ti * wr) / denom;
        tr = nr;
        ti = ni;
        sr += tr;
        si += ti;
        const Real mag = abs(tr) + abs(ti);
        const Real smag = abs(sr) + abs(si);
        if (static_cast<double>(m) > az2 && mag <= eps * smag) break;
    }
    return {static_cast<double>(sr), static_cast<double>(si)};
}

template <>
cplx series_sum<double>(double nu, cplx z) {
    const cplx w = -z * z / 4.0;
    cplx term = 1.0 / std::tgamma(nu + 1.0);
    cplx sum = term;
    const double az2 = std::norm(z) / 4.0;
    for (int m = 0; m < 2000; ++m) {
        term *= w / ((m + 1.0) * (m + 1.0 + nu));
        sum += term;
        if (m > az2 && std::abs(term) <= 1e-3 * std::numeric_limits<double>::epsilon() * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

// Hankel coefficient recursion a_{k+1} = a_k (4nu^2 - (2k+1)^2) / ((k+1) 8).
template <typename Stop>
cplx hankel(double nu, cplx z, Stop stop) {
    const double mu = 4.0 * nu * nu;
    cplx p = 1.0;
    cplx q = 0.0;
    cplx term = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        const double kk = static_cast<double>(k);
        term *= (mu - (2.0 * kk + 1.0) * (2.0 * kk + 1.0)) / ((kk + 1.0) * 8.0) / z;
        const double mag = std::abs(term);
        if (stop(k, mag, prev)) break;
        prev = mag;
        // terms alternate between Q (odd order) and P (even order) with sign (-1)^{floor((k+1)/2)}
        const int order = k + 1;
        const double sign = ((order / 2) % 2 == 0) ? 1.0 : -1.0;
        if (order % 2 == 1) {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if (mag == 0.0) break;
    }
    const cplx chi = z - nu * kPi / 2.0 - kPi / 4.0;
    return std::sqrt(2.0 / (kPi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

cplx bessel_j_series(double nu, cplx z) {
    check_argument(nu, z);
    if (is_negative_integer(nu)) {
        const int n = static_cast<int>(-nu);
        return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j_series(-nu, z);
    }
    if (z == cplx(0.0, 0.0)) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw std::domain_error("bessel_j: J_nu(0) is unbounded for negative non-integer nu");
    }
    const cplx prefactor = std::exp(nu * std::log(z / 2.0));
    const cplx sum = std::abs(z) > 8.0
                         ? series_sum<boost::multiprecision::cpp_bin_float_quad>(nu, z)
                         : series_sum<double>(nu, z);
    return prefactor * sum;
}

cplx bessel_j_asymptotic(double nu, cplx z) {
    check_argument(nu, z);
    if (z == cplx(0.0, 0.0)) throw std::domain_error("bessel_j_asymptotic: z = 0");
    const double eps = std::numeric_limits<double>::epsilon();
    const auto stop = [eps](int, double mag, double prev) { return mag > prev || mag < 1e-2 * eps; };
    if (z.real() >= 0.0) return hankel(nu, z, stop);
    const double turn = z.imag() >= 0.0 ? kPi : -kPi;
    return std::polar(1.0, nu * turn) * hankel(nu, -z, stop);
}

cplx bessel_j_three_term(double nu, cplx z) {
    check_argument(nu, z);
    if (z == cplx(0.0, 0.0)) throw std::domain_error("bessel_j_three_term: z = 0");
    return hankel(nu, z, [](int k, double, double) { return k >= 2; });
}

cplx bessel_j(double nu, cplx z) {
    check_argument(nu, z);
    if (std::abs(z) <= kBesselSwitchRadius) return bessel_j_series(nu, z);
    return bessel_j_asymptotic(nu, z);
}

double bessel_j_zero(double nu, int n) {
    if (n < 1) throw std::invalid_argument("bessel_j_zero: n must be >= 1");
    if (!(nu > -1.0)) throw std::domain_error("bessel_j_zero: order must be > -1");
    auto f = [nu](double x) { return bessel_j(nu, cplx(x, 0.0)).real(); };
    const double step = kPi / 16.0;
    double a = 1e-6;
    double fa = f(a);
    int found = 0;
    for (int i = 0; i < 1000000; ++i) {
        const double b = a + step;
        const double fb = f(b);
        if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            if (++found == n) {
                double lo = a, hi = b, flo = fa;
                if (flo == 0.0) return lo;
                for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
                     ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = f(mid);
                    if (fm == 0.0) return mid;
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        fa = fb;
    }
    throw std::runtime_error("bessel_j_zero: zero not bracketed");
}

}  // namespace fracdamp
