#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracdamp/config.hpp"
#include "fracdamp/diffusive_kernel.hpp"
#include "fracdamp/generator.hpp"
#include "fracdamp/spatial_operator.hpp"

namespace fracdamp {

/// Constants of the large-k eigenvalue expansion.
struct AsymptoticConstants {
    double nu_alpha = 0.0;
    double C0 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
    double C4 = 0.0;      ///< only used when alpha_frac < 1/2
    double alpha_frac = 0.0;

    /// C3 above alpha_frac = 1/2, C4 below.
    double damping_constant() const noexcept;
    /// lim k^{2-2 alpha_frac} |Re lambda_k| = 2 cos(pi (1 - alpha_frac)/2) C0 C_damp / pi^{2-2 alpha_frac}.
    double re_constant() const;
};

AsymptoticConstants asymptotic_constants(const ModelConfig& cfg);

/// Raised for alpha_frac = 1/2, where the expansion has no case.
class UnsupportedCaseError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct EigenvalueEstimate {
    int k = 0;
    cplx gamma;
    cplx lambda;          ///< i gamma^2
    double residual = 0.0;
    int iterations = 0;
    bool used_muller = false;
    bool left_ball = false;  ///< ended farther than 2 / sqrt(k) from the seed
};

class RootLossError : public std::runtime_error {
public:
    RootLossError(const std::string& what, cplx seed, cplx last);
    cplx seed() const noexcept { return seed_; }
    cplx last_iterate() const noexcept { return last_; }

private:
    cplx seed_;
    cplx last_;
};

/// f(gamma) with lambda = i gamma^2 and z = 2 i gamma / (2 - alpha). Weak branch only.
cplx char_function(cplx gamma, const ModelConfig& cfg);

/// gamma_k^0 = -(2 - alpha)/2 i (k + nu/2 + 5/4) pi.
cplx asymptotic_root(int k, double alpha_deg);

inline constexpr int kAsymptoticThreshold = 5;

/// Finite part of the large-k expansion of lambda_k.
cplx asymptotic_eigenvalue(int k, const ModelConfig& cfg, const AsymptoticConstants& consts,
                           int threshold = kAsymptoticThreshold);

struct RefineOptions {
    double tolerance = 1e-10;
    int max_iterations = 50;
};

/// Newton with a central-difference derivative, Muller on stagnation.
EigenvalueEstimate refine_root(cplx seed, const ModelConfig& cfg, int k, const RefineOptions& opts = {});

/// Refined lambda_k for k_min..k_max, sorted by |Im lambda|.
std::vector<EigenvalueEstimate> compute_spectrum(int k_min, int k_max, const ModelConfig& cfg);

inline constexpr int kMaxDenseNx = 512;
inline constexpr int kMaxDenseNxi = 256;

/// Dense generator for the given grid and quadrature (size guarded).
Eigen::MatrixXcd assemble_discrete_generator(const ModelConfig& cfg, const DegenerateGrid& grid,
                                             const DiffusiveQuadrature* quad);

/// Eigenvalues of a dense matrix (LAPACK zgeev), sorted by |Im| then Re.
std::vector<cplx> dense_eigenvalues(const Eigen::MatrixXcd& m);

/// Eigenvalues of the generator, split into the psi part and the memory part. The memory
/// eigenvalues are those matched one-to-one to the memory diagonal. Without feedback into
/// psi (rho = 0) the generator is block triangular; the psi block is then solved on its own in
/// extended precision and the memory eigenvalues are the diagonal itself.
struct GeneratorSpectrum {
    std::vector<cplx> psi;
    std::vector<cplx> memory;
};
GeneratorSpectrum generator_spectrum(const DiscreteGenerator& gen);

struct ResolventEstimate {
    double lambda = 0.0;
    double norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool ill_conditioned = false;  ///< i lambda is numerically on the spectrum
};

inline constexpr double kResolventWarnLevel = 1e12;

/// ||(i lambda - G)^{-1}|| in the energy inner product, by power iteration on
/// R^* R (equivalently inverse iteration for the smallest singular value of i lambda - G).
ResolventEstimate resolvent_norm(double lambda_im, const DiscreteGenerator& gen, int max_iterations = 500,
                                 double tol = 1e-10);

/// Golden-section maximization of the resolvent norm on [lo, hi].
ResolventEstimate resolvent_peak(const DiscreteGenerator& gen, double lo, double hi, double tol = 1e-7);

/// Peak next to each eigenvalue, searched within max(2|Re|, 1e-6|Im|) of its imaginary part.
std::vector<ResolventEstimate> resolvent_peaks(const DiscreteGenerator& gen, std::span<const cplx> eigenvalues);

/// Entry of values closest to target.
cplx nearest_eigenvalue(std::span<const cplx> values, cplx target);

std::vector<ResolventEstimate> resolvent_sweep(const DiscreteGenerator& gen, std::span<const double> lambdas);

}  // namespace fracdamp
