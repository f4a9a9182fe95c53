#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracdamp/config.hpp"
#include "fracdamp/diffusive_kernel.hpp"
#include "fracdamp/spatial_operator.hpp"

namespace fracdamp {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Discrete generator of the augmented system in arrowhead form.
 *
 *     [ T              e_L r^T ] [ psi   ]
 *     [ q e_L^T        diag(d) ] [ theta ]
 *
 * T = i A on the active psi unknowns, L is the x = 1 row. The memory block is diagonal
 * (d_j = -(xi_j^2 + wp)) and talks to psi only through psi(1) and the boundary flux
 * (tau psi_x)(1) = i zeta sum_j w_j eta_j theta_j. With alpha_frac = 1 there is no
 * memory block and the flux i rho psi(1) is folded into T_LL.
 */
struct DiscreteGenerator {
    std::vector<cplx> lower;
    std::vector<cplx> diag;
    std::vector<cplx> upper;
    std::vector<cplx> row_coupling;  ///< r_j, entries of row L in the memory columns
    std::vector<cplx> col_coupling;  ///< q_j, entries of column L in the memory rows
    std::vector<cplx> memory_diag;   ///< d_j
    std::vector<double> weights;     ///< energy inner product weights, psi then theta

    std::size_t n_psi() const noexcept { return diag.size(); }
    std::size_t n_memory() const noexcept { return memory_diag.size(); }
    std::size_t size() const noexcept { return n_psi() + n_memory(); }

    void apply(std::span<const cplx> u, std::span<cplx> out) const;

    /// Euclidean conjugate transpose, same block structure.
    DiscreteGenerator conjugate_transpose() const;

    Eigen::MatrixXcd dense() const;

    /// W^{1/2} G W^{-1/2}: unitarily equivalent to G in the energy inner product.
    Eigen::MatrixXcd energy_orthonormal_dense() const;
};

/// Builds the generator from the spatial operator (which must carry a flux slot) and,
/// for alpha_frac < 1, the certified xi-quadrature.
DiscreteGenerator build_generator(const ModelConfig& model, const OperatorMatrix& op,
                                  const DiffusiveQuadrature* quad);

/**
 * Factorization of (s I - kappa G) for fixed complex s and real or complex kappa. The
 * memory block is eliminated onto the psi(1) unknown and the remaining tridiagonal system
 * is LU factorized with partial pivoting.
 */
class ShiftedSolver {
public:
    ShiftedSolver(const DiscreteGenerator& gen, cplx shift, cplx kappa);

    /// Solves in place: b := (s I - kappa G)^{-1} b.
    void solve(std::span<cplx> b) const;

private:
    std::size_t n_psi_ = 0;
    cplx kappa_;
    std::vector<cplx> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
    std::vector<cplx> inv_mem_;  ///< 1 / (s - kappa d_j)
    std::vector<cplx> r_, q_;
};

}  // namespace fracdamp
