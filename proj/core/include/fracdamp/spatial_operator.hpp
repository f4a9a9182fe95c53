#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracdamp/config.hpp"

namespace fracdamp {

/// How tau = x^alpha is reduced to one conductance per cell.
enum class CellCoefficient {
    Midpoint,      ///< tau at the cell midpoint
    HarmonicMean,  ///< dx / int dx/tau; exact flux for x^{1-alpha} profiles, needs alpha < 1
};

/// HarmonicMean on the weakly degenerate branch, Midpoint otherwise.
CellCoefficient default_cell_coefficient(double alpha_deg);

/// Nodes on [0,1] with one effective tau per cell.
struct DegenerateGrid {
    std::vector<double> x;        ///< n_x + 1 nodes, x[0] = 0, x[n_x] = 1
    std::vector<double> tau_mid;  ///< effective tau of the n_x cells
    std::vector<double> dx;       ///< cell widths
    std::vector<double> mass;     ///< dual-cell lengths (trapezoid weights), per node
    double h = 0.0;               ///< nominal spacing 1/n_x
    double alpha_deg = 0.0;

    int n_cells() const noexcept { return static_cast<int>(tau_mid.size()); }
};

/// Uniform grid for grading == 1, otherwise x_i = (i/n_x)^grading.
DegenerateGrid build_grid(int n_x, double alpha_deg, double grading = 1.0);
DegenerateGrid build_grid(int n_x, double alpha_deg, double grading, CellCoefficient coefficient);

enum class RightBoundary {
    FluxSlot,   ///< (tau psi_x)(1) supplied externally (damping coupling); zero when unused
    Dirichlet,  ///< psi(1) = 0, used for reference spectra
};

/**
 * Flux-form discretization of psi -> (tau psi_x)_x over the active unknowns.
 *
 * Row i reads (F_{i+1/2} - F_{i-1/2}) / m_i with F_{i+1/2} = tau_mid_i (psi_{i+1} - psi_i) / dx_i.
 * Pinned nodes (Dirichlet) are eliminated. For the flux slot at x = 1 the outgoing flux is
 * left out of the matrix and enters as slot_scale * F_b on the last row.
 */
struct OperatorMatrix {
    std::vector<double> lower;  ///< lower[i] couples row i to i-1 (lower[0] = 0)
    std::vector<double> diag;
    std::vector<double> upper;  ///< upper[i] couples row i to i+1 (upper[n-1] = 0)
    std::vector<double> mass;   ///< m_i of each active unknown
    std::size_t node_offset = 0;
    bool has_flux_slot = false;
    double slot_scale = 0.0;    ///< 1 / m_last when has_flux_slot

    std::size_t size() const noexcept { return diag.size(); }
    std::size_t slot_row() const noexcept { return diag.size() - 1; }

    void apply(std::span<const std::complex<double>> psi, std::span<std::complex<double>> out) const;

    /// psi^* M A psi in the mass-weighted inner product.
    std::complex<double> quadratic_form(std::span<const std::complex<double>> psi) const;

    Eigen::MatrixXd dense() const;
};

OperatorMatrix assemble_operator(const DegenerateGrid& grid, LeftBoundary left,
                                 RightBoundary right = RightBoundary::FluxSlot);

/// -sum tau_mid |psi_{i+1} - psi_i|^2 / dx_i over all cells, pinned nodes taken as zero.
double weighted_dirichlet_form(const DegenerateGrid& grid, const OperatorMatrix& op,
                               std::span<const std::complex<double>> psi);

/// Eigenpairs of -A (ascending), eigenvectors orthonormal in the mass inner product.
struct OperatorModes {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  ///< columns are eigenvectors over the active unknowns
};

OperatorModes undamped_modes(const OperatorMatrix& op);

/// mu_n = ((2-alpha)/2)^2 j_{nu,n}^2, nu = (1-alpha)/(2-alpha): Dirichlet spectrum of
/// -(x^alpha psi_x)_x on (0,1) for the weakly degenerate branch.
std::vector<double> reference_eigenvalues(double alpha_deg, int n);

/// Coordinate-format dump, one "row col value" triple per line.
void write_coo(std::ostream& os, const OperatorMatrix& op);

}  // namespace fracdamp
