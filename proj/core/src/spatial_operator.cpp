#include "fracdamp/spatial_operator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "fracdamp/bessel.hpp"

namespace fracdamp {

CellCoefficient default_cell_coefficient(double alpha_deg) {
    return alpha_deg < 1.0 ? CellCoefficient::HarmonicMean : CellCoefficient::Midpoint;
}

DegenerateGrid build_grid(int n_x, double alpha_deg, double grading) {
    return build_grid(n_x, alpha_deg, grading, default_cell_coefficient(alpha_deg));
}

DegenerateGrid build_grid(int n_x, double alpha_deg, double grading, CellCoefficient coefficient) {
    if (coefficient == CellCoefficient::HarmonicMean && !(alpha_deg < 1.0)) {
        throw ParameterError("alpha_deg", "harmonic cell coefficient needs alpha_deg < 1");
    }
    if (n_x < 8) throw ParameterError("n_x", "must be >= 8");
    compute_m_tau(alpha_deg);
    if (!(grading >= 1.0)) throw ParameterError("grading", "must be >= 1");

    DegenerateGrid g;
    g.alpha_deg = alpha_deg;
    g.h = 1.0 / n_x;
    g.x.resize(n_x + 1);
    for (int i = 0; i <= n_x; ++i) {
        const double s = static_cast<double>(i) / n_x;
        g.x[i] = grading == 1.0 ? s : std::pow(s, grading);
    }
    g.x.front() = 0.0;
    g.x.back() = 1.0;
    g.tau_mid.resize(n_x);
    g.dx.resize(n_x);
    for (int i = 0; i < n_x; ++i) {
        g.dx[i] = g.x[i + 1] - g.x[i];
        if (alpha_deg == 0.0) {
            g.tau_mid[i] = 1.0;
        } else if (coefficient == CellCoefficient::Midpoint) {
            g.tau_mid[i] = std::pow(0.5 * (g.x[i] + g.x[i + 1]), alpha_deg);
        } else {
            const double p = 1.0 - alpha_deg;
            g.tau_mid[i] = g.dx[i] * p / (std::pow(g.x[i + 1], p) - std::pow(g.x[i], p));
        }
    }
    g.mass.assign(n_x + 1, 0.0);
    for (int i = 0; i < n_x; ++i) {
        g.mass[i] += 0.5 * g.dx[i];
        g.mass[i + 1] += 0.5 * g.dx[i];
    }
    return g;
}

OperatorMatrix assemble_operator(const DegenerateGrid& grid, LeftBoundary left, RightBoundary right) {
    const int cells = grid.n_cells();
    const int first = left == LeftBoundary::Dirichlet ? 1 : 0;
    const int last = right == RightBoundary::Dirichlet ? cells - 1 : cells;
    const auto n = static_cast<std::size_t>(last - first + 1);

    OperatorMatrix op;
    op.node_offset = static_cast<std::size_t>(first);
    op.lower.assign(n, 0.0);
    op.diag.assign(n, 0.0);
    op.upper.assign(n, 0.0);
    op.mass.resize(n);
    for (int node = first; node <= last; ++node) {
        const auto r = static_cast<std::size_t>(node - first);
        const double m = grid.mass[node];
        op.mass[r] = m;
        if (node < cells) {  // flux through the right face
            const double c = grid.tau_mid[node] / grid.dx[node];
            op.diag[r] -= c / m;
            if (node + 1 <= last) op.upper[r] = c / m;
        }
        if (node > 0) {  // flux through the left face; F_{-1/2} = 0 for node 0
            const double c = grid.tau_mid[node - 1] / grid.dx[node - 1];
            op.diag[r] -= c / m;
            if (node - 1 >= first) op.lower[r] = c / m;
        }
    }
    if (right == RightBoundary::FluxSlot) {
        op.has_flux_slot = true;
        op.slot_scale = 1.0 / op.mass.back();
    }
    return op;
}

void OperatorMatrix::apply(std::span<const std::complex<double>> psi,
                           std::span<std::complex<double>> out) const {
    const std::size_t n = size();
    if (psi.size() != n || out.size() != n) throw std::invalid_argument("OperatorMatrix::apply: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> v = diag[i] * psi[i];
        if (i > 0) v += lower[i] * psi[i - 1];
        if (i + 1 < n) v += upper[i] * psi[i + 1];
        out[i] = v;
    }
}

std::complex<double> OperatorMatrix::quadratic_form(std::span<const std::complex<double>> psi) const {
    std::vector<std::complex<double>> a(size());
    apply(psi, a);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += mass[i] * std::conj(psi[i]) * a[i];
    return acc;
}

Eigen::MatrixXd OperatorMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = diag[i];
        if (i > 0) a(i, i - 1) = lower[i];
        if (i + 1 < n) a(i, i + 1) = upper[i];
    }
    return a;
}

double weighted_dirichlet_form(const DegenerateGrid& grid, const OperatorMatrix& op,
                               std::span<const std::complex<double>> psi) {
    auto node_value = [&](int node) -> std::complex<double> {
        const auto off = static_cast<int>(op.node_offset);
        if (node < off || node >= off + static_cast<int>(op.size())) return 0.0;
        return psi[static_cast<std::size_t>(node - off)];
    };
    double acc = 0.0;
    for (int c = 0; c < grid.n_cells(); ++c) {
        acc += grid.tau_mid[c] * std::norm(node_value(c + 1) - node_value(c)) / grid.dx[c];
    }
    return -acc;
}

OperatorModes undamped_modes(const OperatorMatrix& op) {
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::VectorXd d(n);
    Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i) = -op.diag[i];
        // symmetrized off-diagonal: c / sqrt(m_i m_{i+1}) with c = upper_i m_i
        if (i + 1 < n) sub(i) = -op.upper[i] * std::sqrt(op.mass[i] / op.mass[i + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("undamped_modes: eigensolver failed");
    OperatorModes modes;
    modes.values = es.eigenvalues();
    modes.vectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i) modes.vectors.row(i) /= std::sqrt(op.mass[i]);
    return modes;
}

std::vector<double> reference_eigenvalues(double alpha_deg, int n) {
    compute_m_tau(alpha_deg);
    if (branch_for(alpha_deg) != LeftBoundary::Dirichlet) {
        throw std::domain_error("reference_eigenvalues: only the weakly degenerate branch has a Bessel reference");
    }
    if (n < 1) throw std::invalid_argument("reference_eigenvalues: n must be >= 1");
    const double nu = (1.0 - alpha_deg) / (2.0 - alpha_deg);
    const double scale = (2.0 - alpha_deg) / 2.0;
    std::vector<double> mu;
    mu.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const double j = bessel_j_zero(nu, k);
        mu.push_back(scale * scale * j * j);
    }
    return mu;
}

void write_coo(std::ostream& os, const OperatorMatrix& op) {
    os << "# row col value  (active unknowns, node = row + " << op.node_offset << ")\n";
    os << std::setprecision(17);
    const std::size_t n = op.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) os << i << ' ' << i - 1 << ' ' << op.lower[i] << '\n';
        os << i << ' ' << i << ' ' << op.diag[i] << '\n';
        if (i + 1 < n) os << i << ' ' << i + 1 << ' ' << op.upper[i] << '\n';
    }
}

}  // namespace fracdamp
