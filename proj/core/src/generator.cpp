#include "fracdamp/generator.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

namespace fracdamp {

namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

}  // namespace

void DiscreteGenerator::apply(std::span<const cplx> u, std::span<cplx> out) const {
    const std::size_t n = n_psi();
    const std::size_t m = n_memory();
    if (u.size() != n + m || out.size() != n + m) throw ShapeError("DiscreteGenerator::apply: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = diag[i] * u[i];
        if (i > 0) v += lower[i] * u[i - 1];
        if (i + 1 < n) v += upper[i] * u[i + 1];
        out[i] = v;
    }
    const cplx psi_last = u[n - 1];
    cplx flux = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        flux += row_coupling[j] * u[n + j];
        out[n + j] = col_coupling[j] * psi_last + memory_diag[j] * u[n + j];
    }
    out[n - 1] += flux;
}

DiscreteGenerator DiscreteGenerator::conjugate_transpose() const {
    DiscreteGenerator h;
    const std::size_t n = n_psi();
    h.lower.assign(n, 0.0);
    h.upper.assign(n, 0.0);
    h.diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        h.diag[i] = std::conj(diag[i]);
        if (i > 0) h.lower[i] = std::conj(upper[i - 1]);
        if (i + 1 < n) h.upper[i] = std::conj(lower[i + 1]);
    }
    for (std::size_t j = 0; j < n_memory(); ++j) {
        h.row_coupling.push_back(std::conj(col_coupling[j]));
        h.col_coupling.push_back(std::conj(row_coupling[j]));
        h.memory_diag.push_back(std::conj(memory_diag[j]));
    }
    h.weights = weights;
    return h;
}

Eigen::MatrixXcd DiscreteGenerator::dense() const {
    const auto n = static_cast<Eigen::Index>(n_psi());
    const auto m = static_cast<Eigen::Index>(n_memory());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n + m, n + m);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i, i) = diag[i];
        if (i > 0) g(i, i - 1) = lower[i];
        if (i + 1 < n) g(i, i + 1) = upper[i];
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        g(n - 1, n + j) = row_coupling[j];
        g(n + j, n - 1) = col_coupling[j];
        g(n + j, n + j) = memory_diag[j];
    }
    return g;
}

Eigen::MatrixXcd DiscreteGenerator::energy_orthonormal_dense() const {
    Eigen::MatrixXcd g = dense();
    const auto total = g.rows();
    Eigen::VectorXd s(total);
    for (Eigen::Index i = 0; i < total; ++i) s(i) = std::sqrt(weights[i]);
    for (Eigen::Index i = 0; i < total; ++i) {
        for (Eigen::Index j = 0; j < total; ++j) g(i, j) *= s(i) / s(j);
    }
    return g;
}

DiscreteGenerator build_generator(const ModelConfig& model, const OperatorMatrix& op,
                                  const DiffusiveQuadrature* quad) {
    if (!op.has_flux_slot) throw std::invalid_argument("build_generator: operator needs the x = 1 flux slot");
    const std::size_t n = op.size();
    const cplx I(0.0, 1.0);
    DiscreteGenerator g;
    g.lower.resize(n);
    g.diag.resize(n);
    g.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.lower[i] = I * op.lower[i];
        g.diag[i] = I * op.diag[i];
        g.upper[i] = I * op.upper[i];
    }
    g.weights.assign(op.mass.begin(), op.mass.end());

    if (model.direct_damping()) {
        // psi_L' gets i * slot_scale * (i rho psi_L)
        g.diag[n - 1] += -model.rho * op.slot_scale;
        return g;
    }
    if (quad == nullptr) throw std::invalid_argument("build_generator: fractional damping needs a quadrature");
    if (quad->alpha_frac != model.alpha_frac || quad->wp != model.wp) {
        throw std::invalid_argument("build_generator: quadrature built for different (alpha_frac, wp)");
    }
    // zeta = 0: memory weighted by the bare quadrature.
    const double theta_scale = model.zeta > 0.0 ? model.zeta : 1.0;
    for (std::size_t j = 0; j < quad->size(); ++j) {
        const double w = quad->weights[j];
        const double e = quad->eta_values[j];
        const double xi = quad->nodes[j];
        g.row_coupling.push_back(-model.zeta * op.slot_scale * w * e);
        g.col_coupling.push_back(e);
        g.memory_diag.push_back(-(xi * xi + model.wp));
        g.weights.push_back(theta_scale * w);
    }
    return g;
}

ShiftedSolver::ShiftedSolver(const DiscreteGenerator& gen, cplx shift, cplx kappa)
    : n_psi_(gen.n_psi()), kappa_(kappa) {
    const std::size_t n = n_psi_;
    if (n == 0) throw ShapeError("ShiftedSolver: empty generator");
    d_.resize(n);
    dl_.resize(n > 1 ? n - 1 : 1);
    du_.resize(n > 1 ? n - 1 : 1);
    du2_.resize(n > 2 ? n - 2 : 1);
    ipiv_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d_[i] = shift - kappa * gen.diag[i];
        if (i + 1 < n) {
            du_[i] = -kappa * gen.upper[i];
            dl_[i] = -kappa * gen.lower[i + 1];
        }
    }
    const std::size_t m = gen.n_memory();
    inv_mem_.resize(m);
    r_ = gen.row_coupling;
    q_ = gen.col_coupling;
    cplx schur = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        inv_mem_[j] = 1.0 / (shift - kappa * gen.memory_diag[j]);
        schur += r_[j] * q_[j] * inv_mem_[j];
    }
    d_[n - 1] -= kappa * kappa * schur;

    const lapack_int info = LAPACKE_zgttrf(static_cast<lapack_int>(n), lp(dl_.data()), lp(d_.data()),
                                           lp(du_.data()), lp(du2_.data()), ipiv_.data());
    if (info != 0) {
        throw NumericalError("ShiftedSolver: tridiagonal factorization breakdown (info = " +
                             std::to_string(info) + ")");
    }
}

void ShiftedSolver::solve(std::span<cplx> b) const {
    const std::size_t n = n_psi_;
    const std::size_t m = inv_mem_.size();
    if (b.size() != n + m) throw ShapeError("ShiftedSolver::solve: size mismatch");
    cplx extra = 0.0;
    for (std::size_t j = 0; j < m; ++j) extra += r_[j] * b[n + j] * inv_mem_[j];
    b[n - 1] += kappa_ * extra;
    const lapack_int info =
        LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n), 1, lp(const_cast<cplx*>(dl_.data())),
                       lp(const_cast<cplx*>(d_.data())), lp(const_cast<cplx*>(du_.data())),
                       lp(const_cast<cplx*>(du2_.data())), const_cast<int*>(ipiv_.data()), lp(b.data()),
                       static_cast<lapack_int>(n));
    if (info != 0) throw NumericalError("ShiftedSolver: tridiagonal solve failed");
    const cplx psi_last = b[n - 1];
    for (std::size_t j = 0; j < m; ++j) b[n + j] = (b[n + j] + kappa_ * q_[j] * psi_last) * inv_mem_[j];
}

}  // namespace fracdamp
