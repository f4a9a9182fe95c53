#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "fracdamp/evolution.hpp"
#include "fracdamp/generator.hpp"

using namespace fracdamp;

namespace {

AugmentedSystem small_system(double alpha_deg, double alpha_frac, double rho = 1.0, int n_x = 32) {
    GridConfig grid;
    grid.n_x = n_x;
    grid.n_xi = 200;
    return build_system(validate_config(make_model_config(alpha_deg, alpha_frac, 1.0, rho), grid));
}

Eigen::VectorXcd random_vector(Eigen::Index n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {d(gen), d(gen)};
    return v;
}

}  // namespace

TEST(DiscreteGenerator, ApplyMatchesDense) {
    for (double af : {0.25, 0.5, 1.0}) {
        const auto sys = small_system(0.5, af);
        const auto& g = sys.generator;
        const Eigen::MatrixXcd dense = g.dense();
        ASSERT_EQ(dense.rows(), static_cast<Eigen::Index>(g.size()));
        const Eigen::VectorXcd u = random_vector(dense.rows(), 3);
        Eigen::VectorXcd out(dense.rows());
        g.apply({u.data(), static_cast<std::size_t>(u.size())}, {out.data(), static_cast<std::size_t>(out.size())});
        EXPECT_LT((out - dense * u).norm(), 1e-12 * (dense * u).norm()) << af;
    }
}

TEST(DiscreteGenerator, Structure) {
    const auto sys = small_system(0.5, 0.5);
    const auto& g = sys.generator;
    EXPECT_EQ(g.n_psi(), 32u);
    EXPECT_EQ(g.n_memory(), 200u);
    EXPECT_EQ(g.weights.size(), g.size());
    for (std::size_t j = 0; j < g.n_memory(); ++j) {
        const double xi = sys.quad->nodes[j];
        EXPECT_DOUBLE_EQ(g.memory_diag[j].real(), -(xi * xi + 1.0));
        EXPECT_DOUBLE_EQ(g.col_coupling[j].real(), sys.quad->eta_values[j]);
    }
    const auto direct = small_system(0.5, 1.0);
    EXPECT_EQ(direct.generator.n_memory(), 0u);
    EXPECT_NEAR(direct.generator.diag.back().real(), -1.0 * direct.op.slot_scale, 1e-12);
}

TEST(DiscreteGenerator, DissipativeInEnergyInnerProduct) {
    for (double ad : {0.5, 1.5}) {
        for (double af : {0.25, 0.75, 1.0}) {
            const auto sys = small_system(ad, af);
            const Eigen::MatrixXcd b = sys.generator.energy_orthonormal_dense();
            const Eigen::MatrixXcd herm = 0.5 * (b + b.adjoint());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
            EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-10 * b.norm()) << ad << " " << af;
        }
    }
    const auto undamped = small_system(0.5, 0.5, 0.0);
    const Eigen::MatrixXcd b = undamped.generator.energy_orthonormal_dense();
    const Eigen::MatrixXcd psi_block = b.topLeftCorner(32, 32);
    EXPECT_LT((psi_block + psi_block.adjoint()).norm(), 1e-10 * psi_block.norm());
}

TEST(DiscreteGenerator, ConjugateTransposeMatchesDense) {
    const auto sys = small_system(0.5, 0.5);
    const Eigen::MatrixXcd a = sys.generator.dense();
    const Eigen::MatrixXcd at = sys.generator.conjugate_transpose().dense();
    EXPECT_LT((at - a.adjoint()).norm(), 1e-12 * a.norm());
}

TEST(ShiftedSolver, MatchesDenseSolve) {
    const auto sys = small_system(0.5, 0.5);
    const Eigen::MatrixXcd g = sys.generator.dense();
    const auto n = g.rows();
    for (auto [s, kappa] : {std::pair<cplx, cplx>{1.0, 0.01}, {cplx(0.0, 5.0), 1.0}, {cplx(0.1, -40.0), 1.0}}) {
        const Eigen::VectorXcd b = random_vector(n, 11);
        Eigen::VectorXcd x = b;
        ShiftedSolver solver(sys.generator, s, kappa);
        solver.solve({x.data(), static_cast<std::size_t>(n)});
        const Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - kappa * g;
        EXPECT_LT((m * x - b).norm(), 1e-10 * b.norm()) << s << " " << kappa;
    }
}

TEST(ShiftedSolver, AdjointSolve) {
    const auto sys = small_system(0.25, 0.75);
    const auto adj = sys.generator.conjugate_transpose();
    const Eigen::MatrixXcd g = adj.dense();
    const auto n = g.rows();
    const cplx s(0.0, -30.0);
    const Eigen::VectorXcd b = random_vector(n, 5);
    Eigen::VectorXcd x = b;
    ShiftedSolver(adj, s, 1.0).solve({x.data(), static_cast<std::size_t>(n)});
    EXPECT_LT(((s * Eigen::MatrixXcd::Identity(n, n) - g) * x - b).norm(), 1e-10 * b.norm());
}

TEST(BuildGenerator, Errors) {
    const auto model = make_model_config(0.5, 0.5, 1.0, 1.0);
    const auto grid = build_grid(16, 0.5);
    const auto pinned = assemble_operator(grid, LeftBoundary::Dirichlet, RightBoundary::Dirichlet);
    const auto q = build_quadrature(0.5, 1.0, 200, 1e-4, 1e4);
    EXPECT_THROW(build_generator(model, pinned, &q), std::invalid_argument);
    const auto op = assemble_operator(grid, LeftBoundary::Dirichlet);
    EXPECT_THROW(build_generator(model, op, nullptr), std::invalid_argument);
    const auto other = build_quadrature(0.25, 1.0, 200, 1e-4, 1e4);
    EXPECT_THROW(build_generator(model, op, &other), std::invalid_argument);
}
