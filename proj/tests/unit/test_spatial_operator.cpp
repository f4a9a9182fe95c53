#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fracdamp/spatial_operator.hpp"

using namespace fracdamp;
using std::numbers::pi;

namespace {

double first_dirichlet_eigenvalue(int n_x, double alpha, CellCoefficient c) {
    const auto grid = build_grid(n_x, alpha, 1.0, c);
    const auto op = assemble_operator(grid, LeftBoundary::Dirichlet, RightBoundary::Dirichlet);
    return undamped_modes(op).values(0);
}

std::vector<std::complex<double>> random_vector(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    std::vector<std::complex<double>> v(n);
    for (auto& e : v) e = {d(gen), d(gen)};
    return v;
}

}  // namespace

TEST(BuildGrid, Examples) {
    const auto flat = build_grid(8, 0.0);
    for (double t : flat.tau_mid) EXPECT_EQ(t, 1.0);
    const auto lin = build_grid(8, 1.0);
    EXPECT_DOUBLE_EQ(lin.tau_mid[0], 1.0 / 16.0);
    EXPECT_EQ(lin.h, 1.0 / 8.0);
    EXPECT_EQ(lin.x.front(), 0.0);
    EXPECT_EQ(lin.x.back(), 1.0);
    double total = 0.0;
    for (double m : lin.mass) total += m;
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_EQ(lin.mass.front(), lin.h / 2.0);
    EXPECT_THROW(build_grid(7, 0.5), ParameterError);
}

TEST(BuildGrid, CellCoefficients) {
    const auto mid = build_grid(16, 0.5, 1.0, CellCoefficient::Midpoint);
    for (int i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(mid.tau_mid[i], std::pow((i + 0.5) / 16.0, 0.5));
    const auto harm = build_grid(16, 0.5);
    EXPECT_NEAR(harm.tau_mid[0], 0.5 * std::pow(1.0 / 16.0, 0.5), 1e-15);
    for (int i = 1; i < 16; ++i) {
        EXPECT_GT(harm.tau_mid[i], std::pow(i / 16.0, 0.5));
        EXPECT_LT(harm.tau_mid[i], std::pow((i + 1) / 16.0, 0.5));
    }
    EXPECT_EQ(default_cell_coefficient(0.5), CellCoefficient::HarmonicMean);
    EXPECT_EQ(default_cell_coefficient(1.0), CellCoefficient::Midpoint);
    EXPECT_THROW(build_grid(16, 1.2, 1.0, CellCoefficient::HarmonicMean), ParameterError);
}

TEST(BuildGrid, Graded) {
    const auto g = build_grid(32, 0.9, 2.0);
    EXPECT_DOUBLE_EQ(g.x[16], 0.25);
    for (int i = 0; i < 32; ++i) EXPECT_GT(g.dx[i], 0.0);
    EXPECT_LT(g.dx.front(), g.dx.back());
}

TEST(AssembleOperator, LaplacianEigenvalues) {
    const double e64 = first_dirichlet_eigenvalue(64, 0.0, CellCoefficient::Midpoint);
    const double e128 = first_dirichlet_eigenvalue(128, 0.0, CellCoefficient::Midpoint);
    const double e256 = first_dirichlet_eigenvalue(256, 0.0, CellCoefficient::Midpoint);
    EXPECT_LT(std::abs(e256 - pi * pi) / (pi * pi), 0.01);
    const double ratio = (e64 - pi * pi) / (e128 - pi * pi);
    EXPECT_NEAR(ratio, 4.0, 0.05);
    EXPECT_NEAR((e128 - pi * pi) / (e256 - pi * pi), 4.0, 0.05);
}

TEST(AssembleOperator, DegenerateEigenvaluesMatchBesselZeros) {
    const double alpha = 0.5;
    const double nu = 1.0 / 3.0;
    const auto grid = build_grid(512, alpha);
    const auto modes = undamped_modes(assemble_operator(grid, LeftBoundary::Dirichlet, RightBoundary::Dirichlet));
    for (int n = 1; n <= 5; ++n) {
        const double j = boost::math::cyl_bessel_j_zero(nu, n);
        const double mu = 0.5625 * j * j;
        EXPECT_LT(std::abs(modes.values(n - 1) - mu) / mu, 1e-4) << n;
    }
}

TEST(AssembleOperator, HarmonicCoefficientConvergesAtSecondOrder) {
    const double j = boost::math::cyl_bessel_j_zero(1.0 / 3.0, 1);
    const double mu = 0.5625 * j * j;
    const double e1 = std::abs(first_dirichlet_eigenvalue(128, 0.5, CellCoefficient::HarmonicMean) - mu);
    const double e2 = std::abs(first_dirichlet_eigenvalue(256, 0.5, CellCoefficient::HarmonicMean) - mu);
    EXPECT_GT(e1 / e2, 3.5);
    const double m1 = std::abs(first_dirichlet_eigenvalue(128, 0.5, CellCoefficient::Midpoint) - mu);
    const double m2 = std::abs(first_dirichlet_eigenvalue(512, 0.5, CellCoefficient::Midpoint) - mu);
    EXPECT_LT(m2 / mu, 0.02);
    EXPECT_GT(m1, 10.0 * e1);
}

TEST(AssembleOperator, IntegrationByParts) {
    struct Case {
        double alpha;
        LeftBoundary left;
        RightBoundary right;
    };
    for (const auto& c : {Case{0.5, LeftBoundary::Dirichlet, RightBoundary::Dirichlet},
                          Case{0.5, LeftBoundary::Dirichlet, RightBoundary::FluxSlot},
                          Case{1.5, LeftBoundary::NeumannFlux, RightBoundary::FluxSlot},
                          Case{1.0, LeftBoundary::NeumannFlux, RightBoundary::Dirichlet}}) {
        const auto grid = build_grid(64, c.alpha);
        const auto op = assemble_operator(grid, c.left, c.right);
        const auto psi = random_vector(op.size(), 7);
        const auto q = op.quadratic_form(psi);
        const double form = weighted_dirichlet_form(grid, op, psi);
        EXPECT_LE(q.real(), 0.0);
        EXPECT_NEAR(q.real(), form, 1e-12 * std::abs(form));
        EXPECT_NEAR(q.imag(), 0.0, 1e-10 * std::abs(form));
    }
}

TEST(AssembleOperator, MassSymmetricAndBranchStructure) {
    const auto grid = build_grid(40, 1.5);
    const auto op = assemble_operator(grid, LeftBoundary::NeumannFlux, RightBoundary::FluxSlot);
    EXPECT_EQ(op.size(), 41u);
    EXPECT_EQ(op.node_offset, 0u);
    EXPECT_TRUE(op.has_flux_slot);
    EXPECT_NEAR(op.slot_scale, 2.0 / grid.h, 1e-10);
    for (std::size_t i = 0; i + 1 < op.size(); ++i) {
        EXPECT_NEAR(op.mass[i] * op.upper[i], op.mass[i + 1] * op.lower[i + 1], 1e-12);
    }
    std::vector<std::complex<double>> ones(op.size(), 1.0);
    std::vector<std::complex<double>> out(op.size());
    op.apply(ones, out);
    for (const auto& v : out) EXPECT_NEAR(std::abs(v), 0.0, 1e-9);

    const auto dir = assemble_operator(build_grid(40, 0.5), LeftBoundary::Dirichlet, RightBoundary::Dirichlet);
    EXPECT_EQ(dir.size(), 39u);
    EXPECT_EQ(dir.node_offset, 1u);
    EXPECT_FALSE(dir.has_flux_slot);
}

TEST(UndampedModes, MassOrthonormalEigenpairs) {
    const auto op = assemble_operator(build_grid(48, 0.5), LeftBoundary::Dirichlet, RightBoundary::FluxSlot);
    const auto modes = undamped_modes(op);
    const Eigen::MatrixXd a = op.dense();
    Eigen::VectorXd m(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) m(static_cast<Eigen::Index>(i)) = op.mass[i];
    const Eigen::MatrixXd gram = modes.vectors.transpose() * m.asDiagonal() * modes.vectors;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).norm(), 1e-10);
    for (Eigen::Index k = 0; k < modes.values.size(); ++k) {
        const Eigen::VectorXd r = a * modes.vectors.col(k) + modes.values(k) * modes.vectors.col(k);
        EXPECT_LT(r.norm(), 1e-8 * std::max(1.0, modes.values(k)));
        if (k > 0) EXPECT_GT(modes.values(k), modes.values(k - 1));
    }
    EXPECT_GT(modes.values(0), 0.0);
}

TEST(ReferenceEigenvalues, Examples) {
    const auto flat = reference_eigenvalues(0.0, 4);
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(flat[n - 1], n * n * pi * pi, 1e-9);
    const auto half = reference_eigenvalues(0.5, 6);
    const double j = boost::math::cyl_bessel_j_zero(1.0 / 3.0, 1);
    EXPECT_NEAR(half[0], 0.5625 * j * j, 1e-10);
    for (std::size_t n = 1; n < half.size(); ++n) EXPECT_GT(half[n], half[n - 1]);
    EXPECT_THROW(reference_eigenvalues(1.2, 3), std::domain_error);
    EXPECT_THROW(reference_eigenvalues(0.5, 0), std::invalid_argument);
}

TEST(WriteCoo, TripletCount) {
    const auto op = assemble_operator(build_grid(8, 0.5), LeftBoundary::Dirichlet, RightBoundary::FluxSlot);
    std::ostringstream os;
    write_coo(os, op);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.front(), '#');
    int count = 0;
    while (std::getline(in, line)) ++count;
    EXPECT_EQ(count, static_cast<int>(3 * op.size() - 2));
}
