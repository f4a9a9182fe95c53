#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracdamp/config.hpp"

using namespace fracdamp;

namespace {

std::string field_of(auto&& fn) {
    try {
        fn();
    } catch (const ParameterError& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST(DeriveZeta, Examples) {
    EXPECT_NEAR(derive_zeta(1.0, 0.5), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_EQ(derive_zeta(1.0, 1.0), 0.0);
    EXPECT_NEAR(derive_zeta(2.0, 0.25), 0.4501582, 1e-7);
}

TEST(DeriveZeta, LinearInRho) {
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.99}) {
        for (double rho : {0.3, 1.0, 7.5}) {
            EXPECT_DOUBLE_EQ(derive_zeta(2.0 * rho, a), 2.0 * derive_zeta(rho, a));
        }
    }
}

TEST(DeriveZeta, RejectsOutOfRange) {
    EXPECT_EQ(field_of([] { derive_zeta(1.0, 0.0); }), "alpha_frac");
    EXPECT_EQ(field_of([] { derive_zeta(1.0, 1.2); }), "alpha_frac");
    EXPECT_EQ(field_of([] { derive_zeta(-1.0, 0.5); }), "rho");
    EXPECT_EQ(field_of([] { derive_zeta(NAN, 0.5); }), "rho");
}

TEST(ComputeMTau, ExamplesAndBranch) {
    EXPECT_EQ(compute_m_tau(0.5), 0.5);
    EXPECT_EQ(branch_for(compute_m_tau(0.5)), LeftBoundary::Dirichlet);
    EXPECT_EQ(compute_m_tau(1.0), 1.0);
    EXPECT_EQ(branch_for(compute_m_tau(1.0)), LeftBoundary::NeumannFlux);
    EXPECT_EQ(field_of([] { compute_m_tau(2.0); }), "alpha_deg");
    EXPECT_EQ(field_of([] { compute_m_tau(-0.1); }), "alpha_deg");
}

TEST(ComputeMTau, BranchSplitsExactlyAtOne) {
    for (int i = 0; i < 200; ++i) {
        const double m = i * 0.01;
        EXPECT_EQ(branch_for(m), m < 1.0 ? LeftBoundary::Dirichlet : LeftBoundary::NeumannFlux) << m;
    }
    EXPECT_EQ(branch_for(std::nextafter(1.0, 0.0)), LeftBoundary::Dirichlet);
    EXPECT_EQ(to_string(LeftBoundary::Dirichlet), "DirichletLeft");
    EXPECT_EQ(to_string(LeftBoundary::NeumannFlux), "NeumannFluxLeft");
}

TEST(ValidateConfig, DefaultModel) {
    const auto v = validate_config(make_model_config(0.5, 0.5, 1.0, 1.0), GridConfig{});
    EXPECT_NEAR(v.model.zeta, 1.0 / std::numbers::pi, 1e-15);
    EXPECT_EQ(v.model.m_tau, 0.5);
    EXPECT_EQ(v.model.bc_branch, LeftBoundary::Dirichlet);
    EXPECT_FALSE(v.model.direct_damping());
    EXPECT_TRUE(make_model_config(0.5, 1.0, 1.0, 1.0).direct_damping());
}

TEST(ValidateConfig, ReportsModelField) {
    EXPECT_EQ(field_of([] { make_model_config(0.5, 0.0, 1.0, 1.0); }), "alpha_frac");
    EXPECT_EQ(field_of([] { make_model_config(0.5, 0.5, 1.0, -1.0); }), "rho");
    EXPECT_EQ(field_of([] { make_model_config(0.5, 0.5, -1.0, 1.0); }), "wp");
    EXPECT_EQ(field_of([] { make_model_config(2.5, 0.5, 1.0, 1.0); }), "alpha_deg");
}

TEST(ValidateConfig, ReportsGridField) {
    const ModelConfig m = make_model_config(0.5, 0.5, 1.0, 1.0);
    auto with = [&](auto mutate) {
        GridConfig g;
        mutate(g);
        return field_of([&] { validate_config(m, g); });
    };
    EXPECT_EQ(with([](GridConfig& g) { g.n_x = 7; }), "n_x");
    EXPECT_EQ(with([](GridConfig& g) { g.n_xi = 15; }), "n_xi");
    EXPECT_EQ(with([](GridConfig& g) { g.xi_min = 0.0; }), "xi_min");
    EXPECT_EQ(with([](GridConfig& g) { g.xi_max = 1e-5; }), "xi_max");
    EXPECT_EQ(with([](GridConfig& g) { g.dt = 0.0; }), "dt");
    EXPECT_EQ(with([](GridConfig& g) { g.t_final = -1.0; }), "t_final");
    EXPECT_EQ(with([](GridConfig& g) { g.grading = 0.5; }), "grading");
    EXPECT_EQ(with([](GridConfig& g) { g.output_every = 0; }), "output_every");
    EXPECT_EQ(with([](GridConfig&) {}), "<no error>");
}
