#include "scemrd/scem.hpp"
#include "scemrd/system_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace scemrd;

namespace {

ReactionDiffusionSystem example1(double eps) {
    Eigen::MatrixXd a(2, 2);
    a << 4, -2, -1, 3;
    return ReactionDiffusionSystem::constant(a, Eigen::Vector2d(1, 2), {eps, eps});
}

ReactionDiffusionSystem example2(double eps) {
    std::vector<ScalarField> coeff = {3, -1, -1, -1, 3, -1, 0, -1, 3};
    std::vector<ScalarField> forcing = {0.0, 1.0, ScalarField([](double x) { return x; })};
    return {3, coeff, forcing, {eps, eps, eps}, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
}

}  // namespace

TEST(SystemModel, RejectsBadConstruction) {
    const Eigen::Vector2d z = Eigen::Vector2d::Zero();
    EXPECT_THROW(ReactionDiffusionSystem(1, {1.0}, {1.0}, {1.0}, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)),
                 std::invalid_argument);
    EXPECT_THROW(ReactionDiffusionSystem(2, {1.0, 0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}, z, z), std::invalid_argument);
    EXPECT_THROW(ReactionDiffusionSystem(2, {1.0, 0.0, 0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}, z, z),
                 std::invalid_argument);
    EXPECT_THROW(ReactionDiffusionSystem(2, {1.0, 0.0, 0.0, 1.0}, {1.0, 1.0}, {1.0, -1e-3}, z, z),
                 std::invalid_argument);
    EXPECT_THROW(ReactionDiffusionSystem(2, {1.0, 0.0, 0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, Eigen::Vector3d::Zero(), z),
                 std::invalid_argument);
}

TEST(SystemModel, FieldsEvaluateDeterministically) {
    const auto sys = example2(0.1);
    EXPECT_EQ(sys.forcing(2, 0.37), 0.37);
    EXPECT_EQ(sys.forcing_at(0.25), sys.forcing_at(0.25));
    EXPECT_EQ(sys.coeff(2, 0, 0.5), 0.0);
    EXPECT_EQ(sys.matrix_at(0.1)(1, 2), -1.0);
    const auto other = sys.with_diffusion({1.0, 1.0, 0.5});
    EXPECT_EQ(other.diffusion()[2], 0.5);
    EXPECT_EQ(other.forcing(2, 0.8), 0.8);
}

TEST(ValidateAssumptions, Example1) {
    const auto r = validate_assumptions(example1(0.01));
    EXPECT_TRUE(r.diagonally_dominant);
    EXPECT_TRUE(r.offdiag_nonpositive);
    EXPECT_EQ(r.delta, 2.0);
    EXPECT_EQ(r.sample_count, 1001u);
}

TEST(ValidateAssumptions, Identity) {
    const auto r = validate_assumptions(
        ReactionDiffusionSystem::constant(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 1), {1.0, 1.0}), 11);
    EXPECT_TRUE(r.holds());
    EXPECT_EQ(r.delta, 1.0);
    EXPECT_EQ(r.sample_count, 11u);
}

TEST(ValidateAssumptions, Example2) {
    const auto r = validate_assumptions(example2(0.01));
    EXPECT_TRUE(r.diagonally_dominant);
    EXPECT_TRUE(r.offdiag_nonpositive);
    EXPECT_EQ(r.delta, 1.0);
}

TEST(ValidateAssumptions, DetectsViolations) {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 1;
    auto r = validate_assumptions(ReactionDiffusionSystem::constant(a, Eigen::Vector2d(1, 1), {1.0, 1.0}));
    EXPECT_FALSE(r.diagonally_dominant);
    EXPECT_FALSE(r.offdiag_nonpositive);
    EXPECT_EQ(r.delta, 3.0);

    a << 2, -2, -1, 3;  // row 0 only weakly dominant
    r = validate_assumptions(ReactionDiffusionSystem::constant(a, Eigen::Vector2d(1, 1), {1.0, 1.0}));
    EXPECT_FALSE(r.diagonally_dominant);
    EXPECT_TRUE(r.offdiag_nonpositive);
    EXPECT_EQ(r.delta, 0.0);
}

TEST(ValidateAssumptions, RejectsTooFewSamples) {
    EXPECT_THROW(validate_assumptions(example1(1.0), 1), std::invalid_argument);
    EXPECT_NO_THROW(validate_assumptions(example1(1.0), 2));
}

TEST(ValidateAssumptions, DeltaIsMinimumRowSumOverSampleGrid) {
    // Row sums 1 + x and 3 - x: minimum over {0, 1/4, ..., 1} is 1 at x = 0.
    std::vector<ScalarField> coeff = {ScalarField([](double x) { return 2.0 + x; }), -1.0, -1.0,
                                      ScalarField([](double x) { return 4.0 - x; })};
    const ReactionDiffusionSystem sys(2, coeff, {1.0, 1.0}, {0.1, 0.1}, Eigen::Vector2d::Zero(),
                                      Eigen::Vector2d::Zero());
    const auto r = validate_assumptions(sys, 5);
    EXPECT_TRUE(r.holds());
    EXPECT_DOUBLE_EQ(r.delta, 1.0);
}

TEST(ValidateAssumptions, FailureSurvivesGridRefinement) {
    // a_12 turns positive only near x = 1/2.
    std::vector<ScalarField> coeff = {
        3.0, ScalarField([](double x) { return -1.0 + 2.0 * std::exp(-400.0 * (x - 0.5) * (x - 0.5)); }), -1.0,
        3.0};
    const ReactionDiffusionSystem sys(2, coeff, {1.0, 1.0}, {0.1, 0.1}, Eigen::Vector2d::Zero(),
                                      Eigen::Vector2d::Zero());
    std::size_t k = 3;
    for (int level = 0; level < 8; ++level, k = 2 * k - 1) {
        EXPECT_FALSE(validate_assumptions(sys, k).offdiag_nonpositive) << k;
    }
}

TEST(ValidateAssumptions, PropertyDominantMMatrixImpliesPositiveDelta) {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> off(-2.0, 0.0);
    std::uniform_real_distribution<double> margin(1e-3, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (i != j) {
                    a(i, j) = off(rng);
                    s += -a(i, j);
                }
            }
            a(i, i) = s + margin(rng);
        }
        const auto sys = ReactionDiffusionSystem::constant(a, Eigen::VectorXd::Ones(n),
                                                          std::vector<double>(static_cast<std::size_t>(n), 0.1));
        const auto r = validate_assumptions(sys, 3);
        ASSERT_TRUE(r.holds());
        EXPECT_GT(r.delta, 0.0);
        const double b = stability_bound(sys, r, forcing_norm(sys));
        EXPECT_TRUE(std::isfinite(b));
        EXPECT_GE(b, 0.0);
    }
}

TEST(StabilityBound, Example1IsOne) {
    const auto sys = example1(0.01);
    EXPECT_DOUBLE_EQ(stability_bound(sys, validate_assumptions(sys), forcing_norm(sys)), 1.0);
}

TEST(StabilityBound, ZeroDataIsZero) {
    Eigen::MatrixXd a(2, 2);
    a << 4, -2, -1, 3;
    const auto sys = ReactionDiffusionSystem::constant(a, Eigen::Vector2d::Zero(), {0.1, 0.1});
    EXPECT_EQ(stability_bound(sys, validate_assumptions(sys), forcing_norm(sys)), 0.0);
}

TEST(StabilityBound, Example2IsOne) {
    const auto sys = example2(0.01);
    EXPECT_DOUBLE_EQ(forcing_norm(sys), 1.0);
    EXPECT_DOUBLE_EQ(stability_bound(sys, validate_assumptions(sys), forcing_norm(sys)), 1.0);
}

TEST(StabilityBound, AddsBoundaryNorms) {
    Eigen::MatrixXd a(2, 2);
    a << 4, -2, -1, 3;
    const ReactionDiffusionSystem sys(2, {4.0, -2.0, -1.0, 3.0}, {1.0, 2.0}, {0.1, 0.1}, Eigen::Vector2d(0.5, -1.5),
                                      Eigen::Vector2d(0.25, 0.0));
    EXPECT_DOUBLE_EQ(stability_bound(sys, validate_assumptions(sys), forcing_norm(sys)), 1.0 + 1.5 + 0.25);
}

TEST(StabilityBound, RejectsNonPositiveDelta) {
    AssumptionReport r;
    r.delta = 0.0;
    EXPECT_THROW(stability_bound(example1(1.0), r, 1.0), std::invalid_argument);
    r.delta = -1.0;
    EXPECT_THROW(stability_bound(example1(1.0), r, 1.0), std::invalid_argument);
}

TEST(MaxPrinciple, ZeroCandidateWithZeroForcing) {
    Eigen::MatrixXd a(2, 2);
    a << 4, -2, -1, 3;
    const auto sys = ReactionDiffusionSystem::constant(a, Eigen::Vector2d::Zero(), {0.01, 0.01});
    const GridFunction zero(uniform_grid(21), Eigen::MatrixXd::Zero(21, 2));
    EXPECT_TRUE(check_max_principle(sys, zero, 1e-12));
}

TEST(MaxPrinciple, ZeroCandidateForNonnegativeForcing) {
    const GridFunction zero(uniform_grid(51), Eigen::MatrixXd::Zero(51, 3));
    EXPECT_TRUE(check_max_principle(example2(1e-3), zero, 0.0));
}

TEST(MaxPrinciple, Example1HybridSolution) {
    for (double eps : {1.0, 0.01, 1e-4}) {
        const auto sys = example1(eps);
        const auto h = hybrid_solve(sys);
        const auto g = GridFunction::sample(uniform_grid(2001), [&](double x) { return h(x); });
        EXPECT_TRUE(check_max_principle(sys, g, 1e-9)) << eps;
        EXPECT_GE(g.values().minCoeff(), -1e-9);
    }
}

TEST(MaxPrinciple, NegativeDipUnderHypothesisIsDetected) {
    // Positive coupling (violating the sign assumption) lets L y >= 0 hold
    // while y_1 dips to -0.1 in the interior.
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 1;
    const auto sys = ReactionDiffusionSystem::constant(a, Eigen::Vector2d::Zero(), {1e-3, 1e-3});
    const auto x = uniform_grid(11);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(11, 2);
    for (int j = 1; j < 10; ++j) {
        y(j, 1) = 1.0;
    }
    y(5, 0) = -0.1;
    EXPECT_FALSE(check_max_principle(sys, GridFunction(x, y), 1e-12));
}

TEST(MaxPrinciple, DipOnExample1BreaksHypothesis) {
    const auto sys = example1(0.01);
    const auto h = hybrid_solve(sys);
    auto g = GridFunction::sample(uniform_grid(101), [&](double x) { return h(x); });
    Eigen::MatrixXd y = g.values();
    y(50, 0) = -0.1;
    EXPECT_TRUE(check_max_principle(sys, GridFunction(g.grid(), y), 1e-9));
}

TEST(MaxPrinciple, NonuniformGrid) {
    const auto sys = example1(1e-3);
    const auto h = hybrid_solve(sys);
    std::vector<double> x;
    for (int j = 0; j <= 400; ++j) {
        const double s = j / 400.0;
        x.push_back(0.5 - 0.5 * std::cos(M_PI * s));
    }
    x.front() = 0.0;
    x.back() = 1.0;
    const auto g = GridFunction::sample(x, [&](double t) { return h(t); });
    EXPECT_TRUE(check_max_principle(sys, g, 1e-9));
}

TEST(MaxPrinciple, RejectsDegenerateInput) {
    const auto sys = example1(0.1);
    EXPECT_THROW(check_max_principle(sys, GridFunction({0.0, 1.0}, Eigen::MatrixXd::Zero(2, 2)), 0.0),
                 std::invalid_argument);
    EXPECT_THROW(check_max_principle(sys, GridFunction({0.0, 0.5, 0.9}, Eigen::MatrixXd::Zero(3, 2)), 0.0),
                 std::invalid_argument);
    EXPECT_THROW(check_max_principle(sys, GridFunction({0.0, 0.5, 1.0}, Eigen::MatrixXd::Zero(3, 3)), 0.0),
                 std::invalid_argument);
}
