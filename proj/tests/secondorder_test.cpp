#include "fuzzyclust/secondorder.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using fuzzyclust::DenseMatrix;
using fuzzyclust::MembershipMatrix;
using fuzzyclust::RefinementStatus;
using fuzzyclust::SecondOrderConfig;
using fuzzyclust::SolverConfig;
using fuzzyclust::TangentDirection;

namespace {

/// The uniform saddle's witness direction: e_1 - e_2 in the first column.
TangentDirection example_witness() {
    TangentDirection v(2, 7);
    v(0, 0) = 1.0;
    v(1, 0) = -1.0;
    return v;
}

MembershipMatrix converged_random_init() {
    const auto s = fctest::seven_node_similarity();
    SolverConfig config;
    config.step_size = 0.1;
    const auto x0 = fuzzyclust::init_membership(
        7, 2, {fuzzyclust::InitKind::kRandom, 1, 0, nullptr});
    return fuzzyclust::run_gpa(x0, s, config).membership;
}

MembershipMatrix converged_row_one() {
    const auto s = fctest::seven_node_similarity();
    SolverConfig config;
    config.step_size = 0.1;
    const auto x0 = fuzzyclust::init_membership(
        7, 2, {fuzzyclust::InitKind::kRowOne, 0, 0, nullptr});
    return fuzzyclust::run_gpa(x0, s, config).membership;
}

TEST(IsCritical, ReferencePoints) {
    const auto s = fctest::seven_node_similarity();
    EXPECT_TRUE(fuzzyclust::is_critical(fctest::uniform_x3(), s, 1e-2, 1e-9));
    EXPECT_TRUE(fuzzyclust::is_critical(fctest::golden_x1(), s, 1e-2, 1e-2));

    const auto row_one = fuzzyclust::init_membership(
        7, 2, {fuzzyclust::InitKind::kRowOne, 0, 0, nullptr});
    EXPECT_FALSE(fuzzyclust::is_critical(row_one, s, 1e-2, 1e-2));
}

TEST(IsCritical, InvariantToProbeStep) {
    const auto s = fctest::seven_node_similarity();
    const auto x1 = converged_random_init();
    const auto row_one = fuzzyclust::init_membership(
        7, 2, {fuzzyclust::InitKind::kRowOne, 0, 0, nullptr});
    for (double tau : {1e-4, 1e-3, 1e-2, 1e-1}) {
        EXPECT_TRUE(fuzzyclust::is_critical(x1, s, tau, 1e-4)) << tau;
        EXPECT_TRUE(fuzzyclust::is_critical(fctest::uniform_x3(), s, tau, 1e-9)) << tau;
        // The residual of a non-critical point scales like tau * (projected
        // gradient), so probe against a threshold proportional to tau.
        EXPECT_FALSE(fuzzyclust::is_critical(row_one, s, tau, tau)) << tau;
    }
}

TEST(TangentCone, InteriorPointAcceptsZeroSumDirections) {
    const auto x3 = fctest::uniform_x3();
    EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, example_witness(), 1e-9));
    EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, TangentDirection(2, 7), 1e-9));

    TangentDirection bad(2, 7);
    bad(0, 2) = 0.5;  // column sum 0.5 != 0
    EXPECT_FALSE(fuzzyclust::tangent_cone_contains(x3, bad, 1e-9));
}

TEST(TangentCone, SignConditionOnActiveCoordinates) {
    MembershipMatrix x(2, 2);
    x(0, 0) = 0.0;
    x(1, 0) = 1.0;
    x(0, 1) = 0.5;
    x(1, 1) = 0.5;

    TangentDirection down(2, 2);
    down(0, 0) = -1.0;  // pushes an active coordinate negative
    down(1, 0) = 1.0;
    EXPECT_FALSE(fuzzyclust::tangent_cone_contains(x, down, 1e-9));

    TangentDirection up(2, 2);
    up(0, 0) = 1.0;
    up(1, 0) = -1.0;  // leaves the active zero, reduces the positive entry
    EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x, up, 1e-9));
}

TEST(SecondOrderCone, InteriorReducesToFirstOrderCone) {
    const auto x3 = fctest::uniform_x3();
    const auto v = example_witness();
    fuzzyclust::SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        TangentDirection w(2, 7);
        for (std::size_t i = 0; i < 7; ++i) {
            const double e = 2.0 * rng.next_double() - 1.0;
            w(0, i) = e;
            w(1, i) = -e;
        }
        EXPECT_TRUE(fuzzyclust::second_order_cone_contains(x3, v, w, 1e-9));
        EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, w, 1e-9));
    }
    EXPECT_TRUE(fuzzyclust::second_order_cone_contains(x3, v, TangentDirection(2, 7), 1e-9));
}

TEST(SecondOrderCone, SignConstraintNeedsBothActive) {
    MembershipMatrix x(2, 2);
    x(0, 0) = 0.0;
    x(1, 0) = 1.0;
    x(0, 1) = 0.4;
    x(1, 1) = 0.6;

    TangentDirection v(2, 2);  // zero at the active coordinate
    TangentDirection w(2, 2);
    w(0, 0) = -1.0;
    w(1, 0) = 1.0;
    EXPECT_FALSE(fuzzyclust::second_order_cone_contains(x, v, w, 1e-9));

    // With vbar nonzero at that coordinate the constraint is lifted.
    TangentDirection v2(2, 2);
    v2(0, 0) = 1.0;
    v2(1, 0) = -1.0;
    EXPECT_TRUE(fuzzyclust::second_order_cone_contains(x, v2, w, 1e-9));
}

TEST(ConeDirections, UniformPointIncludesExampleWitness) {
    const auto s = fctest::seven_node_similarity();
    const auto x3 = fctest::uniform_x3();
    const DenseMatrix grad = fuzzyclust::full_gradient(x3, s);
    SecondOrderConfig cfg;
    const auto dirs = fuzzyclust::critical_cone_directions(x3, grad, cfg);
    // Interior point, gradient constant within each column: every ordered
    // pair in every column is kept.
    EXPECT_EQ(dirs.size(), 14u);
    const auto witness = example_witness();
    bool found = false;
    for (const auto& d : dirs) found = found || (d == witness);
    EXPECT_TRUE(found);
    for (const auto& d : dirs) {
        EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, d, 1e-9));
        EXPECT_LE(std::abs(fuzzyclust::frob_inner(grad, d)) / std::sqrt(2.0), cfg.eps_grad_orth);
    }
}

TEST(ConeDirections, NonOrthogonalInteriorPointYieldsNothing) {
    // Interior but far from critical: gradient components differ in every
    // column, so no pairwise direction passes the orthogonality filter.
    const auto s = fctest::seven_node_similarity();
    MembershipMatrix x(2, 7);
    for (std::size_t i = 0; i < 7; ++i) {
        x(0, i) = 0.3;
        x(1, i) = 0.7;
    }
    const DenseMatrix grad = fuzzyclust::full_gradient(x, s);
    SecondOrderConfig cfg;
    cfg.random_directions = 8;
    const auto dirs = fuzzyclust::critical_cone_directions(x, grad, cfg);
    EXPECT_TRUE(dirs.empty());
}

TEST(ConeDirections, OneHotColumnsRestrictSigns) {
    const auto s = fctest::seven_node_similarity();
    const auto x2 = converged_row_one();  // column 4 is exactly one-hot
    const DenseMatrix grad = fuzzyclust::full_gradient(x2, s);
    SecondOrderConfig cfg;
    const auto dirs = fuzzyclust::critical_cone_directions(x2, grad, cfg);
    for (const auto& d : dirs) {
        EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x2, d, 1e-9, cfg.eps_active));
    }
}

TEST(ConeDirections, RandomCombinationsStayInCone) {
    const auto s = fctest::seven_node_similarity();
    const auto x3 = fctest::uniform_x3();
    const DenseMatrix grad = fuzzyclust::full_gradient(x3, s);
    SecondOrderConfig cfg;
    cfg.random_directions = 10;
    cfg.seed = 99;
    const auto dirs = fuzzyclust::critical_cone_directions(x3, grad, cfg);
    EXPECT_GT(dirs.size(), 14u);
    for (const auto& d : dirs) {
        EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, d, 1e-9));
        EXPECT_NEAR(fuzzyclust::frob_norm(d), std::sqrt(2.0), 1e-12);
    }
}

TEST(ConditionA, UniformSaddleRefutedWithKnownWitnessValue) {
    const auto s = fctest::seven_node_similarity();
    const auto x3 = fctest::uniform_x3();
    const DenseMatrix grad = fuzzyclust::full_gradient(x3, s);
    SecondOrderConfig cfg;
    const auto dirs = fuzzyclust::critical_cone_directions(x3, grad, cfg);
    const auto verdict = fuzzyclust::check_condition_a(x3, s, dirs, cfg);
    EXPECT_EQ(verdict.status, RefinementStatus::kRefutedConditionA);
    EXPECT_NEAR(verdict.witness_value, -4.0, 1e-9);
    ASSERT_TRUE(verdict.witness.has_value());

    // Witness re-verification: replay cone membership and the quadratic form.
    EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, *verdict.witness, 1e-9));
    EXPECT_NEAR(fuzzyclust::quadratic_form(x3, *verdict.witness, s), verdict.witness_value,
                1e-9);
}

TEST(ConditionA, RefutationIsScaleInvariant) {
    const auto s = fctest::seven_node_similarity();
    const auto x3 = fctest::uniform_x3();
    const auto v = example_witness();
    const double q1 = fuzzyclust::quadratic_form(x3, v, s);
    TangentDirection scaled(2, 7);
    for (std::size_t k = 0; k < scaled.data().size(); ++k) {
        scaled.data()[k] = 3.0 * v.data()[k];
    }
    const double q3 = fuzzyclust::quadratic_form(x3, scaled, s);
    EXPECT_NEAR(q3, 9.0 * q1, 1e-9);
    EXPECT_LT(q3, 0.0);
    EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x3, scaled, 1e-9));
}

TEST(ConditionA, ConvergedRandomInitSurvivesFullEnumeration) {
    const auto s = fctest::seven_node_similarity();
    const auto x1 = converged_random_init();
    ASSERT_TRUE(fuzzyclust::is_critical(x1, s, 1e-2, 1e-6));
    const DenseMatrix grad = fuzzyclust::full_gradient(x1, s);
    SecondOrderConfig cfg;
    const auto dirs = fuzzyclust::critical_cone_directions(x1, grad, cfg);
    const auto verdict = fuzzyclust::check_condition_a(x1, s, dirs, cfg);
    EXPECT_EQ(verdict.status, RefinementStatus::kSurviving);
}

TEST(ConditionA, EmptyDirectionSetSurvivesVacuously) {
    const auto s = fctest::seven_node_similarity();
    const auto x3 = fctest::uniform_x3();
    SecondOrderConfig cfg;
    const auto verdict = fuzzyclust::check_condition_a(x3, s, {}, cfg);
    EXPECT_EQ(verdict.status, RefinementStatus::kSurviving);
    EXPECT_EQ(verdict.directions_tested, 0u);
}

TEST(ConditionB, InteriorShortcut) {
    const auto s = fctest::seven_node_similarity();
    const auto x3 = fctest::uniform_x3();
    const DenseMatrix grad = fuzzyclust::full_gradient(x3, s);
    SecondOrderConfig cfg;
    const auto dirs = fuzzyclust::critical_cone_directions(x3, grad, cfg);
    const auto verdict = fuzzyclust::check_condition_b(x3, s, dirs, cfg);
    EXPECT_EQ(verdict.status, RefinementStatus::kSurviving);
    EXPECT_TRUE(verdict.used_interior_shortcut);

    // Exhaustive pairwise enumeration agrees with the shortcut: at this
    // critical interior point every <grad, e_k - e_l per column> vanishes.
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_GE(grad(0, i) - grad(1, i), -cfg.eps_quad);
        EXPECT_GE(grad(1, i) - grad(0, i), -cfg.eps_quad);
    }
}

TEST(ConditionB, BoundaryPointRunsAndRecordsVerdict) {
    const auto s = fctest::seven_node_similarity();
    const auto x2 = converged_row_one();  // has exact zeros in column 4
    ASSERT_TRUE(fuzzyclust::is_critical(x2, s, 1e-2, 1e-6));
    const DenseMatrix grad = fuzzyclust::full_gradient(x2, s);
    SecondOrderConfig cfg;
    const auto dirs = fuzzyclust::critical_cone_directions(x2, grad, cfg);
    const auto verdict = fuzzyclust::check_condition_b(x2, s, dirs, cfg);
    EXPECT_FALSE(verdict.used_interior_shortcut);
    EXPECT_GT(verdict.directions_tested, 0u);

    if (verdict.status == RefinementStatus::kRefutedConditionB) {
        ASSERT_TRUE(verdict.witness.has_value());
        ASSERT_TRUE(verdict.witness_base.has_value());
        EXPECT_TRUE(fuzzyclust::second_order_cone_contains(
            x2, *verdict.witness_base, *verdict.witness, 1e-9, cfg.eps_active));
        EXPECT_NEAR(fuzzyclust::frob_inner(grad, *verdict.witness), verdict.witness_value,
                    1e-9);
        EXPECT_LT(verdict.witness_value, -cfg.eps_quad);
    } else {
        EXPECT_EQ(verdict.status, RefinementStatus::kSurviving);
    }
}

TEST(Refine, UniformSaddleAtThreeClusters) {
    // The uniform matrix is critical for any C (gradient columns are
    // constant within each column). With X^T V = 0 there, the quadratic form
    // of a pairwise direction reduces to -4(<V S, V> - <V J, V>/C), i.e.
    // -8 (C-1)/C on a unit-diagonal similarity.
    const auto s = fctest::seven_node_similarity();
    const std::size_t c = 3;
    MembershipMatrix x(c, 7);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t k = 0; k < c; ++k) x(k, i) = 1.0 / static_cast<double>(c);
    }
    SecondOrderConfig cfg;
    const auto report = fuzzyclust::refine(x, s, cfg);
    EXPECT_TRUE(report.critical);
    EXPECT_EQ(report.status, RefinementStatus::kRefutedConditionA);
    EXPECT_NEAR(report.condition_a.witness_value, -8.0 * (c - 1) / c, 1e-9);
    ASSERT_TRUE(report.condition_a.witness.has_value());
    EXPECT_TRUE(fuzzyclust::tangent_cone_contains(x, *report.condition_a.witness, 1e-9));
    EXPECT_NEAR(fuzzyclust::quadratic_form(x, *report.condition_a.witness, s),
                report.condition_a.witness_value, 1e-9);
    // All ordered pairs in all columns pass the filters at the uniform point.
    EXPECT_EQ(report.directions_generated, 7 * c * (c - 1));
}

TEST(Refine, ConvergedThreeClusterPointIsCoherent) {
    const auto g = fctest::random_connected_graph(30, 4.0, 404);
    const auto s = fuzzyclust::SparseSimilarity::build_similarity(g);
    SolverConfig config;
    const auto x0 = fuzzyclust::init_membership(
        s.size(), 3, {fuzzyclust::InitKind::kRandom, 2, 0, nullptr});
    const auto res = fuzzyclust::run_gpa(x0, s, config);
    ASSERT_EQ(res.trace.reason, fuzzyclust::TerminationReason::kTolReached);

    SecondOrderConfig cfg;
    const auto report = fuzzyclust::refine(res.membership, s, cfg);
    EXPECT_TRUE(report.critical);
    if (report.status == RefinementStatus::kRefutedConditionA) {
        ASSERT_TRUE(report.condition_a.witness.has_value());
        EXPECT_TRUE(fuzzyclust::tangent_cone_contains(
            res.membership, *report.condition_a.witness, 1e-9, cfg.eps_active));
        EXPECT_NEAR(fuzzyclust::quadratic_form(res.membership, *report.condition_a.witness, s),
                    report.condition_a.witness_value, 1e-9);
        EXPECT_LT(report.condition_a.witness_value, -cfg.eps_quad);
    }
    if (report.status == RefinementStatus::kRefutedConditionB) {
        ASSERT_TRUE(report.condition_b.witness.has_value());
        ASSERT_TRUE(report.condition_b.witness_base.has_value());
        EXPECT_TRUE(fuzzyclust::second_order_cone_contains(
            res.membership, *report.condition_b.witness_base, *report.condition_b.witness,
            1e-9, cfg.eps_active));
    }
}

TEST(Refine, FullPipelineOnReferencePoints) {
    const auto s = fctest::seven_node_similarity();
    SecondOrderConfig cfg;

    const auto report3 = fuzzyclust::refine(fctest::uniform_x3(), s, cfg);
    EXPECT_TRUE(report3.critical);
    EXPECT_EQ(report3.status, RefinementStatus::kRefutedConditionA);
    EXPECT_NEAR(report3.condition_a.witness_value, -4.0, 1e-9);

    const auto report1 = fuzzyclust::refine(converged_random_init(), s, cfg);
    EXPECT_TRUE(report1.critical);
    EXPECT_EQ(report1.status, RefinementStatus::kSurviving);

    const auto row_one = fuzzyclust::init_membership(
        7, 2, {fuzzyclust::InitKind::kRowOne, 0, 0, nullptr});
    const auto report0 = fuzzyclust::refine(row_one, s, cfg);
    EXPECT_FALSE(report0.critical);
    EXPECT_EQ(report0.status, RefinementStatus::kRefutedFirstOrder);
}

}  // namespace
