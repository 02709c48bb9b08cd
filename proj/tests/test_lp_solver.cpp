#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bedcast/lp_solver.hpp"
#include "oracles.hpp"

using bedcast::lp::L1Problem;
using bedcast::lp::SolveStatus;
using bedcast::lp::solve_l1;

namespace {

L1Problem two_abs_terms() {
    L1Problem p;
    p.num_vars = 1;
    p.add_residual({1.0}, 1.0);
    p.add_residual({1.0}, 3.0);
    return p;
}

// |u - 2| + |v - 5| + 10 |u - v|
L1Problem coupled_pair() {
    L1Problem p;
    p.num_vars = 2;
    p.add_residual({1.0, 0.0}, 2.0);
    p.add_residual({0.0, 1.0}, 5.0);
    p.add_penalty({1.0, -1.0}, 0.0, 10.0);
    return p;
}

L1Problem random_problem(std::mt19937& gen, std::size_t vars, std::size_t terms) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0), rhs(-5.0, 5.0), w(0.0, 3.0);
    L1Problem p;
    p.num_vars = vars;
    for (std::size_t i = 0; i < terms; ++i) {
        std::vector<double> row(vars);
        for (auto& a : row) a = coef(gen);
        if (i % 3 == 2)
            p.add_penalty(std::move(row), rhs(gen), w(gen));
        else
            p.add_residual(std::move(row), rhs(gen));
    }
    return p;
}

}  // namespace

TEST(SolveL1, SingleAbsoluteResidual) {
    L1Problem p;
    p.num_vars = 1;
    p.add_residual({1.0}, 3.0);
    const auto sol = solve_l1(p);
    ASSERT_EQ(sol.status, SolveStatus::optimal);
    EXPECT_NEAR(sol.values[0], 3.0, 1e-12);
    EXPECT_NEAR(sol.objective, 0.0, 1e-12);
}

TEST(SolveL1, FlatOptimumMatchesGridOracle) {
    const auto p = two_abs_terms();
    const double grid = oracle::grid_min([](const auto& v) { return std::abs(v[0] - 1) + std::abs(v[0] - 3); }, 1,
                                         -2.0, 6.0, 0.001);
    ASSERT_NEAR(grid, 2.0, 1e-9);
    const auto sol = solve_l1(p);
    ASSERT_EQ(sol.status, SolveStatus::optimal);
    EXPECT_NEAR(sol.objective, grid, 1e-9);
    EXPECT_GE(sol.values[0], 1.0 - 1e-9);
    EXPECT_LE(sol.values[0], 3.0 + 1e-9);
}

TEST(SolveL1, CoupledPairMatchesGridOracle) {
    const auto p = coupled_pair();
    const double grid = oracle::grid_min(
        [](const auto& v) { return std::abs(v[0] - 2) + std::abs(v[1] - 5) + 10 * std::abs(v[0] - v[1]); }, 2, 0.0,
        7.0, 0.01);
    // The grid contains u = v = 2..5 exactly, where the objective is 3.
    ASSERT_NEAR(grid, 3.0, 1e-9);
    const auto sol = solve_l1(p);
    ASSERT_EQ(sol.status, SolveStatus::optimal);
    EXPECT_NEAR(sol.objective, 3.0, 1e-9);
    EXPECT_NEAR(sol.values[0], sol.values[1], 1e-9);
}

TEST(SolveL1, ReportedObjectiveMatchesTableau) {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_problem(gen, 4, 12);
        const auto sol = solve_l1(p);
        ASSERT_EQ(sol.status, SolveStatus::optimal);
        EXPECT_NEAR(sol.objective, sol.tableau_objective, 1e-9);
        EXPECT_GE(sol.objective, 0.0);
    }
}

TEST(SolveL1, NeverWorseThanRandomFeasiblePoints) {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> pt(-10.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_problem(gen, 3, 9);
        const auto sol = solve_l1(p);
        ASSERT_EQ(sol.status, SolveStatus::optimal);
        for (int k = 0; k < 100; ++k) {
            std::vector<double> v(p.num_vars);
            for (auto& x : v) x = pt(gen);
            EXPECT_LE(sol.objective, bedcast::lp::evaluate_objective(p, v) + 1e-9);
        }
    }
}

TEST(SolveL1, DeterministicBitIdentical) {
    std::mt19937 gen(3);
    const auto p = random_problem(gen, 5, 15);
    const auto a = solve_l1(p);
    const auto b = solve_l1(p);
    ASSERT_EQ(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.pivots, b.pivots);
}

TEST(SolveL1, IterationBudgetReported) {
    std::mt19937 gen(5);
    const auto p = random_problem(gen, 4, 12);
    bedcast::lp::SolverOptions opts;
    opts.pivots_per_row = 0;
    const auto sol = solve_l1(p, opts);
    EXPECT_EQ(sol.status, SolveStatus::iteration_limit);
}

TEST(SolveL1, RejectsMalformedProblems) {
    L1Problem empty;
    empty.num_vars = 1;
    EXPECT_THROW(solve_l1(empty), std::invalid_argument);

    L1Problem bad_row;
    bad_row.num_vars = 2;
    bad_row.add_residual({1.0}, 0.0);
    EXPECT_THROW(solve_l1(bad_row), std::invalid_argument);

    L1Problem nonfinite;
    nonfinite.num_vars = 1;
    nonfinite.add_residual({1.0}, std::nan(""));
    EXPECT_THROW(solve_l1(nonfinite), std::invalid_argument);

    L1Problem negative_weight;
    negative_weight.num_vars = 1;
    negative_weight.add_residual({1.0}, 0.0);
    negative_weight.add_penalty({1.0}, 0.0, -1.0);
    EXPECT_THROW(solve_l1(negative_weight), std::invalid_argument);
}
