#pragma once

// Sum-of-absolute-values minimization solved as a linear program with a
// dense primal simplex (Bland's rule).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bedcast::lp {

/// One |row . vars - constant| term, scaled by weight.
struct AbsTerm {
    std::vector<double> row;
    double constant = 0.0;
    double weight = 1.0;
};

/// Minimize sum_i |r_i . v - c_i| + sum_j w_j |p_j . v - d_j| over free v.
struct L1Problem {
    std::size_t num_vars = 0;
    std::vector<AbsTerm> residual_terms;  // weight fixed at 1
    std::vector<AbsTerm> penalty_terms;

    void add_residual(std::vector<double> row, double constant) {
        residual_terms.push_back({std::move(row), constant, 1.0});
    }
    void add_penalty(std::vector<double> row, double constant, double weight) {
        penalty_terms.push_back({std::move(row), constant, weight});
    }
};

enum class SolveStatus { optimal, infeasible, iteration_limit };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

struct L1Solution {
    std::vector<double> values;
    double objective = 0.0;
    SolveStatus status = SolveStatus::infeasible;
    std::size_t pivots = 0;
    // Objective as carried by the final tableau; equals `objective` up to
    // round-off when status is optimal.
    double tableau_objective = 0.0;
};

struct SolverOptions {
    double tolerance = 1e-9;
    // Pivot budget per LP row.
    std::size_t pivots_per_row = 100;
};

/// Objective of `problem` evaluated at `values`.
inline double evaluate_objective(const L1Problem& problem, const std::vector<double>& values) {
    auto term_value = [&](const AbsTerm& t) {
        double acc = -t.constant;
        for (std::size_t j = 0; j < t.row.size(); ++j) acc += t.row[j] * values[j];
        return t.weight * std::abs(acc);
    };
    double total = 0.0;
    for (const auto& t : problem.residual_terms) total += term_value(t);
    for (const auto& t : problem.penalty_terms) total += term_value(t);
    return total;
}

namespace detail {

inline void validate(const L1Problem& problem) {
    if (problem.num_vars == 0) throw std::invalid_argument("L1Problem: num_vars must be positive");
    if (problem.residual_terms.empty())
        throw std::invalid_argument("L1Problem: at least one residual term is required");
    auto check = [&](const AbsTerm& t) {
        if (t.row.size() != problem.num_vars)
            throw std::invalid_argument("L1Problem: coefficient row length differs from num_vars");
        if (!std::isfinite(t.constant))
            throw std::invalid_argument("L1Problem: non-finite constant");
        if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
            throw std::invalid_argument("L1Problem: penalty weight must be finite and non-negative");
        for (double a : t.row)
            if (!std::isfinite(a)) throw std::invalid_argument("L1Problem: non-finite coefficient");
    };
    for (const auto& t : problem.residual_terms) check(t);
    for (const auto& t : problem.penalty_terms) check(t);
}

// Dense tableau for min c'z s.t. Az = b, z >= 0 with b >= 0 and a known
// feasible identity basis.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), cost_(cols + 1, 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double& cost(std::size_t c) { return cost_[c]; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    // Reduced costs: subtract basic cost multiples from the cost row.
    void price_out() {
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = cost_[basis_[r]];
            if (cb == 0.0) continue;
            const double* row = &a_[r * (cols_ + 1)];
            for (std::size_t c = 0; c <= cols_; ++c) cost_[c] -= cb * row[c];
        }
    }

    // Returns optimal / iteration_limit. Unboundedness cannot occur for a
    // bounded-below objective and is reported as infeasible.
    SolveStatus run(double tol, std::size_t budget, std::size_t& pivots) {
        pivots = 0;
        for (;;) {
            // Bland: lowest-index improving column.
            std::size_t enter = cols_;
            for (std::size_t c = 0; c < cols_; ++c) {
                if (cost_[c] < -tol) {
                    enter = c;
                    break;
                }
            }
            if (enter == cols_) return SolveStatus::optimal;
            if (pivots >= budget) return SolveStatus::iteration_limit;

            // Ratio test; ties go to the lowest basic variable index.
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double p = at(r, enter);
                if (p <= tol) continue;
                const double ratio = at(r, cols_) / p;
                const bool better = leave == rows_ || ratio < best - tol;
                const bool tie = !better && ratio <= best + tol && basis_[r] < basis_[leave];
                if (better || tie) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave == rows_) return SolveStatus::infeasible;
            pivot(leave, enter);
            ++pivots;
        }
    }

    double objective() const { return -cost_[cols_]; }

private:
    void pivot(std::size_t pr, std::size_t pc) {
        double* prow = &a_[pr * (cols_ + 1)];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        // Only touch non-zero entries of the pivot row.
        nz_.clear();
        for (std::size_t c = 0; c <= cols_; ++c)
            if (prow[c] != 0.0) nz_.push_back(c);
        auto eliminate = [&](double* row) {
            const double f = row[pc];
            if (f == 0.0) return;
            for (std::size_t c : nz_) row[c] -= f * prow[c];
            row[pc] = 0.0;
        };
        for (std::size_t r = 0; r < rows_; ++r)
            if (r != pr) eliminate(&a_[r * (cols_ + 1)]);
        eliminate(cost_.data());
        basis_[pr] = pc;
    }

    std::size_t rows_, cols_;
    std::vector<double> a_;
    std::vector<double> cost_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> nz_;
};

}  // namespace detail

/// Global minimizer of the L1 objective. Each |e| is split as e+ + e-,
/// each free variable as v+ - v-. Only the objective value is contractual
/// when the minimizer is not unique; Bland's rule fixes which vertex is
/// returned, so repeated calls are bit-identical.
inline L1Solution solve_l1(const L1Problem& problem, const SolverOptions& opts = {}) {
    detail::validate(problem);

    const std::size_t n = problem.num_vars;
    const std::size_t m = problem.residual_terms.size() + problem.penalty_terms.size();
    // Columns: [v+_0, v-_0, ..., v+_{n-1}, v-_{n-1}, e+_0, e-_0, ...]
    const std::size_t cols = 2 * n + 2 * m;
    detail::Tableau tab(m, cols);

    std::size_t r = 0;
    auto load = [&](const AbsTerm& t) {
        const double sign = t.constant < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            tab.at(r, 2 * j) = sign * t.row[j];
            tab.at(r, 2 * j + 1) = -sign * t.row[j];
        }
        const std::size_t ep = 2 * n + 2 * r;
        tab.at(r, ep) = -sign;
        tab.at(r, ep + 1) = sign;
        tab.rhs(r) = sign * t.constant;
        tab.cost(ep) = t.weight;
        tab.cost(ep + 1) = t.weight;
        tab.basis()[r] = sign > 0.0 ? ep + 1 : ep;
        ++r;
    };
    for (const auto& t : problem.residual_terms) load(t);
    for (const auto& t : problem.penalty_terms) load(t);

    tab.price_out();
    L1Solution sol;
    sol.status = tab.run(opts.tolerance, opts.pivots_per_row * m, sol.pivots);

    std::vector<double> z(cols, 0.0);
    for (std::size_t i = 0; i < m; ++i) z[tab.basis()[i]] = tab.rhs(i);
    sol.values.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) sol.values[j] = z[2 * j] - z[2 * j + 1];
    sol.objective = evaluate_objective(problem, sol.values);
    sol.tableau_objective = tab.objective();
    return sol;
}

}  // namespace bedcast::lp
