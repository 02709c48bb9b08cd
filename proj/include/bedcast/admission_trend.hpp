#pragma once

// Seasonal log-trend model for daily admissions: an L1 fit of
// log a_t ~ x_t + s_{w(t)} with an L1 penalty on second differences of x.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "bedcast/calendar.hpp"
#include "bedcast/lp_solver.hpp"

namespace bedcast {

/// Dated sequence of daily values; one entry per calendar day.
struct DailySeries {
    Date start_date{};
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    Date date_at(std::size_t i) const { return add_days(start_date, static_cast<long>(i)); }
    Date end_date() const { return date_at(values.size() - 1); }
};

/// Daily admission counts a_t.
using AdmissionSeries = DailySeries;
/// Morning census N_t: occupied beds at the beginning of day t.
using CensusSeries = DailySeries;

inline constexpr std::size_t kMinTrendHistory = 21;
inline constexpr double kDefaultLambda = 10.0;
// Counts below this are floored before taking logs.
inline constexpr double kZeroCountFloor = 0.5;

struct TrendFit {
    std::vector<double> x;       // de-seasonalized log trend, one per day
    std::array<double, 7> s{};   // weekday factors (log scale), Monday = 0, sum 0
    double lambda = kDefaultLambda;
    int first_weekday = 0;       // weekday index of the first observation
    double objective = 0.0;
    std::size_t pivots = 0;

    int weekday_of(std::size_t day) const { return static_cast<int>((first_weekday + day) % 7); }

    double fitted(std::size_t day) const { return std::exp(x[day] + s[weekday_of(day)]); }

    /// Total absolute second difference of the trend.
    double roughness() const {
        double acc = 0.0;
        for (std::size_t t = 2; t < x.size(); ++t) acc += std::abs(x[t] - 2.0 * x[t - 1] + x[t - 2]);
        return acc;
    }
};

/// Fits the seasonal log-trend by solving the L1 program exactly.
/// `values` may be real-valued; zero counts are floored at 0.5 before the log.
/// The weekday factors are identified by sum-to-zero, imposed by eliminating
/// the last factor (s_6 = -(s_0 + ... + s_5)).
inline TrendFit fit_trend(std::span<const double> values, int first_weekday, double lambda) {
    if (values.size() < kMinTrendHistory)
        throw std::invalid_argument("fit_trend: at least 21 days of admissions are required, got " +
                                    std::to_string(values.size()));
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("fit_trend: lambda must be finite and non-negative");
    if (first_weekday < 0 || first_weekday > 6)
        throw std::invalid_argument("fit_trend: weekday index out of range");
    for (double a : values)
        if (!std::isfinite(a) || a < 0.0)
            throw std::invalid_argument("fit_trend: admissions must be finite and non-negative");

    const std::size_t days = values.size();
    const std::size_t nvars = days + 6;
    lp::L1Problem problem;
    problem.num_vars = nvars;
    problem.residual_terms.reserve(days);

    for (std::size_t t = 0; t < days; ++t) {
        std::vector<double> row(nvars, 0.0);
        row[t] = 1.0;
        const int w = (first_weekday + static_cast<int>(t % 7)) % 7;
        if (w < 6) {
            row[days + w] = 1.0;
        } else {
            for (std::size_t d = 0; d < 6; ++d) row[days + d] = -1.0;
        }
        problem.add_residual(std::move(row), std::log(std::max(values[t], kZeroCountFloor)));
    }
    if (lambda > 0.0) {
        for (std::size_t t = 2; t < days; ++t) {
            std::vector<double> row(nvars, 0.0);
            row[t] = 1.0;
            row[t - 1] = -2.0;
            row[t - 2] = 1.0;
            problem.add_penalty(std::move(row), 0.0, lambda);
        }
    }

    const lp::L1Solution sol = lp::solve_l1(problem);
    if (sol.status != lp::SolveStatus::optimal)
        throw std::runtime_error("fit_trend: LP solver stopped with status " + lp::to_string(sol.status));

    TrendFit fit;
    fit.lambda = lambda;
    fit.first_weekday = first_weekday;
    fit.objective = sol.objective;
    fit.pivots = sol.pivots;
    fit.x.assign(sol.values.begin(), sol.values.begin() + static_cast<long>(days));
    double sum = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
        fit.s[d] = sol.values[days + d];
        sum += fit.s[d];
    }
    fit.s[6] = -sum;
    return fit;
}

inline TrendFit fit_trend(const AdmissionSeries& series, double lambda) {
    return fit_trend(std::span<const double>(series.values), weekday_index(series.start_date), lambda);
}

/// Predicted admissions for days T+1..T+horizon:
/// exp(x_T + t (x_T - x_{T-1}) + s_{w(T+t)}).
inline std::vector<double> predict_admissions(const TrendFit& fit, int horizon) {
    if (horizon <= 0) throw std::invalid_argument("predict_admissions: horizon must be positive");
    if (fit.x.size() < 2) throw std::invalid_argument("predict_admissions: fit needs at least two days");
    const std::size_t last = fit.x.size() - 1;
    const double level = fit.x[last];
    const double slope = fit.x[last] - fit.x[last - 1];
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int t = 1; t <= horizon; ++t)
        out[t - 1] = std::exp(level + t * slope + fit.s[fit.weekday_of(last + t)]);
    return out;
}

/// r_t^exponent = exp(exponent (x_t - x_{t-1})) for t = 2..T.
inline std::vector<double> reproduction_series(const TrendFit& fit, double exponent = 4.5) {
    if (!(exponent > 0.0)) throw std::invalid_argument("reproduction_series: exponent must be positive");
    if (fit.x.size() < 2) throw std::invalid_argument("reproduction_series: fit needs at least two days");
    std::vector<double> out;
    out.reserve(fit.x.size() - 1);
    for (std::size_t t = 1; t < fit.x.size(); ++t) out.push_back(std::exp(exponent * (fit.x[t] - fit.x[t - 1])));
    return out;
}

}  // namespace bedcast
