#pragma once

// Discrete-time infinite-server occupancy forecast. N_t is the census at the
// beginning of day t; a patient admitted on day s with stay S occupies a bed
// on the mornings of days s+1..s+S.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "bedcast/los_model.hpp"
#include "bedcast/residual_los.hpp"

namespace bedcast {

inline constexpr double kDefaultIntervalZ = 2.0;

struct OccupancyForecast {
    std::size_t horizon_days = 0;
    std::vector<double> mean;      // E N_{T+t}, t = 1..h
    std::vector<double> variance;  // Var N_{T+t}
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Mean and variance of N_{T+t} for t = 1..horizon.
///   E N_{T+t}   = N_T r_t + sum_{s<t} E A_{T+s} G(t-s)
///   Var N_{T+t} = N_T r_t (1 - r_t)
///               + sum_{s<t} [Var A_{T+s} G(t-s)^2 + E A_{T+s} G(t-s)(1 - G(t-s))]
/// with r_t = P(S^r >= t) and G(k) = P(S >= k); arrivals on different days are
/// independent. Intervals are mean -/+ z sd, the lower end clamped at 0.
inline OccupancyForecast forecast_occupancy(double current_census, const ResidualSurvival& resid,
                                            std::span<const double> admissions_mean,
                                            std::span<const double> admissions_variance,
                                            const DiscreteSurvival& surv, std::size_t horizon,
                                            double z = kDefaultIntervalZ) {
    if (admissions_mean.size() < horizon || admissions_variance.size() < horizon)
        throw std::invalid_argument("forecast_occupancy: admissions vectors must cover every horizon day");
    if (!(current_census >= 0.0)) throw std::invalid_argument("forecast_occupancy: census must be non-negative");
    if (!(z >= 0.0)) throw std::invalid_argument("forecast_occupancy: z must be non-negative");
    for (std::size_t s = 0; s < horizon; ++s)
        if (!(admissions_mean[s] >= 0.0) || !(admissions_variance[s] >= 0.0))
            throw std::invalid_argument("forecast_occupancy: admissions moments must be non-negative");

    OccupancyForecast f;
    f.horizon_days = horizon;
    f.mean.resize(horizon);
    f.variance.resize(horizon);
    f.lower.resize(horizon);
    f.upper.resize(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
        const double r = resid.at(t);
        double mean = current_census * r;
        double var = current_census * r * (1.0 - r);
        for (std::size_t s = 0; s < t; ++s) {
            const double g = surv.at(t - s);
            mean += admissions_mean[s] * g;
            var += admissions_variance[s] * g * g + admissions_mean[s] * g * (1.0 - g);
        }
        var = std::max(var, 0.0);
        const double sd = std::sqrt(var);
        f.mean[t - 1] = mean;
        f.variance[t - 1] = var;
        f.lower[t - 1] = std::max(0.0, mean - z * sd);
        f.upper[t - 1] = mean + z * sd;
    }
    return f;
}

/// Poisson arrivals: Var A = E A.
inline OccupancyForecast forecast_occupancy_poisson(double current_census, const ResidualSurvival& resid,
                                                    std::span<const double> admissions_mean,
                                                    const DiscreteSurvival& surv, std::size_t horizon,
                                                    double z = kDefaultIntervalZ) {
    return forecast_occupancy(current_census, resid, admissions_mean, admissions_mean, surv, horizon, z);
}

}  // namespace bedcast
