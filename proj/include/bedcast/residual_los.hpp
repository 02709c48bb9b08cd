#pragma once

// Remaining stay of the patients present at the forecast origin.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "bedcast/los_model.hpp"

namespace bedcast {

/// P(S^r >= t), t = 0..t_max.
struct ResidualSurvival {
    std::vector<double> tail{1.0};

    double at(std::size_t t) const { return t < tail.size() ? tail[t] : 0.0; }
};

/// Arrival-weighted residual stay. `past_arrivals[u-1]` is a_{T-u}, the
/// admissions u days before the origin. A patient present at T who arrived
/// at T-u is weighted by a_{T-u} P(S >= u), so
///   P(S^r >= t) = sum_u a_{T-u} P(S >= t+u) / sum_u a_{T-u} P(S >= u).
/// History beyond t_max contributes nothing; missing history counts as zero.
inline ResidualSurvival residual_survival(std::span<const double> past_arrivals, const DiscreteSurvival& surv) {
    validate(surv);
    const std::size_t t_max = surv.t_max();
    const std::size_t horizon = std::min(past_arrivals.size(), t_max);
    double denom = 0.0;
    for (std::size_t u = 1; u <= horizon; ++u) {
        const double a = past_arrivals[u - 1];
        if (a < 0.0) throw std::invalid_argument("residual_survival: arrivals must be non-negative");
        denom += a * surv.at(u);
    }
    if (!(denom > 0.0))
        throw std::domain_error("residual_survival: no past arrival can still be present");

    ResidualSurvival out;
    out.tail.assign(t_max + 1, 0.0);
    out.tail[0] = 1.0;
    for (std::size_t t = 1; t <= t_max; ++t) {
        double num = 0.0;
        for (std::size_t u = 1; u <= horizon && t + u <= t_max; ++u) num += past_arrivals[u - 1] * surv.at(t + u);
        out.tail[t] = num / denom;
    }
    return out;
}

/// Renewal-theory residual: P(S^r >= t) = sum_{k>=t} P(S > k) / E S.
inline ResidualSurvival stationary_residual(const DiscreteSurvival& surv) {
    validate(surv);
    const double mean = surv.mean();
    if (!(mean > 0.0)) throw std::domain_error("stationary_residual: survival has zero mean");
    const std::size_t t_max = surv.t_max();
    ResidualSurvival out;
    out.tail.assign(t_max + 1, 0.0);
    // Suffix sums of P(S > k) = tail[k+1].
    double suffix = 0.0;
    for (std::size_t t = t_max + 1; t-- > 0;) {
        suffix += surv.at(t + 1);
        out.tail[t] = suffix / mean;
    }
    out.tail[0] = 1.0;
    return out;
}

}  // namespace bedcast
