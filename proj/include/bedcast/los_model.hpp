#pragma once

// Length-of-stay distributions: Kaplan-Meier from right-censored day counts,
// method-of-moments parametric fits, and the half-day continuity correction
// that maps a continuous stay X onto integer day counts S.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace bedcast {

/// Tail probabilities P(S >= t), t = 0..t_max. Entries beyond t_max read as 0.
struct DiscreteSurvival {
    std::vector<double> tail{1.0};
    // Mass P(S > t_max) dropped by truncation (parametric curves only).
    double truncated_mass = 0.0;

    std::size_t t_max() const { return tail.size() - 1; }
    double at(std::size_t t) const { return t < tail.size() ? tail[t] : 0.0; }
    /// E S by the tail-sum identity.
    double mean() const { return std::accumulate(tail.begin() + 1, tail.end(), 0.0); }
};

inline void validate(const DiscreteSurvival& surv) {
    if (surv.tail.empty() || surv.tail[0] != 1.0)
        throw std::invalid_argument("DiscreteSurvival: tail[0] must equal 1");
    for (std::size_t t = 1; t < surv.tail.size(); ++t) {
        if (!(surv.tail[t] >= 0.0 && surv.tail[t] <= 1.0))
            throw std::invalid_argument("DiscreteSurvival: tail entries must lie in [0, 1]");
        if (surv.tail[t] > surv.tail[t - 1])
            throw std::invalid_argument("DiscreteSurvival: tail must be non-increasing");
    }
}

/// Always stays exactly `days` days.
inline DiscreteSurvival deterministic_survival(std::size_t days) {
    DiscreteSurvival s;
    s.tail.assign(days + 2, 1.0);
    s.tail.back() = 0.0;
    return s;
}

/// Geometric tail q^t truncated at t_max.
inline DiscreteSurvival geometric_survival(double q, std::size_t t_max) {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("geometric_survival: q must lie in [0, 1)");
    DiscreteSurvival s;
    s.tail.resize(t_max + 1);
    for (std::size_t t = 0; t <= t_max; ++t) s.tail[t] = std::pow(q, static_cast<double>(t));
    s.truncated_mass = std::pow(q, static_cast<double>(t_max + 1));
    return s;
}

// ---------------------------------------------------------------------------
// Kaplan-Meier

/// Per-stay event counts. Index s is the stay in days.
struct CensoredLosData {
    std::vector<long> discharged;  // d_s: discharged or died after s days
    std::vector<long> censored;    // still present with elapsed stay s

    long total_discharged() const { return std::accumulate(discharged.begin(), discharged.end(), 0L); }
    long total_censored() const { return std::accumulate(censored.begin(), censored.end(), 0L); }
};

struct PatientRecord {
    long stay_days = 0;
    bool is_censored = false;
};

inline CensoredLosData aggregate(std::span<const PatientRecord> records) {
    CensoredLosData data;
    for (const auto& r : records) {
        if (r.stay_days < 0) throw std::invalid_argument("LoS record with negative stay");
        const auto s = static_cast<std::size_t>(r.stay_days);
        if (data.discharged.size() <= s) {
            data.discharged.resize(s + 1, 0);
            data.censored.resize(s + 1, 0);
        }
        (r.is_censored ? data.censored : data.discharged)[s] += 1;
    }
    return data;
}

/// Product-limit estimate tail[t] = prod_{s=1..t} (1 - d_s / n_s), where n_s is
/// the number of patients with a recorded stay (discharged or censored) of at
/// least s days. Stay-0 discharges enter the first factor. The curve ends at
/// the largest recorded stay and is flat after the last discharge.
inline DiscreteSurvival kaplan_meier(const CensoredLosData& data) {
    const std::size_t len = std::max(data.discharged.size(), data.censored.size());
    std::vector<long> d(len, 0), c(len, 0);
    for (std::size_t s = 0; s < data.discharged.size(); ++s) d[s] = data.discharged[s];
    for (std::size_t s = 0; s < data.censored.size(); ++s) c[s] = data.censored[s];
    for (std::size_t s = 0; s < len; ++s)
        if (d[s] < 0 || c[s] < 0) throw std::invalid_argument("kaplan_meier: negative count");
    const long total = std::accumulate(d.begin(), d.end(), 0L) + std::accumulate(c.begin(), c.end(), 0L);
    if (std::accumulate(d.begin(), d.end(), 0L) < 1)
        throw std::invalid_argument("kaplan_meier: at least one discharged patient is required");

    if (len > 1) {
        d[1] += d[0];
        d[0] = 0;
    }
    std::size_t last = 0;
    for (std::size_t s = 0; s < len; ++s)
        if (d[s] > 0 || c[s] > 0) last = s;
    last = std::max<std::size_t>(last, 1);

    DiscreteSurvival surv;
    surv.tail.assign(last + 1, 1.0);
    long removed = 0;  // events at stays < s
    double prod = 1.0;
    for (std::size_t s = 1; s <= last; ++s) {
        removed += (s - 1 < len) ? d[s - 1] + c[s - 1] : 0;
        const long at_risk = total - removed;
        const long ds = s < len ? d[s] : 0;
        if (ds > 0) {
            if (at_risk <= 0) throw std::invalid_argument("kaplan_meier: discharges with nobody at risk");
            prod *= 1.0 - static_cast<double>(ds) / static_cast<double>(at_risk);
        }
        surv.tail[s] = prod;
    }
    return surv;
}

struct LosMoments {
    double mean = 0.0;
    double stdev = 0.0;
    // True when the curve ends on a plateau above zero and the moments are
    // those of the curve conditioned on ending at the plateau point.
    bool renormalized = false;
};

inline constexpr double kPlateauThreshold = 1e-6;

/// Mean via sum_{t>=1} P(S>=t), second moment via sum (2t-1) P(S>=t).
inline LosMoments survival_moments(const DiscreteSurvival& surv) {
    validate(surv);
    LosMoments out;
    const double plateau = surv.tail.back();
    double shift = 0.0, scale = 1.0;
    if (plateau > kPlateauThreshold && surv.truncated_mass == 0.0) {
        if (plateau >= 1.0) throw std::domain_error("survival_moments: curve never decreases");
        shift = plateau;
        scale = 1.0 / (1.0 - plateau);
        out.renormalized = true;
    }
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t t = 1; t < surv.tail.size(); ++t) {
        const double p = (surv.tail[t] - shift) * scale;
        m1 += p;
        m2 += (2.0 * static_cast<double>(t) - 1.0) * p;
    }
    out.mean = m1;
    out.stdev = std::sqrt(std::max(0.0, m2 - m1 * m1));
    return out;
}

// ---------------------------------------------------------------------------
// Parametric stays

enum class LosFamily { lognormal, gamma, weibull };

inline std::string to_string(LosFamily f) {
    switch (f) {
        case LosFamily::lognormal: return "lognormal";
        case LosFamily::gamma: return "gamma";
        case LosFamily::weibull: return "weibull";
    }
    return "unknown";
}

/// Continuous stay X. Parameters by family:
///   lognormal: first = mu, second = sigma^2
///   gamma:     first = shape alpha, second = rate beta
///   weibull:   first = shape k, second = scale
struct ParametricLoS {
    LosFamily family = LosFamily::gamma;
    double first = 1.0;
    double second = 1.0;

    static ParametricLoS lognormal(double mu, double sigma2) { return make(LosFamily::lognormal, mu, sigma2); }
    static ParametricLoS gamma(double shape, double rate) { return make(LosFamily::gamma, shape, rate); }
    static ParametricLoS weibull(double shape, double scale) { return make(LosFamily::weibull, shape, scale); }

    /// P(X >= x).
    double upper_tail(double x) const {
        if (x <= 0.0) return 1.0;
        switch (family) {
            case LosFamily::lognormal:
                return 0.5 * std::erfc((std::log(x) - first) / std::sqrt(2.0 * second));
            case LosFamily::gamma:
                return boost::math::gamma_q(first, second * x);
            case LosFamily::weibull:
                return std::exp(-std::pow(x / second, first));
        }
        return 0.0;
    }

private:
    static ParametricLoS make(LosFamily f, double a, double b) {
        const bool ok = std::isfinite(a) && std::isfinite(b) && b > 0.0 && (f == LosFamily::lognormal || a > 0.0);
        if (!ok) throw std::invalid_argument("ParametricLoS: invalid " + to_string(f) + " parameters");
        return {f, a, b};
    }
};

namespace detail {
inline void require_positive_moments(double mean, double variance, const char* who) {
    if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance))
        throw std::invalid_argument(std::string(who) + ": mean and variance must be positive and finite");
}
}  // namespace detail

inline ParametricLoS fit_lognormal_mom(double mean, double variance) {
    detail::require_positive_moments(mean, variance, "fit_lognormal_mom");
    const double m2 = mean * mean;
    return ParametricLoS::lognormal(std::log(m2 / std::sqrt(m2 + variance)), std::log1p(variance / m2));
}

inline ParametricLoS fit_gamma_mom(double mean, double variance) {
    detail::require_positive_moments(mean, variance, "fit_gamma_mom");
    return ParametricLoS::gamma(mean * mean / variance, mean / variance);
}

inline constexpr double kWeibullShapeMin = 0.05;
inline constexpr double kWeibullShapeMax = 50.0;

/// Gamma(1 + 2/k) / Gamma(1 + 1/k)^2 = 1 + CV^2; decreasing in k.
inline double weibull_moment_ratio(double shape) {
    return std::exp(std::lgamma(1.0 + 2.0 / shape) - 2.0 * std::lgamma(1.0 + 1.0 / shape));
}

/// Moment matching for Weibull; the shape is found by bisection on
/// [0.05, 50], run until the bracket stops shrinking.
inline ParametricLoS fit_weibull_mom(double mean, double variance) {
    detail::require_positive_moments(mean, variance, "fit_weibull_mom");
    const double target = 1.0 + variance / (mean * mean);
    double lo = kWeibullShapeMin, hi = kWeibullShapeMax;
    if (target > weibull_moment_ratio(lo) || target < weibull_moment_ratio(hi))
        throw std::domain_error("fit_weibull_mom: coefficient of variation outside the shape bracket");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (weibull_moment_ratio(mid) > target ? lo : hi) = mid;
    }
    const double shape = 0.5 * (lo + hi);
    return ParametricLoS::weibull(shape, mean / std::tgamma(1.0 + 1.0 / shape));
}

inline ParametricLoS fit_weibull_samples(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("fit_weibull_samples: need at least two samples");
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    return fit_weibull_mom(mean, ss / (n - 1.0));
}

inline ParametricLoS fit_mom(LosFamily family, double mean, double variance) {
    switch (family) {
        case LosFamily::lognormal: return fit_lognormal_mom(mean, variance);
        case LosFamily::gamma: return fit_gamma_mom(mean, variance);
        case LosFamily::weibull: return fit_weibull_mom(mean, variance);
    }
    throw std::invalid_argument("fit_mom: unknown family");
}

/// Analytic mean and variance of X.
inline std::pair<double, double> parametric_moments(const ParametricLoS& d) {
    switch (d.family) {
        case LosFamily::lognormal: {
            const double mean = std::exp(d.first + 0.5 * d.second);
            return {mean, std::expm1(d.second) * mean * mean};
        }
        case LosFamily::gamma:
            return {d.first / d.second, d.first / (d.second * d.second)};
        case LosFamily::weibull: {
            const double g1 = std::tgamma(1.0 + 1.0 / d.first);
            const double g2 = std::tgamma(1.0 + 2.0 / d.first);
            return {d.second * g1, d.second * d.second * (g2 - g1 * g1)};
        }
    }
    return {0.0, 0.0};
}

inline constexpr std::size_t kMaxStayDays = 120;
inline constexpr double kTailCutoff = 1e-6;

/// Smallest t with P(X >= t - 0.5) < 1e-6, capped at 120 days.
inline std::size_t default_t_max(const ParametricLoS& dist) {
    for (std::size_t t = 1; t <= kMaxStayDays; ++t)
        if (dist.upper_tail(static_cast<double>(t) - 0.5) < kTailCutoff) return t;
    return kMaxStayDays;
}

/// P(S >= t) = P(X >= t - 0.5) for t = 1..t_max; not renormalized.
inline DiscreteSurvival discretize(const ParametricLoS& dist, std::size_t t_max) {
    if (t_max == 0) throw std::invalid_argument("discretize: t_max must be positive");
    DiscreteSurvival surv;
    surv.tail.resize(t_max + 1);
    surv.tail[0] = 1.0;
    for (std::size_t t = 1; t <= t_max; ++t)
        surv.tail[t] = std::min(surv.tail[t - 1], dist.upper_tail(static_cast<double>(t) - 0.5));
    surv.truncated_mass = dist.upper_tail(static_cast<double>(t_max) + 0.5);
    return surv;
}

inline DiscreteSurvival discretize(const ParametricLoS& dist) { return discretize(dist, default_t_max(dist)); }

}  // namespace bedcast
