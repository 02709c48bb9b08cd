#pragma once

// Synthetic admissions and a patient-level discrete-time infinite-server
// simulator. The Monte-Carlo forecast samples every patient explicitly and
// shares no arithmetic with the analytic occupancy formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "bedcast/admission_trend.hpp"
#include "bedcast/calendar.hpp"
#include "bedcast/los_model.hpp"
#include "bedcast/random.hpp"

namespace bedcast {

struct Phase {
    std::size_t days = 1;
    double growth = 1.0;  // daily multiplicative change of the intensity
};

using LosSpec = std::variant<ParametricLoS, DiscreteSurvival>;

struct Scenario {
    Date start_date = Date{std::chrono::year{2020} / 11 / 1};
    std::vector<Phase> phases{{1, 1.0}};
    double base_intensity = 10.0;
    std::array<double, 7> weekday_multipliers{1, 1, 1, 1, 1, 1, 1};  // Monday first
    LosSpec los = deterministic_survival(1);
    std::uint64_t seed = 1;

    std::size_t total_days() const {
        std::size_t n = 0;
        for (const auto& p : phases) n += p.days;
        return n;
    }
};

inline void validate(const Scenario& sc) {
    if (sc.phases.empty()) throw std::invalid_argument("Scenario: at least one phase is required");
    for (const auto& p : sc.phases) {
        if (p.days == 0) throw std::invalid_argument("Scenario: phase length must be positive");
        if (!(p.growth > 0.0) || !std::isfinite(p.growth))
            throw std::invalid_argument("Scenario: growth factors must be positive");
    }
    if (!(sc.base_intensity > 0.0) || !std::isfinite(sc.base_intensity))
        throw std::invalid_argument("Scenario: base intensity must be positive");
    double log_sum = 0.0;
    for (double m : sc.weekday_multipliers) {
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("Scenario: weekday multipliers must be positive");
        log_sum += std::log(m);
    }
    if (std::abs(log_sum / 7.0) > 1e-9)
        throw std::invalid_argument("Scenario: weekday multipliers must have geometric mean 1");
    if (const auto* s = std::get_if<DiscreteSurvival>(&sc.los)) validate(*s);
}

inline DiscreteSurvival scenario_survival(const Scenario& sc) {
    if (const auto* p = std::get_if<ParametricLoS>(&sc.los)) return discretize(*p);
    return std::get<DiscreteSurvival>(sc.los);
}

/// Admission intensity per day: mu_1 = base, mu_t = mu_{t-1} g(t) where g(t)
/// is the growth of the phase containing day t (the last phase continues
/// past the scenario end), times the weekday multiplier.
inline std::vector<double> scenario_intensities(const Scenario& sc, std::size_t days) {
    validate(sc);
    std::vector<double> out(days);
    const int first_wd = weekday_index(sc.start_date);
    double mu = sc.base_intensity;
    std::size_t phase = 0, left = sc.phases[0].days;
    for (std::size_t t = 0; t < days; ++t) {
        if (t > 0) {
            if (left == 0 && phase + 1 < sc.phases.size()) left = sc.phases[++phase].days;
            mu *= sc.phases[phase].growth;
        }
        if (left > 0) --left;
        out[t] = mu * sc.weekday_multipliers[(first_wd + t) % 7];
    }
    return out;
}

/// a_t ~ Poisson(intensity_t), reproducible under the scenario seed.
inline AdmissionSeries generate_admissions(const Scenario& sc, std::size_t days) {
    if (days == 0) throw std::invalid_argument("generate_admissions: days must be positive");
    const auto mu = scenario_intensities(sc, days);
    Xoshiro256 rng(derive_seed(sc.seed, 0));
    AdmissionSeries series{sc.start_date, std::vector<double>(days)};
    for (std::size_t t = 0; t < days; ++t) series.values[t] = static_cast<double>(sample_poisson(rng, mu[t]));
    return series;
}

/// Inverse CDF on the tail: the largest t with u < P(S >= t). Ties resolve
/// toward the shorter stay.
inline std::size_t sample_stay(const DiscreteSurvival& surv, double u) {
    const auto it = std::partition_point(surv.tail.begin(), surv.tail.end(), [u](double p) { return u < p; });
    return static_cast<std::size_t>(it - surv.tail.begin()) - 1;
}

/// Stay drawn from S conditioned on S >= elapsed.
inline std::size_t sample_stay_given(const DiscreteSurvival& surv, std::size_t elapsed, double u) {
    return sample_stay(surv, u * surv.at(elapsed));
}

/// Census path produced by independent stays for every admitted patient.
/// Patients admitted on day s are counted on the mornings of s+1..s+S.
inline CensusSeries simulate_census(const AdmissionSeries& admissions, const DiscreteSurvival& surv,
                                    std::uint64_t seed) {
    validate(surv);
    const std::size_t n = admissions.size();
    std::vector<long> delta(n + 1, 0);
    Xoshiro256 rng(derive_seed(seed, 1));
    for (std::size_t s = 0; s < n; ++s) {
        const double a = admissions.values[s];
        if (a < 0.0 || a != std::floor(a))
            throw std::invalid_argument("simulate_census: admissions must be non-negative integers");
        for (long i = 0; i < static_cast<long>(a); ++i) {
            const std::size_t stay = sample_stay(surv, rng.uniform());
            if (stay == 0 || s + 1 >= n) continue;
            delta[s + 1] += 1;
            delta[std::min(n, s + 1 + stay)] -= 1;
        }
    }
    CensusSeries census{admissions.start_date, std::vector<double>(n)};
    long running = 0;
    for (std::size_t t = 0; t < n; ++t) {
        running += delta[t];
        census.values[t] = static_cast<double>(running);
    }
    return census;
}

enum class ArrivalLaw { poisson, fixed };

struct MonteCarloInput {
    long current_census = 0;
    std::vector<double> past_arrivals;  // a_{T-1}, a_{T-2}, ...
    std::vector<double> future_mean;    // E A_{T+s}, s = 0..h-1
    ArrivalLaw law = ArrivalLaw::poisson;
    std::size_t horizon = 1;
    std::size_t replications = 10000;
    std::uint64_t seed = 1;
};

struct MonteCarloResult {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> mean_se;
    std::vector<double> variance_se;
    std::size_t replications = 0;
};

inline constexpr std::size_t kMinReplications = 1000;

/// Empirical moments of N_{T+t}, t = 1..h. Each present patient draws the day
/// it arrived with probability proportional to a_{T-u} P(S >= u) and then its
/// total stay from S conditioned on S >= u. Future arrivals are Poisson (or
/// fixed at the rounded mean) and draw stays from S.
inline MonteCarloResult monte_carlo_forecast(const MonteCarloInput& in, const DiscreteSurvival& surv) {
    validate(surv);
    if (in.replications < kMinReplications)
        throw std::invalid_argument("monte_carlo_forecast: at least 1000 replications are required");
    if (in.future_mean.size() < in.horizon)
        throw std::invalid_argument("monte_carlo_forecast: future intensities must cover the horizon");
    if (in.current_census < 0) throw std::invalid_argument("monte_carlo_forecast: negative census");

    const std::size_t h = in.horizon;
    std::vector<double> cumulative;  // arrival-day weights, u = 1..
    double total = 0.0;
    for (std::size_t u = 1; u <= in.past_arrivals.size() && u <= surv.t_max(); ++u) {
        total += in.past_arrivals[u - 1] * surv.at(u);
        cumulative.push_back(total);
    }
    if (in.current_census > 0 && !(total > 0.0))
        throw std::domain_error("monte_carlo_forecast: census present but no past arrival can still be present");

    const std::size_t reps = in.replications;
    std::vector<double> samples(reps * h, 0.0);
    std::vector<long> count(h);
    for (std::size_t r = 0; r < reps; ++r) {
        Xoshiro256 rng(derive_seed(in.seed, r));
        std::fill(count.begin(), count.end(), 0);
        for (long i = 0; i < in.current_census; ++i) {
            const double pick = rng.uniform() * total;
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
            const std::size_t u = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                        cumulative.size() - 1) + 1;
            const std::size_t stay = sample_stay_given(surv, u, rng.uniform());
            const std::size_t remaining = stay >= u ? stay - u : 0;
            for (std::size_t t = 1; t <= std::min(remaining, h); ++t) ++count[t - 1];
        }
        for (std::size_t s = 0; s < h; ++s) {
            const long arrivals = in.law == ArrivalLaw::poisson ? sample_poisson(rng, in.future_mean[s])
                                                                : std::lround(in.future_mean[s]);
            for (long i = 0; i < arrivals; ++i) {
                const std::size_t stay = sample_stay(surv, rng.uniform());
                for (std::size_t t = s + 1; t <= std::min(h, s + stay); ++t) ++count[t - 1];
            }
        }
        for (std::size_t t = 0; t < h; ++t) samples[r * h + t] = static_cast<double>(count[t]);
    }

    MonteCarloResult out;
    out.replications = reps;
    out.mean.resize(h);
    out.variance.resize(h);
    out.mean_se.resize(h);
    out.variance_se.resize(h);
    const double n = static_cast<double>(reps);
    for (std::size_t t = 0; t < h; ++t) {
        double sum = 0.0;
        for (std::size_t r = 0; r < reps; ++r) sum += samples[r * h + t];
        const double mean = sum / n;
        double m2 = 0.0, m4 = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double d = samples[r * h + t] - mean;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        const double var = m2 / (n - 1.0);
        m4 /= n;
        out.mean[t] = mean;
        out.variance[t] = var;
        out.mean_se[t] = std::sqrt(var / n);
        // Large-sample standard error of the sample variance.
        out.variance_se[t] = std::sqrt(std::max(0.0, (m4 - var * var * (n - 3.0) / (n - 1.0)) / n));
    }
    return out;
}

}  // namespace bedcast
