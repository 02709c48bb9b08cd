#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bedcast/occupancy_forecast.hpp"
#include "bedcast/residual_los.hpp"
#include "bedcast/simulator.hpp"

using namespace bedcast;

namespace {

Scenario flat(double mu, std::size_t days, std::uint64_t seed) {
    Scenario sc;
    sc.phases = {{days, 1.0}};
    sc.base_intensity = mu;
    sc.seed = seed;
    return sc;
}

std::pair<double, double> mean_var(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, ss / (n - 1.0)};
}

}  // namespace

TEST(Xoshiro256, ReferenceVector) {
    Xoshiro256 rng(std::array<std::uint64_t, 4>{1, 2, 3, 4});
    EXPECT_EQ(rng(), 11520u);
    EXPECT_EQ(rng(), 0u);
    EXPECT_EQ(rng(), 1509978240u);
    EXPECT_EQ(rng(), 1215971899390074240u);
}

TEST(Xoshiro256, SeededStreamsAreStableAndDistinct) {
    Xoshiro256 a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
    EXPECT_NE(Xoshiro256(42)(), c());
    EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(SamplePoisson, MomentsAcrossBothBranches) {
    Xoshiro256 rng(5);
    for (double mu : {0.7, 4.0, 11.9, 12.0, 40.0, 900.0}) {
        const int n = 100000;
        std::vector<double> xs(n);
        for (auto& x : xs) x = static_cast<double>(sample_poisson(rng, mu));
        const auto [m, v] = mean_var(xs);
        EXPECT_NEAR(m, mu, 5.0 * std::sqrt(mu / n)) << "mu " << mu;
        // Var of the sample variance for Poisson is about (mu + 2 mu^2) / n.
        EXPECT_NEAR(v, mu, 5.0 * std::sqrt((mu + 2.0 * mu * mu) / n)) << "mu " << mu;
    }
    EXPECT_EQ(sample_poisson(rng, 0.0), 0);
}

TEST(GenerateAdmissions, LongRunMean) {
    const auto sc = flat(100.0, 10000, 9);
    const auto a = generate_admissions(sc, 10000);
    const double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / 10000.0;
    EXPECT_GE(mean, 97.0);
    EXPECT_LE(mean, 103.0);
}

TEST(GenerateAdmissions, GrowthSlope) {
    auto sc = flat(30.0, 140, 10);
    sc.phases = {{140, 1.05}};
    const auto a = generate_admissions(sc, 140);
    // Least-squares slope of log counts on weekly means.
    std::vector<double> x, y;
    for (std::size_t w = 0; w < 20; ++w) {
        double s = 0.0;
        for (std::size_t d = 0; d < 7; ++d) s += a.values[7 * w + d];
        x.push_back(7.0 * static_cast<double>(w) + 3.0);
        y.push_back(std::log(s / 7.0));
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 20.0;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / 20.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    EXPECT_NEAR(sxy / sxx, std::log(1.05), 0.003);
}

TEST(ScenarioIntensities, WeekdayPatternHasPeriodSeven) {
    auto sc = flat(10.0, 28, 1);
    sc.weekday_multipliers = {1.2, 1.1, 1.0, 1.0, 1.0, 0.8, 1.0};
    double log_sum = 0.0;
    for (double m : sc.weekday_multipliers) log_sum += std::log(m);
    for (auto& m : sc.weekday_multipliers) m /= std::exp(log_sum / 7.0);
    const auto mu = scenario_intensities(sc, 28);
    for (std::size_t t = 7; t < 28; ++t) EXPECT_NEAR(mu[t], mu[t - 7], 1e-12);
    // 2020-11-01 is a Sunday.
    EXPECT_NEAR(mu[0], 10.0 * sc.weekday_multipliers[6], 1e-12);
}

TEST(ScenarioIntensities, PhasesChangeGrowth) {
    Scenario sc;
    sc.phases = {{3, 2.0}, {2, 0.5}};
    sc.base_intensity = 1.0;
    const auto mu = scenario_intensities(sc, 7);
    EXPECT_EQ(mu, (std::vector<double>{1, 2, 4, 2, 1, 0.5, 0.25}));
}

TEST(Scenario, Validation) {
    Scenario sc;
    sc.weekday_multipliers = {2, 1, 1, 1, 1, 1, 1};
    EXPECT_THROW(validate(sc), std::invalid_argument);
    sc = Scenario{};
    sc.phases = {{5, -1.0}};
    EXPECT_THROW(validate(sc), std::invalid_argument);
    sc = Scenario{};
    sc.phases.clear();
    EXPECT_THROW(validate(sc), std::invalid_argument);
}

TEST(SampleStay, InverseCdfAndTies) {
    DiscreteSurvival s;
    s.tail = {1.0, 0.5, 0.5, 0.25};
    EXPECT_EQ(sample_stay(s, 0.75), 0u);
    EXPECT_EQ(sample_stay(s, 0.5), 0u);   // tie goes to the shorter stay
    EXPECT_EQ(sample_stay(s, 0.4999), 2u);
    EXPECT_EQ(sample_stay(s, 0.25), 2u);
    EXPECT_EQ(sample_stay(s, 0.1), 3u);
    EXPECT_EQ(sample_stay_given(s, 1, 0.9), 2u);
    EXPECT_EQ(sample_stay_given(s, 1, 0.4), 3u);
}

TEST(SimulateCensus, OneDayStays) {
    const auto a = generate_admissions(flat(25.0, 60, 3), 60);
    const auto n = simulate_census(a, deterministic_survival(1), 3);
    EXPECT_EQ(n.values[0], 0.0);
    for (std::size_t t = 1; t < 60; ++t) EXPECT_EQ(n.values[t], a.values[t - 1]);
}

TEST(SimulateCensus, ThreeDayStaysSteadyState) {
    AdmissionSeries a{*parse_date("2021-03-01"), std::vector<double>(20, 5.0)};
    const auto n = simulate_census(a, deterministic_survival(3), 1);
    for (std::size_t t = 3; t < 20; ++t) EXPECT_EQ(n.values[t], 15.0);
}

TEST(SimulateCensus, LongRunMeanMatchesLittlesLaw) {
    const std::size_t days = 5000;
    const auto a = generate_admissions(flat(20.0, days, 4), days);
    // Geometric stay on {0, 1, ...} with P(S >= t) = q^t has mean q / (1 - q) = 4.
    const auto surv = geometric_survival(0.8, 120);
    const auto n = simulate_census(a, surv, 4);
    std::vector<double> tail(n.values.begin() + 200, n.values.end());
    const auto [mean, var] = mean_var(tail);
    // Census autocorrelation decays like the residual stay; inflate the
    // standard error by the integrated autocorrelation of a geometric(0.8) walk.
    const double se = std::sqrt(var * (1.0 + 0.8) / (1.0 - 0.8) / static_cast<double>(tail.size()));
    EXPECT_NEAR(mean, 20.0 * surv.mean(), 3.0 * se);
    EXPECT_NEAR(surv.mean(), 4.0, 1e-9);
}

TEST(SimulateCensus, PatientDaysAreConserved) {
    const std::size_t days = 80;
    const auto a = generate_admissions(flat(12.0, days, 8), days);
    const auto surv = discretize(fit_gamma_mom(5.0, 20.0));
    const auto n = simulate_census(a, surv, 8);
    // Replay the stay stream and count truncated patient-days.
    Xoshiro256 rng(derive_seed(8, 1));
    long expected = 0;
    for (std::size_t s = 0; s < days; ++s)
        for (long i = 0; i < static_cast<long>(a.values[s]); ++i)
            expected += static_cast<long>(std::min(sample_stay(surv, rng.uniform()), days - 1 - s));
    EXPECT_EQ(std::accumulate(n.values.begin(), n.values.end(), 0.0), static_cast<double>(expected));

    const auto det = simulate_census(a, deterministic_survival(4), 8);
    double det_expected = 0.0;
    for (std::size_t s = 0; s < days; ++s) det_expected += a.values[s] * static_cast<double>(std::min<std::size_t>(4, days - 1 - s));
    EXPECT_EQ(std::accumulate(det.values.begin(), det.values.end(), 0.0), det_expected);
}

TEST(SimulateCensus, Reproducible) {
    const auto a = generate_admissions(flat(15.0, 50, 2), 50);
    const auto surv = discretize(fit_lognormal_mom(6.0, 30.0));
    EXPECT_EQ(simulate_census(a, surv, 11).values, simulate_census(a, surv, 11).values);
    EXPECT_NE(simulate_census(a, surv, 11).values, simulate_census(a, surv, 12).values);
    AdmissionSeries bad{a.start_date, {1.5, 2.0}};
    EXPECT_THROW(simulate_census(bad, surv, 1), std::invalid_argument);
}

TEST(MonteCarlo, DeterministicCaseHasNoVariance) {
    const auto surv = deterministic_survival(3);
    MonteCarloInput in;
    in.current_census = 10;
    in.past_arrivals = {10.0};
    in.future_mean = std::vector<double>(5, 4.0);
    in.law = ArrivalLaw::fixed;
    in.horizon = 5;
    in.replications = 1000;
    const auto mc = monte_carlo_forecast(in, surv);
    const auto r = residual_survival(in.past_arrivals, surv);
    const std::vector<double> zero(5, 0.0);
    const auto f = forecast_occupancy(10.0, r, in.future_mean, zero, surv, 5);
    for (std::size_t t = 0; t < 5; ++t) {
        EXPECT_EQ(mc.mean[t], f.mean[t]);
        EXPECT_EQ(mc.variance[t], 0.0);
    }
}

TEST(MonteCarlo, PoissonArrivalsTwoDayStays) {
    MonteCarloInput in;
    in.future_mean = std::vector<double>(3, 5.0);
    in.horizon = 3;
    in.replications = 20000;
    in.seed = 3;
    const auto mc = monte_carlo_forecast(in, deterministic_survival(2));
    const std::vector<double> expected{5.0, 10.0, 10.0};
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_NEAR(mc.mean[t], expected[t], 3.0 * mc.mean_se[t]);
        EXPECT_NEAR(mc.variance[t], expected[t], 3.0 * mc.variance_se[t]);
    }
}

TEST(MonteCarlo, PoissonClosureRatio) {
    MonteCarloInput in;
    in.future_mean = {8, 12, 20, 15, 9, 30, 4, 7, 10, 11, 25, 6, 14, 18};
    in.horizon = 14;
    in.replications = 20000;
    in.seed = 17;
    const auto mc = monte_carlo_forecast(in, discretize(fit_gamma_mom(6.0, 24.0)));
    for (std::size_t t = 0; t < 14; ++t) {
        const double ratio = mc.variance[t] / mc.mean[t];
        EXPECT_GE(ratio, 0.9);
        EXPECT_LE(ratio, 1.1);
    }
}

TEST(MonteCarlo, RejectsTooFewReplications) {
    MonteCarloInput in;
    in.future_mean = {1.0};
    in.replications = 999;
    EXPECT_THROW(monte_carlo_forecast(in, deterministic_survival(1)), std::invalid_argument);
    in.replications = 1000;
    in.current_census = 3;
    EXPECT_THROW(monte_carlo_forecast(in, deterministic_survival(1)), std::domain_error);
}

TEST(MonteCarlo, Reproducible) {
    MonteCarloInput in;
    in.current_census = 40;
    in.past_arrivals = std::vector<double>(30, 8.0);
    in.future_mean = std::vector<double>(7, 8.0);
    in.horizon = 7;
    in.replications = 1000;
    const auto surv = discretize(fit_lognormal_mom(5.0, 20.0));
    EXPECT_EQ(monte_carlo_forecast(in, surv).mean, monte_carlo_forecast(in, surv).mean);
}
