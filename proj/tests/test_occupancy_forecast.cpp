#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bedcast/los_model.hpp"
#include "bedcast/occupancy_forecast.hpp"
#include "bedcast/residual_los.hpp"

using namespace bedcast;

TEST(ForecastOccupancy, CensusOnlyDeterministicResidual) {
    ResidualSurvival r;
    r.tail = {1.0, 1.0, 1.0, 0.0};  // (1, 1, 0) for t = 1..3
    const std::vector<double> zero(4, 0.0);
    const auto f = forecast_occupancy(10.0, r, zero, zero, deterministic_survival(2), 3);
    r.tail = {1.0, 1.0, 0.0};
    const auto g = forecast_occupancy(10.0, r, zero, zero, deterministic_survival(2), 3);
    EXPECT_EQ(g.mean, (std::vector<double>{10.0, 0.0, 0.0}));
    EXPECT_EQ(f.mean, (std::vector<double>{10.0, 10.0, 0.0}));
    for (double v : f.variance) EXPECT_EQ(v, 0.0);
    for (double v : g.variance) EXPECT_EQ(v, 0.0);
}

TEST(ForecastOccupancy, PoissonArrivalsDeterministicStay) {
    const std::vector<double> five(3, 5.0);
    const auto f = forecast_occupancy(0.0, ResidualSurvival{}, five, five, deterministic_survival(2), 3);
    EXPECT_EQ(f.mean, (std::vector<double>{5.0, 10.0, 10.0}));
    EXPECT_EQ(f.variance, (std::vector<double>{5.0, 10.0, 10.0}));
}

TEST(ForecastOccupancy, BinomialTermPeaksAtHalf) {
    ResidualSurvival r;
    r.tail = {1.0, 0.9, 0.5, 0.2};
    const std::vector<double> zero(3, 0.0);
    const auto f = forecast_occupancy(100.0, r, zero, zero, deterministic_survival(1), 3);
    EXPECT_NEAR(f.variance[0], 9.0, 1e-12);
    EXPECT_NEAR(f.variance[1], 25.0, 1e-12);
    EXPECT_NEAR(f.variance[2], 16.0, 1e-12);
}

TEST(ForecastOccupancy, PoissonClosureWithEmptyWard) {
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> arr(0.0, 80.0);
    std::vector<double> mean(14);
    for (auto& m : mean) m = arr(gen);
    for (const auto& g : {discretize(fit_gamma_mom(10.0, 60.0)), discretize(fit_lognormal_mom(4.0, 9.0)),
                          deterministic_survival(5)}) {
        const auto f = forecast_occupancy_poisson(0.0, ResidualSurvival{}, mean, g, 14);
        for (std::size_t t = 0; t < 14; ++t) EXPECT_NEAR(f.variance[t], f.mean[t], 1e-12 * f.mean[t]);
    }
}

TEST(ForecastOccupancy, MeanIsLinearInArrivals) {
    const auto g = discretize(fit_weibull_mom(6.0, 20.0));
    const std::vector<double> past(40, 10.0);
    const auto r = residual_survival(past, g);
    const std::vector<double> a{3, 4, 5, 6, 7, 8, 9}, b{10, 0, 2, 0, 1, 0, 4};
    std::vector<double> ab(7);
    for (std::size_t i = 0; i < 7; ++i) ab[i] = a[i] + b[i];
    const auto fa = forecast_occupancy_poisson(0.0, r, a, g, 7);
    const auto fb = forecast_occupancy_poisson(30.0, r, b, g, 7);
    const auto fab = forecast_occupancy_poisson(30.0, r, ab, g, 7);
    for (std::size_t t = 0; t < 7; ++t) EXPECT_NEAR(fab.mean[t], fa.mean[t] + fb.mean[t], 1e-12);
}

TEST(ForecastOccupancy, EmptiesWithoutArrivals) {
    const auto g = discretize(fit_lognormal_mom(8.0, 50.0));
    std::vector<double> past(60);
    for (std::size_t u = 0; u < past.size(); ++u) past[u] = 20.0 + 5.0 * std::sin(0.3 * static_cast<double>(u));
    const auto r = residual_survival(past, g);
    const std::vector<double> zero(30, 0.0);
    const auto f = forecast_occupancy(75.0, r, zero, zero, g, 30);
    for (std::size_t t = 1; t < 30; ++t) EXPECT_LE(f.mean[t], f.mean[t - 1]);
}

TEST(ForecastOccupancy, IntervalsClampAtZero) {
    ResidualSurvival r;
    r.tail = {1.0, 0.05};
    const std::vector<double> zero(1, 0.0);
    const auto f = forecast_occupancy(10.0, r, zero, zero, deterministic_survival(1), 1, 2.0);
    EXPECT_EQ(f.lower[0], 0.0);
    EXPECT_NEAR(f.upper[0], 0.5 + 2.0 * std::sqrt(10.0 * 0.05 * 0.95), 1e-12);
}

TEST(ForecastOccupancy, RejectsShortVectorsAndNegativeInputs) {
    const std::vector<double> two(2, 1.0), three(3, 1.0);
    const auto g = deterministic_survival(2);
    EXPECT_THROW(forecast_occupancy(0.0, ResidualSurvival{}, two, three, g, 3), std::invalid_argument);
    EXPECT_THROW(forecast_occupancy(0.0, ResidualSurvival{}, three, two, g, 3), std::invalid_argument);
    EXPECT_THROW(forecast_occupancy(-1.0, ResidualSurvival{}, three, three, g, 3), std::invalid_argument);
    EXPECT_THROW(forecast_occupancy(0.0, ResidualSurvival{}, three, three, g, 3, -1.0), std::invalid_argument);
}
