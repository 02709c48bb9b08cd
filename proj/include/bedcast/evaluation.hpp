#pragma once

// Forecast accuracy: metrics, the Poisson error floor, rolling-origin
// backtests and the smoothing-parameter sweep.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bedcast/admission_trend.hpp"
#include "bedcast/calendar.hpp"
#include "bedcast/los_model.hpp"
#include "bedcast/occupancy_forecast.hpp"
#include "bedcast/residual_los.hpp"

namespace bedcast {

enum class RmseForm {
    standard,  // sqrt(mean squared error)
    printed,   // sqrt(sum of squared errors) / n
};

struct AccuracyReport {
    std::optional<double> wape;  // absent when the actuals sum to zero
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

inline AccuracyReport accuracy(std::span<const double> actual, std::span<const double> predicted,
                               RmseForm form = RmseForm::standard) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("accuracy: length mismatch");
    if (actual.empty()) throw std::invalid_argument("accuracy: empty series");
    double abs_sum = 0.0, sq_sum = 0.0, total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] < 0.0) throw std::invalid_argument("accuracy: actuals must be non-negative");
        const double e = actual[i] - predicted[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        total += actual[i];
    }
    const double n = static_cast<double>(actual.size());
    AccuracyReport r;
    r.n = actual.size();
    r.mae = abs_sum / n;
    r.rmse = form == RmseForm::standard ? std::sqrt(sq_sum / n) : std::sqrt(sq_sum) / n;
    if (total > 0.0) r.wape = abs_sum / total;
    return r;
}

struct PoissonErrorFloor {
    double mae = 0.0;
    double wape = 0.0;
    double rmse = 0.0;
};

/// Errors of the best constant prediction (the mean) of a Poisson(mu) variable:
/// MAE = 2 mu^(floor(mu)+1) e^-mu / floor(mu)!, WAPE = MAE / mu, RMSE = sqrt(mu).
/// Evaluated through lgamma so large mu does not overflow.
inline PoissonErrorFloor poisson_error_floor(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson_error_floor: mu must be positive");
    const double k = std::floor(mu);
    const double log_mae = std::log(2.0) + (k + 1.0) * std::log(mu) - mu - std::lgamma(k + 1.0);
    PoissonErrorFloor f;
    f.mae = std::exp(log_mae);
    f.wape = f.mae / mu;
    f.rmse = std::sqrt(mu);
    return f;
}

// ---------------------------------------------------------------------------
// Rolling-origin backtest

enum class MetricSeries { arrivals, occupancy_forecasted_arrivals, occupancy_realized_arrivals };

inline std::string to_string(MetricSeries s) {
    switch (s) {
        case MetricSeries::arrivals: return "arrivals";
        case MetricSeries::occupancy_forecasted_arrivals: return "occupancy_forecasted_arrivals";
        case MetricSeries::occupancy_realized_arrivals: return "occupancy_realized_arrivals";
    }
    return "unknown";
}

inline constexpr MetricSeries kAllMetricSeries[] = {MetricSeries::arrivals,
                                                    MetricSeries::occupancy_forecasted_arrivals,
                                                    MetricSeries::occupancy_realized_arrivals};

struct BacktestConfig {
    double lambda = kDefaultLambda;
    std::vector<int> horizons{3, 7};
    std::size_t stride = 1;
    std::optional<Date> first_origin;  // default: earliest origin with enough history
    std::optional<Date> last_origin;   // default: latest origin with any scorable horizon
    double z = kDefaultIntervalZ;
    RmseForm rmse_form = RmseForm::standard;
};

/// One scored prediction. At origin T the census N_T (morning of T) and the
/// admissions up to T-1 are known; arrivals are scored on day T-1+h and
/// occupancy on day T+h.
struct BacktestRecord {
    Date origin{};
    int horizon = 0;
    double arrivals_predicted = 0.0;
    double arrivals_actual = 0.0;
    double occupancy_predicted = 0.0;           // fed by forecasted arrivals
    double occupancy_predicted_realized = 0.0;  // fed by the realized arrivals
    double occupancy_actual = 0.0;
};

struct BacktestNote {
    Date origin{};
    std::string message;
    bool skipped = true;  // false: origin kept, message is informational
};

struct MetricRow {
    MetricSeries series = MetricSeries::arrivals;
    int horizon = 0;
    AccuracyReport report;
};

struct BacktestResult {
    double lambda = 0.0;
    std::vector<Date> origins;
    std::vector<BacktestRecord> records;
    std::vector<BacktestNote> notes;
    std::vector<MetricRow> metrics;  // series-major, horizons in config order

    const MetricRow& metric(MetricSeries s, int horizon) const {
        for (const auto& m : metrics)
            if (m.series == s && m.horizon == horizon) return m;
        throw std::out_of_range("BacktestResult: no metric row for " + to_string(s) + " at horizon " +
                                std::to_string(horizon));
    }
};

namespace detail {

inline ResidualSurvival origin_residual(std::span<const double> past, const DiscreteSurvival& surv, bool& fallback) {
    fallback = false;
    try {
        return residual_survival(past, surv);
    } catch (const std::domain_error&) {
        fallback = true;
        return stationary_residual(surv);
    }
}

}  // namespace detail

/// Refits the admissions trend at every origin on data strictly before it and
/// scores h-day-ahead arrivals and occupancy. Admissions and census must start
/// on the same date.
inline BacktestResult rolling_backtest(const AdmissionSeries& admissions, const CensusSeries& census,
                                       const DiscreteSurvival& surv, const BacktestConfig& cfg) {
    validate(surv);
    if (admissions.start_date != census.start_date)
        throw std::invalid_argument("rolling_backtest: admissions and census must start on the same date");
    if (cfg.horizons.empty()) throw std::invalid_argument("rolling_backtest: no horizons");
    for (int h : cfg.horizons)
        if (h <= 0) throw std::invalid_argument("rolling_backtest: horizons must be positive");
    if (cfg.stride == 0) throw std::invalid_argument("rolling_backtest: stride must be positive");

    const std::size_t days = std::min(admissions.size(), census.size());
    const int max_h = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());
    const int min_h = *std::min_element(cfg.horizons.begin(), cfg.horizons.end());
    const int first_wd = weekday_index(admissions.start_date);

    // Origin index T (day offset from the start); needs T-1+h and T+h < days.
    const long default_first = static_cast<long>(kMinTrendHistory);
    const long default_last = static_cast<long>(days) - 1 - min_h;
    long first = cfg.first_origin ? days_between(admissions.start_date, *cfg.first_origin) : default_first;
    long last = cfg.last_origin ? days_between(admissions.start_date, *cfg.last_origin) : default_last;
    last = std::min(last, default_last);

    BacktestResult result;
    result.lambda = cfg.lambda;
    const auto& a = admissions.values;
    const auto& n = census.values;

    for (long T = first; T <= last; T += static_cast<long>(cfg.stride)) {
        const Date origin = admissions.date_at(static_cast<std::size_t>(std::max(T, 0L)));
        if (T < default_first) {
            result.notes.push_back({add_days(admissions.start_date, T),
                                    "insufficient history: " + std::to_string(std::max(T, 0L)) +
                                        " days of admissions before the origin, 21 required"});
            continue;
        }
        TrendFit fit;
        try {
            fit = fit_trend(std::span<const double>(a.data(), static_cast<std::size_t>(T)), first_wd, cfg.lambda);
        } catch (const std::exception& e) {
            result.notes.push_back({origin, std::string("trend fit failed: ") + e.what()});
            continue;
        }
        const std::size_t t0 = static_cast<std::size_t>(T);
        std::vector<double> past(t0);
        for (std::size_t u = 1; u <= t0; ++u) past[u - 1] = a[t0 - u];
        bool fallback = false;
        const ResidualSurvival resid = detail::origin_residual(past, surv, fallback);
        if (fallback)
            result.notes.push_back({origin, "no past arrival can still be present; stationary residual used", false});

        const auto predicted = predict_admissions(fit, max_h);
        const std::size_t hmax = static_cast<std::size_t>(std::min<long>(max_h, static_cast<long>(days) - 1 - T));
        std::vector<double> realized(hmax), zeros(hmax, 0.0);
        for (std::size_t s = 0; s < hmax; ++s) realized[s] = a[t0 + s];
        const auto occ = forecast_occupancy_poisson(n[t0], resid, predicted, surv, hmax, cfg.z);
        const auto occ_real = forecast_occupancy(n[t0], resid, realized, zeros, surv, hmax, cfg.z);

        result.origins.push_back(origin);
        for (int h : cfg.horizons) {
            if (static_cast<std::size_t>(h) > hmax) continue;
            BacktestRecord rec;
            rec.origin = origin;
            rec.horizon = h;
            rec.arrivals_predicted = predicted[h - 1];
            rec.arrivals_actual = a[t0 - 1 + h];
            rec.occupancy_predicted = occ.mean[h - 1];
            rec.occupancy_predicted_realized = occ_real.mean[h - 1];
            rec.occupancy_actual = n[t0 + h];
            result.records.push_back(rec);
        }
    }

    for (MetricSeries series : kAllMetricSeries) {
        for (int h : cfg.horizons) {
            std::vector<double> actual, pred;
            for (const auto& r : result.records) {
                if (r.horizon != h) continue;
                switch (series) {
                    case MetricSeries::arrivals:
                        actual.push_back(r.arrivals_actual);
                        pred.push_back(r.arrivals_predicted);
                        break;
                    case MetricSeries::occupancy_forecasted_arrivals:
                        actual.push_back(r.occupancy_actual);
                        pred.push_back(r.occupancy_predicted);
                        break;
                    case MetricSeries::occupancy_realized_arrivals:
                        actual.push_back(r.occupancy_actual);
                        pred.push_back(r.occupancy_predicted_realized);
                        break;
                }
            }
            MetricRow row{series, h, {}};
            if (!actual.empty()) row.report = accuracy(actual, pred, cfg.rmse_form);
            result.metrics.push_back(row);
        }
    }
    return result;
}

struct SweepRow {
    double lambda = 0.0;
    std::vector<MetricRow> metrics;
};

/// One backtest per smoothing parameter at a single horizon.
inline std::vector<SweepRow> lambda_sweep(const AdmissionSeries& admissions, const CensusSeries& census,
                                          const DiscreteSurvival& surv, std::span<const double> lambdas, int horizon,
                                          BacktestConfig cfg = {}) {
    if (lambdas.empty()) throw std::invalid_argument("lambda_sweep: no smoothing parameters");
    cfg.horizons = {horizon};
    std::vector<SweepRow> out;
    for (double lambda : lambdas) {
        cfg.lambda = lambda;
        auto bt = rolling_backtest(admissions, census, surv, cfg);
        out.push_back({lambda, std::move(bt.metrics)});
    }
    return out;
}

}  // namespace bedcast
