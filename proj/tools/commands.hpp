#pragma once

// Subcommand implementations for the bedcast CLI. Data goes to files under
// the output directory; human-readable reports go to `out`, diagnostics to `err`.

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bedcast/bedcast.hpp"

namespace bedcast::cli {

namespace fs = std::filesystem;

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

inline void write_plot_data_if_requested(const RunConfig& cfg, const std::vector<io::PlotPoint>& points) {
    if (cfg.plot_data.empty()) return;
    auto out = io::detail::open_out(cfg.plot_data);
    io::write_plot_data(out, points);
}

inline DiscreteSurvival resolve_survival(const RunConfig& cfg) {
    if (!cfg.los_configured)
        throw io::InputError("a length-of-stay source is required: pass --los <los.csv> or a [los] config section");
    return io::to_survival(io::resolve_los(cfg.los), cfg.los.t_max);
}

inline int cmd_fit(const std::string& admissions_path, const RunConfig& cfg, std::ostream& out) {
    const auto series = io::read_admissions(admissions_path);
    const auto fit = fit_trend(series, cfg.lambda);
    const int horizon = cfg.max_horizon();
    const auto predicted = predict_admissions(fit, horizon);
    const auto repro = reproduction_series(fit, cfg.reproduction_exponent);

    {
        auto f = io::detail::open_out(out_path(cfg, "fit.csv"));
        f << "date,admissions,fitted,trend,weekday_factor,reproduction\n";
        for (std::size_t t = 0; t < series.size(); ++t) {
            f << format_date(series.date_at(t)) << "," << series.values[t] << "," << fit.fitted(t) << ","
              << std::exp(fit.x[t]) << "," << std::exp(fit.s[fit.weekday_of(t)]) << ",";
            if (t > 0) f << repro[t - 1];
            f << "\n";
        }
    }
    {
        auto f = io::detail::open_out(out_path(cfg, "predictions.csv"));
        f << "date,predicted\n";
        for (int t = 1; t <= horizon; ++t)
            f << format_date(add_days(series.end_date(), t)) << "," << predicted[t - 1] << "\n";
    }

    static const char* names[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
    out << "trend fit: " << series.size() << " days " << format_date(series.start_date) << " .. "
        << format_date(series.end_date()) << ", lambda = " << cfg.lambda << "\n";
    out << "objective: " << fit.objective << " (" << fit.pivots << " simplex pivots)\n";
    out << "weekday factors (multiplicative):";
    for (int d = 0; d < 7; ++d) out << " " << names[d] << "=" << std::exp(fit.s[d]);
    out << "\nlast day-to-day factor r_T = " << std::exp(fit.x.back() - fit.x[fit.x.size() - 2])
        << ", r_T^" << cfg.reproduction_exponent << " = " << repro.back() << "\n";
    out << "predicted admissions:";
    for (double p : predicted) out << " " << p;
    out << "\n";

    std::vector<io::PlotPoint> points;
    for (std::size_t t = 0; t < series.size(); ++t) {
        points.push_back({"admissions", series.date_at(t), series.values[t]});
        points.push_back({"fitted", series.date_at(t), fit.fitted(t)});
        points.push_back({"trend", series.date_at(t), std::exp(fit.x[t])});
    }
    for (int t = 1; t <= horizon; ++t) points.push_back({"predicted", add_days(series.end_date(), t), predicted[t - 1]});
    write_plot_data_if_requested(cfg, points);
    return 0;
}

struct StaySummary {
    long count = 0;
    double mean = 0.0, stdev = 0.0;
};

inline StaySummary summarize_counts(const std::vector<long>& by_stay) {
    StaySummary s;
    double sum = 0.0, sq = 0.0;
    for (std::size_t d = 0; d < by_stay.size(); ++d) {
        s.count += by_stay[d];
        sum += static_cast<double>(by_stay[d]) * static_cast<double>(d);
        sq += static_cast<double>(by_stay[d]) * static_cast<double>(d * d);
    }
    if (s.count > 0) {
        const double n = static_cast<double>(s.count);
        s.mean = sum / n;
        s.stdev = s.count > 1 ? std::sqrt(std::max(0.0, (sq - n * s.mean * s.mean) / (n - 1.0))) : 0.0;
    }
    return s;
}

inline int cmd_los(const std::string& los_path, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto data = io::read_los(los_path);
    const auto km = kaplan_meier(data);
    const auto moments = survival_moments(km);
    const auto discharged = summarize_counts(data.discharged);
    const auto present = summarize_counts(data.censored);

    char buf[128];
    out << "length of stay (days)\n";
    std::snprintf(buf, sizeof buf, "%-32s %10s %8s %8s\n", "", "# patients", "mean", "stdev");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-32s %10ld %8.2f %8.2f\n", "patients discharged or died", discharged.count,
                  discharged.mean, discharged.stdev);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-32s %10ld %8.2f %8.2f\n", "patients currently treated", present.count,
                  present.mean, present.stdev);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-32s %10s %8.2f %8.2f%s\n", "Kaplan-Meier estimate", "", moments.mean,
                  moments.stdev, moments.renormalized ? "  (renormalized at plateau)" : "");
    out << buf;
    if (moments.renormalized)
        err << "warning: Kaplan-Meier curve ends at " << km.tail.back()
            << " above zero; moments are conditioned on stays up to day " << km.t_max() << "\n";

    const double variance = moments.stdev * moments.stdev;
    std::vector<std::pair<LosFamily, std::optional<DiscreteSurvival>>> curves;
    auto fits = io::detail::open_out(out_path(cfg, "los_fits.csv"));
    fits << "family,param1,param2,mean,variance,t_max,truncated_mass\n";
    out << "method-of-moments fits:\n";
    for (LosFamily fam : {LosFamily::lognormal, LosFamily::gamma, LosFamily::weibull}) {
        try {
            const auto dist = fit_mom(fam, moments.mean, variance);
            const auto surv = cfg.los.t_max ? discretize(dist, *cfg.los.t_max) : discretize(dist);
            const auto [m, v] = parametric_moments(dist);
            fits << to_string(fam) << "," << dist.first << "," << dist.second << "," << m << "," << v << ","
                 << surv.t_max() << "," << surv.truncated_mass << "\n";
            out << "  " << to_string(fam) << ": (" << dist.first << ", " << dist.second << ")\n";
            curves.emplace_back(fam, surv);
        } catch (const std::exception& e) {
            err << "warning: " << to_string(fam) << " fit failed: " << e.what() << "\n";
            curves.emplace_back(fam, std::nullopt);
        }
    }

    std::size_t rows = km.t_max();
    for (const auto& c : curves)
        if (c.second) rows = std::max(rows, c.second->t_max());
    auto curve = io::detail::open_out(out_path(cfg, "km.csv"));
    curve << "t,kaplan_meier,lognormal,gamma,weibull\n";
    for (std::size_t t = 0; t <= rows; ++t) {
        curve << t << "," << (t <= km.t_max() ? km.tail[t] : km.tail.back());
        for (const auto& c : curves) {
            curve << ",";
            if (c.second) curve << c.second->at(t);
        }
        curve << "\n";
    }

    if (!cfg.plot_data.empty()) {
        auto f = io::detail::open_out(cfg.plot_data);
        f << "series,t,value\n";
        for (std::size_t t = 0; t <= km.t_max(); ++t) f << "kaplan_meier," << t << "," << km.tail[t] << "\n";
        for (const auto& c : curves)
            if (c.second)
                for (std::size_t t = 0; t <= c.second->t_max(); ++t)
                    f << to_string(c.first) << "," << t << "," << c.second->tail[t] << "\n";
    }
    return 0;
}

/// Forecast from the morning census of the last census date T, using
/// admissions up to T-1.
inline int cmd_forecast(const std::string& admissions_path, const std::string& census_path, const RunConfig& cfg,
                        std::ostream& out, std::ostream& err) {
    const auto admissions = io::read_admissions(admissions_path);
    const auto census = io::read_census(census_path);
    const auto surv = resolve_survival(cfg);

    const Date origin = census.end_date();
    const long known = days_between(admissions.start_date, origin);  // admissions strictly before T
    if (known <= 0 || static_cast<std::size_t>(known) > admissions.size())
        throw io::InputError("admissions must cover every day up to the day before the last census date " +
                             format_date(origin));
    AdmissionSeries history{admissions.start_date,
                            std::vector<double>(admissions.values.begin(), admissions.values.begin() + known)};
    const auto fit = fit_trend(history, cfg.lambda);
    const auto horizon = static_cast<std::size_t>(cfg.max_horizon());
    const auto predicted = predict_admissions(fit, static_cast<int>(horizon));

    std::vector<double> past(history.size());
    for (std::size_t u = 1; u <= history.size(); ++u) past[u - 1] = history.values[history.size() - u];
    ResidualSurvival resid;
    try {
        resid = residual_survival(past, surv);
    } catch (const std::domain_error&) {
        err << "warning: no recent admission can still be present; using the stationary residual stay\n";
        resid = stationary_residual(surv);
    }
    const double n_t = census.values.back();
    const auto fc = forecast_occupancy_poisson(n_t, resid, predicted, surv, horizon, cfg.z);
    {
        auto f = io::detail::open_out(out_path(cfg, "forecast.csv"));
        io::write_forecast_csv(f, origin, fc);
    }
    out << "occupancy forecast from " << format_date(origin) << " (census " << n_t << ", lambda " << cfg.lambda
        << ", z " << cfg.z << ")\n";
    for (std::size_t t = 0; t < horizon; ++t)
        out << "  " << format_date(add_days(origin, static_cast<long>(t + 1))) << "  mean " << fc.mean[t] << "  ["
            << fc.lower[t] << ", " << fc.upper[t] << "]\n";

    std::vector<io::PlotPoint> points;
    for (std::size_t t = 0; t < census.size(); ++t) points.push_back({"occupied", census.date_at(t), census.values[t]});
    for (std::size_t t = 0; t < horizon; ++t) {
        const Date d = add_days(origin, static_cast<long>(t + 1));
        points.push_back({"forecast_mean", d, fc.mean[t]});
        points.push_back({"forecast_lower", d, fc.lower[t]});
        points.push_back({"forecast_upper", d, fc.upper[t]});
    }
    write_plot_data_if_requested(cfg, points);
    return 0;
}

inline BacktestConfig backtest_config(const RunConfig& cfg, double lambda) {
    BacktestConfig bc;
    bc.lambda = lambda;
    bc.horizons = cfg.horizons;
    bc.stride = cfg.stride;
    bc.z = cfg.z;
    bc.rmse_form = cfg.rmse_form;
    return bc;
}

inline int cmd_backtest(const std::string& admissions_path, const std::string& census_path, const RunConfig& cfg,
                        std::ostream& out, std::ostream& err) {
    const auto admissions = io::read_admissions(admissions_path);
    const auto census = io::read_census(census_path);
    const auto surv = resolve_survival(cfg);

    const auto result = rolling_backtest(admissions, census, surv, backtest_config(cfg, cfg.lambda));
    for (const auto& note : result.notes)
        err << (note.skipped ? "skipped origin " : "note: origin ") << format_date(note.origin) << ": "
            << note.message << "\n";
    if (result.records.empty()) throw io::InputError("backtest: no origin could be scored");
    {
        auto f = io::detail::open_out(out_path(cfg, "backtest.csv"));
        io::write_backtest_csv(f, result);
    }
    {
        auto f = io::detail::open_out(out_path(cfg, "metrics.csv"));
        io::write_metrics_csv(f, result.metrics);
    }
    out << "rolling backtest: " << result.origins.size() << " origins " << format_date(result.origins.front())
        << " .. " << format_date(result.origins.back()) << ", lambda " << cfg.lambda << "\n";
    out << io::format_metrics_table(result.metrics);

    if (!cfg.sweep_lambdas.empty()) {
        auto f = io::detail::open_out(out_path(cfg, "sweep.csv"));
        f << "lambda,series,horizon,wape,mae,rmse,n\n";
        out << "lambda sweep:\n";
        for (double lambda : cfg.sweep_lambdas) {
            const auto bt = rolling_backtest(admissions, census, surv, backtest_config(cfg, lambda));
            for (const auto& m : bt.metrics) {
                f << lambda << "," << to_string(m.series) << "," << m.horizon << ",";
                if (m.report.wape) f << *m.report.wape;
                f << "," << m.report.mae << "," << m.report.rmse << "," << m.report.n << "\n";
            }
            out << "lambda = " << lambda << "\n" << io::format_metrics_table(bt.metrics);
        }
    }

    std::vector<io::PlotPoint> points;
    for (const auto& r : result.records) {
        const std::string h = std::to_string(r.horizon);
        const Date arr_day = add_days(r.origin, r.horizon - 1);
        const Date occ_day = add_days(r.origin, r.horizon);
        points.push_back({"arrivals_actual_h" + h, arr_day, r.arrivals_actual});
        points.push_back({"arrivals_predicted_h" + h, arr_day, r.arrivals_predicted});
        points.push_back({"occupancy_actual_h" + h, occ_day, r.occupancy_actual});
        points.push_back({"occupancy_forecasted_arrivals_h" + h, occ_day, r.occupancy_predicted});
        points.push_back({"occupancy_realized_arrivals_h" + h, occ_day, r.occupancy_predicted_realized});
    }
    write_plot_data_if_requested(cfg, points);
    return 0;
}

inline int cmd_simulate(const std::string& scenario_path, const RunConfig& cfg, std::ostream& out) {
    std::optional<std::size_t> days;
    auto scenario = io::read_scenario(scenario_path, &days);
    if (cfg.seed) scenario.seed = *cfg.seed;
    const std::size_t n = days.value_or(scenario.total_days());
    const auto admissions = generate_admissions(scenario, n);
    const auto census = simulate_census(admissions, scenario_survival(scenario), scenario.seed);
    io::write_daily_csv(out_path(cfg, "admissions.csv"), admissions, "admissions");
    io::write_daily_csv(out_path(cfg, "census.csv"), census, "occupied");
    out << "simulated " << n << " days from " << format_date(scenario.start_date) << " (seed " << scenario.seed
        << ") into " << cfg.out_dir << "\n";

    std::vector<io::PlotPoint> points;
    for (std::size_t t = 0; t < n; ++t) {
        points.push_back({"admissions", admissions.date_at(t), admissions.values[t]});
        points.push_back({"occupied", census.date_at(t), census.values[t]});
    }
    write_plot_data_if_requested(cfg, points);
    return 0;
}

inline int cmd_poisson_floor(std::span<const double> mus, std::ostream& out) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%12s %12s %10s %12s\n", "mu", "MAE", "WAPE", "RMSE");
    out << buf;
    for (double mu : mus) {
        const auto f = poisson_error_floor(mu);
        std::snprintf(buf, sizeof buf, "%12g %12.4f %9.3f%% %12.4f\n", mu, f.mae, 100.0 * f.wape, f.rmse);
        out << buf;
    }
    return 0;
}

}  // namespace bedcast::cli
