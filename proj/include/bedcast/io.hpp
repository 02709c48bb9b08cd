#pragma once

// File formats: daily CSV series, LoS records, forecast/backtest outputs,
// the key = value run configuration and the scenario file.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bedcast/admission_trend.hpp"
#include "bedcast/calendar.hpp"
#include "bedcast/evaluation.hpp"
#include "bedcast/los_model.hpp"
#include "bedcast/occupancy_forecast.hpp"
#include "bedcast/simulator.hpp"

namespace bedcast::io {

/// Input problems; the message lists every offending line.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const auto next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t used = 0;
    try {
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline std::optional<long> parse_count(const std::string& s) {
    const auto v = parse_number(s);
    if (!v || *v < 0.0 || *v != std::floor(*v)) return std::nullopt;
    return static_cast<long>(*v);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

inline CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        t.rows.emplace_back(lineno, split(line));
    }
    if (t.header.empty()) throw InputError(source + ": empty file, header required");
    return t;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out.precision(10);
    return out;
}

}  // namespace detail

/// Reads a `date,<column>` CSV of consecutive days with non-negative integer values.
inline DailySeries read_daily_csv(std::istream& in, const std::string& column, const std::string& source = "input") {
    const auto table = detail::read_csv(in, source);
    if (table.header.size() != 2 || table.header[0] != "date" || table.header[1] != column)
        throw InputError(source + ": header must be 'date," + column + "'");
    std::vector<std::string> errors;
    std::vector<std::pair<Date, double>> rows;
    for (const auto& [lineno, fields] : table.rows) {
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (fields.size() != 2) {
            errors.push_back(where + "expected 2 fields, got " + std::to_string(fields.size()));
            continue;
        }
        const auto date = parse_date(fields[0]);
        const auto value = detail::parse_count(fields[1]);
        if (!date) errors.push_back(where + "invalid date '" + fields[0] + "' (expected YYYY-MM-DD)");
        if (!value) errors.push_back(where + "invalid " + column + " '" + fields[1] + "' (expected a non-negative integer)");
        if (date && value) rows.emplace_back(*date, static_cast<double>(*value));
    }
    if (errors.empty() && rows.empty()) errors.push_back(source + ": no data rows");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const long step = days_between(rows[i - 1].first, rows[i].first);
        if (step <= 0) {
            errors.push_back(source + ": dates must be strictly increasing at " + format_date(rows[i].first));
        } else if (step > 1) {
            errors.push_back(source + ": missing dates " + format_date(add_days(rows[i - 1].first, 1)) + " .. " +
                             format_date(add_days(rows[i].first, -1)));
        }
    }
    if (!errors.empty()) {
        std::string msg;
        for (const auto& e : errors) msg += e + "\n";
        msg.pop_back();
        throw InputError(msg);
    }
    DailySeries series;
    series.start_date = rows.front().first;
    for (const auto& r : rows) series.values.push_back(r.second);
    return series;
}

inline DailySeries read_daily_csv(const std::string& path, const std::string& column) {
    auto in = detail::open_in(path);
    return read_daily_csv(in, column, path);
}

inline AdmissionSeries read_admissions(const std::string& path) { return read_daily_csv(path, "admissions"); }
inline CensusSeries read_census(const std::string& path) { return read_daily_csv(path, "occupied"); }

inline void write_daily_csv(std::ostream& out, const DailySeries& s, const std::string& column) {
    out << "date," << column << "\n";
    for (std::size_t i = 0; i < s.size(); ++i) out << format_date(s.date_at(i)) << "," << s.values[i] << "\n";
}

inline void write_daily_csv(const std::string& path, const DailySeries& s, const std::string& column) {
    auto out = detail::open_out(path);
    write_daily_csv(out, s, column);
}

/// LoS CSV: either `stay_days,discharged,censored` (aggregated) or
/// `stay_days,is_censored` (one row per patient).
inline CensoredLosData read_los(std::istream& in, const std::string& source = "input") {
    const auto table = detail::read_csv(in, source);
    const bool aggregated = table.header == std::vector<std::string>{"stay_days", "discharged", "censored"};
    const bool per_patient = table.header == std::vector<std::string>{"stay_days", "is_censored"};
    if (!aggregated && !per_patient)
        throw InputError(source + ": header must be 'stay_days,discharged,censored' or 'stay_days,is_censored'");
    std::vector<std::string> errors;
    CensoredLosData data;
    std::vector<PatientRecord> patients;
    for (const auto& [lineno, f] : table.rows) {
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (f.size() != table.header.size()) {
            errors.push_back(where + "expected " + std::to_string(table.header.size()) + " fields");
            continue;
        }
        const auto stay = detail::parse_count(f[0]);
        if (!stay) {
            errors.push_back(where + "invalid stay_days '" + f[0] + "'");
            continue;
        }
        if (aggregated) {
            const auto d = detail::parse_count(f[1]);
            const auto c = detail::parse_count(f[2]);
            if (!d || !c) {
                errors.push_back(where + "counts must be non-negative integers");
                continue;
            }
            const auto s = static_cast<std::size_t>(*stay);
            if (data.discharged.size() <= s) {
                data.discharged.resize(s + 1, 0);
                data.censored.resize(s + 1, 0);
            }
            data.discharged[s] += *d;
            data.censored[s] += *c;
        } else {
            const std::string& flag = f[1];
            if (flag != "0" && flag != "1" && flag != "true" && flag != "false") {
                errors.push_back(where + "is_censored must be 0/1/true/false");
                continue;
            }
            patients.push_back({*stay, flag == "1" || flag == "true"});
        }
    }
    if (!errors.empty()) {
        std::string msg;
        for (const auto& e : errors) msg += e + "\n";
        msg.pop_back();
        throw InputError(msg);
    }
    if (per_patient) data = aggregate(patients);
    if (data.total_discharged() < 1) throw InputError(source + ": at least one discharged patient is required");
    return data;
}

inline CensoredLosData read_los(const std::string& path) {
    auto in = detail::open_in(path);
    return read_los(in, path);
}

inline void write_forecast_csv(std::ostream& out, Date origin, const OccupancyForecast& f) {
    out << "date,mean,variance,lower,upper\n";
    for (std::size_t t = 0; t < f.horizon_days; ++t)
        out << format_date(add_days(origin, static_cast<long>(t + 1))) << "," << f.mean[t] << "," << f.variance[t]
            << "," << f.lower[t] << "," << f.upper[t] << "\n";
}

/// `series,horizon,wape,mae,rmse,n`; an undefined WAPE is written as an empty field.
inline void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "series,horizon,wape,mae,rmse,n\n";
    for (const auto& r : rows) {
        out << to_string(r.series) << "," << r.horizon << ",";
        if (r.report.wape) out << *r.report.wape;
        out << "," << r.report.mae << "," << r.report.rmse << "," << r.report.n << "\n";
    }
}

struct MetricsCsvRow {
    std::string series;
    int horizon = 0;
    std::optional<double> wape;
    double mae = 0.0, rmse = 0.0;
    std::size_t n = 0;
};

inline std::vector<MetricsCsvRow> read_metrics_csv(std::istream& in, const std::string& source = "metrics") {
    const auto table = detail::read_csv(in, source);
    if (table.header != std::vector<std::string>{"series", "horizon", "wape", "mae", "rmse", "n"})
        throw InputError(source + ": unexpected metrics header");
    std::vector<MetricsCsvRow> out;
    for (const auto& [lineno, f] : table.rows) {
        if (f.size() != 6) throw InputError(source + ":" + std::to_string(lineno) + ": expected 6 fields");
        const auto h = detail::parse_count(f[1]);
        const auto mae = detail::parse_number(f[3]);
        const auto rmse = detail::parse_number(f[4]);
        const auto n = detail::parse_count(f[5]);
        if (!h || !mae || !rmse || !n) throw InputError(source + ":" + std::to_string(lineno) + ": malformed row");
        out.push_back({f[0], static_cast<int>(*h), detail::parse_number(f[2]), *mae, *rmse,
                       static_cast<std::size_t>(*n)});
    }
    return out;
}

inline void write_backtest_csv(std::ostream& out, const BacktestResult& r) {
    out << "origin,horizon,arrivals_date,arrivals_predicted,arrivals_actual,occupancy_date,"
           "occupancy_predicted,occupancy_predicted_realized,occupancy_actual\n";
    for (const auto& rec : r.records)
        out << format_date(rec.origin) << "," << rec.horizon << ","
            << format_date(add_days(rec.origin, rec.horizon - 1)) << "," << rec.arrivals_predicted << ","
            << rec.arrivals_actual << "," << format_date(add_days(rec.origin, rec.horizon)) << ","
            << rec.occupancy_predicted << "," << rec.occupancy_predicted_realized << "," << rec.occupancy_actual
            << "\n";
}

/// Fixed-width table with one row per (series, horizon).
inline std::string format_metrics_table(const std::vector<MetricRow>& rows) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-32s %7s %9s %10s %10s %6s\n", "series", "horizon", "WAPE", "MAE", "RMSE", "n");
    os << buf;
    for (const auto& r : rows) {
        char wape[32] = "n/a";
        if (r.report.wape) std::snprintf(wape, sizeof wape, "%.2f%%", *r.report.wape * 100.0);
        std::snprintf(buf, sizeof buf, "%-32s %7d %9s %10.3f %10.3f %6zu\n", to_string(r.series).c_str(), r.horizon,
                      wape, r.report.mae, r.report.rmse, r.report.n);
        os << buf;
    }
    return os.str();
}

/// Tidy long-format rows for external plotting.
struct PlotPoint {
    std::string series;
    Date date{};
    double value = 0.0;
};

inline void write_plot_data(std::ostream& out, const std::vector<PlotPoint>& points) {
    out << "series,date,value\n";
    for (const auto& p : points) out << p.series << "," << format_date(p.date) << "," << p.value << "\n";
}

// ---------------------------------------------------------------------------
// Key = value files

using boost::property_tree::ptree;

namespace detail {

/// Drops `;` and `#` comments, including ones after a value or section header.
inline std::string strip_ini_comments(std::istream& in) {
    std::string text, line;
    while (std::getline(in, line)) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if ((line[i] == ';' || line[i] == '#') && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
                line.erase(i);
                break;
            }
        }
        text += line;
        text += '\n';
    }
    return text;
}

}  // namespace detail

inline ptree read_ini(std::istream& in, const std::string& source = "config") {
    std::istringstream clean(detail::strip_ini_comments(in));
    ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(clean, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InputError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    return tree;
}

inline ptree read_ini(const std::string& path) {
    auto in = detail::open_in(path);
    return read_ini(in, path);
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& field : detail::split(text)) {
        const auto v = detail::parse_number(field);
        if (!v) throw InputError(what + ": '" + field + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

namespace detail {

inline double get_number(const ptree& t, const std::string& key, const std::string& section) {
    const auto raw = t.get_optional<std::string>(key);
    if (!raw) throw InputError("[" + section + "] missing key '" + key + "'");
    const auto v = parse_number(trim(*raw));
    if (!v) throw InputError("[" + section + "] " + key + " = '" + *raw + "' is not a number");
    return *v;
}

inline std::optional<double> get_number_opt(const ptree& t, const std::string& key, const std::string& section) {
    if (!t.get_optional<std::string>(key)) return std::nullopt;
    return get_number(t, key, section);
}

}  // namespace detail

/// Where the length-of-stay curve comes from.
struct LosSource {
    std::string kind = "km";  // km | lognormal | gamma | weibull | deterministic | geometric
    std::string file;         // km input
    std::optional<double> mean, variance;
    std::optional<double> param1, param2;  // explicit parameters for parametric families
    std::optional<std::size_t> t_max;
    std::size_t days = 1;     // deterministic stay
    double q = 0.5;           // geometric tail ratio
};

inline LosSource parse_los_section(const ptree& sec) {
    LosSource src;
    src.kind = detail::trim(sec.get<std::string>("family", sec.get<std::string>("source", "km")));
    src.file = detail::trim(sec.get<std::string>("file", ""));
    src.mean = detail::get_number_opt(sec, "mean", "los");
    src.variance = detail::get_number_opt(sec, "variance", "los");
    if (const auto t = detail::get_number_opt(sec, "t_max", "los")) src.t_max = static_cast<std::size_t>(*t);
    if (const auto d = detail::get_number_opt(sec, "days", "los")) src.days = static_cast<std::size_t>(*d);
    if (const auto q = detail::get_number_opt(sec, "q", "los")) src.q = *q;
    // Explicit parameters, by family.
    const std::pair<const char*, const char*> names[] = {{"mu", "sigma2"}, {"shape", "rate"}, {"shape", "scale"}};
    for (const auto& [a, b] : names) {
        const auto p1 = detail::get_number_opt(sec, a, "los");
        const auto p2 = detail::get_number_opt(sec, b, "los");
        if (p1 && p2) {
            src.param1 = p1;
            src.param2 = p2;
        }
    }
    return src;
}

inline std::optional<LosFamily> family_from_name(const std::string& name) {
    if (name == "lognormal") return LosFamily::lognormal;
    if (name == "gamma") return LosFamily::gamma;
    if (name == "weibull") return LosFamily::weibull;
    return std::nullopt;
}

/// Builds the parametric or discrete stay law named by `src`.
inline LosSpec resolve_los(const LosSource& src) {
    if (src.kind == "km") {
        if (src.file.empty()) throw InputError("[los] km source needs 'file'");
        return kaplan_meier(read_los(src.file));
    }
    if (src.kind == "deterministic") return deterministic_survival(src.days);
    if (src.kind == "geometric") return geometric_survival(src.q, src.t_max.value_or(kMaxStayDays));
    const auto family = family_from_name(src.kind);
    if (!family) throw InputError("[los] unknown family '" + src.kind + "'");
    ParametricLoS dist;
    if (src.param1 && src.param2) {
        switch (*family) {
            case LosFamily::lognormal: dist = ParametricLoS::lognormal(*src.param1, *src.param2); break;
            case LosFamily::gamma: dist = ParametricLoS::gamma(*src.param1, *src.param2); break;
            case LosFamily::weibull: dist = ParametricLoS::weibull(*src.param1, *src.param2); break;
        }
    } else if (src.mean && src.variance) {
        dist = fit_mom(*family, *src.mean, *src.variance);
    } else {
        throw InputError("[los] " + src.kind + " needs mean/variance or explicit parameters");
    }
    return dist;
}

inline DiscreteSurvival to_survival(const LosSpec& spec, std::optional<std::size_t> t_max = std::nullopt) {
    if (const auto* p = std::get_if<ParametricLoS>(&spec)) return t_max ? discretize(*p, *t_max) : discretize(*p);
    return std::get<DiscreteSurvival>(spec);
}

/// Scenario file:
///   [scenario] start_date, base_intensity, seed, days (optional)
///   [phases]   <name> = <days>, <growth>   (in file order)
///   [weekday]  multipliers = Mon, Tue, ..., Sun  (rescaled to geometric mean 1)
///   [los]      as in the run configuration
inline Scenario parse_scenario(const ptree& tree, std::optional<std::size_t>* days_out = nullptr) {
    Scenario sc;
    const auto sec = tree.get_child_optional("scenario");
    if (!sec) throw InputError("scenario: missing [scenario] section");
    const auto start = parse_date(detail::trim(sec->get<std::string>("start_date", "2020-11-01")));
    if (!start) throw InputError("[scenario] start_date must be YYYY-MM-DD");
    sc.start_date = *start;
    sc.base_intensity = detail::get_number(*sec, "base_intensity", "scenario");
    if (const auto seed = sec->get_optional<std::string>("seed")) {
        try {
            sc.seed = std::stoull(detail::trim(*seed));
        } catch (const std::exception&) {
            throw InputError("[scenario] seed must be a non-negative integer");
        }
    }
    if (days_out) {
        if (const auto d = detail::get_number_opt(*sec, "days", "scenario")) *days_out = static_cast<std::size_t>(*d);
    }

    const auto phases = tree.get_child_optional("phases");
    if (!phases || phases->empty()) throw InputError("scenario: [phases] needs at least one '<name> = <days>, <growth>'");
    sc.phases.clear();
    for (const auto& [name, node] : *phases) {
        const auto v = parse_number_list(node.data(), "[phases] " + name);
        if (v.size() != 2 || v[0] < 1 || v[0] != std::floor(v[0]))
            throw InputError("[phases] " + name + " must be '<days>, <growth>'");
        sc.phases.push_back({static_cast<std::size_t>(v[0]), v[1]});
    }

    if (const auto wd = tree.get_child_optional("weekday")) {
        const auto m = parse_number_list(wd->get<std::string>("multipliers", "1,1,1,1,1,1,1"), "[weekday] multipliers");
        if (m.size() != 7) throw InputError("[weekday] multipliers needs 7 values (Monday first)");
        double log_sum = 0.0;
        for (double x : m) {
            if (!(x > 0.0)) throw InputError("[weekday] multipliers must be positive");
            log_sum += std::log(x);
        }
        const double g = std::exp(log_sum / 7.0);
        for (std::size_t i = 0; i < 7; ++i) sc.weekday_multipliers[i] = m[i] / g;
    }

    const auto los = tree.get_child_optional("los");
    if (!los) throw InputError("scenario: missing [los] section");
    const auto src = parse_los_section(*los);
    sc.los = resolve_los(src);
    if (src.t_max)
        if (const auto* p = std::get_if<ParametricLoS>(&sc.los)) sc.los = discretize(*p, *src.t_max);
    validate(sc);
    return sc;
}

inline Scenario read_scenario(const std::string& path, std::optional<std::size_t>* days_out = nullptr) {
    return parse_scenario(read_ini(path), days_out);
}

}  // namespace bedcast::io
