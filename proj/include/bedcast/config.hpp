#pragma once

// Run configuration: defaults, overridden by a key = value file with one
// section per module, overridden in turn by command-line flags.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bedcast/evaluation.hpp"
#include "bedcast/io.hpp"

namespace bedcast {

struct RunConfig {
    double lambda = kDefaultLambda;
    std::vector<double> sweep_lambdas;  // more than one entry turns a backtest into a sweep
    std::vector<int> horizons{3, 7};
    double z = kDefaultIntervalZ;
    double reproduction_exponent = 4.5;
    std::size_t stride = 1;
    RmseForm rmse_form = RmseForm::standard;
    io::LosSource los;
    bool los_configured = false;
    std::optional<std::uint64_t> seed;  // overrides the scenario seed
    std::string out_dir = ".";
    std::string plot_data;

    int max_horizon() const {
        int h = 0;
        for (int x : horizons) h = std::max(h, x);
        return h;
    }
};

inline void validate(const RunConfig& c) {
    if (!std::isfinite(c.lambda) || c.lambda < 0.0) throw io::InputError("lambda must be finite and non-negative");
    for (double l : c.sweep_lambdas)
        if (!std::isfinite(l) || l < 0.0) throw io::InputError("lambda must be finite and non-negative");
    if (c.horizons.empty()) throw io::InputError("at least one horizon is required");
    for (int h : c.horizons)
        if (h <= 0) throw io::InputError("horizons must be positive");
    if (!(c.z >= 0.0) || !std::isfinite(c.z)) throw io::InputError("z must be finite and non-negative");
    if (!(c.reproduction_exponent > 0.0)) throw io::InputError("reproduction exponent must be positive");
    if (c.stride == 0) throw io::InputError("stride must be positive");
    if (c.los.t_max && *c.los.t_max == 0) throw io::InputError("t_max must be positive");
}

inline std::vector<int> parse_horizons(const std::string& text) {
    std::vector<int> out;
    for (double v : io::parse_number_list(text, "horizons")) {
        if (v != std::floor(v) || v <= 0) throw io::InputError("horizons must be positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

/// Applies a configuration file on top of `cfg`.
///   [trend]     lambda, exponent
///   [los]       family|source, file, mean, variance, t_max, ...
///   [occupancy] z
///   [backtest]  horizons, stride, lambdas, rmse = standard|printed
///   [simulate]  seed
///   [io]        out, plot_data
inline void apply_config(RunConfig& cfg, const io::ptree& tree) {
    using io::detail::get_number_opt;
    if (const auto t = tree.get_child_optional("trend")) {
        if (const auto v = get_number_opt(*t, "lambda", "trend")) cfg.lambda = *v;
        if (const auto v = get_number_opt(*t, "exponent", "trend")) cfg.reproduction_exponent = *v;
    }
    if (const auto t = tree.get_child_optional("los")) {
        cfg.los = io::parse_los_section(*t);
        cfg.los_configured = true;
    }
    if (const auto t = tree.get_child_optional("occupancy")) {
        if (const auto v = get_number_opt(*t, "z", "occupancy")) cfg.z = *v;
    }
    if (const auto t = tree.get_child_optional("backtest")) {
        if (const auto h = t->get_optional<std::string>("horizons")) cfg.horizons = parse_horizons(*h);
        if (const auto v = get_number_opt(*t, "stride", "backtest")) {
            if (*v < 1 || *v != std::floor(*v)) throw io::InputError("[backtest] stride must be a positive integer");
            cfg.stride = static_cast<std::size_t>(*v);
        }
        if (const auto l = t->get_optional<std::string>("lambdas"))
            cfg.sweep_lambdas = io::parse_number_list(*l, "[backtest] lambdas");
        if (const auto r = t->get_optional<std::string>("rmse")) {
            const auto form = io::detail::trim(*r);
            if (form == "standard") cfg.rmse_form = RmseForm::standard;
            else if (form == "printed") cfg.rmse_form = RmseForm::printed;
            else throw io::InputError("[backtest] rmse must be 'standard' or 'printed'");
        }
    }
    if (const auto t = tree.get_child_optional("simulate")) {
        if (const auto s = t->get_optional<std::string>("seed")) {
            try {
                cfg.seed = std::stoull(io::detail::trim(*s));
            } catch (const std::exception&) {
                throw io::InputError("[simulate] seed must be a non-negative integer");
            }
        }
    }
    if (const auto t = tree.get_child_optional("io")) {
        cfg.out_dir = io::detail::trim(t->get<std::string>("out", cfg.out_dir));
        cfg.plot_data = io::detail::trim(t->get<std::string>("plot_data", cfg.plot_data));
    }
}

}  // namespace bedcast
