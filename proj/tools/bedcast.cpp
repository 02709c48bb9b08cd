#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<double> lambdas;
    std::vector<int> horizons;
    std::optional<double> z;
    std::optional<std::uint64_t> seed;
    std::string plot_data;
    std::string out;
    std::string los;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--lambda", f.lambdas, "smoothing parameter; several values run a sweep")->delimiter(',');
    cmd->add_option("--horizon", f.horizons, "days ahead (backtest: list, e.g. 3,7)")->delimiter(',');
    cmd->add_option("--z", f.z, "interval half-width in standard deviations");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--plot-data", f.plot_data, "write tidy series,date,value CSV here");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--los", f.los, "length-of-stay CSV (Kaplan-Meier source)")->check(CLI::ExistingFile);
}

bedcast::RunConfig resolve(const Flags& f) {
    bedcast::RunConfig cfg;
    if (!f.config.empty()) bedcast::apply_config(cfg, bedcast::io::read_ini(f.config));
    if (!f.lambdas.empty()) {
        cfg.lambda = f.lambdas.front();
        if (f.lambdas.size() > 1) cfg.sweep_lambdas = f.lambdas;
    }
    if (!f.horizons.empty()) cfg.horizons = f.horizons;
    if (f.z) cfg.z = *f.z;
    if (f.seed) cfg.seed = *f.seed;
    if (!f.plot_data.empty()) cfg.plot_data = f.plot_data;
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (!f.los.empty()) {
        cfg.los.kind = "km";
        cfg.los.file = f.los;
        cfg.los_configured = true;
    }
    bedcast::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bedcast: admissions trend, length of stay and bed occupancy forecasting"};
    app.require_subcommand(1);
    Flags flags;

    std::string admissions, census, los_file, scenario;
    std::vector<double> mus;

    auto* fit = app.add_subcommand("fit", "fit the seasonal log-trend and predict admissions");
    fit->add_option("admissions", admissions, "admissions CSV (date,admissions)")->required()->check(CLI::ExistingFile);
    add_common(fit, flags);

    auto* los = app.add_subcommand("los", "Kaplan-Meier curve and parametric length-of-stay fits");
    los->add_option("los_csv", los_file, "LoS CSV")->required()->check(CLI::ExistingFile);
    add_common(los, flags);

    auto* forecast = app.add_subcommand("forecast", "occupancy forecast from the last census date");
    forecast->add_option("admissions", admissions)->required()->check(CLI::ExistingFile);
    forecast->add_option("census", census, "census CSV (date,occupied)")->required()->check(CLI::ExistingFile);
    add_common(forecast, flags);

    auto* backtest = app.add_subcommand("backtest", "rolling-origin backtest of arrivals and occupancy");
    backtest->add_option("admissions", admissions)->required()->check(CLI::ExistingFile);
    backtest->add_option("census", census)->required()->check(CLI::ExistingFile);
    add_common(backtest, flags);

    auto* simulate = app.add_subcommand("simulate", "generate synthetic admissions and census");
    simulate->add_option("scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
    add_common(simulate, flags);

    auto* floor = app.add_subcommand("poisson-floor", "error floor for predicting a Poisson variable by its mean");
    floor->add_option("mu", mus, "Poisson means")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        namespace cli = bedcast::cli;
        if (*floor) return cli::cmd_poisson_floor(mus, std::cout);
        const auto cfg = resolve(flags);
        if (*fit) return cli::cmd_fit(admissions, cfg, std::cout);
        if (*los) return cli::cmd_los(los_file, cfg, std::cout, std::cerr);
        if (*forecast) return cli::cmd_forecast(admissions, census, cfg, std::cout, std::cerr);
        if (*backtest) return cli::cmd_backtest(admissions, census, cfg, std::cout, std::cerr);
        if (*simulate) return cli::cmd_simulate(scenario, cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
