// Command-line backtest runner. Flags override values from the config file.

#include "tubeosc/backtest.hpp"
#include "tubeosc/errors.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDataMissing = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tube oscillator backtest"};
    std::string config_path;
    std::optional<std::string> instrument;
    std::optional<std::string> from;
    std::optional<std::string> to;
    bool trace = false;
    std::optional<std::string> trace_days;
    std::optional<std::string> out;
    std::optional<int> delay;
    std::optional<std::string> thresholds;
    std::optional<std::string> bandwidth;
    std::optional<std::string> multiplicator;
    std::optional<std::string> threads;

    app.add_option("--config", config_path, "config file")->required();
    app.add_option("--instrument", instrument, "instrument section to run");
    app.add_option("--from", from, "first day, YYYY-MM-DD");
    app.add_option("--to", to, "last day, YYYY-MM-DD");
    app.add_flag("--trace", trace, "record per-second traces and write per-day plot data");
    app.add_option("--trace-days", trace_days, "comma-separated days to trace (default: all)");
    app.add_option("--out", out, "output directory");
    app.add_option("--delay", delay, "execution delay in seconds")->check(CLI::IsMember({0, 1}));
    app.add_option("--thresholds", thresholds, "IN/OUT long thresholds, mirrored for shorts");
    app.add_option("--bandwidth", bandwidth, "sliding window length in seconds");
    app.add_option("--multiplicator", multiplicator, "oscillator scale factor");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = tubeosc::load_config(config_path, instrument);
        const std::filesystem::path cwd = std::filesystem::current_path();
        std::vector<std::pair<std::string, std::optional<std::string>>> overrides{
            {"from", from},
            {"to", to},
            {"output_dir", out},
            {"delay", delay ? std::optional<std::string>(std::to_string(*delay)) : std::nullopt},
            {"thresholds", thresholds},
            {"bandwidth", bandwidth},
            {"multiplicator", multiplicator},
            {"threads", threads},
            {"trace_days", trace_days},
        };
        for (const auto& [key, value] : overrides) {
            if (value) {
                tubeosc::apply_setting(config, key, *value, cwd);
            }
        }
        if (trace || trace_days) {
            config.trace = true;
        }
        config.finalize();

        const auto report = tubeosc::run_backtest(config);
        tubeosc::write_report(report, config.output_dir);
        if (config.trace) {
            tubeosc::emit_plot_data(report, {}, config.output_dir);
        }
        for (const auto& w : report.warnings) {
            std::cerr << "warning: " << w << '\n';
        }
        std::cout << "trades " << report.ledger.size() << ", final balance " << report.final_balance
                  << ", traded days " << report.count(tubeosc::DayStatus::Traded) << ", skipped days "
                  << report.count(tubeosc::DayStatus::Skipped) << '\n';
        return report.data_missing ? kExitDataMissing : 0;
    } catch (const tubeosc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
