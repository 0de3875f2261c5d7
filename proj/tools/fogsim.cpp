// fogsim: run the smart-city experiments and print energy summaries.
//
//   fogsim run [--config FILE] [--experiment NAME|all] [--duration SECS]
//              [--probe-period SECS] [--seed N] [--out DIR]
//              [--attribution dynamic|full]
//   fogsim summarize DIR
//
// Exit status: 0 success, 1 simulation or I/O failure, 2 bad configuration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogsim/cli/runner.hpp"

namespace {

using namespace fogsim;

void print_result(const cli::ExperimentResult& r) {
    std::printf("%-9s %6llu probes  total %10.1f Wh  cloud %5.1f%%  fog %5.1f%%  wan %5.1f%%  wifi %5.1f%%  "
                "taxis %llu  v2i unplaced %llu  dropped %llu  (%.1f s)\n",
                r.name.c_str(), static_cast<unsigned long long>(r.probes), r.energy_wh("total"),
                r.share_pct("cloud"), r.share_pct("fog-static") + r.share_pct("fog-dynamic"), r.share_pct("wan"),
                r.share_pct("wifi"), static_cast<unsigned long long>(r.stats.spawned),
                static_cast<unsigned long long>(r.stats.v2i_failed),
                static_cast<unsigned long long>(r.stats.reroute_failed), r.wall_seconds);
}

// One table over every <dir>/<experiment>/summary.csv, rows in class order.
int summarize(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> names;
    std::map<std::string, std::map<std::string, std::string>> energy;
    std::vector<std::string> classes;
    if (!fs::is_directory(dir)) {
        std::cerr << "fogsim: '" << dir << "' is not a directory\n";
        return 1;
    }
    std::vector<fs::path> runs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (fs::exists(entry.path() / "summary.csv"))
            runs.push_back(entry.path());
    std::sort(runs.begin(), runs.end());
    for (const auto& run : runs) {
        std::ifstream in(run / "summary.csv");
        std::string line;
        std::getline(in, line);
        const std::string name = run.filename().string();
        names.push_back(name);
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string cls, wh;
            std::getline(row, cls, ',');
            std::getline(row, wh, ',');
            if (std::find(classes.begin(), classes.end(), cls) == classes.end())
                classes.push_back(cls);
            energy[cls][name] = wh;
        }
    }
    if (names.empty()) {
        std::cerr << "fogsim: no summary.csv found below '" << dir << "'\n";
        return 1;
    }
    std::printf("%-14s", "Wh");
    for (const auto& n : names)
        std::printf(" %12s", n.c_str());
    std::printf("\n");
    for (const auto& cls : classes) {
        std::printf("%-14s", cls.c_str());
        for (const auto& n : names) {
            auto it = energy[cls].find(n);
            std::printf(" %12s", it == energy[cls].end() ? "-" : it->second.c_str());
        }
        std::printf("\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fog computing energy simulator: smart-city taxi scenario"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run experiments and write CSV artifacts");
    std::optional<std::string> config_path, experiment, out, attribution;
    std::optional<double> duration, probe_period;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "INI configuration file");
    run->add_option("--experiment", experiment, "CloudOnly, Fog1..Fog6, Fog6s, a comma list, or all");
    run->add_option("--duration", duration, "Simulated seconds")->check(CLI::NonNegativeNumber);
    run->add_option("--probe-period", probe_period, "Seconds between measurements")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "RNG seed for taxi routes");
    run->add_option("--out", out, "Output directory");
    run->add_option("--attribution", attribution, "dynamic or full")->check(CLI::IsMember({"dynamic", "full"}));

    auto* sum = app.add_subcommand("summarize", "Print the energy table of a finished run");
    std::string summary_dir;
    sum->add_option("dir", summary_dir, "Output directory of a run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (sum->parsed())
        return summarize(summary_dir);

    cli::RunConfig config;
    try {
        if (config_path)
            config = cli::load_config(*config_path);
        if (experiment)
            cli::apply_setting(config, "run.experiment", *experiment);
        if (duration)
            config.duration = *duration;
        if (probe_period)
            config.probe_period = *probe_period;
        if (seed)
            config.seed = *seed;
        if (out)
            config.out_dir = *out;
        if (attribution)
            cli::apply_setting(config, "run.attribution", *attribution);
        (void)config.selected();
    } catch (const fogsim::Error& e) {
        std::cerr << "fogsim: configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        for (const auto& r : cli::run_all(config))
            print_result(r);
    } catch (const cli::ConfigError& e) {
        std::cerr << "fogsim: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fogsim: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
