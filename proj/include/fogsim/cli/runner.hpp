#pragma once

// Runs experiments and writes their artifacts.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "fogsim/cli/config.hpp"
#include "fogsim/cli/report.hpp"
#include "fogsim/scenario/run.hpp"

namespace fogsim::cli {

struct ExperimentResult {
    std::string name;
    std::string dir;
    std::uint64_t probes = 0;
    scenario::TrafficStats stats;
    std::vector<SummaryRow> summary;
    double conservation_gap = 0.0; ///< worst relative attribution mismatch over all probes
    double wall_seconds = 0.0;

    double energy_wh(std::string_view cls) const {
        for (const auto& r : summary)
            if (r.name == cls)
                return r.energy_wh;
        return 0.0;
    }
    double share_pct(std::string_view cls) const {
        for (const auto& r : summary)
            if (r.name == cls)
                return r.share_pct;
        return 0.0;
    }
};

/// Scenario options for a run configuration; loads the taxi profile.
inline scenario::RunOptions run_options(const RunConfig& config) {
    scenario::RunOptions o;
    o.duration = config.duration;
    o.probe_period = config.probe_period;
    o.seed = config.seed;
    o.attribution = config.attribution;
    o.params = config.params;
    try {
        o.profile = config.taxi_profile ? scenario::load_profile_csv(*config.taxi_profile) : scenario::synthetic_profile();
        if (config.taxi_scale != 1.0)
            o.profile = scenario::scaled(o.profile, config.taxi_scale);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return o;
}

/// Runs one experiment and writes infrastructure.csv, applications.csv and
/// summary.csv into `dir`.
inline ExperimentResult run_to_directory(const scenario::ExperimentSpec& spec, const RunConfig& config,
                                         const scenario::RunOptions& options, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.name = spec.name;
    result.dir = dir;

    TimeSeriesWriter series(dir, config.per_entity);
    EnergyTable energy;
    ConservationCheck conservation;
    result.stats = scenario::run_experiment(spec, options, [&](const scenario::CityEngine::ProbeSample& s) {
        series.sample(s.time, s.infrastructure, s.applications);
        energy.sample(s.time, s.infrastructure, s.applications);
        conservation.sample(s.infrastructure, s.applications);
        ++result.probes;
    });
    series.finish();

    result.summary = energy.rows();
    result.conservation_gap = conservation.worst();
    std::ofstream out(dir + "/summary.csv", std::ios::binary);
    out << summary_csv(result.summary);
    if (!out)
        throw Error("write to '" + dir + "/summary.csv' failed");
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Runs every selected experiment into out_dir/<name>, using up to
/// config.workers threads. Results come back in selection order; the first
/// failure (in that order) is rethrown after all workers finish.
inline std::vector<ExperimentResult> run_all(const RunConfig& config) {
    const auto specs = config.selected();
    const auto options = run_options(config);
    std::vector<ExperimentResult> results(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i; (i = next++) < specs.size();) {
            try {
                const std::string dir = (std::filesystem::path(config.out_dir) / specs[i].name).string();
                results[i] = run_to_directory(specs[i], config, options, dir);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(config.workers, specs.size());
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return results;
}

} // namespace fogsim::cli
