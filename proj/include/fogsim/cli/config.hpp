#pragma once

// Run configuration: INI file with unit-suffixed keys, then command-line
// overrides.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fogsim/error.hpp"
#include "fogsim/measurement.hpp"
#include "fogsim/scenario/experiment.hpp"

namespace fogsim::cli {

/// Bad configuration file or option; maps to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::vector<std::string> experiments; ///< empty means all
    double duration = 86400.0;            ///< s
    double probe_period = 1.0;            ///< s
    std::uint64_t seed = 1;
    std::string out_dir = "results";
    AttributionMode attribution = AttributionMode::dynamic_only;
    bool per_entity = false; ///< one CSV row per entity / app instead of per class
    unsigned workers = 1;    ///< experiments run concurrently
    std::optional<std::string> taxi_profile;
    double taxi_scale = 1.0;
    scenario::ScenarioParams params;

    std::vector<scenario::ExperimentSpec> selected() const {
        std::vector<scenario::ExperimentSpec> out;
        if (experiments.empty())
            out.assign(scenario::experiments().begin(), scenario::experiments().end());
        for (const auto& name : experiments)
            out.push_back(scenario::experiment(name));
        return out;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used == t.size() && std::isfinite(v))
            return v;
    } catch (const std::logic_error&) {
    }
    throw ConfigError(key + ": '" + text + "' is not a finite number");
}

inline double positive(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (!(v > 0.0))
        throw ConfigError(key + ": must be positive");
    return v;
}

inline double non_negative(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (!(v >= 0.0))
        throw ConfigError(key + ": must not be negative");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    try {
        std::size_t used = 0;
        if (!t.empty() && t[0] != '-') {
            const unsigned long long v = std::stoull(t, &used);
            if (used == t.size())
                return v;
        }
    } catch (const std::logic_error&) {
    }
    throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError(key + ": expected true or false");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter>& setters() {
    using R = RunConfig;
    using S = const std::string&;
    static const std::map<std::string, Setter> table{
        {"run.experiment",
         [](R& c, S, S v) {
             c.experiments.clear();
             for (const auto& name : split_list(v))
                 if (name != "all")
                     c.experiments.push_back(name);
         }},
        {"run.duration_s", [](R& c, S k, S v) { c.duration = non_negative(k, v); }},
        {"run.probe_period_s", [](R& c, S k, S v) { c.probe_period = positive(k, v); }},
        {"run.seed", [](R& c, S k, S v) { c.seed = parse_unsigned(k, v); }},
        {"run.out_dir", [](R& c, S, S v) { c.out_dir = trim(v); }},
        {"run.attribution",
         [](R& c, S k, S v) {
             const auto t = trim(v);
             if (t == "dynamic")
                 c.attribution = AttributionMode::dynamic_only;
             else if (t == "full")
                 c.attribution = AttributionMode::dynamic_and_static;
             else
                 throw ConfigError(k + ": expected 'dynamic' or 'full'");
         }},
        {"run.per_entity_rows", [](R& c, S k, S v) { c.per_entity = parse_bool(k, v); }},
        {"run.workers",
         [](R& c, S k, S v) {
             c.workers = static_cast<unsigned>(parse_unsigned(k, v));
             if (c.workers == 0)
                 throw ConfigError(k + ": must be at least 1");
         }},

        {"scenario.taxi_profile", [](R& c, S, S v) { c.taxi_profile = trim(v); }},
        {"scenario.taxi_scale", [](R& c, S k, S v) { c.taxi_scale = non_negative(k, v); }},
        {"scenario.grid_rows", [](R& c, S k, S v) { c.params.grid_rows = static_cast<int>(parse_unsigned(k, v)); }},
        {"scenario.grid_cols", [](R& c, S k, S v) { c.params.grid_cols = static_cast<int>(parse_unsigned(k, v)); }},
        {"scenario.block_width_m", [](R& c, S k, S v) { c.params.block_width = positive(k, v); }},
        {"scenario.block_height_m", [](R& c, S k, S v) { c.params.block_height = positive(k, v); }},

        {"cloud.sigma_uw_per_mips", [](R& c, S k, S v) { c.params.cloud_sigma = non_negative(k, v) / 1e6; }},

        {"fog.capacity_mips", [](R& c, S k, S v) { c.params.fog_capacity = positive(k, v); }},
        {"fog.static_w", [](R& c, S k, S v) { c.params.fog_static = non_negative(k, v); }},
        {"fog.sigma_uw_per_mips", [](R& c, S k, S v) { c.params.fog_sigma = non_negative(k, v) / 1e6; }},
        {"fog.idle_timeout_s", [](R& c, S k, S v) { c.params.fog_idle_timeout = non_negative(k, v); }},
        {"fog.cap_fraction",
         [](R& c, S k, S v) {
             c.params.fog_cap = positive(k, v);
             if (c.params.fog_cap > 1.0)
                 throw ConfigError(k + ": must not exceed 1");
         }},

        {"wan.up_bandwidth_mbit_per_s", [](R& c, S k, S v) { c.params.wan_up_bandwidth = positive(k, v) * 1e6; }},
        {"wan.down_bandwidth_mbit_per_s", [](R& c, S k, S v) { c.params.wan_down_bandwidth = positive(k, v) * 1e6; }},
        {"wan.latency_ms", [](R& c, S k, S v) { c.params.wan_latency = non_negative(k, v) / 1e3; }},
        {"wan.up_sigma_components_nj_per_bit",
         [](R& c, S k, S v) {
             c.params.wan_up_components_nj.clear();
             for (const auto& item : split_list(v))
                 c.params.wan_up_components_nj.push_back(non_negative(k, item));
         }},
        {"wan.down_sigma_components_nj_per_bit",
         [](R& c, S k, S v) {
             c.params.wan_down_components_nj.clear();
             for (const auto& item : split_list(v))
                 c.params.wan_down_components_nj.push_back(non_negative(k, item));
         }},

        {"wifi.taxi_bandwidth_mbit_per_s", [](R& c, S k, S v) { c.params.wifi_taxi_bandwidth = positive(k, v) * 1e6; }},
        {"wifi.taxi_sigma_nj_per_bit", [](R& c, S k, S v) { c.params.wifi_taxi_sigma = non_negative(k, v) / 1e9; }},
        {"wifi.taxi_latency_ms", [](R& c, S k, S v) { c.params.wifi_taxi_latency = non_negative(k, v) / 1e3; }},
        {"wifi.mesh_bandwidth_mbit_per_s", [](R& c, S k, S v) { c.params.wifi_mesh_bandwidth = positive(k, v) * 1e6; }},
        {"wifi.mesh_sigma_nj_per_bit", [](R& c, S k, S v) { c.params.wifi_mesh_sigma = non_negative(k, v) / 1e9; }},
        {"wifi.mesh_latency_ms", [](R& c, S k, S v) { c.params.wifi_mesh_latency = non_negative(k, v) / 1e3; }},

        {"cctv.video_kbit_per_s", [](R& c, S k, S v) { c.params.cctv_video_rate = non_negative(k, v) * 1e3; }},
        {"cctv.result_kbit_per_s", [](R& c, S k, S v) { c.params.cctv_result_rate = non_negative(k, v) * 1e3; }},
        {"cctv.mips", [](R& c, S k, S v) { c.params.cctv_mips = non_negative(k, v); }},

        {"v2i.sensor_kbit_per_s", [](R& c, S k, S v) { c.params.v2i_sensor_rate = non_negative(k, v) * 1e3; }},
        {"v2i.output_kbit_per_s", [](R& c, S k, S v) { c.params.v2i_output_rate = non_negative(k, v) * 1e3; }},
        {"v2i.mips", [](R& c, S k, S v) { c.params.v2i_mips = non_negative(k, v); }},
    };
    return table;
}

} // namespace detail

/// Applies one `section.key = value` setting.
inline void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    const auto& table = detail::setters();
    auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown configuration key '" + key + "'");
    it->second(config, key, value);
}

/// Reads an INI stream on top of `config`. Every key must be known.
inline void read_config(std::istream& in, RunConfig& config, const std::string& source = "config") {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(source + ": key '" + section + "' must sit inside a [section]");
        for (const auto& [key, value] : body)
            try {
                apply_setting(config, section + "." + key, value.data());
            } catch (const Error& e) {
                throw ConfigError(source + ": " + e.what());
            }
    }
    try {
        (void)config.params.grid();
        (void)config.params.wan_up_sigma();
        (void)config.params.wan_down_sigma();
        config.selected();
    } catch (const Error& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file '" + path + "'");
    RunConfig config;
    read_config(in, config, path);
    return config;
}

} // namespace fogsim::cli
