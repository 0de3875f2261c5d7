#pragma once

// Smart-city experiments: infrastructure parameters, the eight experiment
// definitions and the two application generators.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/application.hpp"
#include "fogsim/configuration.hpp"
#include "fogsim/error.hpp"
#include "fogsim/infrastructure.hpp"
#include "fogsim/orchestration.hpp"
#include "fogsim/power.hpp"
#include "fogsim/scenario/city.hpp"

namespace fogsim::scenario {

/// Every physical constant of the scenario, in SI units (W, W/MIPS, J/bit,
/// bit/s, s, m).
struct ScenarioParams {
    int grid_rows = 4;
    int grid_cols = 4;
    double block_width = 274.0;
    double block_height = 80.0;

    double cloud_sigma = 700e-6;

    double fog_capacity = 400000.0;
    double fog_static = 100.0;
    double fog_sigma = 350e-6;
    double fog_idle_timeout = 5.0;
    double fog_cap = 0.85;

    // nJ/bit per device on the path; summed exactly into the link sigma.
    std::vector<double> wan_up_components_nj{438.4, 6200.0, 5.9, 13.5, 0.4};
    std::vector<double> wan_down_components_nj{52.0, 20500.0, 5.9, 13.5, 0.4};
    double wan_up_bandwidth = 50e6;
    double wan_down_bandwidth = 100e6;
    double wan_latency = 0.020;

    double wifi_taxi_bandwidth = 1.3e9;
    double wifi_taxi_sigma = 300e-9;
    double wifi_taxi_latency = 0.002;
    double wifi_mesh_bandwidth = 1.3e9;
    double wifi_mesh_sigma = 100e-9;
    double wifi_mesh_latency = 0.002;

    double cctv_video_rate = 10e6;
    double cctv_result_rate = 200e3;
    double cctv_mips = 30000.0;

    double v2i_sensor_rate = 100e3;
    double v2i_output_rate = 50e3;
    double v2i_mips = 7000.0;

    double wan_up_sigma() const { return compose_link_sigma(wan_up_components_nj) / 1e9; }
    double wan_down_sigma() const { return compose_link_sigma(wan_down_components_nj) / 1e9; }
    CityGrid grid() const { return CityGrid(grid_rows, grid_cols, block_width, block_height); }
};

struct ExperimentSpec {
    std::string name;
    int fog_nodes = 0;
    PlacementStrategy::Kind strategy = PlacementStrategy::Kind::cloud_only;
    bool sleep = false; ///< idle fog nodes switch off
};

inline const std::array<ExperimentSpec, 8>& experiments() {
    using K = PlacementStrategy::Kind;
    static const std::array<ExperimentSpec, 8> all{{
        {"CloudOnly", 0, K::cloud_only, false},
        {"Fog1", 1, K::even_spread, false},
        {"Fog2", 2, K::even_spread, false},
        {"Fog3", 3, K::even_spread, false},
        {"Fog4", 4, K::even_spread, false},
        {"Fog5", 5, K::even_spread, false},
        {"Fog6", 6, K::even_spread, false},
        {"Fog6s", 6, K::consolidate, true},
    }};
    return all;
}

inline const ExperimentSpec& experiment(std::string_view name) {
    for (const auto& e : experiments())
        if (e.name == name)
            return e;
    throw NotFoundError("unknown experiment '" + std::string(name) + "'");
}

inline PlacementStrategy strategy_for(const ExperimentSpec& spec, const ScenarioParams& params) {
    return {spec.strategy, params.fog_cap};
}

inline constexpr std::string_view cloud_id = "cloud";

inline std::string wan_up_id(const std::string& stl) { return "wan-up:" + stl; }
inline std::string wan_down_id(const std::string& stl) { return "wan-down:" + stl; }
inline std::string mesh_id(const std::string& a, const std::string& b) { return "mesh:" + a + ">" + b; }
inline std::string local_id(const std::string& a, const std::string& b) { return "local:" + a + ">" + b; }
inline std::string wifi_id(const std::string& taxi, const std::string& stl) { return "wifi:" + taxi + ">" + stl; }

/// Cloud, one STL per crossing with WAN links and a Wi-Fi mesh, and the
/// experiment's fog nodes. A fog node is a separate node wired to its STL by
/// a pair of lossless, instantaneous local links.
inline Infrastructure build_infrastructure(const ExperimentSpec& spec, const ScenarioParams& params) {
    const CityGrid grid = params.grid();
    Infrastructure infra;

    infra.add_node({std::string(cloud_id), "cloud", Capacity::unbounded(), 0.0, 0, std::nullopt, false,
                    NodePowerModel{LinearPowerModel{0.0, params.cloud_sigma, std::nullopt}}});

    const double up_sigma = params.wan_up_sigma();
    const double down_sigma = params.wan_down_sigma();
    for (int i = 0; i < grid.crossing_count(); ++i) {
        const Crossing c = grid.crossing(i);
        const std::string stl = grid.stl_id(c);
        infra.add_node({stl, "stl", Capacity::bounded(0.0), 0.0, 0, grid.location(c), false, std::nullopt});
        infra.add_link({wan_up_id(stl), "wan", stl, std::string(cloud_id), Capacity::bounded(params.wan_up_bandwidth),
                        0.0, 0, params.wan_latency, LinkPowerModel{up_sigma}});
        infra.add_link({wan_down_id(stl), "wan", std::string(cloud_id), stl,
                        Capacity::bounded(params.wan_down_bandwidth), 0.0, 0, params.wan_latency,
                        LinkPowerModel{down_sigma}});
    }
    for (int i = 0; i < grid.crossing_count(); ++i) {
        const Crossing c = grid.crossing(i);
        for (const Crossing n : grid.neighbors(c)) {
            const std::string a = grid.stl_id(c);
            const std::string b = grid.stl_id(n);
            infra.add_link({mesh_id(a, b), "wifi", a, b, Capacity::bounded(params.wifi_mesh_bandwidth), 0.0, 0,
                            params.wifi_mesh_latency, LinkPowerModel{params.wifi_mesh_sigma}});
        }
    }

    const LinearPowerModel fog_model{params.fog_static, params.fog_sigma, params.fog_capacity};
    for (const Crossing c : fog_sites(grid, spec.fog_nodes)) {
        const std::string fog = grid.fog_id(c);
        const std::string stl = grid.stl_id(c);
        NodePowerModel model = spec.sleep ? NodePowerModel{StatefulPowerModel(fog_model, params.fog_idle_timeout)}
                                          : NodePowerModel{fog_model};
        infra.add_node({fog, "fog", Capacity::bounded(params.fog_capacity), 0.0, 0, grid.location(c), false,
                        std::move(model)});
        infra.add_link({local_id(stl, fog), "local", stl, fog, Capacity::unbounded(), 0.0, 0, 0.0, LinkPowerModel{}});
        infra.add_link({local_id(fog, stl), "local", fog, stl, Capacity::unbounded(), 0.0, 0, 0.0, LinkPowerModel{}});
    }
    return infra;
}

/// Camera at an STL: video to a processing task, results to the cloud.
inline Application make_cctv_app(const std::string& stl, const ScenarioParams& params) {
    Application app("cctv:" + stl, "cctv");
    app.add_task({"source", TaskKind::source, 0.0, stl});
    app.add_task({"process", TaskKind::processing, params.cctv_mips, std::nullopt});
    app.add_task({"sink", TaskKind::sink, 0.0, std::string(cloud_id)});
    app.add_flow({"video", "source", "process", params.cctv_video_rate});
    app.add_flow({"result", "process", "sink", params.cctv_result_rate});
    return app;
}

/// Vehicle sensor stream processed once and forwarded to every STL on the
/// route.
inline Application make_v2i_app(const std::string& app_id, const std::string& vehicle,
                                const std::vector<std::string>& route_stls, const ScenarioParams& params) {
    Application app(app_id, "v2i");
    app.add_task({"source", TaskKind::source, 0.0, vehicle});
    app.add_task({"process", TaskKind::processing, params.v2i_mips, std::nullopt});
    app.add_flow({"sensor", "source", "process", params.v2i_sensor_rate});
    for (const auto& stl : route_stls) {
        if (app.tasks().contains("sink:" + stl))
            continue;
        app.add_task({"sink:" + stl, TaskKind::sink, 0.0, stl});
        app.add_flow({"out:" + stl, "process", "sink:" + stl, params.v2i_output_rate});
    }
    return app;
}

/// Deploys one CCTV application per STL, in STL id order.
template <class State>
void spawn_cctv_apps(BasicConfiguration<State>& config, const ExperimentSpec& spec, const ScenarioParams& params) {
    const CityGrid grid = params.grid();
    std::vector<std::string> stls;
    for (int i = 0; i < grid.crossing_count(); ++i)
        stls.push_back(grid.stl_id(grid.crossing(i)));
    std::sort(stls.begin(), stls.end());
    for (const auto& stl : stls)
        deploy(config, make_cctv_app(stl, params), strategy_for(spec, params));
}

} // namespace fogsim::scenario
