#pragma once

// Taxi mobility and the V2I applications that follow the taxis around.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogsim/configuration.hpp"
#include "fogsim/orchestration.hpp"
#include "fogsim/scenario/city.hpp"
#include "fogsim/scenario/experiment.hpp"
#include "fogsim/scenario/profile.hpp"

namespace fogsim::scenario {

struct Taxi {
    std::uint64_t number = 0;
    std::string node;
    double spawn = 0.0;
    double speed = 0.0;     ///< m/s
    std::vector<int> route; ///< crossing indices, entry first
    std::string stl;        ///< STL the Wi-Fi link currently points at
    bool has_app = false;
};

struct TrafficStats {
    std::uint64_t spawned = 0;
    std::uint64_t despawned = 0;
    std::uint64_t v2i_placed = 0;
    std::uint64_t v2i_failed = 0;     ///< V2I apps that could not be placed at spawn
    std::uint64_t reroute_failed = 0; ///< V2I apps dropped because a move left no route
    std::uint64_t peak_taxis = 0;
};

/// Scenario part of a configuration.
struct CityState {
    std::mt19937_64 rng;
    std::map<std::uint64_t, Taxi> taxis;
    std::uint64_t next_taxi = 1;
    TrafficStats stats;
};

using CityConfig = BasicConfiguration<CityState>;

/// Fixed inputs of a traffic run.
struct Traffic {
    ExperimentSpec spec;
    ScenarioParams params;
    TaxiProfile profile;
    CityGrid grid;
    PlacementStrategy strategy;

    Traffic(ExperimentSpec s, ScenarioParams p, TaxiProfile prof)
        : spec(std::move(s)), params(std::move(p)), profile(std::move(prof)), grid(params.grid()),
          strategy(strategy_for(spec, params)) {
        profile.check();
    }
};

inline std::string taxi_id(std::uint64_t number) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "taxi-%07llu", static_cast<unsigned long long>(number));
    return buf;
}

inline std::string v2i_id(const std::string& taxi) { return "v2i:" + taxi; }

inline double route_length(const CityGrid& grid, const std::vector<int>& route) {
    double length = 0.0;
    for (std::size_t i = 1; i < route.size(); ++i)
        length += distance(grid.location(grid.crossing(route[i - 1])), grid.location(grid.crossing(route[i])));
    return length;
}

/// Point reached after driving `d` meters along the route; clamps to the ends.
inline Location position_along(const CityGrid& grid, const std::vector<int>& route, double d) {
    Location at = grid.location(grid.crossing(route.front()));
    for (std::size_t i = 1; i < route.size(); ++i) {
        const Location next = grid.location(grid.crossing(route[i]));
        const double seg = distance(at, next);
        if (d <= seg) {
            const double f = d / seg;
            return {at.x + (next.x - at.x) * f, at.y + (next.y - at.y) * f};
        }
        d -= seg;
        at = next;
    }
    return at;
}

namespace detail {

inline void despawn(CityConfig& config, Taxi& taxi) {
    if (taxi.has_app)
        undeploy(config, v2i_id(taxi.node));
    config.infrastructure.remove_node(taxi.node);
    ++config.state.stats.despawned;
}

inline void reattach(CityConfig& config, Taxi& taxi, const std::string& stl, const Traffic& traffic) {
    Infrastructure& infra = config.infrastructure;
    const std::string app_id = v2i_id(taxi.node);
    Placement* p = nullptr;
    const Application* app = nullptr;
    if (taxi.has_app) {
        p = &config.placements.at(app_id);
        app = &config.applications.at(app_id);
        release_routes(*p, *app, infra, taxi.node);
    }
    infra.remove_link(wifi_id(taxi.node, taxi.stl));
    infra.add_link({wifi_id(taxi.node, stl), "wifi", taxi.node, stl,
                    Capacity::bounded(traffic.params.wifi_taxi_bandwidth), 0.0, 0, traffic.params.wifi_taxi_latency,
                    LinkPowerModel{traffic.params.wifi_taxi_sigma}});
    taxi.stl = stl;
    if (taxi.has_app) {
        try {
            route_flows(*p, *app, infra);
        } catch (const PlacementError&) {
            undeploy(config, app_id);
            taxi.has_app = false;
            ++config.state.stats.reroute_failed;
        }
    }
}

inline void spawn(CityConfig& config, double t, int minute, const Traffic& traffic) {
    CityState& state = config.state;
    Taxi taxi;
    taxi.number = state.next_taxi++;
    taxi.node = taxi_id(taxi.number);
    taxi.spawn = t;
    taxi.speed = traffic.profile.speed[minute];
    std::vector<std::string> route_stls;
    for (const Crossing c : random_route(traffic.grid, state.rng)) {
        taxi.route.push_back(traffic.grid.index(c));
        route_stls.push_back(traffic.grid.stl_id(c));
    }
    const Location at = traffic.grid.location(traffic.grid.crossing(taxi.route.front()));
    taxi.stl = traffic.grid.stl_id(traffic.grid.nearest(at));

    Infrastructure& infra = config.infrastructure;
    infra.add_node({taxi.node, "taxi", Capacity::bounded(0.0), 0.0, 0, at, true, std::nullopt});
    infra.add_link({wifi_id(taxi.node, taxi.stl), "wifi", taxi.node, taxi.stl,
                    Capacity::bounded(traffic.params.wifi_taxi_bandwidth), 0.0, 0, traffic.params.wifi_taxi_latency,
                    LinkPowerModel{traffic.params.wifi_taxi_sigma}});
    ++state.stats.spawned;
    try {
        deploy(config, make_v2i_app(v2i_id(taxi.node), taxi.node, route_stls, traffic.params), traffic.strategy);
        taxi.has_app = true;
        ++state.stats.v2i_placed;
    } catch (const PlacementError&) {
        ++state.stats.v2i_failed;
    }
    state.taxis.emplace(taxi.number, std::move(taxi));
}

} // namespace detail

/// One second of traffic at time t (whole seconds): finished taxis leave,
/// the rest move and hop to the nearest STL, then this second's arrivals
/// enter. Minute m of the profile spreads its arrivals evenly over its 60
/// seconds; runs longer than a day wrap around.
inline void step_traffic(CityConfig& config, const Traffic& traffic, double t) {
    CityState& state = config.state;
    for (auto it = state.taxis.begin(); it != state.taxis.end();) {
        Taxi& taxi = it->second;
        const double driven = (t - taxi.spawn) * taxi.speed;
        if (driven >= route_length(traffic.grid, taxi.route)) {
            detail::despawn(config, taxi);
            it = state.taxis.erase(it);
            continue;
        }
        const Location at = position_along(traffic.grid, taxi.route, driven);
        config.infrastructure.set_location(taxi.node, at);
        const std::string stl = traffic.grid.stl_id(traffic.grid.nearest(at));
        if (stl != taxi.stl)
            detail::reattach(config, taxi, stl, traffic);
        ++it;
    }

    const auto second = static_cast<std::int64_t>(std::floor(t));
    const int minute = static_cast<int>((second / 60) % TaxiProfile::minutes);
    const std::int64_t s = second % 60;
    const std::int64_t count = traffic.profile.count[minute];
    // Arrival i of the minute enters at second floor(60 i / count).
    const std::int64_t first = (s * count + 59) / 60;
    const std::int64_t last = ((s + 1) * count + 59) / 60;
    for (std::int64_t i = first; i < last; ++i)
        detail::spawn(config, t, minute, traffic);

    state.stats.peak_taxis = std::max<std::uint64_t>(state.stats.peak_taxis, state.taxis.size());
}

/// Infrastructure, CCTV applications and a seeded RNG at t = 0.
inline CityConfig initial_configuration(const Traffic& traffic, std::uint64_t seed) {
    CityConfig config;
    config.infrastructure = build_infrastructure(traffic.spec, traffic.params);
    config.state.rng.seed(seed);
    spawn_cctv_apps(config, traffic.spec, traffic.params);
    return config;
}

inline void to_json(nlohmann::json& j, const Taxi& t) {
    j = nlohmann::json{{"number", t.number}, {"node", t.node},   {"spawn", t.spawn},    {"speed", t.speed},
                       {"route", t.route},   {"stl", t.stl},     {"has_app", t.has_app}};
}
inline void from_json(const nlohmann::json& j, Taxi& t) {
    t.number = j.at("number").get<std::uint64_t>();
    t.node = j.at("node").get<std::string>();
    t.spawn = j.at("spawn").get<double>();
    t.speed = j.at("speed").get<double>();
    t.route = j.at("route").get<std::vector<int>>();
    t.stl = j.at("stl").get<std::string>();
    t.has_app = j.at("has_app").get<bool>();
}

inline void to_json(nlohmann::json& j, const TrafficStats& s) {
    j = nlohmann::json{{"spawned", s.spawned},       {"despawned", s.despawned},
                       {"v2i_placed", s.v2i_placed}, {"v2i_failed", s.v2i_failed},
                       {"reroute_failed", s.reroute_failed}, {"peak_taxis", s.peak_taxis}};
}
inline void from_json(const nlohmann::json& j, TrafficStats& s) {
    s.spawned = j.at("spawned").get<std::uint64_t>();
    s.despawned = j.at("despawned").get<std::uint64_t>();
    s.v2i_placed = j.at("v2i_placed").get<std::uint64_t>();
    s.v2i_failed = j.at("v2i_failed").get<std::uint64_t>();
    s.reroute_failed = j.at("reroute_failed").get<std::uint64_t>();
    s.peak_taxis = j.at("peak_taxis").get<std::uint64_t>();
}

inline void to_json(nlohmann::json& j, const CityState& s) {
    std::ostringstream rng;
    rng << s.rng;
    nlohmann::json taxis = nlohmann::json::array();
    for (const auto& [number, taxi] : s.taxis)
        taxis.push_back(taxi);
    j = nlohmann::json{{"rng", rng.str()}, {"taxis", std::move(taxis)}, {"next_taxi", s.next_taxi}, {"stats", s.stats}};
}
inline void from_json(const nlohmann::json& j, CityState& s) {
    std::istringstream rng(j.at("rng").get<std::string>());
    rng >> s.rng;
    if (!rng)
        throw DomainError("malformed RNG state in checkpoint");
    s.taxis.clear();
    for (const auto& t : j.at("taxis")) {
        auto taxi = t.get<Taxi>();
        const auto number = taxi.number;
        s.taxis.emplace(number, std::move(taxi));
    }
    s.next_taxi = j.at("next_taxi").get<std::uint64_t>();
    s.stats = j.at("stats").get<TrafficStats>();
}

} // namespace fogsim::scenario
