#pragma once

// JSON form of a configuration, used for checkpoints. Reservations are not
// stored: loading replays them from the placements, so usage sums come back
// bit-identical.

#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "fogsim/configuration.hpp"
#include "fogsim/power.hpp"

namespace fogsim {

using json = nlohmann::json;

namespace detail {

template <class T>
json optional_to_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from_json(const json& j) {
    if (j.is_null())
        return std::nullopt;
    return j.get<T>();
}

} // namespace detail

inline void to_json(json& j, const Capacity& c) {
    j = c.is_unbounded() ? json{{"unbounded", true}} : json{{"amount", c.amount()}};
}
inline void from_json(const json& j, Capacity& c) {
    c = j.value("unbounded", false) ? Capacity::unbounded() : Capacity::bounded(j.at("amount").get<double>());
}

inline void to_json(json& j, const Location& l) { j = json{{"x", l.x}, {"y", l.y}}; }
inline void from_json(const json& j, Location& l) {
    l.x = j.at("x").get<double>();
    l.y = j.at("y").get<double>();
}

inline void to_json(json& j, const LinearPowerModel& m) {
    j = json{{"type", "linear"}, {"p_static", m.p_static}, {"sigma", m.sigma}, {"c_max", detail::optional_to_json(m.c_max)}};
}
inline void from_json(const json& j, LinearPowerModel& m) {
    m.p_static = j.at("p_static").get<double>();
    m.sigma = j.at("sigma").get<double>();
    m.c_max = detail::optional_from_json<double>(j.at("c_max"));
}

inline void to_json(json& j, const SharedPowerModel& m) {
    j = json{{"type", "shared"}, {"sigma", m.sigma}, {"u", m.u}, {"unit_capacity", m.unit_capacity},
             {"unit_static", m.unit_static}};
}
inline void from_json(const json& j, SharedPowerModel& m) {
    m.sigma = j.at("sigma").get<double>();
    m.u = j.at("u").get<double>();
    m.unit_capacity = j.at("unit_capacity").get<double>();
    m.unit_static = j.at("unit_static").get<double>();
}

inline void to_json(json& j, const DataCenterPowerModel& m) {
    j = json{{"type", "datacenter"}, {"hosts", m.hosts}, {"pue", m.pue}};
}
inline void from_json(const json& j, DataCenterPowerModel& m) {
    m.hosts = j.at("hosts").get<std::vector<LinearPowerModel>>();
    m.pue = j.at("pue").get<double>();
}

inline json inner_to_json(const InnerPowerModel& m) {
    return std::visit([](const auto& model) { return json(model); }, m);
}
inline InnerPowerModel inner_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "linear")
        return j.get<LinearPowerModel>();
    if (type == "shared")
        return j.get<SharedPowerModel>();
    if (type == "datacenter")
        return j.get<DataCenterPowerModel>();
    throw DomainError("unknown inner power model type '" + type + "'");
}

// The adjustment hook is code, not state, and is not serialized.
inline void to_json(json& j, const StatefulPowerModel& m) {
    j = json{{"type", "stateful"},
             {"inner", inner_to_json(m.inner)},
             {"idle_timeout", m.idle_timeout},
             {"asleep", m.asleep()},
             {"idle_since", detail::optional_to_json(m.idle_since)},
             {"last_tick", detail::optional_to_json(m.last_tick)},
             {"history_capacity", m.history.capacity()},
             {"history", std::vector<double>(m.history.begin(), m.history.end())}};
}
inline void from_json(const json& j, StatefulPowerModel& m) {
    m = StatefulPowerModel(inner_from_json(j.at("inner")), j.at("idle_timeout").get<double>(),
                           j.at("history_capacity").get<std::size_t>());
    m.state = j.at("asleep").get<bool>() ? SleepState::asleep : SleepState::awake;
    m.idle_since = detail::optional_from_json<double>(j.at("idle_since"));
    m.last_tick = detail::optional_from_json<double>(j.at("last_tick"));
    for (double x : j.at("history").get<std::vector<double>>())
        m.history.push_back(x);
}

inline json node_model_to_json(const NodePowerModel& m) {
    return std::visit([](const auto& model) { return json(model); }, m);
}
inline NodePowerModel node_model_from_json(const json& j) {
    if (j.at("type").get<std::string>() == "stateful")
        return j.get<StatefulPowerModel>();
    return std::visit([](auto&& inner) -> NodePowerModel { return std::move(inner); }, inner_from_json(j));
}

inline void to_json(json& j, const ComputeNode& n) {
    j = json{{"id", n.id},
             {"kind", n.kind},
             {"capacity", n.capacity},
             {"location", detail::optional_to_json(n.location)},
             {"mobile", n.mobile},
             {"power_model", n.power_model ? node_model_to_json(*n.power_model) : json(nullptr)}};
}
inline void from_json(const json& j, ComputeNode& n) {
    n.id = j.at("id").get<std::string>();
    n.kind = j.at("kind").get<std::string>();
    n.capacity = j.at("capacity").get<Capacity>();
    n.location = detail::optional_from_json<Location>(j.at("location"));
    n.mobile = j.at("mobile").get<bool>();
    const json& pm = j.at("power_model");
    n.power_model = pm.is_null() ? std::nullopt : std::optional<NodePowerModel>(node_model_from_json(pm));
}

inline void to_json(json& j, const NetworkLink& l) {
    j = json{{"id", l.id},           {"kind", l.kind},       {"src", l.src},
             {"dst", l.dst},         {"bandwidth", l.bandwidth}, {"latency", l.latency},
             {"sigma", l.power_model.sigma}};
}
inline void from_json(const json& j, NetworkLink& l) {
    l.id = j.at("id").get<std::string>();
    l.kind = j.at("kind").get<std::string>();
    l.src = j.at("src").get<std::string>();
    l.dst = j.at("dst").get<std::string>();
    l.bandwidth = j.at("bandwidth").get<Capacity>();
    l.latency = j.at("latency").get<double>();
    l.power_model.sigma = j.at("sigma").get<double>();
}

/// Topology and power-model state only; usage comes from placements.
inline json infrastructure_to_json(const Infrastructure& infra) {
    json nodes = json::array();
    for (const ComputeNode& n : infra.nodes())
        nodes.push_back(n);
    json links = json::array();
    for (const NetworkLink& l : infra.links())
        links.push_back(l);
    return json{{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}
inline Infrastructure infrastructure_from_json(const json& j) {
    Infrastructure infra;
    for (const auto& n : j.at("nodes"))
        infra.add_node(n.get<ComputeNode>());
    for (const auto& l : j.at("links"))
        infra.add_link(l.get<NetworkLink>());
    return infra;
}

inline void to_json(json& j, const Application& app) {
    json tasks = json::array();
    for (const auto& [id, t] : app.tasks())
        tasks.push_back(json{{"id", t.id},
                             {"kind", to_string(t.kind)},
                             {"mips", t.mips},
                             {"bound_node", detail::optional_to_json(t.bound_node)}});
    json flows = json::array();
    for (const auto& [id, f] : app.flows())
        flows.push_back(json{{"id", f.id}, {"src", f.src_task}, {"dst", f.dst_task}, {"rate", f.rate}});
    j = json{{"id", app.id()}, {"kind", app.kind()}, {"tasks", std::move(tasks)}, {"flows", std::move(flows)}};
}
inline void from_json(const json& j, Application& app) {
    app = Application(j.at("id").get<std::string>(), j.at("kind").get<std::string>());
    for (const auto& t : j.at("tasks")) {
        const auto kind = t.at("kind").get<std::string>();
        Task task{t.at("id").get<std::string>(),
                  kind == "source" ? TaskKind::source : kind == "sink" ? TaskKind::sink : TaskKind::processing,
                  t.at("mips").get<double>(), detail::optional_from_json<std::string>(t.at("bound_node"))};
        app.add_task(std::move(task));
    }
    for (const auto& f : j.at("flows"))
        app.add_flow({f.at("id").get<std::string>(), f.at("src").get<std::string>(), f.at("dst").get<std::string>(),
                      f.at("rate").get<double>()});
}

inline void to_json(json& j, const Placement& p) {
    j = json{{"app_id", p.app_id},
             {"task_map", p.task_map},
             {"flow_map", p.flow_map},
             {"committed", p.committed},
             {"routed", p.routed}};
}
inline void from_json(const json& j, Placement& p) {
    p.app_id = j.at("app_id").get<std::string>();
    p.task_map = j.at("task_map").get<std::map<std::string, std::string, std::less<>>>();
    p.flow_map = j.at("flow_map").get<std::map<std::string, std::vector<std::string>, std::less<>>>();
    p.committed = j.at("committed").get<bool>();
    p.routed = j.at("routed").get<bool>();
}

template <class State>
json configuration_to_json(const BasicConfiguration<State>& config) {
    json j{{"time", config.time},
           {"infrastructure", infrastructure_to_json(config.infrastructure)},
           {"applications", json::array()},
           {"placements", json::array()}};
    for (const auto& [id, app] : config.applications)
        j["applications"].push_back(app);
    for (const auto& [id, p] : config.placements)
        j["placements"].push_back(p);
    if constexpr (!std::is_same_v<State, std::monostate>)
        j["state"] = config.state;
    return j;
}

/// Rebuilds a configuration and re-acquires every reservation its committed
/// placements hold.
template <class State = std::monostate>
BasicConfiguration<State> configuration_from_json(const json& j) {
    BasicConfiguration<State> config;
    config.time = j.at("time").get<double>();
    config.infrastructure = infrastructure_from_json(j.at("infrastructure"));
    for (const auto& a : j.at("applications")) {
        auto app = a.get<Application>();
        std::string id = app.id();
        config.applications.emplace(std::move(id), std::move(app));
    }
    for (const auto& pj : j.at("placements")) {
        auto p = pj.get<Placement>();
        const Application& app = config.applications.at(p.app_id);
        if (p.committed) {
            for (const auto& [task_id, node] : p.task_map) {
                config.infrastructure.reserve_node(node, app.task(task_id).mips);
                config.infrastructure.track_tasks(node, +1);
            }
            for (const auto& [flow_id, path] : p.flow_map)
                for (const auto& link : path) {
                    config.infrastructure.reserve_link(link, app.flow(flow_id).rate);
                    config.infrastructure.track_flows(link, +1);
                }
        }
        std::string id = p.app_id;
        config.placements.emplace(std::move(id), std::move(p));
    }
    if constexpr (!std::is_same_v<State, std::monostate>)
        config.state = j.at("state").template get<State>();
    return config;
}

} // namespace fogsim
