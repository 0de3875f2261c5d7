#pragma once

// Infrastructure-wide power measurement and attribution of that power to the
// applications that cause it.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/application.hpp"
#include "fogsim/error.hpp"
#include "fogsim/infrastructure.hpp"
#include "fogsim/power.hpp"

namespace fogsim {

struct EntityPower {
    std::string_view id;   ///< points into the measured infrastructure
    std::string_view kind;
    PowerMeasurement power;
};

/// One measurement per node and per link, each sorted by id. The views stay
/// valid until the measured infrastructure is modified.
struct InfrastructurePower {
    std::vector<EntityPower> nodes;
    std::vector<EntityPower> links;
    std::vector<std::size_t> node_position; ///< node slot -> index into `nodes`

    PowerMeasurement total() const {
        PowerMeasurement sum;
        for (const auto& e : nodes)
            sum += e.power;
        for (const auto& e : links)
            sum += e.power;
        return sum;
    }

    const PowerMeasurement* find_node(std::string_view id) const { return find(nodes, id); }
    const PowerMeasurement* find_link(std::string_view id) const { return find(links, id); }

private:
    static const PowerMeasurement* find(const std::vector<EntityPower>& v, std::string_view id) {
        auto it = std::lower_bound(v.begin(), v.end(), id, [](const EntityPower& e, std::string_view k) { return e.id < k; });
        return (it != v.end() && it->id == id) ? &it->power : nullptr;
    }
};

namespace detail {

template <class NodeFn>
InfrastructurePower measure_with(const Infrastructure& infra, NodeFn&& node_power) {
    InfrastructurePower out;
    out.nodes.reserve(infra.node_count());
    out.links.reserve(infra.link_count());
    out.node_position.assign(infra.slot_count(), Infrastructure::npos);
    for (const ComputeNode& n : infra.nodes()) {
        out.node_position[infra.node_slot(n.id)] = out.nodes.size();
        out.nodes.push_back({n.id, n.kind, n.power_model ? node_power(n) : PowerMeasurement{}});
    }
    for (const NetworkLink& l : infra.links())
        out.links.push_back({l.id, l.kind, link_power(l.power_model, l.used)});
    return out;
}

} // namespace detail

/// Power of every entity at time `now`. Stateful models advance to `now`;
/// call at most once per instant.
inline InfrastructurePower measure_infrastructure(Infrastructure& infra, double now) {
    // Tick first: the measurement pass below only reads.
    std::vector<std::pair<std::string_view, PowerMeasurement>> ticked;
    for (const ComputeNode& n : infra.nodes())
        if (n.power_model && is_switchable(*n.power_model))
            ticked.emplace_back(n.id, PowerMeasurement{});
    for (auto& [id, power] : ticked) {
        const double load = infra.node(id).used;
        power = tick_power(*infra.node_power_model(id), load, now);
    }
    std::size_t next = 0;
    return detail::measure_with(infra, [&](const ComputeNode& n) {
        if (next < ticked.size() && ticked[next].first == n.id)
            return ticked[next++].second;
        return peek_power(*n.power_model, n.used);
    });
}

/// Power of every entity without advancing any state.
inline InfrastructurePower peek_infrastructure(const Infrastructure& infra) {
    return detail::measure_with(infra, [](const ComputeNode& n) { return peek_power(*n.power_model, n.used); });
}

enum class AttributionMode {
    dynamic_only,       ///< only load-dependent power
    dynamic_and_static, ///< plus the static power of switch-off capable nodes
};

struct ApplicationPower {
    std::string_view id;   ///< points into the application map
    std::string_view kind;
    PowerMeasurement power;
};

/// Share of `power` caused by each placed application. A task receives the
/// fraction mips / node.used of its node's dynamic power (and static power
/// in dynamic_and_static mode when the node can switch off); a flow receives
/// rate * sigma on every link it crosses.
template <class ApplicationMap, class PlacementMap>
std::vector<ApplicationPower> attribute_to_applications(const Infrastructure& infra, const InfrastructurePower& power,
                                                        const ApplicationMap& apps, const PlacementMap& placements,
                                                        AttributionMode mode) {
    std::vector<ApplicationPower> out;
    out.reserve(placements.size());
    for (const auto& [app_id, p] : placements) {
        if (!p.committed)
            continue;
        const auto app_it = apps.find(app_id);
        if (app_it == apps.end())
            throw ConsistencyError("placement for unknown application '" + std::string(app_id) + "'");
        const Application& app = app_it->second;
        PowerMeasurement attributed;

        for (const auto& [task_id, node_id] : p.task_map) {
            const double mips = app.task(task_id).mips;
            if (mips == 0.0)
                continue;
            const std::size_t slot = infra.node_slot(node_id);
            if (slot == Infrastructure::npos)
                throw ConsistencyError("task '" + task_id + "' of '" + app.id() + "' placed on missing node '" +
                                       node_id + "'");
            const ComputeNode& node = infra.node_at(slot);
            if (mips > node.used)
                throw ConsistencyError("node '" + node.id + "' holds less load than task '" + task_id + "' of '" +
                                       app.id() + "' requires");
            const PowerMeasurement& np = power.nodes.at(power.node_position.at(slot)).power;
            const double fraction = mips / node.used;
            attributed.dynamic_w += fraction * np.dynamic_w;
            if (mode == AttributionMode::dynamic_and_static && node.power_model && is_switchable(*node.power_model))
                attributed.static_w += fraction * np.static_w;
        }

        for (const auto& [flow_id, path] : p.flow_map) {
            const double rate = app.flow(flow_id).rate;
            for (const auto& link_id : path) {
                const NetworkLink* link = infra.find_link(link_id);
                if (!link)
                    throw ConsistencyError("flow '" + flow_id + "' of '" + app.id() + "' routed over missing link '" +
                                           link_id + "'");
                attributed.dynamic_w += link_power(link->power_model, rate).dynamic_w;
            }
        }
        out.push_back({app.id(), app.kind(), attributed});
    }
    return out;
}

} // namespace fogsim
