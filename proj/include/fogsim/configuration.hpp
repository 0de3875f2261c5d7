#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "fogsim/application.hpp"
#include "fogsim/infrastructure.hpp"
#include "fogsim/orchestration.hpp"

namespace fogsim {

/// Complete simulation state at one instant: infrastructure (including power
/// model states), applications, their placements and any scenario state.
/// A configuration can be inspected on its own, without the event history
/// that produced it.
template <class State = std::monostate>
struct BasicConfiguration {
    double time = 0.0;
    Infrastructure infrastructure;
    std::map<std::string, Application, std::less<>> applications;
    std::map<std::string, Placement, std::less<>> placements;
    State state{};
};

using Configuration = BasicConfiguration<>;

/// Adds `app` to the configuration and places it. On PlacementError the
/// configuration is unchanged.
template <class State>
const Placement& deploy(BasicConfiguration<State>& config, Application app, const PlacementStrategy& strategy,
                        const RoutingPolicy& routing = {}) {
    if (config.applications.contains(app.id()))
        throw DuplicateError("application '" + app.id() + "' already deployed");
    Placement p = place(app, config.infrastructure, strategy, routing);
    const std::string id = app.id();
    config.applications.emplace(id, std::move(app));
    return config.placements.emplace(id, std::move(p)).first->second;
}

/// Unplaces and forgets an application.
template <class State>
void undeploy(BasicConfiguration<State>& config, std::string_view app_id) {
    auto app = config.applications.find(app_id);
    if (app == config.applications.end())
        throw NotFoundError("unknown application '" + std::string(app_id) + "'");
    auto p = config.placements.find(app_id);
    if (p != config.placements.end()) {
        if (p->second.committed)
            unplace(p->second, app->second, config.infrastructure);
        config.placements.erase(p);
    }
    config.applications.erase(app);
}

} // namespace fogsim
