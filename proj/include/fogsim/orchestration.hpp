#pragma once

// Placement strategies and routing policies. Placing an application is
// all-or-nothing: either every reservation is taken or the infrastructure is
// left exactly as it was.

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fogsim/application.hpp"
#include "fogsim/error.hpp"
#include "fogsim/infrastructure.hpp"

namespace fogsim {

/// Path weight of a link. Ties between equal-weight paths go to the one with
/// fewer hops, then to the lexicographically smaller sequence of link ids.
struct RoutingPolicy {
    std::function<double(const NetworkLink&)> weight;

    double operator()(const NetworkLink& link) const { return weight ? weight(link) : link.latency; }

    static RoutingPolicy by_latency() { return {}; }
    static RoutingPolicy by_hops() {
        return {[](const NetworkLink&) { return 1.0; }};
    }
};

/// Minimal-weight simple path from `src` to `dst` over links with at least
/// `rate` bit/s of headroom. Empty when src == dst; nullopt when unreachable.
inline std::optional<std::vector<std::string>> shortest_path(const Infrastructure& infra, std::string_view src,
                                                             std::string_view dst, double rate,
                                                             const RoutingPolicy& routing = {}) {
    const std::size_t s = infra.node_slot(src);
    const std::size_t d = infra.node_slot(dst);
    if (s == Infrastructure::npos)
        throw NotFoundError("unknown node '" + std::string(src) + "'");
    if (d == Infrastructure::npos)
        throw NotFoundError("unknown node '" + std::string(dst) + "'");
    if (s == d)
        return std::vector<std::string>{};

    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t none = Infrastructure::npos;
    const std::size_t n = infra.slot_count();
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> hops(n, none);
    std::vector<std::size_t> via(n, none); // link slot entering the node
    std::vector<char> done(n, 0);

    // Path to `node` as link slots, source first.
    auto trace = [&](std::size_t node, std::vector<std::size_t>& out) {
        out.clear();
        while (node != s) {
            out.push_back(via[node]);
            node = infra.node_slot(infra.link_at(via[node]).src);
        }
        std::reverse(out.begin(), out.end());
    };
    std::vector<std::size_t> path_a, path_b;
    // Is (path to u) + link lexicographically smaller than the current path to v?
    auto lexicographically_better = [&](std::size_t u, std::size_t link, std::size_t v) {
        trace(u, path_a);
        path_a.push_back(link);
        trace(v, path_b);
        return std::lexicographical_compare(path_a.begin(), path_a.end(), path_b.begin(), path_b.end(),
                                            [&](std::size_t x, std::size_t y) {
                                                return infra.link_at(x).id < infra.link_at(y).id;
                                            });
    };

    using Label = std::tuple<double, std::size_t, std::size_t>; // weight, hops, node slot
    std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
    dist[s] = 0.0;
    hops[s] = 0;
    queue.emplace(0.0, 0, s);
    while (!queue.empty()) {
        const auto [w, h, u] = queue.top();
        queue.pop();
        if (done[u] || w != dist[u] || h != hops[u])
            continue;
        done[u] = 1;
        if (u == d)
            break;
        for (std::size_t l : infra.out_slots(u)) {
            const NetworkLink& link = infra.link_at(l);
            if (!link.bandwidth.fits(link.used, rate))
                continue;
            const double lw = routing(link);
            if (!(lw >= 0.0))
                throw DomainError("routing weight of link '" + link.id + "' is negative");
            const std::size_t v = infra.node_slot(link.dst);
            if (done[v])
                continue;
            const double nw = w + lw;
            const std::size_t nh = h + 1;
            const bool better = nw < dist[v] || (nw == dist[v] && nh < hops[v]) ||
                                (nw == dist[v] && nh == hops[v] && lexicographically_better(u, l, v));
            if (better) {
                dist[v] = nw;
                hops[v] = nh;
                via[v] = l;
                queue.emplace(nw, nh, v);
            }
        }
    }
    if (!done[d])
        return std::nullopt;
    trace(d, path_a);
    std::vector<std::string> ids;
    ids.reserve(path_a.size());
    for (std::size_t l : path_a)
        ids.push_back(infra.link_at(l).id);
    return ids;
}

/// How processing tasks are assigned to nodes. Nodes with bounded capacity
/// form the fog tier; nodes with unbounded capacity are the cloud and always
/// accept offloaded work.
struct PlacementStrategy {
    enum class Kind {
        cloud_only,  ///< every processing task on the cloud
        even_spread, ///< least utilized fog node while the fog tier stays within cap
        consolidate, ///< most utilized awake fog node that stays within cap
    };

    Kind kind = Kind::cloud_only;
    double cap = 0.85;

    static PlacementStrategy cloud_only() { return {Kind::cloud_only, 1.0}; }
    static PlacementStrategy even_spread(double cap = 0.85) { return {Kind::even_spread, cap}; }
    static PlacementStrategy consolidate(double cap = 0.85) { return {Kind::consolidate, cap}; }
};

inline const char* to_string(PlacementStrategy::Kind k) noexcept {
    switch (k) {
    case PlacementStrategy::Kind::cloud_only:
        return "cloud-only";
    case PlacementStrategy::Kind::even_spread:
        return "even-spread";
    case PlacementStrategy::Kind::consolidate:
        return "consolidate";
    }
    return "?";
}

class PlacementError : public Error {
public:
    enum class Reason { no_feasible_node, no_feasible_path };

    PlacementError(Reason reason, std::string subject, const std::string& app_id)
        : Error(std::string(reason == Reason::no_feasible_node ? "no feasible node for task '"
                                                               : "no feasible path for flow '") +
                subject + "' of application '" + app_id + "'"),
          reason_(reason), subject_(std::move(subject)) {}

    Reason reason() const noexcept { return reason_; }
    /// Id of the task or flow that could not be placed.
    const std::string& subject() const noexcept { return subject_; }

private:
    Reason reason_;
    std::string subject_;
};

/// Node chosen for a processing task requiring `mips`, or nullopt.
inline std::optional<std::string> select_node(const Infrastructure& infra, double mips,
                                              const PlacementStrategy& strategy) {
    const ComputeNode* cloud = nullptr;
    double fog_used = 0.0;
    double fog_capacity = 0.0;
    const ComputeNode* best = nullptr;

    for (const auto& id : infra.host_ids()) {
        const ComputeNode& n = infra.node(id);
        if (n.capacity.is_unbounded()) {
            if (!cloud)
                cloud = &n;
            continue;
        }
        fog_used += n.used;
        fog_capacity += n.capacity.amount();
        if (!n.capacity.fits(n.used, mips))
            continue;
        switch (strategy.kind) {
        case PlacementStrategy::Kind::cloud_only:
            break;
        case PlacementStrategy::Kind::even_spread:
            if (!best || n.utilization() < best->utilization())
                best = &n;
            break;
        case PlacementStrategy::Kind::consolidate: {
            if (n.used + mips > strategy.cap * n.capacity.amount())
                break;
            if (!best) {
                best = &n;
                break;
            }
            const bool asleep = n.power_model && is_asleep(*n.power_model);
            const bool best_asleep = best->power_model && is_asleep(*best->power_model);
            if (asleep != best_asleep) {
                if (!asleep)
                    best = &n;
            } else if (n.utilization() > best->utilization()) {
                best = &n;
            }
            break;
        }
        }
    }

    if (strategy.kind == PlacementStrategy::Kind::even_spread && best &&
        fog_used + mips > strategy.cap * fog_capacity)
        best = nullptr;
    if (best)
        return best->id;
    if (cloud)
        return cloud->id;
    return std::nullopt;
}

namespace detail {

// Joint node choice for several processing tasks under consolidate: fewest
// tasks on the cloud, then fewest fog nodes hosting work, then fewest nodes
// woken from sleep. Small instances are searched exhaustively; larger ones
// fall back to the greedy rule with tasks in decreasing MIPS order. A task
// without any node maps to nullopt.
inline std::map<std::string, std::optional<std::string>, std::less<>>
plan_consolidation(const Infrastructure& infra, std::vector<std::pair<std::string, double>> tasks,
                   const PlacementStrategy& strategy) {
    struct Candidate {
        const ComputeNode* node;
        double limit;
        bool asleep;
    };
    std::vector<Candidate> fog;
    const ComputeNode* cloud = nullptr;
    for (const auto& id : infra.host_ids()) {
        const ComputeNode& n = infra.node(id);
        if (n.capacity.is_unbounded()) {
            if (!cloud)
                cloud = &n;
            continue;
        }
        const double limit = std::min(strategy.cap * n.capacity.amount(), n.capacity.amount());
        fog.push_back({&n, limit, n.power_model && is_asleep(*n.power_model)});
    }
    // Preference order of the greedy rule: awake, busier, smaller id.
    std::stable_sort(fog.begin(), fog.end(), [](const Candidate& a, const Candidate& b) {
        if (a.asleep != b.asleep)
            return !a.asleep;
        return a.node->utilization() > b.node->utilization();
    });
    std::stable_sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    const std::size_t k = tasks.size();
    const std::size_t options = fog.size() + 1; // last option: cloud
    std::vector<double> used(fog.size());
    std::vector<std::size_t> count(fog.size(), 0);
    for (std::size_t i = 0; i < fog.size(); ++i)
        used[i] = fog[i].node->used;

    auto fits = [&](std::size_t i, double mips) { return used[i] + mips <= fog[i].limit; };

    std::vector<std::size_t> current(k), best;
    std::tuple<std::size_t, std::size_t, std::size_t> best_cost{};

    double space = 1.0;
    for (std::size_t t = 0; t < k; ++t)
        space *= static_cast<double>(options);

    if (space <= 200000.0) {
        auto cost = [&] {
            std::size_t on_cloud = 0, hosting = 0, woken = 0;
            for (std::size_t t = 0; t < k; ++t)
                on_cloud += current[t] == fog.size();
            for (std::size_t i = 0; i < fog.size(); ++i)
                if (count[i] > 0 || fog[i].node->used > 0.0) {
                    ++hosting;
                    woken += fog[i].asleep && count[i] > 0;
                }
            return std::tuple{on_cloud, hosting, woken};
        };
        // Depth-first in preference order; the first optimum found wins ties.
        auto search = [&](auto&& self, std::size_t t) -> void {
            if (t == k) {
                const auto c = cost();
                if (best.empty() || c < best_cost) {
                    best = current;
                    best_cost = c;
                }
                return;
            }
            const double mips = tasks[t].second;
            for (std::size_t i = 0; i < fog.size(); ++i) {
                if (!fits(i, mips) || !fog[i].node->capacity.fits(used[i], mips))
                    continue;
                used[i] += mips;
                ++count[i];
                current[t] = i;
                self(self, t + 1);
                used[i] -= mips;
                --count[i];
            }
            if (cloud) {
                current[t] = fog.size();
                self(self, t + 1);
            }
        };
        search(search, 0);
    } else {
        best.assign(k, options); // options = unplaceable
        for (std::size_t t = 0; t < k; ++t) {
            const double mips = tasks[t].second;
            std::optional<std::size_t> pick;
            for (std::size_t i = 0; i < fog.size(); ++i) {
                if (!fits(i, mips) || !fog[i].node->capacity.fits(used[i], mips))
                    continue;
                const bool awake = !fog[i].asleep || count[i] > 0;
                if (!pick) {
                    pick = i;
                    continue;
                }
                const bool pick_awake = !fog[*pick].asleep || count[*pick] > 0;
                const double u = used[i] / fog[i].node->capacity.amount();
                const double pu = used[*pick] / fog[*pick].node->capacity.amount();
                if ((awake && !pick_awake) || (awake == pick_awake && u > pu))
                    pick = i;
            }
            if (pick) {
                used[*pick] += mips;
                ++count[*pick];
                best[t] = *pick;
            } else if (cloud) {
                best[t] = fog.size();
            }
        }
    }

    std::map<std::string, std::optional<std::string>, std::less<>> plan;
    for (std::size_t t = 0; t < k; ++t) {
        std::optional<std::string> node;
        if (!best.empty() && best[t] < fog.size())
            node = fog[best[t]].node->id;
        else if (!best.empty() && best[t] == fog.size() && cloud)
            node = cloud->id;
        plan.emplace(tasks[t].first, std::move(node));
    }
    return plan;
}

inline bool touches(const Placement& p, const DataFlow& flow, std::string_view node) {
    return p.task_map.at(flow.src_task) == node || p.task_map.at(flow.dst_task) == node;
}

// Releases the paths of all flows, or only of those with an endpoint task on
// `touching`.
inline void release_flow_paths(Placement& p, const Application& app, Infrastructure& infra,
                               std::optional<std::string_view> touching = std::nullopt) {
    for (auto it = p.flow_map.begin(); it != p.flow_map.end();) {
        const DataFlow& flow = app.flow(it->first);
        if (touching && !touches(p, flow, *touching)) {
            ++it;
            continue;
        }
        for (const auto& link : it->second) {
            infra.release_link(link, flow.rate);
            infra.track_flows(link, -1);
        }
        it = p.flow_map.erase(it);
    }
}

// Routes every flow that has no path yet, reserving as it goes. On failure
// releases whatever this call took and rethrows.
inline void acquire_flow_paths(Placement& p, const Application& app, Infrastructure& infra,
                               const RoutingPolicy& routing) {
    std::vector<std::string_view> added;
    try {
        for (const auto& [flow_id, flow] : app.flows()) {
            if (p.flow_map.contains(flow_id))
                continue;
            const std::string& from = p.task_map.at(flow.src_task);
            const std::string& to = p.task_map.at(flow.dst_task);
            auto path = shortest_path(infra, from, to, flow.rate, routing);
            if (!path)
                throw PlacementError(PlacementError::Reason::no_feasible_path, flow_id, app.id());
            auto& stored = p.flow_map[flow_id];
            added.push_back(flow_id);
            for (const auto& link : *path) {
                infra.reserve_link(link, flow.rate);
                infra.track_flows(link, +1);
                stored.push_back(link);
            }
        }
    } catch (...) {
        for (const auto flow_id : added) {
            auto it = p.flow_map.find(flow_id);
            const double rate = app.flow(flow_id).rate;
            for (const auto& link : it->second) {
                infra.release_link(link, rate);
                infra.track_flows(link, -1);
            }
            p.flow_map.erase(it);
        }
        throw;
    }
}

} // namespace detail

/// Maps every task and flow of `app` onto `infra`. Throws PlacementError and
/// leaves `infra` untouched when any task or flow does not fit.
inline Placement place(const Application& app, Infrastructure& infra, const PlacementStrategy& strategy,
                       const RoutingPolicy& routing = {}) {
    if (const auto problems = validate(app); !problems.empty())
        throw DomainError("cannot place invalid application '" + app.id() + "': " + problems.front());

    Placement p;
    p.app_id = app.id();
    std::vector<std::pair<std::string, double>> reserved;
    auto rollback_tasks = [&] {
        for (auto it = reserved.rbegin(); it != reserved.rend(); ++it)
            infra.release_node(it->first, it->second);
    };

    std::map<std::string, std::optional<std::string>, std::less<>> plan;
    if (strategy.kind == PlacementStrategy::Kind::consolidate) {
        std::vector<std::pair<std::string, double>> processing;
        for (const auto& [task_id, task] : app.tasks())
            if (task.kind == TaskKind::processing)
                processing.emplace_back(task_id, task.mips);
        if (processing.size() > 1)
            plan = detail::plan_consolidation(infra, std::move(processing), strategy);
    }

    try {
        for (const auto& [task_id, task] : app.tasks()) {
            std::string node;
            if (task.kind == TaskKind::processing) {
                auto planned = plan.find(task_id);
                auto chosen = planned != plan.end() ? planned->second : select_node(infra, task.mips, strategy);
                // A plan made up front may be overtaken by bound tasks on the same node.
                if (!chosen || !infra.node(*chosen).capacity.fits(infra.node(*chosen).used, task.mips))
                    throw PlacementError(PlacementError::Reason::no_feasible_node, task_id, app.id());
                node = std::move(*chosen);
            } else {
                node = *task.bound_node;
                const ComputeNode* bound = infra.find_node(node);
                if (!bound)
                    throw NotFoundError("task '" + task_id + "' is bound to unknown node '" + node + "'");
                if (!bound->capacity.fits(bound->used, task.mips))
                    throw PlacementError(PlacementError::Reason::no_feasible_node, task_id, app.id());
            }
            infra.reserve_node(node, task.mips);
            reserved.emplace_back(node, task.mips);
            p.task_map.emplace(task_id, std::move(node));
        }
        detail::acquire_flow_paths(p, app, infra, routing);
    } catch (...) {
        rollback_tasks();
        throw;
    }

    for (const auto& [task_id, node] : p.task_map) {
        infra.track_tasks(node, +1);
        if (auto& model = infra.node_power_model(node))
            wake(*model);
    }
    p.committed = true;
    p.routed = true;
    return p;
}

/// Releases every reservation held by a committed placement.
inline void unplace(Placement& p, const Application& app, Infrastructure& infra) {
    if (!p.committed)
        throw NotFoundError("placement of application '" + p.app_id + "' is not committed");
    if (p.app_id != app.id())
        throw ConsistencyError("placement of '" + p.app_id + "' passed with application '" + app.id() + "'");
    detail::release_flow_paths(p, app, infra);
    for (const auto& [task_id, node] : p.task_map) {
        infra.release_node(node, app.task(task_id).mips);
        infra.track_tasks(node, -1);
    }
    p.task_map.clear();
    p.committed = false;
    p.routed = false;
}

/// Detaches flows from their links, keeping task reservations. With
/// `touching` only flows that start or end on that node are detached. Used
/// when the topology under a placement changes; follow with route_flows.
inline void release_routes(Placement& p, const Application& app, Infrastructure& infra,
                           std::optional<std::string_view> touching = std::nullopt) {
    if (!p.committed)
        throw NotFoundError("placement of application '" + p.app_id + "' is not committed");
    detail::release_flow_paths(p, app, infra, touching);
    p.routed = false;
}

/// Routes the detached flows of a placement. On failure they stay detached
/// and nothing new is reserved.
inline void route_flows(Placement& p, const Application& app, Infrastructure& infra, const RoutingPolicy& routing = {}) {
    if (!p.committed)
        throw NotFoundError("placement of application '" + p.app_id + "' is not committed");
    if (p.routed)
        throw ConsistencyError("placement of application '" + p.app_id + "' is already routed");
    detail::acquire_flow_paths(p, app, infra, routing);
    p.routed = true;
}

/// Recomputes every flow path of a committed placement. If no new routing
/// exists the previous paths are restored and PlacementError is thrown.
inline Placement& reroute(Placement& p, const Application& app, Infrastructure& infra,
                          const RoutingPolicy& routing = {}) {
    if (!p.committed)
        throw NotFoundError("placement of application '" + p.app_id + "' is not committed");
    const auto previous = p.flow_map;
    const bool was_routed = p.routed;
    if (p.routed)
        release_routes(p, app, infra);
    try {
        route_flows(p, app, infra, routing);
    } catch (const PlacementError&) {
        for (const auto& [flow_id, path] : previous) {
            const double rate = app.flow(flow_id).rate;
            for (const auto& link : path) {
                infra.reserve_link(link, rate);
                infra.track_flows(link, +1);
            }
        }
        p.flow_map = previous;
        p.routed = was_routed;
        throw;
    }
    return p;
}

/// Compares every node's and link's usage with what the committed
/// placements imply. Returns one message per mismatch.
template <class ApplicationMap, class PlacementMap>
std::vector<std::string> conservation_problems(const Infrastructure& infra, const ApplicationMap& apps,
                                               const PlacementMap& placements) {
    std::map<std::string, std::pair<ExactSum, std::size_t>, std::less<>> node_load, link_load;
    for (const auto& [app_id, p] : placements) {
        if (!p.committed)
            continue;
        const Application& app = apps.at(app_id);
        for (const auto& [task_id, node] : p.task_map) {
            auto& [sum, count] = node_load[node];
            sum.add(app.task(task_id).mips);
            ++count;
        }
        for (const auto& [flow_id, path] : p.flow_map)
            for (const auto& link : path) {
                auto& [sum, count] = link_load[link];
                sum.add(app.flow(flow_id).rate);
                ++count;
            }
    }
    std::vector<std::string> problems;
    for (const ComputeNode& n : infra.nodes()) {
        auto it = node_load.find(n.id);
        const double expected = it == node_load.end() ? 0.0 : it->second.first.value();
        const std::size_t count = it == node_load.end() ? 0 : it->second.second;
        if (n.used != expected || n.tasks != count)
            problems.push_back("node '" + n.id + "' holds " + std::to_string(n.used) + " MIPS for " +
                               std::to_string(n.tasks) + " task(s), placements imply " + std::to_string(expected) +
                               " for " + std::to_string(count));
    }
    for (const NetworkLink& l : infra.links()) {
        auto it = link_load.find(l.id);
        const double expected = it == link_load.end() ? 0.0 : it->second.first.value();
        const std::size_t count = it == link_load.end() ? 0 : it->second.second;
        if (l.used != expected || l.flows != count)
            problems.push_back("link '" + l.id + "' holds " + std::to_string(l.used) + " bit/s for " +
                               std::to_string(l.flows) + " flow(s), placements imply " + std::to_string(expected) +
                               " for " + std::to_string(count));
    }
    for (const auto& [id, load] : node_load)
        if (!infra.has_node(id))
            problems.push_back("placement references missing node '" + id + "'");
    for (const auto& [id, load] : link_load)
        if (!infra.has_link(id))
            problems.push_back("placement references missing link '" + id + "'");
    return problems;
}

} // namespace fogsim
