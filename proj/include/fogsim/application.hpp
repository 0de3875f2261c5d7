#pragma once

// Streaming applications: DAGs of tasks connected by continuous data flows,
// and the placement record that maps them onto an infrastructure.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/error.hpp"
#include "fogsim/infrastructure.hpp"

namespace fogsim {

enum class TaskKind { source, processing, sink };

inline const char* to_string(TaskKind k) noexcept {
    switch (k) {
    case TaskKind::source:
        return "source";
    case TaskKind::processing:
        return "processing";
    case TaskKind::sink:
        return "sink";
    }
    return "?";
}

struct Task {
    std::string id;
    TaskKind kind = TaskKind::processing;
    double mips = 0.0;
    std::optional<std::string> bound_node; ///< required for sources and sinks
};

struct DataFlow {
    std::string id;
    std::string src_task;
    std::string dst_task;
    double rate = 0.0; ///< bit/s
};

struct Placement;

/// Application graph. The shape is fixed once built; only flow rates change
/// afterwards (see set_flow_rate).
class Application {
public:
    Application() = default;
    Application(std::string id, std::string kind) : id_(std::move(id)), kind_(std::move(kind)) {}

    const std::string& id() const noexcept { return id_; }
    /// Application class used for reporting, e.g. "cctv".
    const std::string& kind() const noexcept { return kind_; }

    Application& add_task(Task task) {
        if (task.id.empty())
            throw DomainError("task id must not be empty");
        if (!(task.mips >= 0.0) || std::isinf(task.mips))
            throw DomainError("task '" + task.id + "': mips must be finite and non-negative");
        if (tasks_.contains(task.id))
            throw DuplicateError("task '" + task.id + "' already exists in application '" + id_ + "'");
        std::string key = task.id;
        tasks_.emplace(std::move(key), std::move(task));
        return *this;
    }

    Application& add_flow(DataFlow flow) {
        if (flow.id.empty())
            throw DomainError("flow id must not be empty");
        if (!(flow.rate >= 0.0) || std::isinf(flow.rate))
            throw DomainError("flow '" + flow.id + "': rate must be finite and non-negative");
        if (flows_.contains(flow.id))
            throw DuplicateError("flow '" + flow.id + "' already exists in application '" + id_ + "'");
        if (!tasks_.contains(flow.src_task) || !tasks_.contains(flow.dst_task))
            throw NotFoundError("flow '" + flow.id + "' references an unknown task");
        std::string key = flow.id;
        flows_.emplace(std::move(key), std::move(flow));
        return *this;
    }

    const std::map<std::string, Task, std::less<>>& tasks() const noexcept { return tasks_; }
    const std::map<std::string, DataFlow, std::less<>>& flows() const noexcept { return flows_; }

    const Task& task(std::string_view id) const {
        auto it = tasks_.find(id);
        if (it == tasks_.end())
            throw NotFoundError("unknown task '" + std::string(id) + "' in application '" + id_ + "'");
        return it->second;
    }
    const DataFlow& flow(std::string_view id) const {
        auto it = flows_.find(id);
        if (it == flows_.end())
            throw NotFoundError("unknown flow '" + std::string(id) + "' in application '" + id_ + "'");
        return it->second;
    }

private:
    friend void set_flow_rate(Application&, const Placement*, Infrastructure&, std::string_view, double);

    std::string id_;
    std::string kind_;
    std::map<std::string, Task, std::less<>> tasks_;
    std::map<std::string, DataFlow, std::less<>> flows_;
};

/// Every violated structural rule of an application; empty when valid.
inline std::vector<std::string> validate(const Application& app) {
    std::vector<std::string> problems;
    std::map<std::string_view, int> in_degree, out_degree;
    for (const auto& [id, flow] : app.flows()) {
        ++out_degree[flow.src_task];
        ++in_degree[flow.dst_task];
    }

    if (app.tasks().empty())
        problems.push_back("application '" + app.id() + "' has no tasks");

    for (const auto& [id, task] : app.tasks()) {
        const int in = in_degree[id];
        const int out = out_degree[id];
        switch (task.kind) {
        case TaskKind::source:
            if (out < 1)
                problems.push_back("source task '" + id + "' has no outgoing flow");
            if (in > 0)
                problems.push_back("source task '" + id + "' has incoming flows");
            break;
        case TaskKind::processing:
            if (in < 1)
                problems.push_back("processing task '" + id + "' has no incoming flow");
            if (out < 1)
                problems.push_back("processing task '" + id + "' has no outgoing flow");
            break;
        case TaskKind::sink:
            if (in < 1)
                problems.push_back("sink task '" + id + "' has no incoming flow");
            if (out > 0)
                problems.push_back("sink task '" + id + "' has outgoing flows");
            break;
        }
        if (task.kind != TaskKind::processing && !task.bound_node)
            problems.push_back(std::string(to_string(task.kind)) + " task '" + id + "' is not bound to a node");
    }

    // Kahn's algorithm; leftovers sit on a cycle.
    std::map<std::string_view, std::vector<std::string_view>> succ;
    std::map<std::string_view, int> pending;
    for (const auto& [id, task] : app.tasks())
        pending[id] = 0;
    for (const auto& [id, flow] : app.flows()) {
        succ[flow.src_task].push_back(flow.dst_task);
        ++pending[flow.dst_task];
    }
    std::vector<std::string_view> ready;
    for (const auto& [id, n] : pending)
        if (n == 0)
            ready.push_back(id);
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto t = ready.back();
        ready.pop_back();
        ++visited;
        for (const auto s : succ[t])
            if (--pending[s] == 0)
                ready.push_back(s);
    }
    if (visited != app.tasks().size())
        problems.push_back("application '" + app.id() + "' contains a cycle");

    // Weak connectivity.
    if (!app.tasks().empty()) {
        std::map<std::string_view, std::vector<std::string_view>> undirected;
        for (const auto& [id, flow] : app.flows()) {
            undirected[flow.src_task].push_back(flow.dst_task);
            undirected[flow.dst_task].push_back(flow.src_task);
        }
        std::set<std::string_view> seen{app.tasks().begin()->first};
        std::vector<std::string_view> stack{app.tasks().begin()->first};
        while (!stack.empty()) {
            const auto t = stack.back();
            stack.pop_back();
            for (const auto n : undirected[t])
                if (seen.insert(n).second)
                    stack.push_back(n);
        }
        if (seen.size() != app.tasks().size())
            problems.push_back("application '" + app.id() + "' is not connected");
    }
    return problems;
}

/// Where an application's tasks and flows live. A committed placement holds
/// every node and link reservation it implies.
struct Placement {
    std::string app_id;
    std::map<std::string, std::string, std::less<>> task_map;              ///< task -> node
    std::map<std::string, std::vector<std::string>, std::less<>> flow_map;  ///< flow -> link path
    bool committed = false;
    bool routed = false; ///< false while some flows are detached (between release_routes and route_flows)
};

/// Changes a flow's rate. When the flow holds a path, every link on it is
/// adjusted; if any of them lacks headroom nothing changes.
inline void set_flow_rate(Application& app, const Placement* placement, Infrastructure& infra, std::string_view flow_id,
                          double rate) {
    if (!(rate >= 0.0) || std::isinf(rate))
        throw DomainError("flow rate must be finite and non-negative");
    auto it = app.flows_.find(flow_id);
    if (it == app.flows_.end())
        throw NotFoundError("unknown flow '" + std::string(flow_id) + "' in application '" + app.id() + "'");
    DataFlow& flow = it->second;

    const std::vector<std::string>* path = nullptr;
    if (placement && placement->committed) {
        if (placement->app_id != app.id())
            throw ConsistencyError("placement of '" + placement->app_id + "' passed for application '" + app.id() + "'");
        auto p = placement->flow_map.find(flow_id);
        if (p != placement->flow_map.end())
            path = &p->second;
    }

    if (path && !path->empty() && rate != flow.rate) {
        if (rate > flow.rate) {
            const double delta = rate - flow.rate;
            for (const auto& link_id : *path) {
                const NetworkLink& l = infra.link(link_id);
                if (!l.bandwidth.fits(l.used, delta))
                    throw CapacityError(l.id, delta, l.headroom());
            }
        }
        // Swap old for new reservation so usage stays an exact sum of live rates.
        for (const auto& link_id : *path) {
            infra.release_link(link_id, flow.rate);
            infra.reserve_link(link_id, rate);
        }
    }
    flow.rate = rate;
}

} // namespace fogsim
