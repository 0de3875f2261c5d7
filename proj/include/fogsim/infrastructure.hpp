#pragma once

// Mutable weighted directed multigraph of compute nodes and network links.
//
// Entities are addressed by stable string ids and always iterated in id
// order. Internally every entity occupies a slot; slots are what routing
// works on and are reused after removal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ranges>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fogsim/capacity.hpp"
#include "fogsim/error.hpp"
#include "fogsim/exact_sum.hpp"
#include "fogsim/power.hpp"

namespace fogsim {

struct Location {
    double x = 0.0; // meters
    double y = 0.0;

    friend constexpr bool operator==(const Location&, const Location&) = default;
};

inline double distance(const Location& a, const Location& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct ComputeNode {
    std::string id;
    std::string kind;                      ///< entity class used for reporting, e.g. "fog"
    Capacity capacity;                     ///< MIPS
    double used = 0.0;                     ///< reserved MIPS
    std::size_t tasks = 0;                 ///< placed tasks, including zero-MIPS ones
    std::optional<Location> location;
    bool mobile = false;
    std::optional<NodePowerModel> power_model; ///< absent: power not modeled

    double utilization() const noexcept { return capacity.utilization(used); }
    double headroom() const noexcept { return capacity.headroom(used); }
};

struct NetworkLink {
    std::string id;
    std::string kind;
    std::string src;
    std::string dst;
    Capacity bandwidth;       ///< bit/s
    double used = 0.0;        ///< reserved bit/s
    std::size_t flows = 0;    ///< mapped flows, including zero-rate ones
    double latency = 0.0;     ///< seconds; routing weight only
    LinkPowerModel power_model;

    double headroom() const noexcept { return bandwidth.headroom(used); }
};

class Infrastructure {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // -- construction ------------------------------------------------------

    const std::string& add_node(ComputeNode node) {
        if (node.id.empty())
            throw DomainError("node id must not be empty");
        if (node_ids_.contains(node.id))
            throw DuplicateError("node '" + node.id + "' already exists");
        node.used = 0.0;
        node.tasks = 0;
        const std::size_t slot = take_slot(nodes_, free_nodes_);
        if (out_.size() < nodes_.size()) {
            out_.resize(nodes_.size());
            in_.resize(nodes_.size());
        }
        out_[slot].clear();
        in_[slot].clear();
        nodes_[slot] = std::move(node);
        if (node_load_.size() < nodes_.size())
            node_load_.resize(nodes_.size());
        node_load_[slot] = ExactSum();
        const auto& stored = *nodes_[slot];
        node_ids_.emplace(stored.id, slot);
        if (is_host(stored))
            hosts_.insert(stored.id);
        return stored.id;
    }

    /// Removes the node and every incident link. Fails without side effects
    /// if the node hosts tasks or an incident link carries flows.
    ComputeNode remove_node(std::string_view id) {
        const std::size_t slot = require_node(id);
        const ComputeNode& node = *nodes_[slot];
        if (node.tasks > 0 || node.used > 0.0)
            throw InUseError("node '" + node.id + "' still hosts " + std::to_string(node.tasks) + " task(s)");
        for (const auto* incident : {&out_[slot], &in_[slot]})
            for (std::size_t l : *incident)
                if (links_[l]->flows > 0 || links_[l]->used > 0.0)
                    throw InUseError("link '" + links_[l]->id + "' incident to node '" + node.id +
                                     "' still carries " + std::to_string(links_[l]->flows) + " flow(s)");

        std::vector<std::string> incident_ids;
        for (std::size_t l : out_[slot])
            incident_ids.push_back(links_[l]->id);
        for (std::size_t l : in_[slot])
            if (links_[l]->src != links_[l]->dst)
                incident_ids.push_back(links_[l]->id);
        for (const auto& lid : incident_ids)
            remove_link(lid);

        ComputeNode removed = std::move(*nodes_[slot]);
        nodes_[slot].reset();
        free_nodes_.push_back(slot);
        node_ids_.erase(node_ids_.find(removed.id));
        hosts_.erase(removed.id);
        return removed;
    }

    const std::string& add_link(NetworkLink link) {
        if (link.id.empty())
            throw DomainError("link id must not be empty");
        if (link_ids_.contains(link.id))
            throw DuplicateError("link '" + link.id + "' already exists");
        const std::size_t src = require_node(link.src);
        const std::size_t dst = require_node(link.dst);
        if (!(link.latency >= 0.0))
            throw DomainError("link '" + link.id + "': latency must be non-negative");
        if (!(link.power_model.sigma >= 0.0))
            throw DomainError("link '" + link.id + "': sigma must be non-negative");
        link.used = 0.0;
        link.flows = 0;
        const std::size_t slot = take_slot(links_, free_links_);
        links_[slot] = std::move(link);
        if (link_load_.size() < links_.size())
            link_load_.resize(links_.size());
        link_load_[slot] = ExactSum();
        const auto& stored = *links_[slot];
        link_ids_.emplace(stored.id, slot);
        insert_sorted(out_[src], slot);
        insert_sorted(in_[dst], slot);
        return stored.id;
    }

    NetworkLink remove_link(std::string_view id) {
        const std::size_t slot = require_link(id);
        const NetworkLink& link = *links_[slot];
        if (link.flows > 0 || link.used > 0.0)
            throw InUseError("link '" + link.id + "' still carries " + std::to_string(link.flows) + " flow(s)");
        erase_value(out_[node_ids_.find(link.src)->second], slot);
        erase_value(in_[node_ids_.find(link.dst)->second], slot);
        NetworkLink removed = std::move(*links_[slot]);
        links_[slot].reset();
        free_links_.push_back(slot);
        link_ids_.erase(link_ids_.find(removed.id));
        return removed;
    }

    // -- reservations ------------------------------------------------------

    void reserve_node(std::string_view id, double mips) {
        const std::size_t slot = require_node(id);
        ComputeNode& n = *nodes_[slot];
        check_amount(mips);
        if (!n.capacity.fits(n.used, mips))
            throw CapacityError(n.id, mips, n.headroom());
        n.used = adjusted(node_load_[slot], n.id, mips);
    }

    void release_node(std::string_view id, double mips) {
        const std::size_t slot = require_node(id);
        check_amount(mips);
        nodes_[slot]->used = adjusted(node_load_[slot], nodes_[slot]->id, -mips);
    }

    void reserve_link(std::string_view id, double rate) {
        const std::size_t slot = require_link(id);
        NetworkLink& l = *links_[slot];
        check_amount(rate);
        if (!l.bandwidth.fits(l.used, rate))
            throw CapacityError(l.id, rate, l.headroom());
        l.used = adjusted(link_load_[slot], l.id, rate);
    }

    void release_link(std::string_view id, double rate) {
        const std::size_t slot = require_link(id);
        check_amount(rate);
        links_[slot]->used = adjusted(link_load_[slot], links_[slot]->id, -rate);
    }

    /// Adjusts the number of tasks pinned to a node (used by placement).
    void track_tasks(std::string_view id, int delta) {
        ComputeNode& n = node_mut(id);
        if (delta < 0 && n.tasks < static_cast<std::size_t>(-delta))
            throw ConsistencyError("node '" + n.id + "': task count would become negative");
        n.tasks = static_cast<std::size_t>(static_cast<long long>(n.tasks) + delta);
    }

    /// Adjusts the number of flows mapped onto a link (used by placement).
    void track_flows(std::string_view id, int delta) {
        NetworkLink& l = link_mut(id);
        if (delta < 0 && l.flows < static_cast<std::size_t>(-delta))
            throw ConsistencyError("link '" + l.id + "': flow count would become negative");
        l.flows = static_cast<std::size_t>(static_cast<long long>(l.flows) + delta);
    }

    // -- mutation ----------------------------------------------------------

    void set_node_capacity(std::string_view id, Capacity capacity) {
        ComputeNode& n = node_mut(id);
        if (!capacity.fits(0.0, n.used))
            throw InUseError("node '" + n.id + "': capacity below current usage " + std::to_string(n.used));
        n.capacity = capacity;
        if (is_host(n))
            hosts_.insert(n.id);
        else
            hosts_.erase(n.id);
    }

    void set_link_bandwidth(std::string_view id, Capacity bandwidth) {
        NetworkLink& l = link_mut(id);
        if (!bandwidth.fits(0.0, l.used))
            throw InUseError("link '" + l.id + "': bandwidth below current usage " + std::to_string(l.used));
        l.bandwidth = bandwidth;
    }

    void set_link_latency(std::string_view id, double latency) {
        if (!(latency >= 0.0))
            throw DomainError("latency must be non-negative");
        link_mut(id).latency = latency;
    }

    void set_link_power_model(std::string_view id, LinkPowerModel model) {
        if (!(model.sigma >= 0.0))
            throw DomainError("sigma must be non-negative");
        link_mut(id).power_model = model;
    }

    void set_location(std::string_view id, std::optional<Location> location) {
        node_mut(id).location = location;
    }

    void set_node_power_model(std::string_view id, std::optional<NodePowerModel> model) {
        node_mut(id).power_model = std::move(model);
    }

    /// Mutable access to a node's power model for ticking or waking.
    std::optional<NodePowerModel>& node_power_model(std::string_view id) { return node_mut(id).power_model; }

    // -- queries -----------------------------------------------------------

    bool has_node(std::string_view id) const { return node_ids_.find(id) != node_ids_.end(); }
    bool has_link(std::string_view id) const { return link_ids_.find(id) != link_ids_.end(); }

    const ComputeNode& node(std::string_view id) const { return *nodes_[require_node(id)]; }
    const NetworkLink& link(std::string_view id) const { return *links_[require_link(id)]; }

    const ComputeNode* find_node(std::string_view id) const {
        auto it = node_ids_.find(id);
        return it == node_ids_.end() ? nullptr : &*nodes_[it->second];
    }
    const NetworkLink* find_link(std::string_view id) const {
        auto it = link_ids_.find(id);
        return it == link_ids_.end() ? nullptr : &*links_[it->second];
    }

    std::size_t node_count() const noexcept { return node_ids_.size(); }
    std::size_t link_count() const noexcept { return link_ids_.size(); }

    /// All nodes in id order.
    auto nodes() const {
        return node_ids_ | std::views::transform([this](const auto& kv) -> const ComputeNode& {
                   return *nodes_[kv.second];
               });
    }

    /// All links in id order.
    auto links() const {
        return link_ids_ | std::views::transform([this](const auto& kv) -> const NetworkLink& {
                   return *links_[kv.second];
               });
    }

    /// Nodes able to host work (non-zero or unbounded capacity), in id order.
    const std::set<std::string, std::less<>>& host_ids() const noexcept { return hosts_; }

    /// Outgoing links of a node, in id order.
    std::vector<const NetworkLink*> outgoing(std::string_view node_id) const {
        return collect(out_[require_node(node_id)]);
    }

    std::vector<const NetworkLink*> incoming(std::string_view node_id) const {
        return collect(in_[require_node(node_id)]);
    }

    double distance_between(std::string_view a, std::string_view b) const {
        const ComputeNode& na = node(a);
        const ComputeNode& nb = node(b);
        if (!na.location || !nb.location)
            throw DomainError("distance query on node without location ('" + (na.location ? nb.id : na.id) + "')");
        return distance(*na.location, *nb.location);
    }

    // -- slot-level access for graph algorithms ---------------------------

    std::size_t node_slot(std::string_view id) const {
        auto it = node_ids_.find(id);
        return it == node_ids_.end() ? npos : it->second;
    }
    std::size_t slot_count() const noexcept { return nodes_.size(); }
    const ComputeNode& node_at(std::size_t slot) const { return *nodes_[slot]; }
    const NetworkLink& link_at(std::size_t slot) const { return *links_[slot]; }
    const std::vector<std::size_t>& out_slots(std::size_t node_slot) const { return out_[node_slot]; }
    std::size_t link_slot(std::string_view id) const {
        auto it = link_ids_.find(id);
        return it == link_ids_.end() ? npos : it->second;
    }

    /// Structural self-check: adjacency agrees with the link collection and
    /// usage stays within capacity. Returns one message per problem.
    std::vector<std::string> integrity_problems() const {
        std::vector<std::string> problems;
        std::size_t adjacency_entries = 0;
        for (const auto& [id, slot] : node_ids_) {
            const ComputeNode& n = *nodes_[slot];
            if (n.used < 0.0 || !n.capacity.fits(0.0, n.used))
                problems.push_back("node '" + id + "' usage out of range");
            for (std::size_t l : out_[slot]) {
                ++adjacency_entries;
                if (!links_[l] || links_[l]->src != id)
                    problems.push_back("node '" + id + "' has a stale outgoing entry");
            }
            for (std::size_t l : in_[slot])
                if (!links_[l] || links_[l]->dst != id)
                    problems.push_back("node '" + id + "' has a stale incoming entry");
        }
        for (const auto& [id, slot] : link_ids_) {
            const NetworkLink& l = *links_[slot];
            if (l.used < 0.0 || !l.bandwidth.fits(0.0, l.used))
                problems.push_back("link '" + id + "' usage out of range");
            const auto s = node_ids_.find(l.src);
            const auto d = node_ids_.find(l.dst);
            if (s == node_ids_.end() || d == node_ids_.end()) {
                problems.push_back("link '" + id + "' has a dangling endpoint");
                continue;
            }
            if (!contains_value(out_[s->second], slot) || !contains_value(in_[d->second], slot))
                problems.push_back("link '" + id + "' missing from adjacency");
        }
        if (adjacency_entries != link_ids_.size())
            problems.push_back("adjacency size differs from link count");
        return problems;
    }

private:
    template <class T>
    static std::size_t take_slot(std::vector<std::optional<T>>& slots, std::vector<std::size_t>& free_list) {
        if (!free_list.empty()) {
            const std::size_t s = free_list.back();
            free_list.pop_back();
            return s;
        }
        slots.emplace_back();
        return slots.size() - 1;
    }

    static void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
        v.insert(std::upper_bound(v.begin(), v.end(), x), x);
    }
    static void erase_value(std::vector<std::size_t>& v, std::size_t x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x)
            v.erase(it);
    }
    static bool contains_value(const std::vector<std::size_t>& v, std::size_t x) {
        return std::binary_search(v.begin(), v.end(), x);
    }

    static bool is_host(const ComputeNode& n) noexcept {
        return n.capacity.is_unbounded() || n.capacity.amount() > 0.0;
    }

    static void check_amount(double amount) {
        if (!(amount >= 0.0) || std::isinf(amount))
            throw DomainError("reservation amount must be finite and non-negative");
    }

    // Usage is the correctly rounded exact sum of all live reservations, so
    // releasing what was reserved restores the previous value bit for bit.
    static double adjusted(ExactSum& load, const std::string& id, double delta) {
        load.add(delta);
        const double value = load.value();
        if (value < 0.0) {
            load.add(-delta);
            throw ConsistencyError("over-release on '" + id + "': releasing " + std::to_string(-delta) +
                                   " exceeds current usage " + std::to_string(load.value()));
        }
        return value;
    }

    std::vector<const NetworkLink*> collect(const std::vector<std::size_t>& slots) const {
        std::vector<const NetworkLink*> out;
        out.reserve(slots.size());
        for (std::size_t s : slots)
            out.push_back(&*links_[s]);
        std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
        return out;
    }

    std::size_t require_node(std::string_view id) const {
        auto it = node_ids_.find(id);
        if (it == node_ids_.end())
            throw NotFoundError("unknown node '" + std::string(id) + "'");
        return it->second;
    }
    std::size_t require_link(std::string_view id) const {
        auto it = link_ids_.find(id);
        if (it == link_ids_.end())
            throw NotFoundError("unknown link '" + std::string(id) + "'");
        return it->second;
    }
    ComputeNode& node_mut(std::string_view id) { return *nodes_[require_node(id)]; }
    NetworkLink& link_mut(std::string_view id) { return *links_[require_link(id)]; }

    std::vector<std::optional<ComputeNode>> nodes_;
    std::vector<std::optional<NetworkLink>> links_;
    std::vector<ExactSum> node_load_;
    std::vector<ExactSum> link_load_;
    std::vector<std::size_t> free_nodes_;
    std::vector<std::size_t> free_links_;
    std::map<std::string, std::size_t, std::less<>> node_ids_;
    std::map<std::string, std::size_t, std::less<>> link_ids_;
    std::vector<std::vector<std::size_t>> out_; // per node slot, link slots
    std::vector<std::vector<std::size_t>> in_;
    std::set<std::string, std::less<>> hosts_;
};

} // namespace fogsim
