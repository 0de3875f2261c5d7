#pragma once

// Power models. Every model reports a PowerMeasurement, the (static, dynamic)
// wattage pair of one entity at one instant.
//
// Units: watts, MIPS and W/MIPS for compute; bit/s and J/bit for links.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <type_traits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <boost/circular_buffer.hpp>

#include "fogsim/error.hpp"
#include "fogsim/exact_sum.hpp"

namespace fogsim {

struct PowerMeasurement {
    double static_w = 0.0;
    double dynamic_w = 0.0;

    constexpr double total() const noexcept { return static_w + dynamic_w; }

    constexpr PowerMeasurement& operator+=(const PowerMeasurement& o) noexcept {
        static_w += o.static_w;
        dynamic_w += o.dynamic_w;
        return *this;
    }
    friend constexpr PowerMeasurement operator+(PowerMeasurement a, const PowerMeasurement& b) noexcept {
        return a += b;
    }
    friend constexpr PowerMeasurement operator*(double k, const PowerMeasurement& m) noexcept {
        return {k * m.static_w, k * m.dynamic_w};
    }
    friend constexpr bool operator==(const PowerMeasurement&, const PowerMeasurement&) = default;
};

/// Incremental power per load unit of an entity with max load `c_max` drawing
/// `p_max` at full load.
inline double derive_sigma(double p_max, double p_static, double c_max) {
    if (!(c_max > 0.0))
        throw DomainError("derive_sigma: c_max must be positive");
    if (!(p_static >= 0.0))
        throw DomainError("derive_sigma: p_static must be non-negative");
    if (!(p_max >= p_static))
        throw DomainError("derive_sigma: p_max must not be below p_static");
    return (p_max - p_static) / c_max;
}

/// P = p_static + load * sigma, optionally bounded by c_max.
struct LinearPowerModel {
    double p_static = 0.0;
    double sigma = 0.0;
    std::optional<double> c_max;

    static LinearPowerModel from_max(double p_max, double p_static, double c_max) {
        return {p_static, derive_sigma(p_max, p_static, c_max), c_max};
    }
};

inline PowerMeasurement linear_power(const LinearPowerModel& m, double load) {
    if (!(load >= 0.0))
        throw DomainError("linear_power: negative load");
    if (m.c_max && load > *m.c_max)
        throw DomainError("linear_power: load exceeds c_max");
    return {m.p_static, load * m.sigma};
}

/// Shared infrastructure (data center hosts, access networks) that powers on
/// sub-components of `unit_capacity` one at a time, each used only up to the
/// operational fraction `u`. Reports no static power.
struct SharedPowerModel {
    double sigma = 0.0;
    double u = 1.0;
    double unit_capacity = 1.0;
    double unit_static = 0.0;
};

inline PowerMeasurement shared_power(const SharedPowerModel& m, double load) {
    if (!(load >= 0.0))
        throw DomainError("shared_power: negative load");
    if (!(m.u > 0.0 && m.u <= 1.0) || !(m.unit_capacity > 0.0))
        throw DomainError("shared_power: u must be in (0,1] and unit_capacity positive");
    if (load == 0.0)
        return {};
    const double units = std::ceil(load / (m.u * m.unit_capacity));
    return {0.0, units * m.unit_static + load * m.sigma};
}

/// A data center as a set of hosts scaled by its power usage effectiveness.
struct DataCenterPowerModel {
    std::vector<LinearPowerModel> hosts;
    double pue = 1.0;
};

inline PowerMeasurement datacenter_power(const DataCenterPowerModel& m, std::span<const double> host_loads) {
    if (host_loads.size() != m.hosts.size())
        throw DomainError("datacenter_power: expected one load per host");
    if (!(m.pue >= 1.0))
        throw DomainError("datacenter_power: pue must be >= 1");
    PowerMeasurement sum;
    for (std::size_t i = 0; i < m.hosts.size(); ++i)
        sum += linear_power(m.hosts[i], host_loads[i]);
    return m.pue * sum;
}

/// Node-level view: the aggregate load fills hosts in order, each up to its
/// c_max. A host without c_max absorbs everything that is left.
inline PowerMeasurement datacenter_power(const DataCenterPowerModel& m, double load) {
    if (!(load >= 0.0))
        throw DomainError("datacenter_power: negative load");
    std::vector<double> loads(m.hosts.size(), 0.0);
    double remaining = load;
    for (std::size_t i = 0; i < m.hosts.size() && remaining > 0.0; ++i) {
        const double take = m.hosts[i].c_max ? std::min(remaining, *m.hosts[i].c_max) : remaining;
        loads[i] = take;
        remaining -= take;
    }
    if (remaining > 0.0)
        throw DomainError("datacenter_power: load exceeds the capacity of all hosts");
    return datacenter_power(m, std::span<const double>(loads));
}

/// Exactly rounded sum of per-hop energy-per-bit values of the equipment a
/// link traverses.
inline double compose_link_sigma(std::span<const double> components) {
    ExactSum sum;
    for (double x : components) {
        if (!(x >= 0.0))
            throw DomainError("compose_link_sigma: negative component");
        sum.add(x);
    }
    return sum.value();
}

inline double compose_link_sigma(std::initializer_list<double> components) {
    return compose_link_sigma(std::span<const double>(components.begin(), components.size()));
}

/// Models a stateful wrapper may delegate to.
using InnerPowerModel = std::variant<LinearPowerModel, SharedPowerModel, DataCenterPowerModel>;

inline PowerMeasurement inner_power(const InnerPowerModel& m, double load) {
    return std::visit(
        [load](const auto& model) -> PowerMeasurement {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LinearPowerModel>)
                return linear_power(model, load);
            else if constexpr (std::is_same_v<T, SharedPowerModel>)
                return shared_power(model, load);
            else
                return datacenter_power(model, load);
        },
        m);
}

enum class SleepState { awake, asleep };

/// Switch-off capable node: after `idle_timeout` seconds without load the
/// node goes to sleep and draws nothing until work is placed on it again.
struct StatefulPowerModel {
    static constexpr std::size_t default_history = 60;

    /// Optional post-processing of the inner measurement given the recent
    /// load history, newest last (DVFS-style models).
    using Adjustment = std::function<PowerMeasurement(PowerMeasurement, const boost::circular_buffer<double>&)>;

    InnerPowerModel inner;
    double idle_timeout = 5.0;
    SleepState state = SleepState::awake;
    std::optional<double> idle_since;
    std::optional<double> last_tick;
    boost::circular_buffer<double> history{default_history};
    Adjustment adjust;

    StatefulPowerModel() = default;
    explicit StatefulPowerModel(InnerPowerModel inner_model, double timeout = 5.0,
                                std::size_t history_size = default_history)
        : inner(std::move(inner_model)), idle_timeout(timeout), history(history_size) {}

    bool asleep() const noexcept { return state == SleepState::asleep; }

    void wake() noexcept {
        state = SleepState::awake;
        idle_since.reset();
    }
};

/// Advance the sleep state machine to `now` under the given load and report
/// the resulting power.
inline PowerMeasurement stateful_tick(StatefulPowerModel& m, double load, double now) {
    if (!(load >= 0.0))
        throw DomainError("stateful_tick: negative load");
    if (m.last_tick && now < *m.last_tick)
        throw DomainError("stateful_tick: time went backwards");
    m.last_tick = now;
    m.history.push_back(load);

    PowerMeasurement out;
    if (load > 0.0) {
        m.wake();
        out = inner_power(m.inner, load);
    } else if (m.state == SleepState::awake) {
        if (!m.idle_since)
            m.idle_since = now;
        if (now - *m.idle_since >= m.idle_timeout) {
            m.state = SleepState::asleep;
            return {};
        }
        out = inner_power(m.inner, 0.0);
    } else {
        return {};
    }
    return m.adjust ? m.adjust(out, m.history) : out;
}

/// Power model attached to a compute node.
using NodePowerModel = std::variant<LinearPowerModel, SharedPowerModel, DataCenterPowerModel, StatefulPowerModel>;

/// Measurement without advancing any state.
inline PowerMeasurement peek_power(const NodePowerModel& m, double load) {
    if (const auto* s = std::get_if<StatefulPowerModel>(&m)) {
        if (load == 0.0 && s->asleep())
            return {};
        const auto out = inner_power(s->inner, load);
        return s->adjust ? s->adjust(out, s->history) : out;
    }
    if (const auto* l = std::get_if<LinearPowerModel>(&m))
        return linear_power(*l, load);
    if (const auto* s = std::get_if<SharedPowerModel>(&m))
        return shared_power(*s, load);
    return datacenter_power(std::get<DataCenterPowerModel>(m), load);
}

/// Measurement at a probe instant; stateful models advance their state.
inline PowerMeasurement tick_power(NodePowerModel& m, double load, double now) {
    if (auto* s = std::get_if<StatefulPowerModel>(&m))
        return stateful_tick(*s, load, now);
    return peek_power(m, load);
}

inline bool is_switchable(const NodePowerModel& m) noexcept {
    return std::holds_alternative<StatefulPowerModel>(m);
}

inline bool is_asleep(const NodePowerModel& m) noexcept {
    const auto* s = std::get_if<StatefulPowerModel>(&m);
    return s && s->asleep();
}

inline void wake(NodePowerModel& m) noexcept {
    if (auto* s = std::get_if<StatefulPowerModel>(&m))
        s->wake();
}

/// Links only carry an energy-per-bit figure; any static draw of the
/// transceivers belongs to the adjacent nodes.
struct LinkPowerModel {
    double sigma = 0.0; // J/bit
};

inline PowerMeasurement link_power(const LinkPowerModel& m, double rate) {
    if (!(rate >= 0.0))
        throw DomainError("link_power: negative rate");
    return {0.0, rate * m.sigma};
}

} // namespace fogsim
