#pragma once

// Discrete-event core. Events either update the configuration or read it;
// at equal timestamps all updates run before any read, and events of the
// same kind run in scheduling order.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "fogsim/configuration.hpp"
#include "fogsim/error.hpp"
#include "fogsim/measurement.hpp"

namespace fogsim {

/// A handler threw; identifies the event.
class SimulationError : public Error {
public:
    SimulationError(std::string label, double time, const std::string& what)
        : Error("event '" + label + "' at t=" + std::to_string(time) + " failed: " + what),
          label_(std::move(label)), time_(time) {}

    const std::string& label() const noexcept { return label_; }
    double time() const noexcept { return time_; }

private:
    std::string label_;
    double time_;
};

template <class State = std::monostate>
class Engine {
public:
    using Config = BasicConfiguration<State>;
    using UpdateHandler = std::function<void(Config&)>;
    using ReadHandler = std::function<void(const Config&)>;

    /// What a probe hands to its collector at every firing.
    struct ProbeSample {
        double time;
        const Config& config;
        const InfrastructurePower& infrastructure;
        const std::vector<ApplicationPower>& applications;
    };
    using Collector = std::function<void(const ProbeSample&)>;

    Engine() = default;
    explicit Engine(Config initial) : config_(std::move(initial)) {}

    // Scheduled events refer back to the engine.
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    double now() const noexcept { return config_.time; }
    const Config& snapshot() const noexcept { return config_; }
    std::size_t pending() const noexcept { return queue_.size(); }

    void schedule_update(double time, UpdateHandler handler, std::string label = "update") {
        check_time(time);
        push({time, Phase::update, 0, std::move(label), std::move(handler), {}, {}});
    }

    void schedule_read(double time, ReadHandler handler, std::string label = "read") {
        check_time(time);
        push({time, Phase::read, 0, std::move(label), {}, std::move(handler), {}});
    }

    /// Update firing at start, start + period, start + 2 period, ...
    void schedule_periodic_update(double start, double period, UpdateHandler handler, std::string label = "periodic") {
        check_period(period);
        check_time(start);
        auto shared = std::make_shared<UpdateHandler>(std::move(handler));
        schedule_periodic(start, period, 0, shared, std::move(label));
    }

    /// Measures the infrastructure and attributes power to applications at
    /// start, start + period, ...; stateful power models advance at each
    /// firing. Probes are reads: they observe the state after all updates of
    /// the same instant.
    void add_probe(double period, Collector collector, AttributionMode mode = AttributionMode::dynamic_only,
                   std::optional<double> start = std::nullopt) {
        check_period(period);
        const double first = start.value_or(now());
        check_time(first);
        probes_.push_back({period, first, std::move(collector), mode});
        push_probe(probes_.size() - 1, 0);
    }

    /// Executes every event with time <= t_end in order and returns the
    /// resulting configuration.
    const Config& run_until(double t_end) {
        if (!(t_end >= now()))
            throw DomainError("run_until: end time " + std::to_string(t_end) + " lies before now " +
                              std::to_string(now()));
        while (!queue_.empty() && queue_.top().time <= t_end) {
            Event ev = queue_.top();
            queue_.pop();
            config_.time = ev.time;
            try {
                dispatch(ev);
            } catch (const SimulationError&) {
                throw;
            } catch (const std::exception& e) {
                throw SimulationError(ev.label, ev.time, e.what());
            }
        }
        config_.time = t_end;
        return config_;
    }

private:
    enum class Phase : int { update = 0, read = 1 };

    struct Event {
        double time;
        Phase phase;
        std::uint64_t seq;
        std::string label;
        UpdateHandler update;
        ReadHandler read;
        std::function<void()> internal;
    };

    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            if (a.time != b.time)
                return a.time > b.time;
            if (a.phase != b.phase)
                return a.phase > b.phase;
            return a.seq > b.seq;
        }
    };

    struct Probe {
        double period;
        double start;
        Collector collector;
        AttributionMode mode;
    };

    void check_time(double time) const {
        if (!std::isfinite(time) || time < now())
            throw DomainError("cannot schedule an event at t=" + std::to_string(time) + " (now " +
                              std::to_string(now()) + ")");
    }

    static void check_period(double period) {
        if (!(period > 0.0) || !std::isfinite(period))
            throw DomainError("period must be positive and finite");
    }

    void push(Event ev) {
        ev.seq = next_seq_++;
        queue_.push(std::move(ev));
    }

    void schedule_periodic(double start, double period, std::uint64_t k, std::shared_ptr<UpdateHandler> handler,
                           std::string label) {
        const double t = start + static_cast<double>(k) * period;
        Event ev{t, Phase::update, 0, label, {}, {}, {}};
        ev.internal = [this, start, period, k, handler, label]() {
            (*handler)(config_);
            schedule_periodic(start, period, k + 1, handler, label);
        };
        push(std::move(ev));
    }

    void push_probe(std::size_t index, std::uint64_t k) {
        const Probe& probe = probes_[index];
        const double t = probe.start + static_cast<double>(k) * probe.period;
        Event ev{t, Phase::read, 0, "probe", {}, {}, {}};
        ev.internal = [this, index, k]() {
            fire_probe(index);
            push_probe(index, k + 1);
        };
        push(std::move(ev));
    }

    void fire_probe(std::size_t index) {
        const Probe& probe = probes_[index];
        // Stateful models advance once per instant, however many probes fire.
        InfrastructurePower power = (last_tick_ && *last_tick_ == now())
                                        ? peek_infrastructure(config_.infrastructure)
                                        : measure_infrastructure(config_.infrastructure, now());
        last_tick_ = now();
        const auto apps = attribute_to_applications(config_.infrastructure, power, config_.applications,
                                                    config_.placements, probe.mode);
        probe.collector(ProbeSample{now(), config_, power, apps});
    }

    void dispatch(Event& ev) {
        if (ev.internal)
            ev.internal();
        else if (ev.phase == Phase::update)
            ev.update(config_);
        else
            ev.read(std::as_const(config_));
    }

    Config config_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    std::vector<Probe> probes_;
    std::optional<double> last_tick_;
};

} // namespace fogsim
