#pragma once

// Wires a traffic scenario into the engine.

#include <cstdint>
#include <memory>

#include "fogsim/engine.hpp"
#include "fogsim/scenario/traffic.hpp"

namespace fogsim::scenario {

using CityEngine = Engine<CityState>;

struct RunOptions {
    double duration = 86400.0;
    double probe_period = 1.0;
    std::uint64_t seed = 1;
    AttributionMode attribution = AttributionMode::dynamic_only;
    ScenarioParams params;
    TaxiProfile profile = synthetic_profile();
};

/// Traffic steps every second from `first_step` on.
inline void schedule_traffic(CityEngine& engine, std::shared_ptr<const Traffic> traffic, double first_step) {
    engine.schedule_periodic_update(
        first_step, 1.0, [traffic](CityConfig& config) { step_traffic(config, *traffic, config.time); }, "traffic");
}

/// Runs one experiment from t = 0 to options.duration, feeding every probe
/// sample to `collector`. Returns the traffic counters.
inline TrafficStats run_experiment(const ExperimentSpec& spec, const RunOptions& options,
                                   CityEngine::Collector collector) {
    auto traffic = std::make_shared<const Traffic>(spec, options.params, options.profile);
    CityEngine engine(initial_configuration(*traffic, options.seed));
    schedule_traffic(engine, traffic, 0.0);
    engine.add_probe(options.probe_period, std::move(collector), options.attribution, 0.0);
    return engine.run_until(options.duration).state.stats;
}

} // namespace fogsim::scenario
