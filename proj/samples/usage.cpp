// Builds a three-node network by hand, places one streaming application and
// prints what every entity and the application draw.

#include <cstdio>

#include "fogsim/engine.hpp"
#include "fogsim/orchestration.hpp"

using namespace fogsim;

int main() {
    Configuration config;
    Infrastructure& infra = config.infrastructure;

    infra.add_node({"sensor", "edge", Capacity::bounded(0), 0, 0, std::nullopt, false, std::nullopt});
    infra.add_node({"fog", "fog", Capacity::bounded(100000), 0, 0, std::nullopt, false,
                    NodePowerModel{LinearPowerModel::from_max(60.0, 30.0, 100000)}});
    infra.add_node({"cloud", "cloud", Capacity::unbounded(), 0, 0, std::nullopt, false,
                    NodePowerModel{LinearPowerModel{0.0, 700e-6, std::nullopt}}});
    infra.add_link({"radio", "wifi", "sensor", "fog", Capacity::bounded(100e6), 0, 0, 0.002, LinkPowerModel{300e-9}});
    infra.add_link({"uplink", "wan", "fog", "cloud", Capacity::bounded(50e6), 0, 0, 0.02,
                    LinkPowerModel{compose_link_sigma({438.4, 6200.0, 5.9, 13.5, 0.4}) / 1e9}});

    Application app("detector", "video");
    app.add_task({"camera", TaskKind::source, 0, "sensor"});
    app.add_task({"detect", TaskKind::processing, 20000, std::nullopt});
    app.add_task({"archive", TaskKind::sink, 0, "cloud"});
    app.add_flow({"frames", "camera", "detect", 8e6});
    app.add_flow({"events", "detect", "archive", 50e3});
    deploy(config, app, PlacementStrategy::even_spread());

    Engine<> engine(std::move(config));
    engine.add_probe(10.0, [](const Engine<>::ProbeSample& s) {
        std::printf("t=%g s\n", s.time);
        for (const auto& n : s.infrastructure.nodes)
            std::printf("  node %-7s %7.3f W static %7.3f W dynamic\n", std::string(n.id).c_str(), n.power.static_w,
                        n.power.dynamic_w);
        for (const auto& l : s.infrastructure.links)
            std::printf("  link %-7s %7.3f W\n", std::string(l.id).c_str(), l.power.total());
        for (const auto& a : s.applications)
            std::printf("  app  %-7s %7.3f W\n", std::string(a.id).c_str(), a.power.total());
    });
    engine.run_until(10.0);
}
