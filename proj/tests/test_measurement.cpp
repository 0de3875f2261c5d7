#include <gtest/gtest.h>

#include <random>

#include "fogsim/configuration.hpp"
#include "fogsim/measurement.hpp"

using namespace fogsim;

namespace {

Infrastructure city(bool stateful_fog) {
    Infrastructure infra;
    infra.add_node({"cloud", "cloud", Capacity::unbounded(), 0, 0, std::nullopt, false, LinearPowerModel{0, 700e-6, {}}});
    for (int i = 0; i < 2; ++i) {
        NodePowerModel fog = LinearPowerModel{100, 350e-6, 400000};
        if (stateful_fog)
            fog = StatefulPowerModel(LinearPowerModel{100, 350e-6, 400000}, 5.0);
        infra.add_node({"fog" + std::to_string(i), "fog", Capacity::bounded(400000), 0, 0, std::nullopt, false, fog});
    }
    infra.add_node({"stl", "stl", Capacity::bounded(0), 0, 0, std::nullopt, false, std::nullopt});
    auto link = [&](std::string id, std::string kind, std::string a, std::string b, double lat, double sigma) {
        infra.add_link({std::move(id), std::move(kind), std::move(a), std::move(b), Capacity::bounded(1e9), 0, 0, lat,
                        {sigma}});
    };
    link("up", "wan", "stl", "cloud", 0.02, 6658.2e-9);
    link("down", "wan", "cloud", "stl", 0.02, 20571.8e-9);
    for (auto fog : {"fog0", "fog1"}) {
        link(std::string("l>") + fog, "local", "stl", fog, 0, 0);
        link(std::string(fog) + ">l", "local", fog, "stl", 0, 0);
    }
    return infra;
}

Application app(const std::string& id, double mips, double in_rate, double out_rate, const std::string& sink = "stl") {
    Application a(id, "cctv");
    a.add_task({"source", TaskKind::source, 0, "stl"})
        .add_task({"process", TaskKind::processing, mips, std::nullopt})
        .add_task({"sink", TaskKind::sink, 0, sink})
        .add_flow({"video", "source", "process", in_rate})
        .add_flow({"result", "process", "sink", out_rate});
    return a;
}

} // namespace

TEST(Measurement, IdleInfrastructure) {
    auto infra = city(false);
    const auto p = measure_infrastructure(infra, 0);
    EXPECT_EQ(p.nodes.size(), 4u);
    EXPECT_EQ(p.links.size(), 6u);
    EXPECT_EQ(p.find_node("fog0")->static_w, 100);
    EXPECT_EQ(p.find_node("stl")->total(), 0.0);
    EXPECT_EQ(p.find_node("cloud")->total(), 0.0);
    EXPECT_EQ(p.total(), (PowerMeasurement{200, 0}));
    EXPECT_EQ(p.find_link("nope"), nullptr);
}

TEST(Measurement, CctvOnCloudAttribution) {
    Configuration config;
    config.infrastructure = city(false);
    deploy(config, app("cctv", 30000, 10e6, 200e3, "cloud"), PlacementStrategy::cloud_only());
    const auto p = measure_infrastructure(config.infrastructure, 0);
    EXPECT_DOUBLE_EQ(p.find_node("cloud")->dynamic_w, 21.0);
    // The result flow stays inside the cloud.
    EXPECT_DOUBLE_EQ(p.find_link("up")->dynamic_w, 10e6 * 6658.2e-9);
    EXPECT_EQ(p.find_link("down")->dynamic_w, 0.0);
    const auto apps = attribute_to_applications(config.infrastructure, p, config.applications, config.placements,
                                                AttributionMode::dynamic_only);
    ASSERT_EQ(apps.size(), 1u);
    EXPECT_EQ(apps[0].id, "cctv");
    EXPECT_EQ(apps[0].kind, "cctv");
    EXPECT_NEAR(apps[0].power.dynamic_w, 21.0 + 10e6 * 6658.2e-9, 1e-9);
    EXPECT_EQ(apps[0].power.static_w, 0.0);
}

TEST(Measurement, SharedNodeSplitsByMips) {
    Configuration config;
    config.infrastructure = city(false);
    deploy(config, app("a", 7000, 100e3, 50e3), PlacementStrategy::consolidate());
    deploy(config, app("b", 21000, 100e3, 50e3), PlacementStrategy::consolidate());
    ASSERT_EQ(config.placements.at("a").task_map.at("process"), config.placements.at("b").task_map.at("process"));
    const auto p = measure_infrastructure(config.infrastructure, 0);
    const auto apps = attribute_to_applications(config.infrastructure, p, config.applications, config.placements,
                                                AttributionMode::dynamic_only);
    EXPECT_NEAR(apps[0].power.dynamic_w, 2.45, 1e-12);
    EXPECT_NEAR(apps[1].power.dynamic_w, 7.35, 1e-12);
}

TEST(Measurement, FullModeAttributesStaticOfSwitchableNodesOnly) {
    for (bool stateful : {false, true}) {
        Configuration config;
        config.infrastructure = city(stateful);
        deploy(config, app("a", 10000, 0, 0), PlacementStrategy::consolidate());
        deploy(config, app("b", 30000, 0, 0), PlacementStrategy::consolidate());
        const auto p = measure_infrastructure(config.infrastructure, 0);
        const auto apps = attribute_to_applications(config.infrastructure, p, config.applications, config.placements,
                                                    AttributionMode::dynamic_and_static);
        EXPECT_DOUBLE_EQ(apps[0].power.static_w, stateful ? 25.0 : 0.0);
        EXPECT_DOUBLE_EQ(apps[1].power.static_w, stateful ? 75.0 : 0.0);
    }
}

TEST(Measurement, StatefulNodesAdvanceOnlyWhenMeasured) {
    auto infra = city(true);
    measure_infrastructure(infra, 0);
    EXPECT_EQ(peek_infrastructure(infra).find_node("fog0")->static_w, 100);
    measure_infrastructure(infra, 5);
    EXPECT_EQ(peek_infrastructure(infra).find_node("fog0")->total(), 0.0);
    EXPECT_EQ(measure_infrastructure(infra, 6).total().total(), 0.0);
}

// Over random deployments the attributed dynamic power adds up to the
// measured dynamic power.
TEST(MeasurementProperty, AttributionConservesDynamicPower) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        Configuration config;
        config.infrastructure = city(round % 2 == 0);
        std::vector<std::string> live;
        for (int i = 0; i < 60; ++i) {
            if (!live.empty() && rng() % 4 == 0) {
                const auto idx = rng() % live.size();
                undeploy(config, live[idx]);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
                continue;
            }
            const std::string id = "app" + std::to_string(i);
            const auto strategy = rng() % 3 == 0 ? PlacementStrategy::cloud_only() : PlacementStrategy::even_spread();
            deploy(config, app(id, u(rng) * 20000, u(rng) * 5e6, u(rng) * 5e5, rng() % 2 ? "stl" : "cloud"), strategy);
            live.push_back(id);
        }
        const auto p = measure_infrastructure(config.infrastructure, static_cast<double>(round));
        const auto apps = attribute_to_applications(config.infrastructure, p, config.applications, config.placements,
                                                    AttributionMode::dynamic_only);
        double attributed = 0;
        for (const auto& a : apps)
            attributed += a.power.dynamic_w;
        const double measured = p.total().dynamic_w;
        EXPECT_NEAR(attributed, measured, 1e-9 * measured);
        EXPECT_EQ(apps.size(), live.size());
    }
}
