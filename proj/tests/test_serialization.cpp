#include <gtest/gtest.h>

#include "fogsim/scenario/run.hpp"
#include "fogsim/serialization.hpp"

using namespace fogsim;
using namespace fogsim::scenario;
using nlohmann::json;

namespace {

// Infrastructure with every power model kind.
Configuration mixed_configuration() {
    Configuration c;
    auto& infra = c.infrastructure;
    infra.add_node({"dc", "cloud", Capacity::unbounded(), 0, 0, std::nullopt, false,
                    DataCenterPowerModel{{LinearPowerModel{50, 1e-3, 1e6}, LinearPowerModel{50, 1e-3, std::nullopt}}, 1.4}});
    infra.add_node({"edge", "fog", Capacity::bounded(1e5), 0, 0, Location{1.5, -2}, false,
                    SharedPowerModel{2e-4, 0.7, 1000, 12}});
    infra.add_node({"fog", "fog", Capacity::bounded(4e5), 0, 0, Location{0.1, 0.2}, true,
                    StatefulPowerModel(LinearPowerModel{100, 350e-6, 4e5}, 5.0, 4)});
    infra.add_node({"stl", "stl", Capacity::bounded(0), 0, 0, Location{0, 0}, false, std::nullopt});
    auto link = [&](std::string id, std::string a, std::string b, Capacity bw, double sigma) {
        infra.add_link({id, "net", a, b, bw, 0, 0, 0.003, {sigma}});
    };
    link("s>dc", "stl", "dc", Capacity::bounded(1e9), 6658.2e-9);
    link("dc>s", "dc", "stl", Capacity::bounded(1e9), 20571.8e-9);
    link("s>e", "stl", "edge", Capacity::unbounded(), 0.1e-9);
    link("e>s", "edge", "stl", Capacity::unbounded(), 0.3e-9);
    link("s>f", "stl", "fog", Capacity::unbounded(), 0);
    link("f>s", "fog", "stl", Capacity::unbounded(), 0);
    for (int i = 0; i < 12; ++i) {
        Application a("app" + std::to_string(i), i % 2 ? "cctv" : "v2i");
        a.add_task({"s", TaskKind::source, 0, "stl"})
            .add_task({"p", TaskKind::processing, 1234.567 + i * 0.1, std::nullopt})
            .add_task({"k", TaskKind::sink, 0, i % 3 ? "stl" : "dc"})
            .add_flow({"in", "s", "p", 1e5 / 3 + i})
            .add_flow({"out", "p", "k", 0.1 * i});
        deploy(c, a, i % 3 == 0 ? PlacementStrategy::cloud_only() : PlacementStrategy::even_spread());
    }
    measure_infrastructure(c.infrastructure, 0);
    measure_infrastructure(c.infrastructure, 1);
    c.time = 1;
    return c;
}

void expect_same_usage(const Infrastructure& a, const Infrastructure& b) {
    ASSERT_EQ(a.node_count(), b.node_count());
    ASSERT_EQ(a.link_count(), b.link_count());
    for (const auto& n : a.nodes()) {
        EXPECT_EQ(n.used, b.node(n.id).used) << n.id;
        EXPECT_EQ(n.tasks, b.node(n.id).tasks) << n.id;
        EXPECT_EQ(n.location, b.node(n.id).location) << n.id;
    }
    for (const auto& l : a.links()) {
        EXPECT_EQ(l.used, b.link(l.id).used) << l.id;
        EXPECT_EQ(l.flows, b.link(l.id).flows) << l.id;
    }
}

} // namespace

TEST(Serialization, ConfigurationRoundTripsThroughText) {
    const Configuration original = mixed_configuration();
    const std::string text = configuration_to_json(original).dump();
    const Configuration loaded = configuration_from_json(json::parse(text));
    EXPECT_EQ(loaded.time, 1);
    expect_same_usage(original.infrastructure, loaded.infrastructure);
    EXPECT_EQ(loaded.applications.size(), 12u);
    for (const auto& [id, p] : original.placements) {
        EXPECT_EQ(loaded.placements.at(id).task_map, p.task_map);
        EXPECT_EQ(loaded.placements.at(id).flow_map, p.flow_map);
    }
    // Power readings agree everywhere, stateful history included.
    EXPECT_EQ(peek_infrastructure(original.infrastructure).total(), peek_infrastructure(loaded.infrastructure).total());
    const auto& s = std::get<StatefulPowerModel>(*loaded.infrastructure.node("fog").power_model);
    EXPECT_EQ(s.history.capacity(), 4u);
    EXPECT_EQ(s.history.size(), 2u);
    EXPECT_EQ(s.last_tick, 1.0);
    // And serializing again gives the same document.
    EXPECT_EQ(configuration_to_json(loaded).dump(), text);
}

TEST(Serialization, SleepStateSurvives) {
    Configuration c;
    c.infrastructure.add_node({"fog", "fog", Capacity::bounded(10), 0, 0, std::nullopt, false,
                               StatefulPowerModel(LinearPowerModel{100, 1, 10}, 5.0)});
    measure_infrastructure(c.infrastructure, 0);
    measure_infrastructure(c.infrastructure, 3);
    auto loaded = configuration_from_json(json::parse(configuration_to_json(c).dump()));
    EXPECT_FALSE(is_asleep(*loaded.infrastructure.node("fog").power_model));
    measure_infrastructure(loaded.infrastructure, 5);
    EXPECT_TRUE(is_asleep(*loaded.infrastructure.node("fog").power_model));
}

TEST(Serialization, MalformedDocumentsAreRejected) {
    EXPECT_ANY_THROW(configuration_from_json(json::parse(R"({"time": 0})")));
    auto j = configuration_to_json(mixed_configuration());
    j["placements"][0]["task_map"]["p"] = "nowhere";
    EXPECT_ANY_THROW(configuration_from_json(j));
}

// Stopping a run, saving it as text and resuming produces the same probe
// readings as running straight through.
TEST(SerializationProperty, CheckpointResumeMatchesUninterruptedRun) {
    TaxiProfile profile;
    std::fill(profile.count.begin(), profile.count.end(), 150u);
    std::fill(profile.speed.begin(), profile.speed.end(), 6.0);
    for (const char* name : {"Fog3", "Fog6s"}) {
        const auto traffic = std::make_shared<const Traffic>(experiment(name), ScenarioParams{}, profile);
        using Row = std::tuple<double, std::string, double, double>;
        auto record = [](std::vector<Row>& rows) {
            return [&rows](const CityEngine::ProbeSample& s) {
                for (const auto& n : s.infrastructure.nodes)
                    rows.emplace_back(s.time, std::string(n.id), n.power.static_w, n.power.dynamic_w);
                for (const auto& l : s.infrastructure.links)
                    rows.emplace_back(s.time, std::string(l.id), l.power.static_w, l.power.dynamic_w);
                for (const auto& a : s.applications)
                    rows.emplace_back(s.time, std::string(a.id), a.power.static_w, a.power.dynamic_w);
            };
        };
        const double start = 300, cut = 700, end = 1100;

        std::vector<Row> straight;
        {
            CityEngine engine(initial_configuration(*traffic, 5));
            schedule_traffic(engine, traffic, 0);
            engine.add_probe(2.0, record(straight), AttributionMode::dynamic_and_static, start);
            engine.run_until(end);
        }

        std::vector<Row> resumed;
        std::string checkpoint;
        {
            CityEngine engine(initial_configuration(*traffic, 5));
            schedule_traffic(engine, traffic, 0);
            engine.add_probe(2.0, record(resumed), AttributionMode::dynamic_and_static, start);
            checkpoint = configuration_to_json(engine.run_until(cut)).dump();
        }
        {
            CityEngine engine(configuration_from_json<CityState>(json::parse(checkpoint)));
            EXPECT_GT(engine.snapshot().state.taxis.size(), 10u);
            schedule_traffic(engine, traffic, cut + 1);
            engine.add_probe(2.0, record(resumed), AttributionMode::dynamic_and_static, cut + 2);
            engine.run_until(end);
        }
        ASSERT_EQ(resumed.size(), straight.size()) << name;
        for (std::size_t i = 0; i < straight.size(); ++i)
            ASSERT_EQ(resumed[i], straight[i]) << name << " row " << i;
    }
}
