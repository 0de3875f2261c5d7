#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fogsim/cli/runner.hpp"

using namespace fogsim;
using namespace fogsim::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    read_config(in, c, "test.ini");
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(FOGSIM_BIN) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fogsim-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST(Config, DefaultsMatchSampleFile) {
    const RunConfig defaults;
    const RunConfig sample = load_config(std::string(FOGSIM_SAMPLES) + "/smart_city.ini");
    EXPECT_TRUE(sample.experiments.empty());
    EXPECT_EQ(sample.duration, defaults.duration);
    EXPECT_EQ(sample.params.cloud_sigma, defaults.params.cloud_sigma);
    EXPECT_EQ(sample.params.fog_sigma, defaults.params.fog_sigma);
    EXPECT_EQ(sample.params.wan_up_sigma(), defaults.params.wan_up_sigma());
    EXPECT_EQ(sample.params.wan_down_sigma(), defaults.params.wan_down_sigma());
    EXPECT_EQ(sample.params.wifi_taxi_sigma, defaults.params.wifi_taxi_sigma);
    EXPECT_EQ(sample.params.wan_latency, defaults.params.wan_latency);
    EXPECT_EQ(sample.params.cctv_video_rate, defaults.params.cctv_video_rate);
    EXPECT_EQ(sample.params.wan_up_bandwidth, defaults.params.wan_up_bandwidth);
}

TEST(Config, UnitsConvertToSi) {
    const auto c = parse("[fog]\nsigma_uw_per_mips = 350\n[wifi]\ntaxi_sigma_nj_per_bit = 300\n"
                         "[wan]\nlatency_ms = 20\nup_bandwidth_mbit_per_s = 50\n[v2i]\nsensor_kbit_per_s = 100\n");
    EXPECT_EQ(c.params.fog_sigma, 350e-6);
    EXPECT_EQ(c.params.wifi_taxi_sigma, 300e-9);
    EXPECT_EQ(c.params.wan_latency, 0.02);
    EXPECT_EQ(c.params.wan_up_bandwidth, 50e6);
    EXPECT_EQ(c.params.v2i_sensor_rate, 100e3);
}

TEST(Config, RunSection) {
    const auto c = parse("[run]\nexperiment = Fog4, Fog6s\nduration_s = 3600\nseed = 42\n"
                         "attribution = full\nworkers = 4\nper_entity_rows = yes\n");
    EXPECT_EQ(c.experiments, (std::vector<std::string>{"Fog4", "Fog6s"}));
    EXPECT_EQ(c.selected().size(), 2u);
    EXPECT_EQ(c.duration, 3600);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.attribution, AttributionMode::dynamic_and_static);
    EXPECT_EQ(c.workers, 4u);
    EXPECT_TRUE(c.per_entity);
    EXPECT_EQ(parse("[run]\nexperiment = all\n").selected().size(), 8u);
}

TEST(Config, RejectsUnknownAndInvalidSettings) {
    EXPECT_THROW(parse("[fog]\nsigma = 1\n"), ConfigError);
    EXPECT_THROW(parse("[nope]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse("stray = 1\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nduration_s = soon\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nduration_s = -5\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nprobe_period_s = 0\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nseed = -1\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nexperiment = Fog9\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nattribution = most\n"), ConfigError);
    EXPECT_THROW(parse("[fog]\ncap_fraction = 1.5\n"), ConfigError);
    EXPECT_THROW(parse("[scenario]\ngrid_rows = 0\n"), ConfigError);
    EXPECT_THROW(parse("[run\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/fogsim.ini"), ConfigError);
}

TEST(Report, NumberFormatting) {
    auto fmt = [](double v) {
        std::string s;
        append_number(s, v);
        return s;
    };
    EXPECT_EQ(fmt(0), "0");
    EXPECT_EQ(fmt(-0.0), "0");
    EXPECT_EQ(fmt(1401.312), "1401.31");
    EXPECT_EQ(fmt(100), "100");
    EXPECT_EQ(fmt(2.45), "2.45");
    EXPECT_EQ(fmt(86400), "86400");
    EXPECT_EQ(fmt(1234567), "1.23457e+06");
    EXPECT_EQ(fmt(6.6582e-6), "6.6582e-06");
}

TEST(Report, EnergyIsLeftRiemannSum) {
    EnergyAccumulator e;
    for (int t = 0; t <= 86400; ++t)
        e.sample(t, 100);
    EXPECT_DOUBLE_EQ(e.watt_hours(), 2400);
    EnergyAccumulator step;
    step.sample(0, 10);
    step.sample(1, 20);
    step.sample(3, 1000); // last sample only opens an interval
    EXPECT_EQ(step.joules(), 50);
}

TEST(Report, SummaryCsvShape) {
    EnergyTable table;
    InfrastructurePower p;
    p.nodes.push_back({"cloud", "cloud", {0, 30}});
    p.nodes.push_back({"fog-0-1", "fog", {100, 10}});
    p.links.push_back({"wan-up:stl-0-0", "wan", {0, 60}});
    std::vector<ApplicationPower> apps{{"cctv:stl-0-0", "cctv", {0, 100}}};
    table.sample(0, p, apps);
    table.sample(3600, p, apps);
    const auto rows = table.rows();
    ASSERT_EQ(rows.size(), summary_classes.size());
    EXPECT_DOUBLE_EQ(table.watt_hours("total"), 200);
    EXPECT_DOUBLE_EQ(table.watt_hours("fog-static"), 100);
    EXPECT_DOUBLE_EQ(rows[1].share_pct, 50);
    EXPECT_EQ(lines(summary_csv(rows)).front(), "class,energy_wh,share_pct");
    EXPECT_EQ(lines(summary_csv(rows))[6], "total,200,100");
}

TEST(Runner, WritesAggregatedSeries) {
    RunConfig config;
    config.duration = 120;
    const auto dir = scratch("agg");
    const auto options = run_options(config);
    const auto result = run_to_directory(scenario::experiment("Fog2"), config, options, dir.string());
    EXPECT_EQ(result.probes, 121u);
    const auto infra = lines(slurp(dir / "infrastructure.csv"));
    ASSERT_EQ(infra.size(), 1 + 121 * 4u);
    EXPECT_EQ(infra[0], "time_s,entity_id,entity_class,static_w,dynamic_w");
    EXPECT_EQ(infra[1].substr(0, 10), "0,*,cloud,");
    EXPECT_EQ(infra[2].substr(0, 8), "0,*,fog,");
    EXPECT_EQ(infra.back().substr(0, 11), "120,*,wifi,");
    const auto apps = lines(slurp(dir / "applications.csv"));
    ASSERT_EQ(apps.size(), 1 + 121 * 2u);
    EXPECT_EQ(apps[0], "time_s,app_id,app_class,attributed_w");
    const auto summary = lines(slurp(dir / "summary.csv"));
    ASSERT_EQ(summary.size(), 1 + summary_classes.size());
    EXPECT_LT(result.conservation_gap, 1e-9);
    fs::remove_all(dir);
}

TEST(Runner, PerEntityRows) {
    RunConfig config;
    config.duration = 5;
    config.per_entity = true;
    config.taxi_scale = 0; // CCTV only
    const auto dir = scratch("entity");
    run_to_directory(scenario::experiment("CloudOnly"), config, run_options(config), dir.string());
    const auto infra = lines(slurp(dir / "infrastructure.csv"));
    EXPECT_NE(std::find(infra.begin(), infra.end(), "0,cloud,cloud,0,336"), infra.end());
    const auto apps = lines(slurp(dir / "applications.csv"));
    EXPECT_NE(apps[1].find("cctv:stl-0-0,cctv,"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Runner, ParallelMatchesSerial) {
    RunConfig config;
    config.duration = 200;
    config.experiments = {"CloudOnly", "Fog3", "Fog6s"};
    const auto serial_dir = scratch("serial"), parallel_dir = scratch("parallel");
    config.out_dir = serial_dir.string();
    run_all(config);
    config.workers = 3;
    config.out_dir = parallel_dir.string();
    const auto results = run_all(config);
    ASSERT_EQ(results.size(), 3u);
    EXPECT_EQ(results[1].name, "Fog3");
    for (const auto& name : config.experiments)
        for (const char* file : {"infrastructure.csv", "applications.csv", "summary.csv"})
            EXPECT_EQ(slurp(serial_dir / name / file), slurp(parallel_dir / name / file)) << name << "/" << file;
    fs::remove_all(serial_dir);
    fs::remove_all(parallel_dir);
}

TEST(Runner, ProfileFileErrorsAreConfigErrors) {
    RunConfig config;
    config.taxi_profile = "/nonexistent/profile.csv";
    EXPECT_THROW(run_options(config), ConfigError);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    EXPECT_EQ(run_cli("run --experiment Fog1 --duration 30 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "Fog1" / "summary.csv"));
    EXPECT_EQ(run_cli("summarize " + dir.string()), 0);
    EXPECT_EQ(run_cli("run --experiment Fog9 --duration 1 --out " + dir.string()), 2);
    EXPECT_EQ(run_cli("run --config /nonexistent.ini"), 2);
    EXPECT_EQ(run_cli("run --duration -3"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("summarize /nonexistent-dir"), 1);
    fs::remove_all(dir);
}
