#include <gtest/gtest.h>

#include <random>

#include "fogsim/power.hpp"

using namespace fogsim;

TEST(Power, DeriveSigma) {
    EXPECT_DOUBLE_EQ(derive_sigma(240, 100, 400000), 350e-6);
    EXPECT_EQ(derive_sigma(100, 100, 5), 0.0);
    EXPECT_THROW(derive_sigma(50, 100, 10), DomainError);
    EXPECT_THROW(derive_sigma(100, 50, 0), DomainError);
    EXPECT_THROW(derive_sigma(100, -1, 10), DomainError);
}

TEST(Power, LinearFogNode) {
    const auto fog = LinearPowerModel::from_max(240, 100, 400000);
    EXPECT_EQ(linear_power(fog, 0), (PowerMeasurement{100, 0}));
    EXPECT_NEAR(linear_power(fog, 30000).dynamic_w, 10.5, 1e-12);
    EXPECT_NEAR(linear_power(fog, 400000).total(), 240, 1e-9);
    EXPECT_THROW(linear_power(fog, 400001), DomainError);
    EXPECT_THROW(linear_power(fog, -1), DomainError);

    const LinearPowerModel cloud{0, 700e-6, std::nullopt};
    EXPECT_NEAR(linear_power(cloud, 1e9).dynamic_w, 700000, 1e-6);
}

TEST(Power, SharedStaircase) {
    const SharedPowerModel m{1e-3, 0.5, 100, 20};
    EXPECT_EQ(shared_power(m, 0), PowerMeasurement{});
    // 30 units of load: one sub-component (usable 50).
    EXPECT_DOUBLE_EQ(shared_power(m, 30).dynamic_w, 20 + 0.03);
    EXPECT_DOUBLE_EQ(shared_power(m, 50).dynamic_w, 20 + 0.05);
    EXPECT_DOUBLE_EQ(shared_power(m, 51).dynamic_w, 40 + 0.051);
    EXPECT_EQ(shared_power(m, 51).static_w, 0.0);
    EXPECT_THROW(shared_power(SharedPowerModel{1, 0, 1, 1}, 1), DomainError);
}

TEST(Power, DataCenterScalesByPue) {
    DataCenterPowerModel dc{{LinearPowerModel{50, 0.01, 1000}, LinearPowerModel{50, 0.01, 1000}}, 1.5};
    const double loads[] = {1000, 200};
    const auto p = datacenter_power(dc, std::span<const double>(loads));
    EXPECT_DOUBLE_EQ(p.static_w, 150);
    EXPECT_DOUBLE_EQ(p.dynamic_w, 18);
    // Aggregate load fills hosts in order.
    EXPECT_EQ(datacenter_power(dc, 1200.0), p);
    EXPECT_THROW(datacenter_power(dc, 2001.0), DomainError);
    DataCenterPowerModel bad{{}, 0.9};
    EXPECT_THROW(datacenter_power(bad, 0.0), DomainError);
}

TEST(Power, ComposeWanSigmas) {
    EXPECT_EQ(compose_link_sigma({438.4, 6200.0, 5.9, 13.5, 0.4}), 6658.2);
    EXPECT_EQ(compose_link_sigma({}), 0.0);
    EXPECT_THROW(compose_link_sigma({1.0, -0.1}), DomainError);
}

TEST(Power, LinkPower) {
    EXPECT_DOUBLE_EQ(link_power({6658.2e-9}, 1.5e6).dynamic_w, 6658.2e-9 * 1.5e6);
    EXPECT_EQ(link_power({1e-9}, 0).total(), 0.0);
    EXPECT_THROW(link_power({1e-9}, -1), DomainError);
}

TEST(Power, StatefulSleepsAfterTimeout) {
    StatefulPowerModel m(LinearPowerModel{100, 350e-6, 400000}, 5.0);
    EXPECT_EQ(stateful_tick(m, 0, 0).static_w, 100);
    EXPECT_EQ(stateful_tick(m, 0, 4).static_w, 100);
    EXPECT_FALSE(m.asleep());
    EXPECT_EQ(stateful_tick(m, 0, 5), PowerMeasurement{});
    EXPECT_TRUE(m.asleep());
    EXPECT_EQ(stateful_tick(m, 0, 6), PowerMeasurement{});
    // Work wakes it immediately.
    const auto p = stateful_tick(m, 7000, 7);
    EXPECT_FALSE(m.asleep());
    EXPECT_EQ(p.static_w, 100);
    EXPECT_NEAR(p.dynamic_w, 2.45, 1e-12);
    // The idle clock restarts.
    stateful_tick(m, 0, 8);
    stateful_tick(m, 0, 12.5);
    EXPECT_FALSE(m.asleep());
    stateful_tick(m, 0, 13);
    EXPECT_TRUE(m.asleep());
    EXPECT_THROW(stateful_tick(m, 0, 12), DomainError);
}

TEST(Power, StatefulAdjustmentSeesHistory) {
    StatefulPowerModel m(LinearPowerModel{10, 1, std::nullopt}, 5.0, 3);
    m.adjust = [](PowerMeasurement p, const boost::circular_buffer<double>& h) {
        double mean = 0;
        for (double x : h)
            mean += x;
        p.dynamic_w = mean / static_cast<double>(h.size());
        return p;
    };
    stateful_tick(m, 3, 0);
    stateful_tick(m, 6, 1);
    stateful_tick(m, 9, 2);
    EXPECT_DOUBLE_EQ(stateful_tick(m, 12, 3).dynamic_w, 9.0);
}

TEST(Power, PeekDoesNotAdvance) {
    NodePowerModel m = StatefulPowerModel(LinearPowerModel{100, 1e-3, std::nullopt}, 5.0);
    for (int t = 0; t < 10; ++t)
        EXPECT_EQ(peek_power(m, 0).static_w, 100);
    EXPECT_FALSE(is_asleep(m));
    tick_power(m, 0, 0);
    tick_power(m, 0, 5);
    EXPECT_TRUE(is_asleep(m));
    EXPECT_EQ(peek_power(m, 0), PowerMeasurement{});
    wake(m);
    EXPECT_FALSE(is_asleep(m));
}

// Random models against the closed forms.
TEST(PowerProperty, LinearLaws) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double c_max = 1 + u(rng) * 1e6;
        const double p_static = u(rng) * 500;
        const double p_max = p_static + u(rng) * 500;
        const auto m = LinearPowerModel::from_max(p_max, p_static, c_max);
        EXPECT_EQ(linear_power(m, 0).total(), p_static);
        EXPECT_NEAR(linear_power(m, c_max).total(), p_max, 1e-9 * std::max(1.0, p_max));
        const double a = u(rng) * c_max, b = u(rng) * c_max;
        EXPECT_LE(linear_power(m, std::min(a, b)).total(), linear_power(m, std::max(a, b)).total());
    }
}

TEST(PowerProperty, StaircaseDominatesLinearAndIsMonotone) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const SharedPowerModel m{u(rng) * 1e-3, 0.05 + 0.95 * u(rng), 1 + u(rng) * 1000, u(rng) * 50};
        const double a = u(rng) * 10000, b = u(rng) * 10000;
        const double lo = std::min(a, b), hi = std::max(a, b);
        EXPECT_LE(shared_power(m, lo).total(), shared_power(m, hi).total());
        EXPECT_GE(shared_power(m, a).dynamic_w, a * m.sigma);
        // Never more than one sub-component above the proportional share.
        EXPECT_LE(shared_power(m, a).dynamic_w,
                  a * m.sigma + (a / (m.u * m.unit_capacity) + 1) * m.unit_static + 1e-9);
    }
}

TEST(PowerProperty, StatefulNeverDrawsWhileAsleepWithoutLoad) {
    std::mt19937_64 rng(8);
    StatefulPowerModel m(LinearPowerModel{100, 1e-3, std::nullopt}, 5.0);
    double t = 0;
    std::optional<double> idle_from;
    for (int i = 0; i < 2000; ++i) {
        t += static_cast<double>(1 + rng() % 3);
        const double load = (rng() % 4 == 0) ? static_cast<double>(rng() % 1000) : 0.0;
        const auto p = stateful_tick(m, load, t);
        if (load > 0) {
            idle_from.reset();
            EXPECT_FALSE(m.asleep());
            EXPECT_EQ(p.static_w, 100);
        } else {
            if (!idle_from)
                idle_from = t;
            EXPECT_EQ(m.asleep(), t - *idle_from >= 5.0);
            EXPECT_EQ(p.total() == 0.0, m.asleep());
        }
    }
}
