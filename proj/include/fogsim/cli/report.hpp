#pragma once

// CSV time series and energy totals built from probe samples.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/error.hpp"
#include "fogsim/measurement.hpp"

namespace fogsim::cli {

/// Six significant digits, '.' separator (the C locale is never changed).
inline void append_number(std::string& out, double v) {
    char buf[32];
    if (v == 0.0)
        v = 0.0; // no "-0"
    const int n = std::snprintf(buf, sizeof buf, "%.6g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

/// Left Riemann sum: each sample's power holds until the next sample.
class EnergyAccumulator {
public:
    void sample(double time, double watts) {
        if (last_time_)
            joules_ += last_watts_ * (time - *last_time_);
        last_time_ = time;
        last_watts_ = watts;
    }
    double joules() const noexcept { return joules_; }
    double watt_hours() const noexcept { return joules_ / 3600.0; }

private:
    double joules_ = 0.0;
    std::optional<double> last_time_;
    double last_watts_ = 0.0;
};

/// Summary rows, in output order.
inline constexpr std::array<std::string_view, 9> summary_classes{
    "cloud", "fog-static", "fog-dynamic", "wan", "wifi", "total", "cctv", "v2i", "applications"};

struct SummaryRow {
    std::string_view name;
    double energy_wh = 0.0;
    double share_pct = 0.0; ///< of total infrastructure energy
};

/// Per-class energy from per-probe power; classes as in summary_classes.
class EnergyTable {
public:
    void sample(double time, const InfrastructurePower& infra, const std::vector<ApplicationPower>& apps) {
        std::array<double, summary_classes.size()> w{};
        auto add = [&](std::string_view cls, double watts) { w[index(cls)] += watts; };
        for (const auto& n : infra.nodes) {
            if (n.kind == "cloud")
                add("cloud", n.power.total());
            else if (n.kind == "fog") {
                add("fog-static", n.power.static_w);
                add("fog-dynamic", n.power.dynamic_w);
            }
            add("total", n.power.total());
        }
        for (const auto& l : infra.links) {
            if (l.kind == "wan" || l.kind == "wifi")
                add(l.kind, l.power.total());
            add("total", l.power.total());
        }
        for (const auto& a : apps) {
            if (a.kind == "cctv" || a.kind == "v2i")
                add(a.kind, a.power.total());
            add("applications", a.power.total());
        }
        for (std::size_t i = 0; i < w.size(); ++i)
            acc_[i].sample(time, w[i]);
    }

    double watt_hours(std::string_view cls) const { return acc_[index(cls)].watt_hours(); }

    std::vector<SummaryRow> rows() const {
        std::vector<SummaryRow> out;
        const double total = watt_hours("total");
        for (std::size_t i = 0; i < summary_classes.size(); ++i) {
            const double wh = acc_[i].watt_hours();
            out.push_back({summary_classes[i], wh, total > 0.0 ? 100.0 * wh / total : 0.0});
        }
        return out;
    }

private:
    static std::size_t index(std::string_view cls) {
        for (std::size_t i = 0; i < summary_classes.size(); ++i)
            if (summary_classes[i] == cls)
                return i;
        throw DomainError("unknown summary class '" + std::string(cls) + "'");
    }

    std::array<EnergyAccumulator, summary_classes.size()> acc_{};
};

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "class,energy_wh,share_pct\n";
    for (const auto& r : rows) {
        out.append(r.name);
        out += ',';
        append_number(out, r.energy_wh);
        out += ',';
        append_number(out, r.share_pct);
        out += '\n';
    }
    return out;
}

/// Buffered CSV file; flushes in large chunks.
class CsvFile {
public:
    CsvFile(const std::string& path, std::string_view header) : path_(path), out_(path, std::ios::binary) {
        if (!out_)
            throw Error("cannot write '" + path + "'");
        buf_.append(header);
        buf_ += '\n';
    }
    std::string& row() { return buf_; }
    void maybe_flush() {
        if (buf_.size() > (1u << 20))
            flush();
    }
    void flush() {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
        if (!out_)
            throw Error("write to '" + path_ + "' failed");
    }

private:
    std::string path_;
    std::ofstream out_;
    std::string buf_;
};

/// Infrastructure classes with an aggregate row at every probe.
inline constexpr std::array<std::string_view, 4> infrastructure_classes{"cloud", "fog", "wan", "wifi"};
/// Application classes with an aggregate row at every probe.
inline constexpr std::array<std::string_view, 2> application_classes{"cctv", "v2i"};

/// Writes infrastructure.csv and applications.csv rows for each probe.
class TimeSeriesWriter {
public:
    TimeSeriesWriter(const std::string& dir, bool per_entity)
        : per_entity_(per_entity), infra_(dir + "/infrastructure.csv", "time_s,entity_id,entity_class,static_w,dynamic_w"),
          apps_(dir + "/applications.csv", "time_s,app_id,app_class,attributed_w") {}

    void sample(double time, const InfrastructurePower& infra, const std::vector<ApplicationPower>& apps) {
        if (per_entity_) {
            for (const auto& e : infra.nodes)
                entity_row(time, e.id, e.kind, e.power);
            for (const auto& e : infra.links)
                entity_row(time, e.id, e.kind, e.power);
            for (const auto& a : apps)
                app_row(time, a.id, a.kind, a.power.total());
        } else {
            std::array<PowerMeasurement, infrastructure_classes.size()> cls{};
            auto add = [&](const EntityPower& e) {
                for (std::size_t i = 0; i < cls.size(); ++i)
                    if (infrastructure_classes[i] == e.kind)
                        cls[i] += e.power;
            };
            for (const auto& e : infra.nodes)
                add(e);
            for (const auto& e : infra.links)
                add(e);
            for (std::size_t i = 0; i < cls.size(); ++i)
                entity_row(time, "*", infrastructure_classes[i], cls[i]);

            std::array<double, application_classes.size()> app{};
            for (const auto& a : apps)
                for (std::size_t i = 0; i < app.size(); ++i)
                    if (application_classes[i] == a.kind)
                        app[i] += a.power.total();
            for (std::size_t i = 0; i < app.size(); ++i)
                app_row(time, "*", application_classes[i], app[i]);
        }
        infra_.maybe_flush();
        apps_.maybe_flush();
    }

    void finish() {
        infra_.flush();
        apps_.flush();
    }

private:
    void entity_row(double time, std::string_view id, std::string_view kind, const PowerMeasurement& p) {
        std::string& r = infra_.row();
        append_number(r, time);
        r += ',';
        r.append(id);
        r += ',';
        r.append(kind);
        r += ',';
        append_number(r, p.static_w);
        r += ',';
        append_number(r, p.dynamic_w);
        r += '\n';
    }

    void app_row(double time, std::string_view id, std::string_view kind, double watts) {
        std::string& r = apps_.row();
        append_number(r, time);
        r += ',';
        r.append(id);
        r += ',';
        r.append(kind);
        r += ',';
        append_number(r, watts);
        r += '\n';
    }

    bool per_entity_;
    CsvFile infra_;
    CsvFile apps_;
};

/// Largest relative gap seen between attributed and measured dynamic power.
class ConservationCheck {
public:
    void sample(const InfrastructurePower& infra, const std::vector<ApplicationPower>& apps) {
        double measured = 0.0, attributed = 0.0;
        for (const auto& e : infra.nodes)
            measured += e.power.dynamic_w;
        for (const auto& e : infra.links)
            measured += e.power.dynamic_w;
        for (const auto& a : apps)
            attributed += a.power.dynamic_w;
        const double scale = std::max(std::abs(measured), std::abs(attributed));
        if (scale > 0.0)
            worst_ = std::max(worst_, std::abs(measured - attributed) / scale);
    }
    double worst() const noexcept { return worst_; }

private:
    double worst_ = 0.0;
};

} // namespace fogsim::cli
