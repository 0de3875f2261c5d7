#pragma once

// Taxi arrivals and average speed per minute of the day.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/error.hpp"

namespace fogsim::scenario {

struct TaxiProfile {
    static constexpr int minutes = 1440;

    std::vector<std::uint32_t> count = std::vector<std::uint32_t>(minutes, 0);
    std::vector<double> speed = std::vector<double>(minutes, 5.0); ///< m/s

    std::uint64_t total() const { return std::accumulate(count.begin(), count.end(), std::uint64_t{0}); }

    void check() const {
        if (count.size() != minutes || speed.size() != minutes)
            throw DomainError("taxi profile must have exactly 1440 minutes");
        for (int m = 0; m < minutes; ++m)
            if (!(speed[m] > 0.0) || !std::isfinite(speed[m]))
                throw DomainError("taxi profile minute " + std::to_string(m) + ": speed must be positive");
    }
};

namespace detail {

// Integer counts proportional to weights summing to exactly `total`.
inline std::vector<std::uint32_t> apportion(const std::vector<double>& weights, std::uint64_t total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::uint32_t> out(weights.size(), 0);
    if (total == 0 || sum <= 0.0)
        return out;
    std::vector<std::pair<double, std::size_t>> remainders;
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double quota = static_cast<double>(total) * weights[i] / sum;
        out[i] = static_cast<std::uint32_t>(std::floor(quota));
        assigned += out[i];
        remainders.emplace_back(quota - std::floor(quota), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned)
        ++out[remainders[k % remainders.size()].second];
    return out;
}

} // namespace detail

/// Two-peak day: quiet night around 4 am, morning and evening rush hours.
/// Busier minutes are slower.
inline TaxiProfile synthetic_profile(std::uint64_t daily_taxis = 46500) {
    std::vector<double> w(TaxiProfile::minutes);
    for (int m = 0; m < TaxiProfile::minutes; ++m) {
        const double h = m / 60.0;
        auto bump = [h](double center, double width) {
            // Distance on the 24 h circle.
            const double d = std::min(std::abs(h - center), 24.0 - std::abs(h - center));
            return std::exp(-0.5 * (d / width) * (d / width));
        };
        w[m] = 0.12 + 0.5 * bump(13.0, 5.0) + 0.45 * bump(8.5, 1.5) + 0.8 * bump(19.0, 1.5);
    }
    TaxiProfile p;
    p.count = detail::apportion(w, daily_taxis);
    const double w_max = *std::max_element(w.begin(), w.end());
    const double w_min = *std::min_element(w.begin(), w.end());
    for (int m = 0; m < TaxiProfile::minutes; ++m) {
        const double busy = (w[m] - w_min) / (w_max - w_min);
        p.speed[m] = std::round((9.0 - 4.5 * busy) * 100.0) / 100.0;
    }
    return p;
}

/// Same shape with the daily total multiplied by `factor`.
inline TaxiProfile scaled(const TaxiProfile& p, double factor) {
    if (!(factor >= 0.0) || !std::isfinite(factor))
        throw DomainError("taxi scale factor must be finite and non-negative");
    std::vector<double> w(p.count.begin(), p.count.end());
    TaxiProfile out = p;
    out.count = detail::apportion(w, static_cast<std::uint64_t>(std::llround(static_cast<double>(p.total()) * factor)));
    return out;
}

inline TaxiProfile zero_profile() { return TaxiProfile{}; }

/// Reads `minute,count,speed_mps` rows, one per minute 0..1439 in order.
inline TaxiProfile load_profile_csv(std::istream& in, const std::string& source = "taxi profile") {
    std::string line;
    if (!std::getline(in, line))
        throw DomainError(source + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "minute,count,speed_mps")
        throw DomainError(source + ": expected header 'minute,count,speed_mps'");
    TaxiProfile p;
    int expected = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        std::istringstream row(line);
        std::string f_min, f_count, f_speed, extra;
        if (!std::getline(row, f_min, ',') || !std::getline(row, f_count, ',') || !std::getline(row, f_speed, ',') ||
            std::getline(row, extra, ','))
            throw DomainError(where + "expected three fields");
        try {
            std::size_t used = 0;
            const long minute = std::stol(f_min, &used);
            if (used != f_min.size() || minute != expected)
                throw DomainError(where + "expected minute " + std::to_string(expected));
            const long long count = std::stoll(f_count, &used);
            if (used != f_count.size() || count < 0 || count > 0xffffffffLL)
                throw DomainError(where + "count must be a non-negative integer");
            const double speed = std::stod(f_speed, &used);
            if (used != f_speed.size() || !(speed > 0.0) || !std::isfinite(speed))
                throw DomainError(where + "speed_mps must be positive");
            if (expected >= TaxiProfile::minutes)
                throw DomainError(where + "more than 1440 minutes");
            p.count[expected] = static_cast<std::uint32_t>(count);
            p.speed[expected] = speed;
        } catch (const std::logic_error&) {
            throw DomainError(where + "malformed number");
        }
        ++expected;
    }
    if (expected != TaxiProfile::minutes)
        throw DomainError(source + ": expected 1440 minutes, found " + std::to_string(expected));
    return p;
}

inline TaxiProfile load_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open taxi profile '" + path + "'");
    return load_profile_csv(in, path);
}

inline void write_profile_csv(std::ostream& out, const TaxiProfile& p) {
    out << "minute,count,speed_mps\n";
    for (int m = 0; m < TaxiProfile::minutes; ++m) {
        char speed[32];
        // Shortest text that reads back to the same double.
        const auto end = std::to_chars(speed, speed + sizeof speed, p.speed[m]).ptr;
        out << m << ',' << p.count[m] << ',' << std::string_view(speed, static_cast<std::size_t>(end - speed)) << '\n';
    }
}

} // namespace fogsim::scenario
