#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace fogsim {

/// Running sum of doubles kept exact as a list of non-overlapping partials
/// (Shewchuk). value() is the correctly rounded total, so it depends only on
/// the multiset of addends: adding x and later -x restores the previous value
/// bit for bit, whatever happened in between.
class ExactSum {
public:
    ExactSum() = default;
    explicit ExactSum(double x) { add(x); }

    void add(double x) {
        std::size_t i = 0;
        for (std::size_t j = 0; j < partials_.size(); ++j) {
            double y = partials_[j];
            if (std::abs(x) < std::abs(y))
                std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0)
                partials_[i++] = lo;
            x = hi;
        }
        partials_.resize(i);
        if (x != 0.0 || partials_.empty())
            partials_.push_back(x);
    }

    ExactSum& operator+=(double x) {
        add(x);
        return *this;
    }

    double value() const {
        std::size_t n = partials_.size();
        if (n == 0)
            return 0.0;
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            lo = y - (hi - x);
            if (lo != 0.0)
                break;
        }
        // Half-even rounding across partials.
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            if (y == x - hi)
                hi = x;
        }
        return hi;
    }

    const std::vector<double>& partials() const noexcept { return partials_; }

private:
    std::vector<double> partials_;
};

} // namespace fogsim
