#pragma once

#include <limits>
#include <string>

#include "fogsim/error.hpp"

namespace fogsim {

/// Maximum load of a node (MIPS) or link (bit/s). Either a finite,
/// non-negative amount or explicitly unbounded.
class Capacity {
public:
    constexpr Capacity() = default;

    static Capacity bounded(double amount) {
        if (!(amount >= 0.0) || amount == std::numeric_limits<double>::infinity())
            throw DomainError("capacity must be a finite non-negative number");
        Capacity c;
        c.amount_ = amount;
        return c;
    }

    static constexpr Capacity unbounded() {
        Capacity c;
        c.unbounded_ = true;
        return c;
    }

    constexpr bool is_unbounded() const noexcept { return unbounded_; }

    /// Finite amount; only meaningful when bounded.
    constexpr double amount() const noexcept { return amount_; }

    /// Remaining headroom given the currently used amount.
    constexpr double headroom(double used) const noexcept {
        return unbounded_ ? std::numeric_limits<double>::infinity() : amount_ - used;
    }

    constexpr bool fits(double used, double extra) const noexcept {
        return unbounded_ || used + extra <= amount_;
    }

    /// used / amount, 0 for unbounded or zero-sized capacities.
    constexpr double utilization(double used) const noexcept {
        return (unbounded_ || amount_ <= 0.0) ? 0.0 : used / amount_;
    }

    friend constexpr bool operator==(const Capacity&, const Capacity&) = default;

private:
    double amount_ = 0.0;
    bool unbounded_ = false;
};

} // namespace fogsim
