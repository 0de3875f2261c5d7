#pragma once

// Street grid geometry: crossings on a rows x cols lattice, columns spaced by
// block width along x and rows by block height along y.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fogsim/error.hpp"
#include "fogsim/infrastructure.hpp"

namespace fogsim::scenario {

struct Crossing {
    int row = 0;
    int col = 0;
    friend bool operator==(const Crossing&, const Crossing&) = default;
};

class CityGrid {
public:
    CityGrid(int rows = 4, int cols = 4, double block_width = 274.0, double block_height = 80.0)
        : rows_(rows), cols_(cols), block_width_(block_width), block_height_(block_height) {
        if (rows < 1 || cols < 1 || rows > 10 || cols > 10)
            throw DomainError("grid must have between 1 and 10 rows and columns");
        if (!(block_width > 0.0) || !(block_height > 0.0))
            throw DomainError("block dimensions must be positive");
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int crossing_count() const noexcept { return rows_ * cols_; }
    double block_width() const noexcept { return block_width_; }
    double block_height() const noexcept { return block_height_; }

    int index(Crossing c) const noexcept { return c.row * cols_ + c.col; }
    Crossing crossing(int index) const noexcept { return {index / cols_, index % cols_}; }

    Location location(Crossing c) const noexcept { return {c.col * block_width_, c.row * block_height_}; }

    // Single-digit coordinates keep id order equal to (row, col) order.
    std::string stl_id(Crossing c) const { return "stl-" + std::to_string(c.row) + "-" + std::to_string(c.col); }
    std::string fog_id(Crossing c) const { return "fog-" + std::to_string(c.row) + "-" + std::to_string(c.col); }

    bool on_border(Crossing c) const noexcept {
        return c.row == 0 || c.col == 0 || c.row == rows_ - 1 || c.col == cols_ - 1;
    }

    std::vector<Crossing> border() const {
        std::vector<Crossing> out;
        for (int i = 0; i < crossing_count(); ++i)
            if (on_border(crossing(i)))
                out.push_back(crossing(i));
        return out;
    }

    /// Crossings orthogonally adjacent to c, in index order.
    std::vector<Crossing> neighbors(Crossing c) const {
        std::vector<Crossing> out;
        if (c.row > 0)
            out.push_back({c.row - 1, c.col});
        if (c.col > 0)
            out.push_back({c.row, c.col - 1});
        if (c.col < cols_ - 1)
            out.push_back({c.row, c.col + 1});
        if (c.row < rows_ - 1)
            out.push_back({c.row + 1, c.col});
        return out;
    }

    /// Euclidean nearest crossing; on a lattice the axes separate. Exact
    /// midpoints go to the lower coordinate, which is also the smaller id.
    Crossing nearest(Location p) const noexcept {
        return {nearest_step(p.y, block_height_, rows_), nearest_step(p.x, block_width_, cols_)};
    }

private:
    static int nearest_step(double v, double step, int count) noexcept {
        const double f = v / step;
        int i = static_cast<int>(std::floor(f));
        // Compare actual distances so rounding in f cannot flip a tie.
        if (std::abs(v - (i + 1) * step) < std::abs(v - i * step))
            ++i;
        return std::clamp(i, 0, count - 1);
    }

    int rows_;
    int cols_;
    double block_width_;
    double block_height_;
};

/// Manhattan hop distance between crossings.
inline int hops(Crossing a, Crossing b) noexcept { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

/// The k crossings that host fog nodes: minimal total hop distance from every
/// crossing to its closest fog site, then minimal worst-case distance, then
/// the lexicographically smallest index set.
inline std::vector<Crossing> fog_sites(const CityGrid& grid, int k) {
    const int n = grid.crossing_count();
    if (k < 0 || k > n)
        throw DomainError("fog node count must lie in [0, " + std::to_string(n) + "]");
    if (k == 0)
        return {};
    std::vector<int> chosen(k), best;
    long best_sum = std::numeric_limits<long>::max();
    int best_max = std::numeric_limits<int>::max();

    // Combinations in lexicographic order, so the first optimum found wins ties.
    for (int i = 0; i < k; ++i)
        chosen[i] = i;
    while (true) {
        long sum = 0;
        int worst = 0;
        for (int c = 0; c < n; ++c) {
            int d = std::numeric_limits<int>::max();
            for (int s : chosen)
                d = std::min(d, hops(grid.crossing(c), grid.crossing(s)));
            sum += d;
            worst = std::max(worst, d);
        }
        if (sum < best_sum || (sum == best_sum && worst < best_max)) {
            best_sum = sum;
            best_max = worst;
            best = chosen;
        }
        int i = k - 1;
        while (i >= 0 && chosen[i] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++chosen[i];
        for (int j = i + 1; j < k; ++j)
            chosen[j] = chosen[j - 1] + 1;
    }
    std::vector<Crossing> out;
    for (int s : best)
        out.push_back(grid.crossing(s));
    return out;
}

/// Uniform integer in [0, n) by rejection; std distributions are not
/// reproducible across standard libraries.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0)
        throw DomainError("uniform_index: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do
        x = rng();
    while (x >= limit);
    return x % n;
}

/// A shortest lattice path between two distinct border crossings. Every
/// interleaving of row and column moves is equally likely.
inline std::vector<Crossing> random_route(const CityGrid& grid, std::mt19937_64& rng) {
    const auto border = grid.border();
    if (border.size() < 2)
        throw DomainError("grid needs at least two border crossings for routes");
    const auto ai = uniform_index(rng, border.size());
    auto bi = uniform_index(rng, border.size() - 1);
    if (bi >= ai)
        ++bi; // skip the entry crossing
    const Crossing a = border[ai];
    const Crossing b = border[bi];

    int vertical = std::abs(b.row - a.row);
    int horizontal = std::abs(b.col - a.col);
    const int dr = b.row > a.row ? 1 : -1;
    const int dc = b.col > a.col ? 1 : -1;
    std::vector<Crossing> route{a};
    Crossing at = a;
    while (vertical + horizontal > 0) {
        const bool go_vertical = uniform_index(rng, static_cast<std::uint64_t>(vertical + horizontal)) <
                                 static_cast<std::uint64_t>(vertical);
        if (go_vertical) {
            at.row += dr;
            --vertical;
        } else {
            at.col += dc;
            --horizontal;
        }
        route.push_back(at);
    }
    return route;
}

} // namespace fogsim::scenario
