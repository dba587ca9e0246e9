#pragma once

// Uniform symmetric grid on the LLR axis and piecewise-linear interpolation
// of functions tabulated on it.  The node formula guarantees an exact 0 at
// the center and exact mirror symmetry node(i) == -node(points-1-i), which
// the solver relies on for its symmetry checks.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fbdp {

struct Grid {
    double l_max = 0.0;  ///< half-width; nodes span [-l_max, l_max]
    int points = 0;      ///< node count, odd so the center node sits at 0
    double step = 0.0;   ///< node spacing 2*l_max/(points-1)

    double node(int i) const {
        const double c = 0.5 * static_cast<double>(points - 1);
        return l_max * ((static_cast<double>(i) - c) / c);
    }

    int center() const { return (points - 1) / 2; }

    std::vector<double> nodes() const {
        std::vector<double> out(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = node(i);
        return out;
    }
};

inline Grid make_grid(double l_max, int points) {
    if (!(l_max > 0.0)) throw std::invalid_argument("make_grid: l_max must be positive");
    if (points < 3 || points % 2 == 0)
        throw std::invalid_argument("make_grid: points must be odd and >= 3");
    Grid g;
    g.l_max = l_max;
    g.points = points;
    g.step = 2.0 * l_max / static_cast<double>(points - 1);
    return g;
}

/// Piecewise-linear evaluation of the table at x.  Outside the grid the
/// boundary value extends flat.  Queries within 1e-9 grid steps of a node
/// snap to the tabulated value so that round-tripped coordinates do not pick
/// up interpolation slack.
inline double interp_eval(std::span<const double> table, const Grid& grid, double x) {
    const double t = (x + grid.l_max) / grid.step;
    if (t <= 0.0) return table.front();
    const double last = static_cast<double>(grid.points - 1);
    if (t >= last) return table.back();
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9) return table[static_cast<std::size_t>(r)];
    const double fl = std::floor(t);
    const auto i = static_cast<std::size_t>(fl);
    const double w = t - fl;
    return table[i] + w * (table[i + 1] - table[i]);
}

}  // namespace fbdp
