#include "fbdp/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace fbdp {

namespace {

// Newton iteration on the orthonormal Hermite recurrence.  Initial guesses
// follow the usual largest-root expansion plus a fixed-ratio march inward.
void hermite_roots(int n, std::vector<double>& x, std::vector<double>& w) {
    const int m = (n + 1) / 2;
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);

    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[static_cast<std::size_t>(i) - 2];
        }

        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 0.75112554446494248286;  // pi^(-1/4)
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * (1.0 + std::abs(z))) break;
        }

        x[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(n - 1 - i)] = -z;
        const double wi = 2.0 / (pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
}

}  // namespace

Quadrature gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be positive");

    std::vector<double> x, w;
    hermite_roots(order, x, w);

    // Mirror the positive half onto the negative half so the rule is
    // symmetric to the last bit, then rescale: nodes by sqrt(2) to move from
    // weight exp(-x^2) to the standard normal, weights to unit total mass.
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(order));
    q.weights.resize(static_cast<std::size_t>(order));

    double wsum = 0.0;
    for (double wi : w) wsum += wi;

    constexpr double sqrt2 = 1.41421356237309504880;
    for (int i = 0; i < order; ++i) {
        const auto k = static_cast<std::size_t>(i);
        q.nodes[k] = sqrt2 * x[k];
        q.weights[k] = w[k] / wsum;
    }
    // Descending node order from hermite_roots; flip to ascending.
    for (std::size_t i = 0, j = q.nodes.size() - 1; i < j; ++i, --j) {
        std::swap(q.nodes[i], q.nodes[j]);
        std::swap(q.weights[i], q.weights[j]);
    }
    return q;
}

}  // namespace fbdp
