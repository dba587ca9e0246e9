#pragma once

// Gauss-Hermite quadrature transformed so that sum_i w_i f(n_i) approximates
// E[f(Z)] for Z ~ N(0, 1).  Nodes come in exact +/- pairs and the weights
// are normalized to sum to one exactly.

#include <vector>

namespace fbdp {

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Quadrature gauss_hermite(int order);

}  // namespace fbdp
