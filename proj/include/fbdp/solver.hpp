#pragma once

// Backward dynamic program on the LLR grid.  For a fixed Lagrange multiplier
// the recursion produces per-stage amplitude tables and value tables; the
// forward pass propagates the two conditional belief densities through the
// policy to read off error probability and transmitted energy; the
// calibration loop adjusts the multiplier until the energy meets the budget.

#include <span>
#include <vector>

#include "fbdp/grid.hpp"
#include "fbdp/quadrature.hpp"

namespace fbdp {

struct SolverConfig {
    int stages = 1;       ///< channel uses N
    double budget = 1.0;  ///< total energy budget S

    double l_max = 40.0;
    int grid_points = 2001;
    int quad_order = 64;

    int coarse_steps = 400;     ///< amplitude scan intervals on [0, v_max]
    double refine_tol = 1e-6;   ///< golden-section window width on v
    double v_max = 0.0;         ///< amplitude cap; 0 selects 6 (1 + sqrt(S))
    double v_eps = 1e-9;        ///< below this the stage is treated as silent

    double lambda_lo = 1e-6;
    double lambda_hi = 1e3;
    double energy_rel_tol = 1e-3;  ///< accept when |E - S| / S is below this
    int max_calibration_iters = 60;

    /// Source masses at or below this are carried in place instead of being
    /// spread, which skips negligible Gaussian work without losing mass.
    double density_floor = 1e-18;

    double amplitude_cap() const;
};

/// Stage-indexed amplitude tables; v[k-1][i] is the gap transmitted at
/// stage k from grid node i.
struct PolicyTable {
    Grid grid;
    int stages = 0;
    double lambda = 0.0;
    double budget = 0.0;
    std::vector<std::vector<double>> v;
};

struct DpSolution {
    PolicyTable policy;
    /// values[k-1] tabulates the cost-to-go before stage k, for k = 1..N+1;
    /// the last entry is the terminal error probability table.
    std::vector<std::vector<double>> values;
};

struct Minimum {
    double v = 0.0;
    double value = 0.0;
};

/// One-stage cost of transmitting gap v from belief l against the
/// interpolated next-stage value table.  The Gaussian expectation of the
/// piecewise-linear table is evaluated in closed form; the quadrature
/// argument stays in the call shape but is not consulted.
double q_value(double l, double v, double lambda, std::span<const double> next, const Grid& grid,
               const Quadrature& quad, double v_eps);

/// Coarse scan plus golden-section refinement of q_value over v in
/// [0, amplitude cap].  Ties resolve toward smaller amplitudes and an exact
/// zero is preferred whenever it is not strictly worse.
Minimum inner_minimize(double l, double lambda, std::span<const double> next, const Grid& grid,
                       const Quadrature& quad, const SolverConfig& cfg);

/// One Bellman sweep: fills value_out and v_out (both grid-sized) from the
/// next-stage value table.
void bellman_backup(std::span<const double> next, double lambda, const Grid& grid,
                    const Quadrature& quad, const SolverConfig& cfg, std::span<double> value_out,
                    std::span<double> v_out);

DpSolution solve_dp(double lambda, const SolverConfig& cfg);

struct ForwardResult {
    double error_probability = 0.0;
    double expected_energy = 0.0;
    std::vector<double> density_m1;  ///< node masses after the last stage, message 1
    std::vector<double> density_m0;
    double max_mass_drift = 0.0;     ///< worst |total mass - 1| seen before renormalizing
};

/// Exact density propagation of the two conditional beliefs through the
/// policy, spreading each node's mass by Gaussian cell probabilities.
/// Throws NumericalError if mass drifts by more than 1e-6 in any stage.
ForwardResult forward_propagate(const PolicyTable& policy, double v_eps = 1e-9,
                                double density_floor = 1e-18);

struct CalibratedSolution {
    DpSolution solution;
    ForwardResult forward;
    double lambda = 0.0;
    double achieved_energy = 0.0;
    double error_probability = 0.0;
    int probes = 0;  ///< dynamic programs solved during root finding
};

/// Finds the multiplier whose induced policy spends the configured budget,
/// by false-position iteration on log lambda.  Throws CalibrationError if no
/// bracket exists or the iteration budget runs out.
CalibratedSolution calibrate_lambda(const SolverConfig& cfg);

}  // namespace fbdp
