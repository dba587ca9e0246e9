#pragma once

// Executable encoder/decoder pair built from a policy table, the vector
// channel embedding that keeps coordinates 2..M silent, and a seeded Monte
// Carlo harness whose trials are reproducible independent of scheduling.

#include <cstdint>
#include <span>
#include <vector>

#include "fbdp/belief.hpp"
#include "fbdp/solver.hpp"

namespace fbdp {

struct EncoderSpec {
    const PolicyTable* policy = nullptr;
    double v_eps = 1e-9;

    int stages() const { return policy->stages; }

    /// Gap amplitude at belief l for stage k (1-based), interpolated between
    /// grid nodes and saturating at the grid edges.
    double amplitude(int k, double l) const {
        return interp_eval(policy->v[static_cast<std::size_t>(k) - 1], policy->grid, l);
    }
};

struct Amplitudes {
    double u1;
    double u0;
};

/// Transmitted values for the two messages at belief l and gap v:
/// u1 = p0 v and u0 = -p1 v, so the posterior mean p1 u1 + p0 u0 is zero and
/// the gap u1 - u0 equals v.
inline Amplitudes encoder_amplitudes(double l, double v) {
    const Posterior p = posterior(l);
    return {p.p0 * v, -(p.p1 * v)};
}

struct Trajectory {
    MessageBit message = MessageBit::zero;
    MessageBit decoded = MessageBit::zero;
    double energy_spent = 0.0;
    std::vector<double> llr;  ///< l_1..l_{N+1}; llr[0] = 0 before any use
    std::vector<double> v;    ///< gap chosen at each stage
    std::vector<double> u;    ///< value actually transmitted at each stage
    std::vector<double> y;    ///< channel output at each stage
};

/// Runs one trial with explicit per-stage noise (size N).  Diagnostic path;
/// records the full state history.
Trajectory run_trial(const EncoderSpec& spec, MessageBit m, std::span<const double> noise);

struct MimoTrajectory {
    MessageBit message = MessageBit::zero;
    MessageBit decoded = MessageBit::zero;
    double energy_spent = 0.0;
    std::vector<double> llr;
    std::vector<std::vector<double>> u;  ///< per stage, M transmitted coordinates
    std::vector<std::vector<double>> y;  ///< per stage, M observed coordinates
};

struct MimoEncoder {
    EncoderSpec base;
    int channels = 1;
};

/// Vector-channel embedding: all energy on coordinate 1, coordinates 2..M
/// exactly zero.  Rejects M < 1.
MimoEncoder mimo_embed(const EncoderSpec& spec, int M);

/// Runs one vector trial; noise holds M values per stage, coordinate-major
/// within each stage (size N*M, stage k coordinate c at [(k-1)*M + c - 1]).
MimoTrajectory run_trial(const MimoEncoder& enc, MessageBit m, std::span<const double> noise);

struct McReport {
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    std::uint64_t seed = 0;
    double ber_hat = 0.0;
    double ber_std_error = 0.0;
    double ber_ci95_lo = 0.0;
    double ber_ci95_hi = 0.0;
    double mean_energy = 0.0;
    double energy_std_error = 0.0;
    double energy_ci95_lo = 0.0;
    double energy_ci95_hi = 0.0;
};

/// Monte Carlo over independent trials; the message is drawn uniformly per
/// trial and the noise stream is addressed by (seed, trial, stage, coord),
/// so the error count is identical for any execution order or thread count.
McReport monte_carlo(const EncoderSpec& spec, std::uint64_t trials, std::uint64_t seed);

/// Same harness through the M-coordinate embedding.
McReport monte_carlo(const MimoEncoder& enc, std::uint64_t trials, std::uint64_t seed);

struct EnergyIdentityReport {
    double transmitted = 0.0;         ///< mean of sum_k u^2 over trials
    double transmitted_std_error = 0.0;
    double posterior_weighted = 0.0;  ///< mean of sum_k p0 p1 v^2 over trials
    double posterior_weighted_std_error = 0.0;
};

/// Estimates the transmitted energy two ways from the same trials: the
/// actual sum of squares, and the posterior-weighted form p0 p1 v^2 that the
/// solver optimizes.  The two means agree in expectation.
EnergyIdentityReport energy_identity_check(const EncoderSpec& spec, std::uint64_t trials,
                                           std::uint64_t seed);

}  // namespace fbdp
