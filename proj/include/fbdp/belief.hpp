#pragma once

// Scalar belief-state math shared by the solver, the channel simulator and
// the baselines: Gaussian tail probabilities, message posteriors as a
// function of the log-likelihood ratio, the LLR recursion seen by the
// decoder, the controlled state transition seen by the encoder, and the
// stage/terminal costs of the transmission problem.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace fbdp {

/// Binary message; prior is uniform over the two values.
enum class MessageBit : int { zero = 0, one = 1 };

/// Message posterior given the observations summarized by an LLR.
/// Components always sum to one exactly.
struct Posterior {
    double p0;
    double p1;
};

/// Standard normal density (2*pi)^(-1/2) exp(-t^2/2).
inline double std_normal_pdf(double t) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

/// Gaussian upper-tail probability Q(a), via the complementary error function.
inline double qfunc(double a) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return 0.5 * std::erfc(a * inv_sqrt2);
}

/// Posterior (p0, p1) at LLR l.  The dominant component is computed with a
/// negative-argument exponential and the other as its exact complement, so
/// the pair is well defined for |l| far beyond 700.
inline Posterior posterior(double l) {
    if (l >= 0.0) {
        const double p1 = 1.0 / (1.0 + std::exp(-l));
        return {1.0 - p1, p1};
    }
    const double p0 = 1.0 / (1.0 + std::exp(l));
    return {p0, 1.0 - p0};
}

/// p0(l) * p1(l) = 1/(4 cosh^2(l/2)), accurate down to the underflow
/// threshold where the factored posterior would already have rounded to 0.
inline double posterior_product(double l) {
    const double w = std::exp(-std::abs(l));
    const double d = 1.0 + w;
    return w / (d * d);
}

namespace detail {
// Per-coordinate LLR increment, factored as a product of sum and difference
// so that a coordinate with u1 == u0 contributes an exact zero.
inline double llr_increment(double u1, double u0, double y) {
    const double d0 = y - u0;
    const double d1 = y - u1;
    return 0.5 * (d0 - d1) * (d0 + d1);
}
}  // namespace detail

/// Decoder-side LLR recursion step for a vector channel use:
/// l' = l - |y - u1|^2/2 + |y - u0|^2/2, accumulated coordinate by
/// coordinate in index order.
inline double llr_update(double l, std::span<const double> u1, std::span<const double> u0,
                         std::span<const double> y) {
    if (u1.size() != u0.size() || u1.size() != y.size())
        throw std::invalid_argument("llr_update: dimension mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) l += detail::llr_increment(u1[i], u0[i], y[i]);
    return l;
}

/// Scalar channel use; identical arithmetic to the one-coordinate vector case.
inline double llr_update(double l, double u1, double u0, double y) {
    return l + detail::llr_increment(u1, u0, y);
}

/// Encoder-side state transition for gap amplitude v >= 0 and noise z:
/// l' = l + v^2/2 + v z under message 1, l' = l - v^2/2 + v z under message 0.
inline double transition(double l, double v, MessageBit m, double z) {
    const double drift = 0.5 * v * v;
    return m == MessageBit::one ? l + drift + v * z : l - drift + v * z;
}

/// Energy penalty lambda * p0(l) p1(l) v^2 paid for transmitting gap v at
/// belief l.  Bounded by lambda v^2/4, with equality only at l = 0.
inline double stage_cost(double l, double v, double lambda) {
    return lambda * posterior_product(l) * (v * v);
}

/// Probability that the maximum-likelihood decision at LLR l picks the wrong
/// message: 1/(e^|l| + 1).  Equals 1/2 at l = 0 and decays to 0 in |l|.
inline double terminal_cost(double l) {
    return 1.0 / (std::exp(std::abs(l)) + 1.0);
}

}  // namespace fbdp
