#pragma once

// Reference schemes that bracket the optimized policy: the best scheme that
// ignores feedback, the classic linear feedback scheme, a two-stage scheme
// that learns one bit about the first output, and the asymptotic minimum
// energy marker.

namespace fbdp {

/// Best no-feedback error rate at total energy S: antipodal signaling, Q(sqrt(S)).
double no_feedback_ber(double S);

/// Linear feedback scheme: stage 1 sends +/- sqrt(rho S); each of the N-1
/// correction rounds sends the receiver's scaled estimation error with power
/// P = (1 - rho) S / (N - 1), shrinking the error variance by 1/(1 + P).
struct SkScheme {
    int stages = 1;
    double budget = 1.0;
    double rho = 1.0;  ///< fraction of energy on stage 1, in (0, 1]
};

/// Error rate of the scheme: Q(sqrt(rho S) (1 + P)^((N-1)/2)).  rho is
/// forced to 1 when N = 1.
double sk_ber(const SkScheme& scheme);

struct SkBest {
    SkScheme scheme;
    double ber = 0.0;
};

/// Best energy split: golden-section search of sk_ber over rho in [0.01, 1].
SkBest sk_optimize(int stages, double budget);

/// Two-stage scheme with one bit of feedback: stage 1 sends +/- b; the
/// encoder then learns whether |y1| <= a, and only in that case sends +/- c.
/// The decoder knows the region too and applies the matching ML rule.
struct OneBitScheme {
    double b = 0.0;  ///< first-stage amplitude
    double a = 0.0;  ///< feedback threshold on |y1|
    double c = 0.0;  ///< second-stage amplitude inside the region
};

struct OneBitResult {
    double ber = 0.0;
    double energy = 0.0;  ///< b^2 + P(|y1| <= a) c^2
};

/// Exact evaluation by 1-D integration over y1 (absolute tolerance 1e-10).
OneBitResult one_bit_ber(const OneBitScheme& scheme);

struct OneBitBest {
    OneBitScheme scheme;
    double ber = 0.0;
    double energy = 0.0;
};

/// Minimizes one_bit_ber over (b, a) with c eliminated through the energy
/// constraint, so the returned scheme spends exactly S.  Grid scan plus
/// coordinate refinement; the degenerate no-feedback point (b = sqrt(S),
/// a = 0) is always a candidate, so the result never loses to it.
OneBitBest one_bit_optimize(double S);

/// Minimal energy for reliable one-bit signaling with unlimited uses:
/// 2 ln 2, i.e. E_b/N_0 = ln 2 under the unit-variance noise convention.
double shannon_energy_marker();

}  // namespace fbdp
