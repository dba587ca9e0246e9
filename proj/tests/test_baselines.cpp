#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbdp/baselines.hpp"
#include "fbdp/belief.hpp"

using namespace fbdp;

TEST_CASE("no-feedback error rate") {
    CHECK(no_feedback_ber(0.0) == 0.5);
    CHECK(no_feedback_ber(1.0) == doctest::Approx(0.158655253931457051).epsilon(1e-14));
    CHECK(no_feedback_ber(2.42) == doctest::Approx(0.0598974652129591501).epsilon(1e-14));
    double prev = 0.5;
    for (double S = 0.25; S <= 16.0; S *= 2.0) {
        CHECK(no_feedback_ber(S) < prev);
        prev = no_feedback_ber(S);
    }
    CHECK_THROWS_AS(no_feedback_ber(-0.1), std::invalid_argument);
}

TEST_CASE("linear feedback scheme evaluation") {
    // One use: antipodal regardless of the split.
    for (double rho : {0.2, 0.7, 1.0}) {
        CHECK(sk_ber({1, 2.0, rho}) == doctest::Approx(no_feedback_ber(2.0)).epsilon(1e-15));
    }
    // rho = 1 leaves no correction power at any horizon.
    CHECK(sk_ber({5, 2.0, 1.0}) == doctest::Approx(no_feedback_ber(2.0)).epsilon(1e-15));
    // Hand value: N=2, S=2, rho=1/2 gives P=1 and amplitude sqrt(2).
    CHECK(sk_ber({2, 2.0, 0.5}) == doctest::Approx(0.0786496035251425653).epsilon(1e-14));

    CHECK_THROWS_AS(sk_ber({2, 2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sk_ber({2, 2.0, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(sk_ber({0, 2.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(sk_ber({2, 0.0, 0.5}), std::invalid_argument);
}

TEST_CASE("linear feedback optimization") {
    const SkBest b = sk_optimize(4, 2.0);
    CHECK(b.scheme.rho > 0.01);
    CHECK(b.scheme.rho <= 1.0);
    // No scanned split beats the optimizer.
    for (int i = 1; i <= 40; ++i) {
        const double rho = 0.01 + (1.0 - 0.01) * i / 40.0;
        CHECK(b.ber <= sk_ber({4, 2.0, rho}) + 1e-12);
    }
    CHECK(b.ber < no_feedback_ber(2.0));

    double prev = 1.0;
    for (int N : {1, 2, 4, 8}) {
        const double ber = sk_optimize(N, 2.0).ber;
        CHECK(ber <= prev + 1e-15);
        prev = ber;
    }
    // Long horizons keep helping.
    CHECK(sk_optimize(100, 2.0).ber < sk_optimize(8, 2.0).ber);
}

TEST_CASE("one-bit scheme degenerate cases") {
    const OneBitResult never = one_bit_ber({1.5, 0.0, 3.0});
    CHECK(never.ber == doctest::Approx(qfunc(1.5)).epsilon(1e-14));
    CHECK(never.energy == doctest::Approx(2.25).epsilon(1e-14));

    const OneBitResult empty = one_bit_ber({1.5, 3.0, 0.0});
    CHECK(empty.ber == doctest::Approx(qfunc(1.5)).epsilon(1e-14));
    CHECK(empty.energy == doctest::Approx(2.25).epsilon(1e-14));

    // Region covering everything: the ML statistic pools both looks, so the
    // error rate collapses to Q(sqrt(b^2 + c^2)).
    const OneBitResult all = one_bit_ber({1.0, 40.0, 1.0});
    CHECK(all.ber == doctest::Approx(qfunc(std::sqrt(2.0))).epsilon(1e-7));
    CHECK(all.energy == doctest::Approx(2.0).epsilon(1e-10));

    CHECK_THROWS_AS(one_bit_ber({-1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("one-bit analytic evaluation matches direct simulation") {
    const OneBitScheme s{1.2, 1.0, 1.5};
    const OneBitResult analytic = one_bit_ber(s);

    std::mt19937_64 rng(321);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int trials = 400000;
    int errors = 0;
    double energy_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        // Message 1 by symmetry of the scheme.
        const double y1 = s.b + normal(rng);
        double energy = s.b * s.b;
        bool error;
        if (std::abs(y1) <= s.a) {
            const double y2 = s.c + normal(rng);
            error = s.b * y1 + s.c * y2 <= 0.0;
            energy += s.c * s.c;
        } else {
            error = y1 < 0.0;
        }
        errors += error ? 1 : 0;
        energy_sum += energy;
    }
    const double ber_hat = static_cast<double>(errors) / trials;
    const double ber_sigma = std::sqrt(analytic.ber * (1.0 - analytic.ber) / trials);
    CHECK(std::abs(ber_hat - analytic.ber) <= 4.0 * ber_sigma);

    const double mean_energy = energy_sum / trials;
    // Per-trial energy is b^2 or b^2 + c^2; binomial spread of the region.
    const double region = qfunc(s.b - s.a) - qfunc(s.b + s.a);
    const double energy_sigma =
        s.c * s.c * std::sqrt(region * (1.0 - region) / trials);
    CHECK(std::abs(mean_energy - analytic.energy) <= 4.0 * energy_sigma);
}

TEST_CASE("one-bit optimization") {
    for (double S : {1.0, 2.42, 4.0}) {
        const OneBitBest best = one_bit_optimize(S);
        CHECK(best.ber <= no_feedback_ber(S) + 1e-12);
        CHECK(std::abs(best.energy - S) / S <= 1e-3);
        CHECK(best.scheme.b >= 0.0);
        CHECK(best.scheme.a >= 0.0);
        CHECK(best.scheme.c >= 0.0);
        // Re-evaluating the returned scheme reproduces the reported point.
        const OneBitResult again = one_bit_ber(best.scheme);
        CHECK(again.ber == doctest::Approx(best.ber).epsilon(1e-12));
        CHECK(again.energy == doctest::Approx(best.energy).epsilon(1e-12));
    }
    // At moderate budgets the feedback bit buys a real improvement.
    CHECK(one_bit_optimize(2.42).ber < 0.95 * no_feedback_ber(2.42));
}

TEST_CASE("baseline error rates stay in range") {
    for (double S : {0.25, 1.0, 2.0, 4.0, 9.0}) {
        for (double ber : {no_feedback_ber(S), sk_optimize(4, S).ber, one_bit_optimize(S).ber}) {
            CHECK(ber > 0.0);
            CHECK(ber <= 0.5);
        }
    }
}

TEST_CASE("asymptotic energy marker") {
    CHECK(shannon_energy_marker() == doctest::Approx(1.38629436111989062).epsilon(1e-15));
    // In decibels of E_b/N_0 with N_0 = 2 this is the familiar -1.59 dB.
    const double db = 10.0 * std::log10(shannon_energy_marker() / 2.0);
    CHECK(db == doctest::Approx(-1.59174538954861592).epsilon(1e-12));
}
