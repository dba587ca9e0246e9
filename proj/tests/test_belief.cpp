#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fbdp/belief.hpp"

using namespace fbdp;

namespace {

// Independent tail-probability oracle: composite Simpson of the normal
// density on [a, a+12] with a fine fixed mesh.
double qfunc_by_integration(double a) {
    const int n = 20000;
    const double b = a + 12.0;
    const double h = (b - a) / n;
    double s = std_normal_pdf(a) + std_normal_pdf(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * std_normal_pdf(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("normal pdf and qfunc match precomputed references") {
    CHECK(std_normal_pdf(0.0) == doctest::Approx(0.398942280401432678).epsilon(1e-15));
    CHECK(std_normal_pdf(1.0) == doctest::Approx(0.241970724519143350).epsilon(1e-15));
    CHECK(qfunc(0.0) == 0.5);
    CHECK(qfunc(0.5) == doctest::Approx(0.308537538725986896).epsilon(1e-14));
    CHECK(qfunc(1.0) == doctest::Approx(0.158655253931457051).epsilon(1e-14));
    CHECK(qfunc(2.0) == doctest::Approx(0.0227501319481792072).epsilon(1e-14));
    CHECK(qfunc(3.0) == doctest::Approx(0.00134989803163009453).epsilon(1e-14));
    CHECK(qfunc(std::sqrt(2.42)) == doctest::Approx(0.0598974652129591501).epsilon(1e-14));
    CHECK(qfunc(std::sqrt(2.0)) == doctest::Approx(0.0786496035251425653).epsilon(1e-14));
}

TEST_CASE("qfunc agrees with direct integration of the density") {
    for (double a : {0.0, 0.3, 1.0, 1.7, 2.5, 3.5}) {
        CHECK(qfunc(a) == doctest::Approx(qfunc_by_integration(a)).epsilon(1e-10));
    }
}

TEST_CASE("qfunc symmetry and monotonicity") {
    for (double a : {0.1, 0.7, 1.3, 2.9}) {
        CHECK(qfunc(-a) + qfunc(a) == doctest::Approx(1.0).epsilon(1e-15));
    }
    double prev = 1.0;
    for (double a = -4.0; a <= 4.0; a += 0.25) {
        const double q = qfunc(a);
        CHECK(q < prev);
        prev = q;
    }
}

TEST_CASE("posterior components sum to one exactly and mirror") {
    for (double l : {0.0, 1e-8, 0.3, 2.0, 8.0, 40.0, 700.0, 745.0, 1e6}) {
        for (double s : {1.0, -1.0}) {
            const Posterior p = posterior(s * l);
            CHECK(p.p0 + p.p1 == 1.0);
            CHECK(p.p0 >= 0.0);
            CHECK(p.p1 >= 0.0);
        }
        const Posterior a = posterior(l);
        const Posterior b = posterior(-l);
        CHECK(a.p1 == b.p0);
        CHECK(a.p0 == b.p1);
    }
    CHECK(posterior(0.0).p0 == 0.5);
    CHECK(posterior(0.0).p1 == 0.5);
}

TEST_CASE("posterior reference values") {
    const Posterior p2 = posterior(2.0);
    CHECK(p2.p0 == doctest::Approx(0.119202922022117556).epsilon(1e-15));
    CHECK(p2.p1 == doctest::Approx(0.880797077977882444).epsilon(1e-15));
    CHECK(posterior(8.0).p0 == doctest::Approx(0.000335350130466478104).epsilon(1e-14));
}

TEST_CASE("posterior_product matches factored form and survives large l") {
    for (double l : {0.0, 0.5, 2.0, 8.0, 30.0}) {
        const Posterior p = posterior(l);
        CHECK(posterior_product(l) == doctest::Approx(p.p0 * p.p1).epsilon(1e-14));
        CHECK(posterior_product(-l) == posterior_product(l));
    }
    CHECK(posterior_product(0.0) == 0.25);
    CHECK(posterior_product(700.0) > 0.0);
    CHECK(posterior_product(700.0) < 1e-300);
}

TEST_CASE("llr_update scalar equals one-coordinate vector form") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int it = 0; it < 200; ++it) {
        const double l = uni(rng), u1 = uni(rng), u0 = uni(rng), y = uni(rng);
        const double a[1] = {u1}, b[1] = {u0}, c[1] = {y};
        CHECK(llr_update(l, u1, u0, y) == llr_update(l, a, b, c));
    }
}

TEST_CASE("llr_update matches the squared-distance definition") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int it = 0; it < 500; ++it) {
        const double l = uni(rng), u1 = uni(rng), u0 = uni(rng), y = uni(rng);
        const double direct =
            l - 0.5 * (y - u1) * (y - u1) + 0.5 * (y - u0) * (y - u0);
        CHECK(llr_update(l, u1, u0, y) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("coordinates with equal candidate transmissions change nothing") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    for (int it = 0; it < 200; ++it) {
        const double l = uni(rng), c = uni(rng), y = uni(rng);
        CHECK(llr_update(l, c, c, y) == l);
        const std::vector<double> u1{0.7, c, 0.0}, u0{-0.2, c, 0.0}, yy{uni(rng), y, uni(rng)};
        const double full = llr_update(l, u1, u0, yy);
        CHECK(full == llr_update(l, 0.7, -0.2, yy[0]));
    }
}

TEST_CASE("llr_update rejects mismatched dimensions") {
    const std::vector<double> two{0.0, 0.0}, three{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(llr_update(0.0, two, two, three), std::invalid_argument);
    CHECK_THROWS_AS(llr_update(0.0, two, three, three), std::invalid_argument);
}

TEST_CASE("transition drift and antisymmetry") {
    CHECK(transition(0.0, 2.0, MessageBit::one, 0.0) == 2.0);
    CHECK(transition(0.0, 2.0, MessageBit::zero, 0.0) == -2.0);
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int it = 0; it < 200; ++it) {
        const double l = uni(rng), v = std::abs(uni(rng)), z = uni(rng);
        CHECK(transition(l, v, MessageBit::one, z) ==
              -transition(-l, v, MessageBit::zero, -z));
    }
}

TEST_CASE("decoder recursion reproduces the encoder transition") {
    // y = u^m + z with the two candidate amplitudes implied by l and v.
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> uni(-4.0, 4.0);
    for (int it = 0; it < 500; ++it) {
        const double l = uni(rng), v = std::abs(uni(rng)), z = uni(rng);
        const Posterior p = posterior(l);
        const double u1 = p.p0 * v, u0 = -(p.p1 * v);
        const double via_decoder1 = llr_update(l, u1, u0, u1 + z);
        const double via_decoder0 = llr_update(l, u1, u0, u0 + z);
        CHECK(via_decoder1 ==
              doctest::Approx(transition(l, v, MessageBit::one, z)).epsilon(1e-10));
        CHECK(via_decoder0 ==
              doctest::Approx(transition(l, v, MessageBit::zero, z)).epsilon(1e-10));
    }
}

TEST_CASE("stage cost scaling") {
    CHECK(stage_cost(0.0, 2.0, 0.5) == 0.5);  // lambda * v^2 / 4
    CHECK(stage_cost(3.0, 1.5, 0.2) == stage_cost(-3.0, 1.5, 0.2));
    CHECK(stage_cost(5.0, 1.0, 1.0) < stage_cost(0.0, 1.0, 1.0));
    CHECK(stage_cost(2.0, 0.0, 7.0) == 0.0);
}

TEST_CASE("terminal cost values and limits") {
    CHECK(terminal_cost(0.0) == 0.5);
    CHECK(terminal_cost(3.0) == doctest::Approx(0.0474258731775667809).epsilon(1e-14));
    CHECK(terminal_cost(3.0) == terminal_cost(-3.0));
    CHECK(terminal_cost(40.0) < 1e-17);
    CHECK(terminal_cost(1e6) == 0.0);  // overflow-safe, not NaN
    double prev = 0.5;
    for (double l = 0.5; l <= 10.0; l += 0.5) {
        CHECK(terminal_cost(l) < prev);
        prev = terminal_cost(l);
    }
}
