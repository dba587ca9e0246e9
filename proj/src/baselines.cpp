#include "fbdp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbdp/belief.hpp"

namespace fbdp {

namespace {

constexpr double golden = 0.61803398874989484820;

// Golden-section minimization; returns the best evaluated point, which may
// be an endpoint.
template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
    double best_x = a;
    double best_f = f(a);
    const double fb_end = f(b);
    if (fb_end < best_f) {
        best_x = b;
        best_f = fb_end;
    }
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = f(d);
        }
        const double x = fc <= fd ? c : d;
        const double fx = std::min(fc, fd);
        if (fx < best_f) {
            best_x = x;
            best_f = fx;
        }
    }
    return {best_x, best_f};
}

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

template <typename F>
double adaptive_simpson(F&& f, double a, double m, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    return adaptive_simpson(f, a, m, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 40);
}

}  // namespace

double no_feedback_ber(double S) {
    if (S < 0.0) throw std::invalid_argument("no_feedback_ber: energy must be non-negative");
    return qfunc(std::sqrt(S));
}

double sk_ber(const SkScheme& scheme) {
    const int N = scheme.stages;
    const double S = scheme.budget;
    if (N < 1) throw std::invalid_argument("sk_ber: stages must be >= 1");
    if (!(S > 0.0)) throw std::invalid_argument("sk_ber: budget must be positive");
    const double rho = N == 1 ? 1.0 : scheme.rho;
    if (!(rho > 0.0) || rho > 1.0) throw std::invalid_argument("sk_ber: rho must be in (0, 1]");
    if (N == 1) return qfunc(std::sqrt(S));
    const double P = (1.0 - rho) * S / static_cast<double>(N - 1);
    const double amp =
        std::sqrt(rho * S) * std::pow(1.0 + P, 0.5 * static_cast<double>(N - 1));
    return qfunc(amp);
}

SkBest sk_optimize(int stages, double budget) {
    SkBest best;
    best.scheme = {stages, budget, 1.0};
    if (stages == 1) {
        best.ber = sk_ber(best.scheme);
        return best;
    }
    const auto [rho, ber] = golden_min(
        [&](double r) { return sk_ber({stages, budget, r}); }, 0.01, 1.0, 1e-8);
    best.scheme.rho = rho;
    best.ber = ber;
    return best;
}

OneBitResult one_bit_ber(const OneBitScheme& scheme) {
    const double b = scheme.b;
    const double a = scheme.a;
    const double c = scheme.c;
    if (b < 0.0 || a < 0.0 || c < 0.0)
        throw std::invalid_argument("one_bit_ber: parameters must be non-negative");

    const double region = qfunc(b - a) - qfunc(b + a);  // P(|y1| <= a)
    OneBitResult r;
    r.energy = b * b + region * c * c;

    if (a == 0.0 || c == 0.0) {
        // Second stage never fires or carries nothing; decision is sign(y1).
        r.ber = qfunc(b);
        return r;
    }

    // Inside the region the ML statistic is b y1 + c y2; conditioned on
    // message 1, an error needs z2 <= -(b y1 + c^2)/c.
    const auto integrand = [&](double y) {
        return std_normal_pdf(y - b) * qfunc((b * y + c * c) / c);
    };
    const double lo = std::max(-a, b - 10.0);
    const double hi = std::min(a, b + 10.0);
    r.ber = qfunc(a + b) + integrate(integrand, lo, hi, 1e-10);
    return r;
}

OneBitBest one_bit_optimize(double S) {
    if (!(S > 0.0)) throw std::invalid_argument("one_bit_optimize: budget must be positive");
    const double root = std::sqrt(S);

    OneBitBest best;
    best.scheme = {root, 0.0, 0.0};
    best.ber = qfunc(root);
    best.energy = S;

    // c from the exact-energy constraint; degenerate cells are skipped, the
    // antipodal fallback above already covers them.
    const auto make = [&](double b, double a) -> OneBitScheme {
        const double region = qfunc(b - a) - qfunc(b + a);
        if (!(region > 1e-15) || b * b >= S) return {root, 0.0, 0.0};
        return {b, a, std::sqrt((S - b * b) / region)};
    };
    const auto eval = [&](double b, double a) {
        const OneBitScheme s = make(b, a);
        const OneBitResult r = one_bit_ber(s);
        if (r.ber < best.ber) best = {s, r.ber, r.energy};
    };

    const int nb = 60;
    const int na = 60;
    const double b_lo = 0.05 * root;
    const double b_hi = root * (1.0 - 1e-12);
    const double a_hi = 6.0;
    for (int i = 0; i <= nb; ++i) {
        const double b = b_lo + (b_hi - b_lo) * i / nb;
        for (int j = 1; j <= na; ++j) eval(b, a_hi * j / na);
    }

    // Coordinate refinement around the grid winner.
    const double db = (b_hi - b_lo) / nb;
    const double da = a_hi / na;
    for (int round = 0; round < 3; ++round) {
        const double b0 = best.scheme.b;
        const double a0 = best.scheme.a;
        golden_min(
            [&](double b) {
                const OneBitScheme s = make(b, a0);
                const OneBitResult r = one_bit_ber(s);
                if (r.ber < best.ber) best = {s, r.ber, r.energy};
                return r.ber;
            },
            std::max(b_lo, b0 - db), std::min(b_hi, b0 + db), 1e-6);
        const double b1 = best.scheme.b;
        golden_min(
            [&](double a) {
                const OneBitScheme s = make(b1, a);
                const OneBitResult r = one_bit_ber(s);
                if (r.ber < best.ber) best = {s, r.ber, r.energy};
                return r.ber;
            },
            std::max(0.0, a0 - da), std::min(a_hi, a0 + da), 1e-6);
    }
    return best;
}

double shannon_energy_marker() { return 2.0 * 0.69314718055994530942; }

}  // namespace fbdp
