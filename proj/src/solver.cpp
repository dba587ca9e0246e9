#include "fbdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbdp/belief.hpp"
#include "fbdp/errors.hpp"

namespace fbdp {

namespace {

constexpr double mass_drift_guard = 1e-6;

// Standardized half-width of every Gaussian window; the ~6e-16 of mass per
// side beyond it is folded onto the outermost visited node.
constexpr double conv_window = 8.0;

double gauss_cdf(double x) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

double gauss_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// A(t) = t*Phi(t) + phi(t), the antiderivative of the standard normal CDF.
// The expectation of a piecewise-linear table against a Gaussian telescopes
// into differences of A at the cell edges, so this is the only
// transcendental the backup needs.  Quadrature rules are useless here: the
// value tables keep a kink at l = 0 inherited from the terminal cost, and
// sampling rules leave an oscillatory error that refuses to converge with
// order, which is fatal both for the argmin and for the smoothness of the
// achieved-energy curve the calibration loop roots on.
double integral_cdf_exact(double t) {
    if (t < -38.0) return 0.0;
    return t * gauss_cdf(t) + gauss_pdf(t);
}

// Cubic Hermite table of A with exact slopes Phi; error ~1e-14 inside the
// covered range and exact asymptotes outside it.  Used on the hot per-node
// refinement path where erfc would dominate the runtime.
class NormalAux {
  public:
    NormalAux() : a_(count_), p_(count_) {
        for (std::size_t i = 0; i < count_; ++i) {
            const double t = t_min_ + step_ * static_cast<double>(i);
            p_[i] = gauss_cdf(t);
            a_[i] = t * p_[i] + gauss_pdf(t);
        }
    }

    double integral_cdf(double t) const {
        if (t <= t_min_) return 0.0;
        if (t >= t_max_) return t;
        const double u = (t - t_min_) * inv_step_;
        auto k = static_cast<std::size_t>(u);
        if (k > count_ - 2) k = count_ - 2;
        const double f = u - static_cast<double>(k);
        const double f2 = f * f;
        const double f3 = f2 * f;
        const double h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
        const double h10 = f3 - 2.0 * f2 + f;
        const double h01 = 3.0 * f2 - 2.0 * f3;
        const double h11 = f3 - f2;
        return h00 * a_[k] + h01 * a_[k + 1] + step_ * (h10 * p_[k] + h11 * p_[k + 1]);
    }

  private:
    static constexpr double t_min_ = -8.5;
    static constexpr double t_max_ = 8.5;
    static constexpr double step_ = 1e-4;
    static constexpr double inv_step_ = 1.0 / step_;
    static constexpr std::size_t count_ = 170001;
    std::vector<double> a_;
    std::vector<double> p_;
};

const NormalAux& normal_aux() {
    static const NormalAux aux;
    return aux;
}

// Exact expectation of the piecewise-linear table under N(mu, sigma^2) with
// saturating extrapolation beyond the grid.  Each grid interval contributes
// its average CDF D = (A(t1) - A(t0)) / (t1 - t0); telescoping the linear
// pieces leaves tent weights D_e - D_{e-1} on the nodes, with both tails
// landing on the outermost visited node.  As sigma -> 0 the weights reduce
// to plain linear interpolation at mu.
double smoothed_expectation(std::span<const double> tab, const Grid& grid, double mu, double sigma,
                            const NormalAux& aux) {
    const int n = grid.points;
    const double h = grid.step;
    const double span = conv_window * sigma;
    const int e0 = std::clamp(static_cast<int>(std::floor((mu - span + grid.l_max) / h)), 0, n - 1);
    const int e1 = std::clamp(static_cast<int>(std::ceil((mu + span + grid.l_max) / h)), 0, n - 1);

    const double slope = sigma / h;
    double acc = 0.0;
    double d_prev = 0.0;
    double a_prev = aux.integral_cdf((grid.node(e0) - mu) / sigma);
    for (int e = e0 + 1; e <= e1; ++e) {
        const double a_cur = aux.integral_cdf((grid.node(e) - mu) / sigma);
        const double d = (a_cur - a_prev) * slope;
        acc += tab[static_cast<std::size_t>(e - 1)] * (d - d_prev);
        d_prev = d;
        a_prev = a_cur;
    }
    acc += tab[static_cast<std::size_t>(e1)] * (1.0 - d_prev);
    return acc;
}

void validate(const SolverConfig& cfg) {
    if (cfg.stages < 1) throw std::invalid_argument("solver: stages must be >= 1");
    if (!(cfg.budget > 0.0)) throw std::invalid_argument("solver: budget must be positive");
    if (cfg.coarse_steps < 2) throw std::invalid_argument("solver: coarse_steps must be >= 2");
    if (!(cfg.refine_tol > 0.0)) throw std::invalid_argument("solver: refine_tol must be positive");
    if (!(cfg.v_eps >= 0.0)) throw std::invalid_argument("solver: v_eps must be non-negative");
}

// Golden-section descent inside [a, b]; ties shrink toward smaller
// amplitudes, and best only improves on strict decrease.
template <class F>
void golden_refine(F&& q, double a, double b, double tol, Minimum& best) {
    constexpr double gr = 0.61803398874989484820;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = q(c);
    double fd = q(d);
    if (fc < best.value) best = {c, fc};
    if (fd < best.value) best = {d, fd};
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = q(c);
            if (fc < best.value) best = {c, fc};
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = q(d);
            if (fd < best.value) best = {d, fd};
        }
    }
}

// Near-tie preferences, in order: silence, then the saturated amplitude,
// then the smallest interior winner.  Silence must lose by a meaningful
// margin before we transmit; this yields exact-zero policy tails and stops
// the |l| cusp of the terminal cost from turning huge multipliers into
// vanishing-but-nonzero amplitudes (the cusp makes an O(v) gain available
// at l = 0, so for any finite lambda a microscopic transmission "helps" by
// ~1e-8).  The cap in turn beats interior candidates that only win by
// rounding dust on the saturated plateau, so a free-energy scan lands
// exactly on the cap.
Minimum apply_amplitude_preferences(double silent, double at_cap, double cap, Minimum best) {
    if (silent <= best.value + 1e-12 + 1e-7 * silent) return {0.0, silent};
    if (at_cap <= best.value + 1e-9 * (1.0 + std::abs(at_cap))) return {cap, at_cap};
    return best;
}

}  // namespace

double SolverConfig::amplitude_cap() const {
    return v_max > 0.0 ? v_max : 6.0 * (1.0 + std::sqrt(budget));
}

double q_value(double l, double v, double lambda, std::span<const double> next, const Grid& grid,
               const Quadrature& /*quad: retained in the call shape, expectation is closed form*/,
               double v_eps) {
    if (v < v_eps) return interp_eval(next, grid, l);

    const Posterior p = posterior(l);
    const double drift = 0.5 * v * v;
    const NormalAux& aux = normal_aux();
    const double s1 = smoothed_expectation(next, grid, l + drift, v, aux);
    const double s0 = smoothed_expectation(next, grid, l - drift, v, aux);
    return stage_cost(l, v, lambda) + p.p1 * s1 + p.p0 * s0;
}

Minimum inner_minimize(double l, double lambda, std::span<const double> next, const Grid& grid,
                       const Quadrature& quad, const SolverConfig& cfg) {
    const double cap = cfg.amplitude_cap();
    const auto q = [&](double v) { return q_value(l, v, lambda, next, grid, quad, cfg.v_eps); };

    const double silent = q(0.0);
    const double at_cap = q(cap);
    Minimum best{cap, at_cap};

    const double step = cap / static_cast<double>(cfg.coarse_steps);
    for (int i = 1; i < cfg.coarse_steps; ++i) {
        const double v = step * static_cast<double>(i);
        const double val = q(v);
        if (val < best.value) best = {v, val};
    }

    golden_refine(q, std::max(0.0, best.v - step), std::min(cap, best.v + step), cfg.refine_tol,
                  best);
    return apply_amplitude_preferences(silent, at_cap, cap, best);
}

namespace {

// Tent weights of one branch of one candidate amplitude, expressed on node
// offsets so every source node shares them: destination edges sit at
// source + r*h with a constant sub-cell shift of the branch mean.  Built
// with the exact A; the construction telescopes the same way as
// smoothed_expectation.
struct TapSet {
    int r_lo = 0;
    std::vector<double> taps;
};

void build_taps(TapSet& out, double delta, double sigma, double h) {
    const double span = conv_window * sigma;
    const int r_lo = static_cast<int>(std::floor((delta - span) / h));
    const int r_hi = static_cast<int>(std::ceil((delta + span) / h));
    out.r_lo = r_lo;
    out.taps.clear();
    out.taps.reserve(static_cast<std::size_t>(r_hi - r_lo) + 1);
    const double slope = sigma / h;
    double d_prev = 0.0;
    double a_prev = integral_cdf_exact((static_cast<double>(r_lo) * h - delta) / sigma);
    for (int r = r_lo + 1; r <= r_hi; ++r) {
        const double a_cur = integral_cdf_exact((static_cast<double>(r) * h - delta) / sigma);
        const double d = (a_cur - a_prev) * slope;
        out.taps.push_back(d - d_prev);
        d_prev = d;
        a_prev = a_cur;
    }
    out.taps.push_back(1.0 - d_prev);
}

double apply_taps(const TapSet& k, const double* center) {
    const double* x = center + k.r_lo;
    const double* w = k.taps.data();
    const std::size_t len = k.taps.size();
    double acc = 0.0;
    for (std::size_t t = 0; t < len; ++t) acc += w[t] * x[t];
    return acc;
}

}  // namespace

void bellman_backup(std::span<const double> next, double lambda, const Grid& grid,
                    const Quadrature& quad, const SolverConfig& cfg, std::span<double> value_out,
                    std::span<double> v_out) {
    const int n = grid.points;
    const int c = grid.center();
    const double h = grid.step;
    const double cap = cfg.amplitude_cap();
    const double step = cap / static_cast<double>(cfg.coarse_steps);
    static_cast<void>(normal_aux());  // build the table before going parallel

    // The backup preserves even symmetry, so for a symmetric input table
    // only the right half is minimized and the left half mirrors it; this
    // pins J(-l) == J(l) bitwise instead of leaving roundoff asymmetry.
    bool symmetric = true;
    for (int i = 0; i < n / 2 && symmetric; ++i)
        symmetric = next[static_cast<std::size_t>(i)] == next[static_cast<std::size_t>(n - 1 - i)];
    const int i0 = symmetric ? c : 0;
    const auto m = static_cast<std::size_t>(n - i0);

    // Edge-padded copy of the table lets kernel windows run branch-free;
    // out-of-grid taps read the saturated edge values.
    const int pad = static_cast<int>(std::ceil((0.5 * cap * cap + conv_window * cap) / h)) + 2;
    std::vector<double> padded(static_cast<std::size_t>(n + 2 * pad));
    std::fill_n(padded.begin(), pad, next[0]);
    std::copy(next.begin(), next.end(), padded.begin() + pad);
    std::fill_n(padded.begin() + pad + n, pad, next[static_cast<std::size_t>(n - 1)]);

    std::vector<double> pp(m), pr0(m), pr1(m), best_val(m), best_v(m), cap_val(m);
    for (int i = i0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i - i0);
        const double l = grid.node(i);
        const Posterior p = posterior(l);
        pp[j] = posterior_product(l);
        pr0[j] = p.p0;
        pr1[j] = p.p1;
    }

    TapSet plus, minus;

    // Coarse scan, shared kernels per candidate.  The saturated amplitude
    // goes first: it seeds the running minimum and is kept around for the
    // cap preference.  Later candidates are skipped at nodes where the
    // stage cost alone already loses, which prunes most of the large-v
    // window work once the multiplier is in its calibrated range.
    build_taps(plus, +0.5 * cap * cap, cap, h);
    build_taps(minus, -0.5 * cap * cap, cap, h);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = i0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i - i0);
        const double* row = padded.data() + pad + i;
        cap_val[j] = lambda * pp[j] * (cap * cap) + pr1[j] * apply_taps(plus, row) +
                     pr0[j] * apply_taps(minus, row);
        best_val[j] = cap_val[j];
        best_v[j] = cap;
    }

    for (int s = 1; s < cfg.coarse_steps; ++s) {
        const double v = step * static_cast<double>(s);
        const double vv = v * v;
        build_taps(plus, +0.5 * vv, v, h);
        build_taps(minus, -0.5 * vv, v, h);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = i0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(i - i0);
            if (lambda * pp[j] * vv >= best_val[j]) continue;
            const double* row = padded.data() + pad + i;
            const double q = lambda * pp[j] * vv + pr1[j] * apply_taps(plus, row) +
                             pr0[j] * apply_taps(minus, row);
            if (q < best_val[j]) {
                best_val[j] = q;
                best_v[j] = v;
            }
        }
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int i = i0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i - i0);
        const double l = grid.node(i);
        Minimum best{best_v[j], best_val[j]};
        const auto q = [&](double v) { return q_value(l, v, lambda, next, grid, quad, cfg.v_eps); };
        golden_refine(q, std::max(0.0, best.v - step), std::min(cap, best.v + step),
                      cfg.refine_tol, best);
        const Minimum chosen =
            apply_amplitude_preferences(next[static_cast<std::size_t>(i)], cap_val[j], cap, best);
        value_out[static_cast<std::size_t>(i)] = chosen.value;
        v_out[static_cast<std::size_t>(i)] = chosen.v;
        if (symmetric) {
            value_out[static_cast<std::size_t>(n - 1 - i)] = chosen.value;
            v_out[static_cast<std::size_t>(n - 1 - i)] = chosen.v;
        }
    }
}

DpSolution solve_dp(double lambda, const SolverConfig& cfg) {
    validate(cfg);
    const Grid grid = make_grid(cfg.l_max, cfg.grid_points);
    const Quadrature quad = gauss_hermite(cfg.quad_order);
    const auto n = static_cast<std::size_t>(grid.points);
    const int N = cfg.stages;

    DpSolution sol;
    sol.policy.grid = grid;
    sol.policy.stages = N;
    sol.policy.lambda = lambda;
    sol.policy.budget = cfg.budget;
    sol.policy.v.assign(static_cast<std::size_t>(N), std::vector<double>(n, 0.0));
    sol.values.assign(static_cast<std::size_t>(N) + 1, std::vector<double>(n, 0.0));

    auto& terminal = sol.values[static_cast<std::size_t>(N)];
    for (int i = 0; i < grid.points; ++i)
        terminal[static_cast<std::size_t>(i)] = terminal_cost(grid.node(i));

    for (int k = N; k >= 1; --k) {
        const auto ku = static_cast<std::size_t>(k);
        bellman_backup(sol.values[ku], lambda, grid, quad, cfg, sol.values[ku - 1],
                       sol.policy.v[ku - 1]);
    }
    return sol;
}

namespace {

// Spreads each node's mass through one channel use.  sign is +1 for the
// message whose drift is +v^2/2 and -1 for the other.  Cells are centered on
// nodes; the first and last visited cells absorb the remaining tails so each
// unit of source mass lands as exactly one unit of destination mass.
std::vector<double> spread_density(const std::vector<double>& in, std::span<const double> vtab,
                                   const Grid& grid, double sign, double v_eps,
                                   double density_floor) {
    const int n = grid.points;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    const double h = grid.step;

    for (int i = 0; i < n; ++i) {
        const double mass = in[static_cast<std::size_t>(i)];
        if (mass == 0.0) continue;
        const double v = vtab[static_cast<std::size_t>(i)];
        if (v < v_eps || mass <= density_floor) {
            out[static_cast<std::size_t>(i)] += mass;
            continue;
        }
        const double mu = grid.node(i) + sign * 0.5 * v * v;
        const double span = 9.0 * v;
        const int jlo =
            std::clamp(static_cast<int>(std::floor((mu - span + grid.l_max) / h)), 0, n - 1);
        const int jhi =
            std::clamp(static_cast<int>(std::ceil((mu + span + grid.l_max) / h)), 0, n - 1);

        double below = 0.0;  // CDF at the lower edge of the current cell
        for (int j = jlo; j <= jhi; ++j) {
            double above;
            if (j == jhi) {
                above = 1.0;
            } else {
                const double edge = grid.node(j) + 0.5 * h;
                above = gauss_cdf((edge - mu) / v);
            }
            out[static_cast<std::size_t>(j)] += mass * (above - below);
            below = above;
        }
    }
    return out;
}

double renormalize(std::vector<double>& f) {
    double s = 0.0;
    for (double x : f) s += x;
    const double drift = std::abs(s - 1.0);
    if (drift > mass_drift_guard)
        throw NumericalError("density propagation lost mass: total " + std::to_string(s));
    const double inv = 1.0 / s;
    for (double& x : f) x *= inv;
    return drift;
}

}  // namespace

ForwardResult forward_propagate(const PolicyTable& policy, double v_eps, double density_floor) {
    const Grid& grid = policy.grid;
    const int n = grid.points;
    const auto nu = static_cast<std::size_t>(n);

    ForwardResult r;
    r.density_m1.assign(nu, 0.0);
    r.density_m0.assign(nu, 0.0);
    r.density_m1[static_cast<std::size_t>(grid.center())] = 1.0;
    r.density_m0[static_cast<std::size_t>(grid.center())] = 1.0;

    for (int k = 1; k <= policy.stages; ++k) {
        const auto& vtab = policy.v[static_cast<std::size_t>(k) - 1];

        // Stage energy E[p0 p1 v^2] under the evenly mixed belief density;
        // equals the expected square of the transmitted amplitude.
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            const double v = vtab[iu];
            if (v == 0.0) continue;
            e += posterior_product(grid.node(i)) * v * v *
                 (0.5 * (r.density_m1[iu] + r.density_m0[iu]));
        }
        r.expected_energy += e;

        r.density_m1 = spread_density(r.density_m1, vtab, grid, +1.0, v_eps, density_floor);
        r.density_m0 = spread_density(r.density_m0, vtab, grid, -1.0, v_eps, density_floor);
        r.max_mass_drift = std::max(r.max_mass_drift, renormalize(r.density_m1));
        r.max_mass_drift = std::max(r.max_mass_drift, renormalize(r.density_m0));
    }

    // Decision is the posterior mode; the l = 0 node resolves to message 0,
    // so its mass counts as an error under message 1 only.
    const int c = grid.center();
    double p1_err = 0.0;
    double p0_err = 0.0;
    for (int i = 0; i <= c; ++i) p1_err += r.density_m1[static_cast<std::size_t>(i)];
    for (int i = c + 1; i < n; ++i) p0_err += r.density_m0[static_cast<std::size_t>(i)];
    r.error_probability = 0.5 * (p1_err + p0_err);
    return r;
}

namespace {

struct Probe {
    double lambda = 0.0;
    DpSolution solution;
    ForwardResult forward;
};

CalibratedSolution finish(Probe&& p, int probes) {
    CalibratedSolution out;
    out.lambda = p.lambda;
    out.achieved_energy = p.forward.expected_energy;
    out.error_probability = p.forward.error_probability;
    out.probes = probes;
    out.solution = std::move(p.solution);
    out.forward = std::move(p.forward);
    return out;
}

}  // namespace

CalibratedSolution calibrate_lambda(const SolverConfig& cfg) {
    validate(cfg);
    const double S = cfg.budget;
    int probes = 0;

    const auto eval = [&](double lambda) {
        Probe p;
        p.lambda = lambda;
        p.solution = solve_dp(lambda, cfg);
        p.forward = forward_propagate(p.solution.policy, cfg.v_eps, cfg.density_floor);
        ++probes;
        return p;
    };
    const auto close_enough = [&](const Probe& p) {
        return std::abs(p.forward.expected_energy - S) / S <= cfg.energy_rel_tol;
    };

    double lam_lo = cfg.lambda_lo;
    double lam_hi = cfg.lambda_hi;

    Probe lo = eval(lam_lo);
    if (close_enough(lo)) return finish(std::move(lo), probes);
    for (int t = 0; t < 8 && lo.forward.expected_energy < S; ++t) {
        lam_lo /= 16.0;
        lo = eval(lam_lo);
        if (close_enough(lo)) return finish(std::move(lo), probes);
    }
    if (lo.forward.expected_energy < S)
        throw CalibrationError("budget " + std::to_string(S) +
                               " unreachable: max attainable energy " +
                               std::to_string(lo.forward.expected_energy));

    Probe hi = eval(lam_hi);
    if (close_enough(hi)) return finish(std::move(hi), probes);
    for (int t = 0; t < 8 && hi.forward.expected_energy > S; ++t) {
        lam_hi *= 16.0;
        hi = eval(lam_hi);
        if (close_enough(hi)) return finish(std::move(hi), probes);
    }
    if (hi.forward.expected_energy > S)
        throw CalibrationError("no multiplier large enough to push energy below budget " +
                               std::to_string(S));

    // Illinois false position on x = log(lambda); g is non-increasing with
    // g(xa) >= 0 >= g(xb).
    double xa = std::log(lam_lo);
    double ga = lo.forward.expected_energy - S;
    double xb = std::log(lam_hi);
    double gb = hi.forward.expected_energy - S;

    for (int it = 0; it < cfg.max_calibration_iters; ++it) {
        double x = xb - gb * (xb - xa) / (gb - ga);
        if (!std::isfinite(x) || x <= std::min(xa, xb) || x >= std::max(xa, xb))
            x = 0.5 * (xa + xb);

        Probe p = eval(std::exp(x));
        const double g = p.forward.expected_energy - S;
        if (close_enough(p)) return finish(std::move(p), probes);

        if (g * gb < 0.0) {
            xa = xb;
            ga = gb;
        } else {
            ga *= 0.5;
        }
        xb = x;
        gb = g;
    }
    throw CalibrationError("multiplier search did not converge within " +
                           std::to_string(cfg.max_calibration_iters) + " iterations");
}

}  // namespace fbdp
