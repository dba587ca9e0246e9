#include "fbdp/simulate.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fbdp/rng.hpp"

namespace fbdp {

namespace {

constexpr double z95 = 1.959963984540054;

// Compensated accumulator; chunked merging keeps Monte Carlo aggregates
// bit-identical for any thread count.
struct Kahan {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    void merge(const Kahan& o) {
        add(o.s);
        add(-o.c);
    }
};

MessageBit draw_message(std::uint64_t seed, std::uint64_t trial) {
    return message_draw(seed, trial) ? MessageBit::one : MessageBit::zero;
}

bool is_error(MessageBit m, double final_llr) {
    // Ties decode to message 0.
    return m == MessageBit::one ? final_llr <= 0.0 : final_llr > 0.0;
}

}  // namespace

Trajectory run_trial(const EncoderSpec& spec, MessageBit m, std::span<const double> noise) {
    const int N = spec.stages();
    if (static_cast<int>(noise.size()) != N)
        throw std::invalid_argument("run_trial: need one noise value per stage");

    Trajectory t;
    t.message = m;
    t.llr.reserve(static_cast<std::size_t>(N) + 1);
    t.v.reserve(static_cast<std::size_t>(N));
    t.u.reserve(static_cast<std::size_t>(N));
    t.y.reserve(static_cast<std::size_t>(N));

    double l = 0.0;
    t.llr.push_back(l);
    for (int k = 1; k <= N; ++k) {
        double v = spec.amplitude(k, l);
        if (v < spec.v_eps) v = 0.0;
        const Amplitudes a = encoder_amplitudes(l, v);
        const double um = m == MessageBit::one ? a.u1 : a.u0;
        const double y = um + noise[static_cast<std::size_t>(k) - 1];
        t.energy_spent += um * um;
        l = llr_update(l, a.u1, a.u0, y);
        t.v.push_back(v);
        t.u.push_back(um);
        t.y.push_back(y);
        t.llr.push_back(l);
    }
    t.decoded = l > 0.0 ? MessageBit::one : MessageBit::zero;
    return t;
}

MimoEncoder mimo_embed(const EncoderSpec& spec, int M) {
    if (M < 1) throw std::invalid_argument("mimo_embed: channel count must be >= 1");
    return MimoEncoder{spec, M};
}

MimoTrajectory run_trial(const MimoEncoder& enc, MessageBit m, std::span<const double> noise) {
    const int N = enc.base.stages();
    const int M = enc.channels;
    if (static_cast<int>(noise.size()) != N * M)
        throw std::invalid_argument("run_trial: need stages*channels noise values");

    MimoTrajectory t;
    t.message = m;
    t.llr.reserve(static_cast<std::size_t>(N) + 1);

    std::vector<double> u1(static_cast<std::size_t>(M), 0.0);
    std::vector<double> u0(static_cast<std::size_t>(M), 0.0);
    std::vector<double> y(static_cast<std::size_t>(M), 0.0);

    double l = 0.0;
    t.llr.push_back(l);
    for (int k = 1; k <= N; ++k) {
        double v = enc.base.amplitude(k, l);
        if (v < enc.base.v_eps) v = 0.0;
        const Amplitudes a = encoder_amplitudes(l, v);
        u1[0] = a.u1;
        u0[0] = a.u0;
        const double um = m == MessageBit::one ? a.u1 : a.u0;

        std::vector<double> ut(static_cast<std::size_t>(M), 0.0);
        ut[0] = um;
        for (int c = 0; c < M; ++c) {
            const auto cz = static_cast<std::size_t>(c);
            y[cz] = ut[cz] + noise[static_cast<std::size_t>((k - 1) * M + c)];
        }
        t.energy_spent += um * um;
        l = llr_update(l, u1, u0, y);
        t.u.push_back(ut);
        t.y.push_back(y);
        t.llr.push_back(l);
    }
    t.decoded = l > 0.0 ? MessageBit::one : MessageBit::zero;
    return t;
}

namespace {

struct Tally {
    std::uint64_t errors = 0;
    Kahan sum;    // per-trial statistic
    Kahan sumsq;  // its square
    Kahan sum2;   // optional second statistic
    Kahan sum2sq;
};

// Runs fn over a fixed set of trial chunks and merges the tallies in chunk
// order, so results do not depend on the thread count.
template <typename Fn>
Tally chunked_trials(std::uint64_t trials, Fn&& fn) {
    const std::uint64_t chunks = trials < 256 ? trials : 256;
    std::vector<Tally> parts(static_cast<std::size_t>(chunks));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long ci = 0; ci < static_cast<long long>(chunks); ++ci) {
        const auto cu = static_cast<std::uint64_t>(ci);
        const std::uint64_t lo = trials / chunks * cu + std::min(cu, trials % chunks);
        const std::uint64_t hi = lo + trials / chunks + (cu < trials % chunks ? 1 : 0);
        Tally t;
        for (std::uint64_t trial = lo; trial < hi; ++trial) fn(trial, t);
        parts[static_cast<std::size_t>(ci)] = t;
    }

    Tally total;
    for (const Tally& p : parts) {
        total.errors += p.errors;
        total.sum.merge(p.sum);
        total.sumsq.merge(p.sumsq);
        total.sum2.merge(p.sum2);
        total.sum2sq.merge(p.sum2sq);
    }
    return total;
}

double sample_std_error(double sum, double sumsq, std::uint64_t n) {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    double var = (sumsq - nn * mean * mean) / (nn - 1.0);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / nn);
}

McReport report_from(const Tally& t, std::uint64_t trials, std::uint64_t seed) {
    McReport r;
    r.trials = trials;
    r.errors = t.errors;
    r.seed = seed;
    const double n = static_cast<double>(trials);
    r.ber_hat = static_cast<double>(t.errors) / n;
    r.ber_std_error = std::sqrt(r.ber_hat * (1.0 - r.ber_hat) / n);
    r.ber_ci95_lo = r.ber_hat - z95 * r.ber_std_error;
    r.ber_ci95_hi = r.ber_hat + z95 * r.ber_std_error;
    r.mean_energy = t.sum.s / n;
    r.energy_std_error = sample_std_error(t.sum.s, t.sumsq.s, trials);
    r.energy_ci95_lo = r.mean_energy - z95 * r.energy_std_error;
    r.energy_ci95_hi = r.mean_energy + z95 * r.energy_std_error;
    return r;
}

}  // namespace

McReport monte_carlo(const EncoderSpec& spec, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    const int N = spec.stages();

    const Tally total = chunked_trials(trials, [&](std::uint64_t trial, Tally& t) {
        const MessageBit m = draw_message(seed, trial);
        double l = 0.0;
        double energy = 0.0;
        for (int k = 1; k <= N; ++k) {
            double v = spec.amplitude(k, l);
            if (v < spec.v_eps) v = 0.0;
            const Amplitudes a = encoder_amplitudes(l, v);
            const double um = m == MessageBit::one ? a.u1 : a.u0;
            const double y = um + gaussian_noise(seed, trial, static_cast<std::uint32_t>(k), 1);
            energy += um * um;
            l = llr_update(l, a.u1, a.u0, y);
        }
        t.errors += is_error(m, l) ? 1 : 0;
        t.sum.add(energy);
        t.sumsq.add(energy * energy);
    });
    return report_from(total, trials, seed);
}

McReport monte_carlo(const MimoEncoder& enc, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    const int N = enc.base.stages();
    const int M = enc.channels;

    const Tally total = chunked_trials(trials, [&](std::uint64_t trial, Tally& t) {
        const MessageBit m = draw_message(seed, trial);
        double l = 0.0;
        double energy = 0.0;
        for (int k = 1; k <= N; ++k) {
            double v = enc.base.amplitude(k, l);
            if (v < enc.base.v_eps) v = 0.0;
            const Amplitudes a = encoder_amplitudes(l, v);
            const double um = m == MessageBit::one ? a.u1 : a.u0;
            energy += um * um;
            // Coordinate 1 carries the signal; the rest carry u = 0 and
            // contribute an exact zero to the LLR update.
            const double y1 = um + gaussian_noise(seed, trial, static_cast<std::uint32_t>(k), 1);
            double lnext = llr_update(l, a.u1, a.u0, y1);
            for (int c = 2; c <= M; ++c) {
                const double yc = gaussian_noise(seed, trial, static_cast<std::uint32_t>(k),
                                                 static_cast<std::uint32_t>(c));
                lnext = llr_update(lnext, 0.0, 0.0, yc);
            }
            l = lnext;
        }
        t.errors += is_error(m, l) ? 1 : 0;
        t.sum.add(energy);
        t.sumsq.add(energy * energy);
    });
    return report_from(total, trials, seed);
}

EnergyIdentityReport energy_identity_check(const EncoderSpec& spec, std::uint64_t trials,
                                           std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("energy_identity_check: trials must be >= 1");
    const int N = spec.stages();

    const Tally total = chunked_trials(trials, [&](std::uint64_t trial, Tally& t) {
        const MessageBit m = draw_message(seed, trial);
        double l = 0.0;
        double transmitted = 0.0;
        double weighted = 0.0;
        for (int k = 1; k <= N; ++k) {
            double v = spec.amplitude(k, l);
            if (v < spec.v_eps) v = 0.0;
            const Amplitudes a = encoder_amplitudes(l, v);
            const double um = m == MessageBit::one ? a.u1 : a.u0;
            transmitted += um * um;
            weighted += posterior_product(l) * v * v;
            const double y = um + gaussian_noise(seed, trial, static_cast<std::uint32_t>(k), 1);
            l = llr_update(l, a.u1, a.u0, y);
        }
        t.sum.add(transmitted);
        t.sumsq.add(transmitted * transmitted);
        t.sum2.add(weighted);
        t.sum2sq.add(weighted * weighted);
    });

    EnergyIdentityReport r;
    const double n = static_cast<double>(trials);
    r.transmitted = total.sum.s / n;
    r.transmitted_std_error = sample_std_error(total.sum.s, total.sumsq.s, trials);
    r.posterior_weighted = total.sum2.s / n;
    r.posterior_weighted_std_error = sample_std_error(total.sum2.s, total.sum2sq.s, trials);
    return r;
}

}  // namespace fbdp
