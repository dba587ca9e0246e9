#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <span>
#include <vector>

#include "fbdp/baselines.hpp"
#include "fbdp/belief.hpp"
#include "fbdp/grid.hpp"
#include "fbdp/policy_io.hpp"
#include "fbdp/quadrature.hpp"
#include "fbdp/rng.hpp"
#include "fbdp/simulate.hpp"
#include "fbdp/solver.hpp"

namespace py = pybind11;
using namespace fbdp;

namespace {

MessageBit to_bit(int m) { return m ? MessageBit::one : MessageBit::zero; }

}  // namespace

PYBIND11_MODULE(fbdp, m) {
    m.doc() =
        "Energy-optimal transmission of one bit over a fixed number of AWGN "
        "channel uses with noiseless feedback: dynamic programming on the "
        "log-likelihood-ratio state, exact density propagation, Monte Carlo "
        "simulation, and reference schemes.";

    // belief-state scalar math
    m.def("qfunc", &qfunc, py::arg("a"), "Gaussian upper-tail probability Q(a).");
    m.def(
        "posterior",
        [](double l) {
            const Posterior p = posterior(l);
            return py::make_tuple(p.p0, p.p1);
        },
        py::arg("l"), "Message posterior (p0, p1) at LLR l.");
    m.def("posterior_product", &posterior_product, py::arg("l"), "p0(l) * p1(l).");
    m.def("terminal_cost", &terminal_cost, py::arg("l"),
          "Error probability of the ML decision at LLR l.");
    m.def("stage_cost", &stage_cost, py::arg("l"), py::arg("v"), py::arg("lam"),
          "Energy penalty lambda * p0 p1 v^2.");
    m.def(
        "llr_update",
        [](double l, double u1, double u0, double y) { return llr_update(l, u1, u0, y); },
        py::arg("l"), py::arg("u1"), py::arg("u0"), py::arg("y"),
        "Decoder LLR recursion for one scalar channel output.");
    m.def(
        "transition",
        [](double l, double v, int message, double z) {
            return transition(l, v, to_bit(message), z);
        },
        py::arg("l"), py::arg("v"), py::arg("message"), py::arg("z"),
        "Encoder-side state transition for gap v and noise z.");
    m.def(
        "encoder_amplitudes",
        [](double l, double v) {
            const Amplitudes a = encoder_amplitudes(l, v);
            return py::make_tuple(a.u1, a.u0);
        },
        py::arg("l"), py::arg("v"),
        "Transmitted values (u1, u0) = (p0 v, -p1 v) for the two messages.");
    m.def("gaussian_noise", &gaussian_noise, py::arg("seed"), py::arg("trial"), py::arg("stage"),
          py::arg("coord"), "Counter-addressed standard normal variate, coord >= 1.");

    m.def(
        "gauss_hermite",
        [](int order) {
            const Quadrature q = gauss_hermite(order);
            return py::make_tuple(q.nodes, q.weights);
        },
        py::arg("order"),
        "Nodes and weights with sum_i w_i f(n_i) approximating E[f(Z)], Z standard normal.");

    // grid
    py::class_<Grid>(m, "Grid")
        .def_readonly("l_max", &Grid::l_max)
        .def_readonly("points", &Grid::points)
        .def_readonly("step", &Grid::step)
        .def("node", &Grid::node, py::arg("i"))
        .def("center", &Grid::center)
        .def("nodes", &Grid::nodes);
    m.def("make_grid", &make_grid, py::arg("l_max"), py::arg("points"));
    m.def(
        "interp_eval",
        [](const std::vector<double>& table, const Grid& grid, double x) {
            return interp_eval(table, grid, x);
        },
        py::arg("table"), py::arg("grid"), py::arg("x"),
        "Piecewise-linear evaluation with saturating extrapolation.");

    // solver
    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("stages", &SolverConfig::stages)
        .def_readwrite("budget", &SolverConfig::budget)
        .def_readwrite("l_max", &SolverConfig::l_max)
        .def_readwrite("grid_points", &SolverConfig::grid_points)
        .def_readwrite("quad_order", &SolverConfig::quad_order)
        .def_readwrite("coarse_steps", &SolverConfig::coarse_steps)
        .def_readwrite("refine_tol", &SolverConfig::refine_tol)
        .def_readwrite("v_max", &SolverConfig::v_max)
        .def_readwrite("v_eps", &SolverConfig::v_eps)
        .def_readwrite("lambda_lo", &SolverConfig::lambda_lo)
        .def_readwrite("lambda_hi", &SolverConfig::lambda_hi)
        .def_readwrite("energy_rel_tol", &SolverConfig::energy_rel_tol)
        .def_readwrite("max_calibration_iters", &SolverConfig::max_calibration_iters)
        .def_readwrite("density_floor", &SolverConfig::density_floor)
        .def("amplitude_cap", &SolverConfig::amplitude_cap);

    py::class_<PolicyTable>(m, "PolicyTable")
        .def(py::init<>())
        .def_readwrite("grid", &PolicyTable::grid)
        .def_readwrite("stages", &PolicyTable::stages)
        .def_readwrite("lam", &PolicyTable::lambda)
        .def_readwrite("budget", &PolicyTable::budget)
        .def_readwrite("v", &PolicyTable::v,
                       "Per-stage amplitude tables; v[k-1][i] is the gap at stage k, node i.");

    py::class_<DpSolution>(m, "DpSolution")
        .def_readonly("policy", &DpSolution::policy)
        .def_readonly("values", &DpSolution::values);

    py::class_<ForwardResult>(m, "ForwardResult")
        .def_readonly("error_probability", &ForwardResult::error_probability)
        .def_readonly("expected_energy", &ForwardResult::expected_energy)
        .def_readonly("density_m1", &ForwardResult::density_m1)
        .def_readonly("density_m0", &ForwardResult::density_m0)
        .def_readonly("max_mass_drift", &ForwardResult::max_mass_drift);

    py::class_<CalibratedSolution>(m, "CalibratedSolution")
        .def_readonly("solution", &CalibratedSolution::solution)
        .def_readonly("forward", &CalibratedSolution::forward)
        .def_readonly("lam", &CalibratedSolution::lambda)
        .def_readonly("achieved_energy", &CalibratedSolution::achieved_energy)
        .def_readonly("error_probability", &CalibratedSolution::error_probability)
        .def_readonly("probes", &CalibratedSolution::probes);

    m.def("solve_dp", &solve_dp, py::arg("lam"), py::arg("config"),
          "Backward dynamic program at a fixed multiplier.");
    m.def("forward_propagate", &forward_propagate, py::arg("policy"), py::arg("v_eps") = 1e-9,
          py::arg("density_floor") = 1e-18,
          "Exact propagation of the two conditional belief densities.");
    m.def("calibrate_lambda", &calibrate_lambda, py::arg("config"),
          "Finds the multiplier whose policy spends the configured budget.");

    // simulation
    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("message",
                               [](const Trajectory& t) { return static_cast<int>(t.message); })
        .def_property_readonly("decoded",
                               [](const Trajectory& t) { return static_cast<int>(t.decoded); })
        .def_readonly("energy_spent", &Trajectory::energy_spent)
        .def_readonly("llr", &Trajectory::llr)
        .def_readonly("v", &Trajectory::v)
        .def_readonly("u", &Trajectory::u)
        .def_readonly("y", &Trajectory::y);

    py::class_<McReport>(m, "McReport")
        .def_readonly("trials", &McReport::trials)
        .def_readonly("errors", &McReport::errors)
        .def_readonly("seed", &McReport::seed)
        .def_readonly("ber_hat", &McReport::ber_hat)
        .def_readonly("ber_std_error", &McReport::ber_std_error)
        .def_readonly("ber_ci95_lo", &McReport::ber_ci95_lo)
        .def_readonly("ber_ci95_hi", &McReport::ber_ci95_hi)
        .def_readonly("mean_energy", &McReport::mean_energy)
        .def_readonly("energy_std_error", &McReport::energy_std_error)
        .def_readonly("energy_ci95_lo", &McReport::energy_ci95_lo)
        .def_readonly("energy_ci95_hi", &McReport::energy_ci95_hi);

    py::class_<EnergyIdentityReport>(m, "EnergyIdentityReport")
        .def_readonly("transmitted", &EnergyIdentityReport::transmitted)
        .def_readonly("transmitted_std_error", &EnergyIdentityReport::transmitted_std_error)
        .def_readonly("posterior_weighted", &EnergyIdentityReport::posterior_weighted)
        .def_readonly("posterior_weighted_std_error",
                      &EnergyIdentityReport::posterior_weighted_std_error);

    m.def(
        "run_trial",
        [](const PolicyTable& policy, int message, const std::vector<double>& noise,
           double v_eps) {
            const EncoderSpec spec{&policy, v_eps};
            return run_trial(spec, to_bit(message), std::span<const double>(noise));
        },
        py::arg("policy"), py::arg("message"), py::arg("noise"), py::arg("v_eps") = 1e-9,
        "One trial with explicit per-stage noise; records the full history.");
    m.def(
        "monte_carlo",
        [](const PolicyTable& policy, std::uint64_t trials, std::uint64_t seed, int channels,
           double v_eps) {
            const EncoderSpec spec{&policy, v_eps};
            if (channels == 1) return monte_carlo(spec, trials, seed);
            return monte_carlo(mimo_embed(spec, channels), trials, seed);
        },
        py::arg("policy"), py::arg("trials"), py::arg("seed") = 12345, py::arg("channels") = 1,
        py::arg("v_eps") = 1e-9,
        "Seeded Monte Carlo; channels > 1 runs the vector-channel embedding "
        "with coordinates 2..M silent.");
    m.def(
        "energy_identity_check",
        [](const PolicyTable& policy, std::uint64_t trials, std::uint64_t seed, double v_eps) {
            const EncoderSpec spec{&policy, v_eps};
            return energy_identity_check(spec, trials, seed);
        },
        py::arg("policy"), py::arg("trials"), py::arg("seed") = 12345, py::arg("v_eps") = 1e-9,
        "Transmitted energy estimated as sum u^2 and as sum p0 p1 v^2 from the same trials.");

    // persistence
    py::class_<PolicyFile>(m, "PolicyFile")
        .def(py::init<>())
        .def_readwrite("table", &PolicyFile::table)
        .def_readwrite("config", &PolicyFile::config)
        .def_readwrite("ber", &PolicyFile::ber)
        .def_readwrite("energy", &PolicyFile::energy);
    m.def("make_policy_file", &make_policy_file, py::arg("config"), py::arg("solution"));
    m.def(
        "save_policy",
        [](const std::string& path, const PolicyFile& file) { save_policy(path, file); },
        py::arg("path"), py::arg("file"));
    m.def(
        "load_policy", [](const std::string& path) { return load_policy(path); },
        py::arg("path"));

    // reference schemes
    m.def("no_feedback_ber", &no_feedback_ber, py::arg("S"),
          "Best no-feedback error rate Q(sqrt(S)).");
    py::class_<SkScheme>(m, "SkScheme")
        .def(py::init<>())
        .def_readwrite("stages", &SkScheme::stages)
        .def_readwrite("budget", &SkScheme::budget)
        .def_readwrite("rho", &SkScheme::rho);
    m.def(
        "sk_ber",
        [](int stages, double budget, double rho) {
            return sk_ber(SkScheme{stages, budget, rho});
        },
        py::arg("stages"), py::arg("budget"), py::arg("rho") = 1.0,
        "Linear feedback scheme error rate at the given energy split.");
    py::class_<SkBest>(m, "SkBest")
        .def_readonly("scheme", &SkBest::scheme)
        .def_readonly("ber", &SkBest::ber);
    m.def("sk_optimize", &sk_optimize, py::arg("stages"), py::arg("budget"));
    py::class_<OneBitScheme>(m, "OneBitScheme")
        .def(py::init<>())
        .def_readwrite("b", &OneBitScheme::b)
        .def_readwrite("a", &OneBitScheme::a)
        .def_readwrite("c", &OneBitScheme::c);
    py::class_<OneBitResult>(m, "OneBitResult")
        .def_readonly("ber", &OneBitResult::ber)
        .def_readonly("energy", &OneBitResult::energy);
    m.def(
        "one_bit_ber",
        [](double b, double a, double c) { return one_bit_ber(OneBitScheme{b, a, c}); },
        py::arg("b"), py::arg("a"), py::arg("c"),
        "Exact error rate and energy of the two-stage one-bit-feedback scheme.");
    py::class_<OneBitBest>(m, "OneBitBest")
        .def_readonly("scheme", &OneBitBest::scheme)
        .def_readonly("ber", &OneBitBest::ber)
        .def_readonly("energy", &OneBitBest::energy);
    m.def("one_bit_optimize", &one_bit_optimize, py::arg("S"));
    m.def("shannon_energy_marker", &shannon_energy_marker,
          "Minimal reliable-signaling energy with unlimited uses, 2 ln 2.");
}
