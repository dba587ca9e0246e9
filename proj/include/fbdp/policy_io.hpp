#pragma once

// Text persistence: the versioned policy file format, the sweep CSV, and the
// per-stage policy dumps.  All numbers are written with 17 significant
// digits so a write/read round trip reproduces every double bit for bit.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbdp/solver.hpp"

namespace fbdp {

/// On-disk form of a calibrated policy: the table itself plus the solver
/// settings that produced it and the predicted operating point.
struct PolicyFile {
    PolicyTable table;
    SolverConfig config;
    double ber = 0.0;
    double energy = 0.0;
};

/// Builds the persisted form of a calibration result.
PolicyFile make_policy_file(const SolverConfig& config, const CalibratedSolution& sol);

void save_policy(std::ostream& out, const PolicyFile& file);
void save_policy(const std::string& path, const PolicyFile& file);

/// Parses the "FBDP v1" format; throws ParseError with a 1-based line
/// number on any syntax or consistency violation (unknown key, stage out of
/// order, row count mismatch, node mismatch).
PolicyFile load_policy(std::istream& in);
PolicyFile load_policy(const std::string& path);

/// One result line of the sweep CSV.  Unrequested baseline cells stay
/// empty; a failed calibration leaves lambda/ber_dp/energy_achieved unset
/// and those cells carry the ERROR sentinel.
struct SweepRow {
    double S = 0.0;
    int N = 0;
    std::optional<double> lambda;
    std::optional<double> ber_dp;
    double ber_no_feedback = 0.0;
    std::optional<double> ber_one_bit;
    std::optional<double> ber_sk;
    std::optional<double> energy_achieved;
    double eb_n0_db = 0.0;
    bool failed = false;
};

inline constexpr const char* sweep_csv_header =
    "S,N,lambda,ber_dp,ber_no_feedback,ber_one_bit,ber_sk,energy_achieved,eb_n0_db";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Stage-k policy in state coordinates: CSV "l,v", one row per grid node.
void dump_stage(std::ostream& out, const PolicyTable& table, int k);

/// Second stage of a two-stage policy mapped to first-output coordinates:
/// CSV "y1,x2_m1,x2_m0".  Row j samples y1 = l_j / v1 where v1 is the
/// stage-1 gap at l = 0, so the LLR after stage 1 lands exactly on node j
/// and the dumped amplitudes are the tabulated ones.
void dump_second_stage_vs_y1(std::ostream& out, const PolicyTable& table);

}  // namespace fbdp
