#include "fbdp/policy_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fbdp/belief.hpp"
#include "fbdp/errors.hpp"

namespace fbdp {

namespace {

constexpr const char* format_tag = "FBDP v1";

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s, int line) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError(line, "expected a number, got '" + s + "'");
    return x;
}

int parse_int(const std::string& s, int line) {
    const double x = parse_double(s, line);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x) throw ParseError(line, "expected an integer, got '" + s + "'");
    return i;
}

struct Reader {
    std::istream& in;
    int line_no = 0;
    std::string line;

    bool next() {
        if (!std::getline(in, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        return true;
    }
};

}  // namespace

PolicyFile make_policy_file(const SolverConfig& config, const CalibratedSolution& sol) {
    PolicyFile f;
    f.table = sol.solution.policy;
    f.config = config;
    f.config.v_max = config.amplitude_cap();
    f.ber = sol.error_probability;
    f.energy = sol.achieved_energy;
    return f;
}

void save_policy(std::ostream& out, const PolicyFile& file) {
    const PolicyTable& t = file.table;
    out << format_tag << '\n';
    out << "n=" << t.stages << '\n';
    out << "s=" << fmt17(t.budget) << '\n';
    out << "lambda=" << fmt17(t.lambda) << '\n';
    out << "l_min=" << fmt17(-t.grid.l_max) << '\n';
    out << "l_max=" << fmt17(t.grid.l_max) << '\n';
    out << "grid_points=" << t.grid.points << '\n';
    out << "quad_order=" << file.config.quad_order << '\n';
    out << "coarse_steps=" << file.config.coarse_steps << '\n';
    out << "refine_tol=" << fmt17(file.config.refine_tol) << '\n';
    out << "v_max=" << fmt17(file.config.v_max) << '\n';
    out << "v_eps=" << fmt17(file.config.v_eps) << '\n';
    out << "energy_rel_tol=" << fmt17(file.config.energy_rel_tol) << '\n';
    out << "ber=" << fmt17(file.ber) << '\n';
    out << "energy=" << fmt17(file.energy) << '\n';
    for (int k = 1; k <= t.stages; ++k) {
        out << "k=" << k << '\n';
        const auto& v = t.v[static_cast<std::size_t>(k) - 1];
        for (int i = 0; i < t.grid.points; ++i)
            out << fmt17(t.grid.node(i)) << ',' << fmt17(v[static_cast<std::size_t>(i)]) << '\n';
    }
}

void save_policy(const std::string& path, const PolicyFile& file) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save_policy(out, file);
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

PolicyFile load_policy(std::istream& in) {
    Reader r{in};
    if (!r.next()) throw ParseError(1, "empty file");
    if (r.line != format_tag)
        throw ParseError(r.line_no, "unsupported format tag '" + r.line + "'");

    std::map<std::string, std::string> header;
    // Header runs until the first stage marker.
    while (true) {
        if (!r.next()) throw ParseError(r.line_no + 1, "missing stage sections");
        const auto eq = r.line.find('=');
        if (eq == std::string::npos)
            throw ParseError(r.line_no, "expected key=value, got '" + r.line + "'");
        const std::string key = r.line.substr(0, eq);
        const std::string value = r.line.substr(eq + 1);
        if (key == "k") break;
        if (!header.emplace(key, value).second)
            throw ParseError(r.line_no, "duplicate header key '" + key + "'");
    }

    const auto need = [&](const char* key) -> const std::string& {
        const auto it = header.find(key);
        if (it == header.end())
            throw ParseError(r.line_no, std::string("missing header key '") + key + "'");
        return it->second;
    };
    const int header_line = r.line_no;

    PolicyFile f;
    f.table.stages = parse_int(need("n"), header_line);
    f.table.budget = parse_double(need("s"), header_line);
    f.table.lambda = parse_double(need("lambda"), header_line);
    const double l_min = parse_double(need("l_min"), header_line);
    const double l_max = parse_double(need("l_max"), header_line);
    const int points = parse_int(need("grid_points"), header_line);
    f.config.stages = f.table.stages;
    f.config.budget = f.table.budget;
    f.config.l_max = l_max;
    f.config.grid_points = points;
    f.config.quad_order = parse_int(need("quad_order"), header_line);
    f.config.coarse_steps = parse_int(need("coarse_steps"), header_line);
    f.config.refine_tol = parse_double(need("refine_tol"), header_line);
    f.config.v_max = parse_double(need("v_max"), header_line);
    f.config.v_eps = parse_double(need("v_eps"), header_line);
    f.config.energy_rel_tol = parse_double(need("energy_rel_tol"), header_line);
    f.ber = parse_double(need("ber"), header_line);
    f.energy = parse_double(need("energy"), header_line);

    constexpr std::size_t known_keys = 14;
    if (header.size() != known_keys)
        throw ParseError(header_line, "unknown header key present");
    if (f.table.stages < 1) throw ParseError(header_line, "n must be >= 1");
    if (l_min != -l_max) throw ParseError(header_line, "l_min must equal -l_max");
    try {
        f.table.grid = make_grid(l_max, points);
    } catch (const std::invalid_argument& e) {
        throw ParseError(header_line, e.what());
    }

    f.table.v.assign(static_cast<std::size_t>(f.table.stages),
                     std::vector<double>(static_cast<std::size_t>(points), 0.0));
    for (int k = 1; k <= f.table.stages; ++k) {
        // The current line holds this stage's marker.
        if (r.line != "k=" + std::to_string(k))
            throw ParseError(r.line_no, "expected 'k=" + std::to_string(k) + "', got '" + r.line +
                                            "'");
        auto& v = f.table.v[static_cast<std::size_t>(k) - 1];
        for (int i = 0; i < points; ++i) {
            if (!r.next()) throw ParseError(r.line_no + 1, "truncated stage section");
            const auto comma = r.line.find(',');
            if (comma == std::string::npos)
                throw ParseError(r.line_no, "expected 'l,v', got '" + r.line + "'");
            const double l = parse_double(r.line.substr(0, comma), r.line_no);
            const double vi = parse_double(r.line.substr(comma + 1), r.line_no);
            const double node = f.table.grid.node(i);
            if (std::abs(l - node) > 1e-12 * std::max(1.0, std::abs(node)))
                throw ParseError(r.line_no, "node " + fmt17(l) + " does not match grid (" +
                                                fmt17(node) + ")");
            if (!(vi >= 0.0) || !std::isfinite(vi))
                throw ParseError(r.line_no, "amplitude must be finite and non-negative");
            v[static_cast<std::size_t>(i)] = vi;
        }
        if (k < f.table.stages) {
            if (!r.next()) throw ParseError(r.line_no + 1, "missing stage section");
        }
    }
    while (r.next()) {
        if (!r.line.empty()) throw ParseError(r.line_no, "unexpected trailing content");
    }
    return f;
}

PolicyFile load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return load_policy(in);
}

namespace {

void put_cell(std::ostream& out, const std::optional<double>& x, bool failed) {
    if (failed)
        out << "ERROR";
    else if (x)
        out << fmt17(*x);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << sweep_csv_header << '\n';
    for (const SweepRow& row : rows) {
        out << fmt17(row.S) << ',' << row.N << ',';
        put_cell(out, row.lambda, row.failed);
        out << ',';
        put_cell(out, row.ber_dp, row.failed);
        out << ',' << fmt17(row.ber_no_feedback) << ',';
        put_cell(out, row.ber_one_bit, false);
        out << ',';
        put_cell(out, row.ber_sk, false);
        out << ',';
        put_cell(out, row.energy_achieved, row.failed);
        out << ',' << fmt17(row.eb_n0_db) << '\n';
    }
}

void dump_stage(std::ostream& out, const PolicyTable& table, int k) {
    if (k < 1 || k > table.stages) throw std::invalid_argument("dump_stage: stage out of range");
    out << "l,v\n";
    const auto& v = table.v[static_cast<std::size_t>(k) - 1];
    for (int i = 0; i < table.grid.points; ++i)
        out << fmt17(table.grid.node(i)) << ',' << fmt17(v[static_cast<std::size_t>(i)]) << '\n';
}

void dump_second_stage_vs_y1(std::ostream& out, const PolicyTable& table) {
    if (table.stages < 2)
        throw std::invalid_argument("dump_second_stage_vs_y1: policy has no second stage");
    const double v1 = table.v[0][static_cast<std::size_t>(table.grid.center())];
    if (!(v1 > 0.0))
        throw std::invalid_argument("dump_second_stage_vs_y1: stage 1 is silent at l=0");

    out << "y1,x2_m1,x2_m0\n";
    const auto& v2 = table.v[1];
    for (int i = 0; i < table.grid.points; ++i) {
        const double l = table.grid.node(i);
        const Posterior p = posterior(l);
        const double v = v2[static_cast<std::size_t>(i)];
        out << fmt17(l / v1) << ',' << fmt17(p.p0 * v) << ',' << fmt17(-(p.p1 * v)) << '\n';
    }
}

}  // namespace fbdp
