// cli.hpp: Commands behind the purestat tool, each producing a deterministic CSV artifact

#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "purestat/bifurcation.hpp"
#include "purestat/config.hpp"
#include "purestat/evolve.hpp"
#include "purestat/liouville.hpp"
#include "purestat/steady.hpp"

namespace purestat::cli {

using config::json;
using config::RunConfig;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

inline constexpr int kSteadyMaxDim = 48;
inline constexpr double kAlgebraThreshold = 1e-10;

/// Shortest decimal text that parses back to the same double. Non-finite
/// values are written as nan, inf and -inf.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format_number(long long x) { return std::to_string(x); }
inline std::string format_number(int x) { return std::to_string(x); }

struct CsvArtifact {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> footer; // rendered as "# key=value"

    std::string render() const {
        std::string out;
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        for (const auto& [k, v] : footer) out += "# " + k + "=" + v + "\n";
        return out;
    }

    void write() const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::InvalidConfig, "cannot open output '" + path + "'");
        f << render();
        if (!f) throw Error(ErrorKind::InvalidConfig, "failed writing '" + path + "'");
    }
};

struct CommandResult {
    CsvArtifact csv;
    int exit_code{kExitOk};
};

namespace detail {

inline void finish(CsvArtifact& csv, const RunConfig& c, const std::string& status) {
    csv.footer.emplace_back("status", status);
    csv.footer.emplace_back("config_hash", config::config_hash(c));
    csv.footer.emplace_back("version", config::kVersion);
}

inline std::string cell(double x) { return format_number(x); }
inline std::string cell(std::size_t x) { return std::to_string(x); }
inline std::string cell(int x) { return std::to_string(x); }

} // namespace detail

// ---------------------------------------------------------------------------

/// Null space of the configured generator: one row per canonical basis state
/// and a summary row carrying null_dim.
inline CommandResult cmd_steady(const RunConfig& c) {
    const ModelSpec spec = config::model_spec(c.canonical);
    const Op h = reference_hamiltonian(spec);
    if (h.dim() > kSteadyMaxDim)
        config::fail("hilbert.dim", "steady supports dim <= " + std::to_string(kSteadyMaxDim));
    const SuperOp lam = build_generator(spec);
    const SteadyReport rep = stationary_subspace(lam, c.canonical["steady"]["tol"].get<double>(), &h);

    CommandResult r;
    r.csv.header = {"row", "index", "singular_value", "trace", "purity_defect", "min_eig", "energy", "residual", "null_dim"};
    for (int k = 0; k < rep.null_dim; ++k) {
        const auto& s = rep.per_state[static_cast<std::size_t>(k)];
        r.csv.rows.push_back({"state", detail::cell(k), detail::cell(rep.singular_values[static_cast<std::size_t>(k)]),
                              detail::cell(s.trace.real()), detail::cell(s.purity_defect), detail::cell(s.min_eigenvalue),
                              detail::cell(s.energy.real()), detail::cell(s.residual), ""});
    }
    r.csv.rows.push_back({"summary", "", "", "", "", "", "", "", detail::cell(rep.null_dim)});
    detail::finish(r.csv, c, "ok");
    return r;
}

/// Trajectory diagnostics on an evenly spaced grid over [0, t_max].
/// A non-finite state keeps the rows computed so far and exits with 2.
inline CommandResult cmd_evolve(const RunConfig& c) {
    const ModelSpec spec = config::model_spec(c.canonical);
    const Op h = reference_hamiltonian(spec);
    const SuperOp lam = build_generator(spec);
    const json& e = c.canonical["evolve"];
    const Op rho0 = config::initial_state(c.canonical, static_cast<int>(h.dim()));
    const auto grid = linspace(0.0, e["t_max"].get<double>(), static_cast<int>(e["grid_points"].get<std::int64_t>()));
    EvolveMethod m = method::Expm{};
    if (e["method"] == "rk4") m = method::Rk4{e["dt"].get<double>()};

    const TrajectoryResult tr = trajectory_checked(lam, rho0, grid, m, &h);
    CommandResult r;
    r.csv.header = {"t", "trace_re", "trace_im", "purity_defect", "min_eig", "energy_re", "residual"};
    const auto& tj = tr.trajectory;
    for (std::size_t i = 0; i < tj.times.size(); ++i) {
        const auto& d = tj.diagnostics[i];
        r.csv.rows.push_back({detail::cell(tj.times[i]), detail::cell(d.trace.real()), detail::cell(d.trace.imag()),
                              detail::cell(d.purity_defect), detail::cell(d.min_eigenvalue), detail::cell(d.energy.real()),
                              detail::cell(d.residual)});
    }
    if (tr.failure) {
        r.exit_code = kExitNumerical;
        detail::finish(r.csv, c, "nonfinite");
    } else {
        detail::finish(r.csv, c, "ok");
    }
    return r;
}

/// Bifurcation table over the configured parameter path. Column groups are
/// sized by the widest row; missing entries are left empty.
inline CommandResult cmd_sweep(const RunConfig& c) {
    const json& s = c.block("sweep");
    const std::string path = s["parameter"].get<std::string>();
    const json base = c.canonical;
    // Validate the base point before sweeping so config errors surface early.
    (void)config::model_spec(base);
    const ModelFamily family = [&base, &path](double x) { return config::model_spec(config::with_parameter(base, path, x)); };

    SweepOptions opt;
    opt.build_generators = s["build_generators"].get<bool>();
    opt.tol_match = s["tol_match"].get<double>();
    opt.steady_tol = c.canonical["steady"]["tol"].get<double>();
    for (const auto& n : s["probe_levels"]) opt.probe_levels.push_back(n.get<int>());
    if (s.contains("domain")) opt.domain = Interval{s["domain"][0].get<double>(), s["domain"][1].get<double>()};

    const auto grid = linspace(s["from"].get<double>(), s["to"].get<double>(), static_cast<int>(s["points"].get<std::int64_t>()));
    const BifurcationDiagram diag = sweep(family, path, grid, opt);

    std::size_t n_roots = 0, n_matched = 0;
    for (const auto& row : diag.rows) {
        n_roots = std::max(n_roots, row.roots.size());
        n_matched = std::max(n_matched, row.matched_levels.size());
    }

    CommandResult r;
    auto& hd = r.csv.header;
    hd.push_back("parameter");
    for (std::size_t i = 1; i <= n_roots; ++i) hd.push_back("root_" + std::to_string(i));
    hd.push_back("matched_count");
    for (std::size_t i = 1; i <= n_matched; ++i) hd.push_back("matched_n_" + std::to_string(i));
    if (opt.build_generators)
        for (std::size_t i = 1; i <= n_matched; ++i) hd.push_back("residual_" + std::to_string(i));
    hd.push_back("null_dim");
    for (int n : opt.probe_levels) hd.push_back("level_residual_" + std::to_string(n));

    for (const auto& row : diag.rows) {
        std::vector<std::string> cells{detail::cell(row.parameter)};
        for (std::size_t i = 0; i < n_roots; ++i) cells.push_back(i < row.roots.size() ? detail::cell(row.roots[i]) : "");
        cells.push_back(detail::cell(row.matched_levels.size()));
        for (std::size_t i = 0; i < n_matched; ++i)
            cells.push_back(i < row.matched_levels.size() ? detail::cell(row.matched_levels[i]) : "");
        if (opt.build_generators)
            for (std::size_t i = 0; i < n_matched; ++i)
                cells.push_back(i < row.pure_residuals.size() ? detail::cell(row.pure_residuals[i]) : "");
        cells.push_back(row.null_dim ? detail::cell(*row.null_dim) : "");
        for (double v : row.level_residuals) cells.push_back(detail::cell(v));
        r.csv.rows.push_back(std::move(cells));
    }
    detail::finish(r.csv, c, "ok");
    return r;
}

/// The eight superoperator identities on random operators; exit 2 when any
/// normalized residual exceeds 1e-10.
inline CommandResult cmd_verify_algebra(const RunConfig& c) {
    const json& a = c.canonical["algebra"];
    const AlgebraReport rep = verify_algebra(static_cast<int>(a["dim"].get<std::int64_t>()),
                                             static_cast<int>(a["trials"].get<std::int64_t>()), a["seed"].get<std::uint64_t>(),
                                             c.canonical["hilbert"]["hbar"].get<double>());
    CommandResult r;
    r.csv.header = {"identity", "max_residual"};
    bool ok = true;
    for (const auto& id : rep.identities) {
        r.csv.rows.push_back({id.name, detail::cell(id.max_residual)});
        ok = ok && id.max_residual <= kAlgebraThreshold;
    }
    r.exit_code = ok ? kExitOk : kExitNumerical;
    detail::finish(r.csv, c, ok ? "ok" : "threshold_exceeded");
    return r;
}

/// Monomials of a catastrophe germ plus unfolding; the full polynomial goes in the footer.
inline CommandResult cmd_catastrophe(const RunConfig& c) {
    const PolynomialDescription p = catastrophe_template(config::catastrophe_spec(c.canonical));
    CommandResult r;
    r.csv.header = {"coeff"};
    for (int v = 1; v <= p.variables; ++v) r.csv.header.push_back("exp_x" + std::to_string(v));
    for (const auto& t : p.terms) {
        std::vector<std::string> cells{detail::cell(t.coeff)};
        for (int e : t.exps) cells.push_back(detail::cell(e));
        r.csv.rows.push_back(std::move(cells));
    }
    r.csv.footer.emplace_back("polynomial", p.to_string());
    detail::finish(r.csv, c, "ok");
    return r;
}

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"steady", "evolve", "sweep", "verify-algebra", "catastrophe"};
    return names;
}

inline CommandResult run_command(const std::string& name, const RunConfig& c) {
    if (name == "steady") return cmd_steady(c);
    if (name == "evolve") return cmd_evolve(c);
    if (name == "sweep") return cmd_sweep(c);
    if (name == "verify-algebra") return cmd_verify_algebra(c);
    if (name == "catastrophe") return cmd_catastrophe(c);
    throw Error(ErrorKind::InvalidConfig, "unknown command '" + name + "'");
}

/// Exit code for an error escaping a command.
inline int exit_code_for(const Error& e) { return e.is_numerical() ? kExitNumerical : kExitConfig; }

} // namespace purestat::cli
