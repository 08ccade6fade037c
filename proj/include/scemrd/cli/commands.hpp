#pragma once

#include "scemrd/analysis.hpp"
#include "scemrd/cli/problem.hpp"
#include "scemrd/scem.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace scemrd::cli {

/// A solve failed; carries the offending eps.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(double eps, const std::string& what)
        : std::runtime_error("solver failed for eps=" + format_tag(eps) + ": " + what), eps_(eps) {}
    /// `what` already names the failing eps.
    explicit SolverFailure(const std::string& what)
        : std::runtime_error("solver failed for " + what), eps_(std::nan("")) {}
    double eps() const noexcept { return eps_; }

    static std::string format_tag(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

private:
    double eps_;
};

/// Sample points of the printed solution tables.
inline std::vector<double> paper_grid() {
    return {0.000, 0.001, 0.003, 0.070, 0.090, 0.100, 0.300, 0.500,
            0.700, 0.900, 0.910, 0.930, 0.997, 0.999, 1.000};
}

struct EvalGrid {
    enum class Kind { Paper, Uniform, Explicit };
    Kind kind = Kind::Paper;
    std::size_t count = 0;
    std::vector<double> points;

    bool operator==(const EvalGrid&) const = default;

    static EvalGrid paper() { return {}; }
    static EvalGrid uniform(std::size_t count) { return {Kind::Uniform, count, {}}; }
    static EvalGrid explicit_points(std::vector<double> pts) { return {Kind::Explicit, 0, std::move(pts)}; }

    std::vector<double> points_on_unit() const {
        switch (kind) {
            case Kind::Paper: return paper_grid();
            case Kind::Uniform: return uniform_grid(count);
            default: return points;
        }
    }
};

struct RunManifest {
    ProblemConfig problem;
    std::vector<double> eps_list;
    std::vector<std::size_t> n_list;
    std::string output_dir = ".";
    /// Empty means the command's default grid.
    std::optional<EvalGrid> grid;
    bool adapt = true;
    std::size_t jobs = 1;

    bool operator==(const RunManifest&) const = default;
};

inline void validate(const RunManifest& m) {
    validate(m.problem);
    if (m.eps_list.empty()) {
        throw ConfigError("eps list must be nonempty");
    }
    for (double e : m.eps_list) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw ConfigError("eps values must be positive");
        }
    }
    for (std::size_t k = 0; k < m.n_list.size(); ++k) {
        if (m.n_list[k] == 0) {
            throw ConfigError("N values must be positive");
        }
        if (k > 0 && m.n_list[k] != 2 * m.n_list[k - 1]) {
            throw ConfigError("N list must be a doubling chain");
        }
    }
    if (m.grid) {
        if (m.grid->kind == EvalGrid::Kind::Uniform && m.grid->count < 2) {
            throw ConfigError("uniform grid needs at least two points");
        }
        if (m.grid->kind == EvalGrid::Kind::Explicit) {
            const auto& p = m.grid->points;
            if (p.empty() || p.front() < 0.0 || p.back() > 1.0 ||
                !std::is_sorted(p.begin(), p.end()) ||
                std::adjacent_find(p.begin(), p.end()) != p.end()) {
                throw ConfigError("explicit grid must be strictly increasing within [0, 1]");
            }
        }
    }
    if (m.jobs == 0) {
        throw ConfigError("jobs must be positive");
    }
}

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j = {{"problem", to_json(m.problem)}, {"eps", m.eps_list}, {"n", m.n_list},
                        {"out", m.output_dir},           {"adapt", m.adapt},  {"jobs", m.jobs}};
    if (m.grid) {
        switch (m.grid->kind) {
            case EvalGrid::Kind::Paper: j["grid"] = "paper"; break;
            case EvalGrid::Kind::Uniform: j["grid"] = m.grid->count; break;
            case EvalGrid::Kind::Explicit: j["grid"] = m.grid->points; break;
        }
    }
    return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    try {
        RunManifest m;
        m.problem = problem_from_json(j.at("problem"));
        m.eps_list = j.at("eps").get<std::vector<double>>();
        m.n_list = j.value("n", std::vector<std::size_t>{});
        m.output_dir = j.value("out", std::string("."));
        m.adapt = j.value("adapt", true);
        m.jobs = j.value("jobs", std::size_t{1});
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.is_string() && g.get<std::string>() == "paper") {
                m.grid = EvalGrid::paper();
            } else if (g.is_number_unsigned()) {
                m.grid = EvalGrid::uniform(g.get<std::size_t>());
            } else if (g.is_array()) {
                m.grid = EvalGrid::explicit_points(g.get<std::vector<double>>());
            } else {
                throw ConfigError("grid must be 'paper', a point count, or a list of points");
            }
        }
        validate(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

// ---- list syntax -----------------------------------------------------------

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        if (!cur.empty()) {
            out.push_back(cur);
        }
    }
    return out;
}

inline double parse_real(const std::string& tok) {
    const auto caret = tok.find('^');
    try {
        std::size_t used = 0;
        if (caret != std::string::npos) {
            const double base = std::stod(tok.substr(0, caret), &used);
            if (used != caret) {
                throw ConfigError("bad number '" + tok + "'");
            }
            const std::string e = tok.substr(caret + 1);
            const double expo = std::stod(e, &used);
            if (used != e.size()) {
                throw ConfigError("bad number '" + tok + "'");
            }
            return std::pow(base, expo);
        }
        const double v = std::stod(tok, &used);
        if (used != tok.size()) {
            throw ConfigError("bad number '" + tok + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("bad number '" + tok + "'");
    }
}

}  // namespace detail

/// Comma-separated reals; `b^p` is a power and `2^-1..2^-15` expands over
/// consecutive integer exponents.
inline std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : detail::split(text, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(detail::parse_real(item));
            continue;
        }
        const std::string lo = item.substr(0, dots);
        const std::string hi = item.substr(dots + 2);
        const auto c1 = lo.find('^');
        const auto c2 = hi.find('^');
        if (c1 == std::string::npos || c2 == std::string::npos || lo.substr(0, c1) != hi.substr(0, c2)) {
            throw ConfigError("eps range '" + item + "' must look like 2^-1..2^-15");
        }
        const double base = detail::parse_real(lo.substr(0, c1));
        const double p0 = detail::parse_real(lo.substr(c1 + 1));
        const double p1 = detail::parse_real(hi.substr(c2 + 1));
        if (p0 != std::floor(p0) || p1 != std::floor(p1)) {
            throw ConfigError("eps range exponents must be integers");
        }
        const int step = p1 >= p0 ? 1 : -1;
        for (int p = static_cast<int>(p0);; p += step) {
            out.push_back(std::pow(base, p));
            if (p == static_cast<int>(p1)) {
                break;
            }
        }
    }
    if (out.empty()) {
        throw ConfigError("empty eps list");
    }
    return out;
}

/// Comma-separated positive integers, or `lo..hi` for the doubling chain.
inline std::vector<std::size_t> parse_n_list(const std::string& text) {
    auto parse_count = [](const std::string& tok) -> std::size_t {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(tok, &used);
            if (used != tok.size() || v <= 0) {
                throw ConfigError("bad N '" + tok + "'");
            }
            return static_cast<std::size_t>(v);
        } catch (const std::logic_error&) {
            throw ConfigError("bad N '" + tok + "'");
        }
    };
    std::vector<std::size_t> out;
    for (const auto& item : detail::split(text, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_count(item));
            continue;
        }
        const std::size_t lo = parse_count(item.substr(0, dots));
        const std::size_t hi = parse_count(item.substr(dots + 2));
        for (std::size_t v = lo; v <= hi; v *= 2) {
            out.push_back(v);
        }
        if (out.back() != hi) {
            throw ConfigError("N range '" + item + "' is not a doubling chain");
        }
    }
    if (out.empty()) {
        throw ConfigError("empty N list");
    }
    return out;
}

/// `paper`, a uniform point count, or comma-separated points.
inline EvalGrid parse_grid(const std::string& text) {
    if (text == "paper") {
        return EvalGrid::paper();
    }
    if (text.find(',') == std::string::npos && text.find('.') == std::string::npos) {
        const auto n = parse_n_list(text);
        return EvalGrid::uniform(n.front());
    }
    std::vector<double> pts;
    for (const auto& t : detail::split(text, ',')) {
        pts.push_back(detail::parse_real(t));
    }
    return EvalGrid::explicit_points(std::move(pts));
}

// ---- formatting ------------------------------------------------------------

/// Fixed 15-decimal form; negative zero prints as zero.
inline std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15f", v);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

/// Round-trippable form for table cells.
inline std::string format_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string eps_tag(double eps) { return SolverFailure::format_tag(eps); }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

inline std::string csv_table(const std::vector<double>& xs, const Eigen::MatrixXd& values,
                             const std::string& prefix) {
    std::string s = "x";
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
        s += "," + prefix + std::to_string(i + 1);
    }
    s += "\n";
    for (std::size_t p = 0; p < xs.size(); ++p) {
        s += format_fixed(xs[p]);
        for (Eigen::Index i = 0; i < values.cols(); ++i) {
            s += "," + format_fixed(values(static_cast<Eigen::Index>(p), i));
        }
        s += "\n";
    }
    return s;
}

// ---- solving ---------------------------------------------------------------

/// Hybrid solve of the manifest's problem at one eps. Layer meshes start from
/// `intervals` uniform subintervals.
inline HybridApproximation solve_problem(const ProblemConfig& problem, double eps, std::size_t intervals,
                                         bool adapt) {
    try {
        HybridOptions opts;
        opts.solver.initial_mesh_points = intervals + 1;
        opts.solver.adapt = adapt;
        opts.strict_assumptions = false;
        return hybrid_solve_checked(to_system(problem, eps), opts).approximation;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw SolverFailure(eps, e.what());
    }
}

namespace detail {

/// Runs fn(k) for k in [0, count) on up to `jobs` threads; results in index order.
template <typename T, typename Fn>
std::vector<T> run_ordered(std::size_t count, std::size_t jobs, Fn fn) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                slots[k].emplace(fn(k));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, count));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        if (errors[k]) {
            std::rethrow_exception(errors[k]);
        }
        out.push_back(std::move(*slots[k]));
    }
    return out;
}

inline std::filesystem::path prepare_output(const RunManifest& m) {
    std::filesystem::path dir(m.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    return dir;
}

}  // namespace detail

inline constexpr std::size_t kDefaultTableN = 1024;
inline constexpr std::size_t kDefaultPlotPoints = 2001;

/// One CSV per (eps, N): header x,y_1,...,y_n; 15-decimal rows on the grid.
inline std::vector<std::filesystem::path> cmd_solve(const RunManifest& m) {
    validate(m);
    const auto dir = detail::prepare_output(m);
    const std::vector<std::size_t> ns = m.n_list.empty() ? std::vector<std::size_t>{kDefaultTableN} : m.n_list;
    const std::vector<double> xs = m.grid.value_or(EvalGrid::paper()).points_on_unit();

    struct Job {
        double eps;
        std::size_t n;
    };
    std::vector<Job> jobs;
    for (double e : m.eps_list) {
        for (std::size_t n : ns) {
            jobs.push_back({e, n});
        }
    }
    const auto tables = detail::run_ordered<std::string>(jobs.size(), m.jobs, [&](std::size_t k) {
        const auto sol = solve_problem(m.problem, jobs[k].eps, jobs[k].n, m.adapt);
        return csv_table(xs, sol.evaluate(xs), "y_");
    });
    std::vector<std::filesystem::path> files;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        auto path = dir / ("solution_eps" + eps_tag(jobs[k].eps) + "_N" + std::to_string(jobs[k].n) + ".csv");
        write_file(path, tables[k]);
        files.push_back(std::move(path));
    }
    return files;
}

/// GridFunction of the composite at x_j = j/N for the sweep.
inline SweepSolver sweep_solver(const ProblemConfig& problem, bool adapt) {
    return [problem, adapt](double eps, std::size_t n) {
        const auto sol = solve_problem(problem, eps, n, adapt);
        std::vector<double> xs = uniform_grid(n + 1);
        Eigen::MatrixXd values = sol.evaluate(xs);
        return GridFunction(std::move(xs), std::move(values));
    };
}

/// CSV text of one component of a double-mesh report: rows are eps values,
/// then D^N and p^N; columns are N. The last p cell uses the unprinted D^{2M}.
/// Missing cells print NA and orders at the noise floor print undefined.
inline std::string convergence_csv(const ErrorReport& rep, std::size_t component) {
    const auto ci = static_cast<Eigen::Index>(component);
    const std::string label = std::to_string(component + 1);
    std::string s = "eps";
    for (std::size_t n : rep.n_list) {
        s += ",N=" + std::to_string(n);
    }
    s += "\n";
    for (std::size_t e = 0; e < rep.eps_list.size(); ++e) {
        s += format_exact(rep.eps_list[e]);
        for (std::size_t k = 0; k < rep.n_list.size(); ++k) {
            const auto& cell = rep.per_eps[e][k];
            s += "," + (cell ? format_exact((*cell)(ci)) : std::string("NA"));
        }
        s += "\n";
    }
    s += "D_" + label + "^N";
    for (std::size_t k = 0; k < rep.n_list.size(); ++k) {
        s += "," + (rep.d_n[k] ? format_exact((*rep.d_n[k])(ci)) : std::string("NA"));
    }
    s += "\np_" + label + "^N";
    for (std::size_t k = 0; k < rep.n_list.size(); ++k) {
        const auto& next = k + 1 < rep.n_list.size() ? rep.d_n[k + 1] : rep.d_tail;
        if (!rep.d_n[k] || !next) {
            s += ",NA";
        } else if (const auto& p = rep.order[k][component]) {
            s += "," + format_exact(*p);
        } else {
            s += ",undefined";
        }
    }
    s += "\n";
    return s;
}

inline constexpr std::size_t kDefaultSweepN[] = {64, 128, 256, 512, 1024};

struct ConvergenceOutput {
    ErrorReport report;
    std::vector<std::filesystem::path> files;
};

/// One order table per component (convergence_y<i>.csv). Solver failures are
/// recorded as NA cells; the tables are written before SolverFailure is raised.
inline ConvergenceOutput cmd_convergence(const RunManifest& m) {
    validate(m);
    std::vector<std::size_t> ns = m.n_list;
    if (ns.empty()) {
        ns.assign(std::begin(kDefaultSweepN), std::end(kDefaultSweepN));
    }
    if (ns.size() < 2) {
        throw ConfigError("convergence needs at least two N values");
    }
    const auto dir = detail::prepare_output(m);
    ConvergenceOutput out;
    out.report = convergence_table(sweep_solver(m.problem, m.adapt), m.eps_list, ns, m.jobs);
    if (out.report.components == 0) {
        out.report.components = m.problem.n;
        out.report.order.assign(ns.size(), std::vector<std::optional<double>>(m.problem.n));
    }
    for (std::size_t i = 0; i < out.report.components; ++i) {
        auto path = dir / ("convergence_y" + std::to_string(i + 1) + ".csv");
        write_file(path, convergence_csv(out.report, i));
        out.files.push_back(std::move(path));
    }
    if (!out.report.failures.empty()) {
        throw SolverFailure(out.report.failures.front());
    }
    return out;
}

/// Dense x vs y_i data per eps (plot_eps<eps>.csv), plus |hybrid - exact|
/// (plot_error_eps<eps>.csv) when an analytic solution is available.
inline std::vector<std::filesystem::path> cmd_plotdata(const RunManifest& m) {
    validate(m);
    const auto dir = detail::prepare_output(m);
    const std::size_t n = m.n_list.empty() ? kDefaultTableN : m.n_list.back();
    const std::vector<double> xs = m.grid.value_or(EvalGrid::uniform(kDefaultPlotPoints)).points_on_unit();

    struct Tables {
        std::string values;
        std::optional<std::string> errors;
    };
    const auto tables = detail::run_ordered<Tables>(m.eps_list.size(), m.jobs, [&](std::size_t k) {
        const double eps = m.eps_list[k];
        const auto sol = solve_problem(m.problem, eps, n, m.adapt);
        const Eigen::MatrixXd y = sol.evaluate(xs);
        Tables t{csv_table(xs, y, "y_"), std::nullopt};
        if (const auto exact = oracle_for(m.problem, eps)) {
            Eigen::MatrixXd err(y.rows(), y.cols());
            for (std::size_t p = 0; p < xs.size(); ++p) {
                const auto row = static_cast<Eigen::Index>(p);
                err.row(row) = (y.row(row).transpose() - (*exact)(xs[p])).cwiseAbs().transpose();
            }
            t.errors = csv_table(xs, err, "err_");
        }
        return t;
    });
    std::vector<std::filesystem::path> files;
    for (std::size_t k = 0; k < tables.size(); ++k) {
        const std::string tag = eps_tag(m.eps_list[k]);
        auto path = dir / ("plot_eps" + tag + ".csv");
        write_file(path, tables[k].values);
        files.push_back(std::move(path));
        if (tables[k].errors) {
            auto epath = dir / ("plot_error_eps" + tag + ".csv");
            write_file(epath, *tables[k].errors);
            files.push_back(std::move(epath));
        }
    }
    return files;
}

}  // namespace scemrd::cli
