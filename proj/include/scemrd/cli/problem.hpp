#pragma once

#include "scemrd/cli/expression.hpp"
#include "scemrd/analysis.hpp"
#include "scemrd/system_model.hpp"

#include "json.hpp"

#include <cstddef>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace scemrd::cli {

/// Literal that marks a diffusion entry as the swept parameter.
inline constexpr const char* kSweptMarker = "eps";

struct DiffusionEntry {
    bool swept = true;
    double value = 1.0;

    bool operator==(const DiffusionEntry&) const = default;
};

struct ProblemConfig {
    std::string name;
    std::size_t n = 0;
    std::vector<std::vector<std::string>> coeff;
    std::vector<std::string> forcing;
    std::vector<DiffusionEntry> diffusion;
    std::vector<double> bc_left;
    std::vector<double> bc_right;

    bool operator==(const ProblemConfig&) const = default;
};

inline void validate(const ProblemConfig& cfg) {
    auto fail = [&](const std::string& what) { throw ConfigError("problem '" + cfg.name + "': " + what); };
    if (cfg.n < 2) {
        fail("n must be at least 2");
    }
    if (cfg.coeff.size() != cfg.n) {
        fail("coeff must have n rows");
    }
    for (const auto& row : cfg.coeff) {
        if (row.size() != cfg.n) {
            fail("every coeff row must have n entries");
        }
        for (const auto& e : row) {
            Expression::parse(e);
        }
    }
    if (cfg.forcing.size() != cfg.n || cfg.diffusion.size() != cfg.n || cfg.bc_left.size() != cfg.n ||
        cfg.bc_right.size() != cfg.n) {
        fail("forcing, diffusion, bc_left and bc_right must have n entries");
    }
    for (const auto& e : cfg.forcing) {
        Expression::parse(e);
    }
    for (const auto& d : cfg.diffusion) {
        if (!d.swept && !(d.value > 0.0)) {
            fail("diffusion values must be positive");
        }
    }
}

inline nlohmann::json to_json(const ProblemConfig& cfg) {
    nlohmann::json diff = nlohmann::json::array();
    for (const auto& d : cfg.diffusion) {
        if (d.swept) {
            diff.push_back(kSweptMarker);
        } else {
            diff.push_back(d.value);
        }
    }
    return {{"name", cfg.name},       {"n", cfg.n},          {"coeff", cfg.coeff},
            {"forcing", cfg.forcing}, {"diffusion", diff},   {"bc_left", cfg.bc_left},
            {"bc_right", cfg.bc_right}};
}

namespace detail {

inline std::string expression_text(const nlohmann::json& j, const std::string& field) {
    if (j.is_string()) {
        return j.get<std::string>();
    }
    if (j.is_number()) {
        return j.dump();
    }
    throw ConfigError(field + ": expected an expression string or a number");
}

}  // namespace detail

inline ProblemConfig problem_from_json(const nlohmann::json& j) {
    try {
        ProblemConfig cfg;
        cfg.name = j.value("name", std::string("custom"));
        cfg.n = j.at("n").get<std::size_t>();
        for (const auto& row : j.at("coeff")) {
            std::vector<std::string> r;
            for (const auto& e : row) {
                r.push_back(detail::expression_text(e, "coeff"));
            }
            cfg.coeff.push_back(std::move(r));
        }
        for (const auto& e : j.at("forcing")) {
            cfg.forcing.push_back(detail::expression_text(e, "forcing"));
        }
        for (const auto& e : j.at("diffusion")) {
            if (e.is_string()) {
                if (e.get<std::string>() != kSweptMarker) {
                    throw ConfigError(std::string("diffusion: string entries must be '") + kSweptMarker + "'");
                }
                cfg.diffusion.push_back({true, 1.0});
            } else {
                cfg.diffusion.push_back({false, e.get<double>()});
            }
        }
        cfg.bc_left = j.at("bc_left").get<std::vector<double>>();
        cfg.bc_right = j.at("bc_right").get<std::vector<double>>();
        validate(cfg);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("problem config: ") + e.what());
    }
}

inline ProblemConfig parse_problem(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("problem config is not valid JSON: ") + e.what());
    }
    return problem_from_json(j);
}

/// -eps y'' + [[4,-2],[-1,3]] y = (1, 2), zero boundary values.
inline ProblemConfig builtin_example1() {
    return {"example1", 2, {{"4", "-2"}, {"-1", "3"}}, {"1", "2"}, {{true, 1.0}, {true, 1.0}}, {0, 0}, {0, 0}};
}

/// -eps y'' + [[3,-1,-1],[-1,3,-1],[0,-1,3]] y = (0, 1, x), zero boundary values.
inline ProblemConfig builtin_example2() {
    return {"example2",
            3,
            {{"3", "-1", "-1"}, {"-1", "3", "-1"}, {"0", "-1", "3"}},
            {"0", "1", "x"},
            {{true, 1.0}, {true, 1.0}, {true, 1.0}},
            {0, 0, 0},
            {0, 0, 0}};
}

inline std::optional<ProblemConfig> builtin_problem(const std::string& name) {
    if (name == "example1") {
        return builtin_example1();
    }
    if (name == "example2") {
        return builtin_example2();
    }
    return std::nullopt;
}

/// Built-in name, or path to a JSON problem file.
inline ProblemConfig load_problem(const std::string& spec) {
    if (auto b = builtin_problem(spec)) {
        return *b;
    }
    std::ifstream in(spec);
    if (!in) {
        throw ConfigError("problem '" + spec + "' is neither a built-in nor a readable file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

/// Instantiates the system with every swept diffusion entry set to eps.
inline ReactionDiffusionSystem to_system(const ProblemConfig& cfg, double eps) {
    validate(cfg);
    auto field = [](const std::string& text) {
        const Expression e = Expression::parse(text);
        return ScalarField([e](double x) { return e(x); });
    };
    std::vector<ScalarField> coeff;
    for (const auto& row : cfg.coeff) {
        for (const auto& e : row) {
            coeff.push_back(field(e));
        }
    }
    std::vector<ScalarField> forcing;
    for (const auto& e : cfg.forcing) {
        forcing.push_back(field(e));
    }
    std::vector<double> diffusion;
    for (const auto& d : cfg.diffusion) {
        diffusion.push_back(d.swept ? eps : d.value);
    }
    const auto n = static_cast<Eigen::Index>(cfg.n);
    return {cfg.n,
            std::move(coeff),
            std::move(forcing),
            std::move(diffusion),
            Eigen::Map<const Eigen::VectorXd>(cfg.bc_left.data(), n),
            Eigen::Map<const Eigen::VectorXd>(cfg.bc_right.data(), n)};
}

/// Analytic solution when A is constant, f is affine in x and every diffusion
/// entry is the swept parameter; nothing otherwise.
inline std::optional<std::function<Eigen::VectorXd(double)>> oracle_for(const ProblemConfig& cfg, double eps) {
    for (const auto& row : cfg.coeff) {
        for (const auto& e : row) {
            if (!Expression::parse(e).is_constant()) {
                return std::nullopt;
            }
        }
    }
    for (const auto& e : cfg.forcing) {
        const int deg = Expression::parse(e).degree();
        if (deg < 0 || deg > 1) {
            return std::nullopt;
        }
    }
    for (const auto& d : cfg.diffusion) {
        if (!d.swept) {
            return std::nullopt;
        }
    }
    const ReactionDiffusionSystem sys = to_system(cfg, eps);
    const Eigen::VectorXd f0 = sys.forcing_at(0.0);
    const Eigen::VectorXd f1 = sys.forcing_at(1.0) - f0;
    try {
        return exact_affine_system(sys.matrix_at(0.0), f0, f1, eps, sys.left_bc(), sys.right_bc());
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace scemrd::cli
