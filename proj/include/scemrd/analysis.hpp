#pragma once

#include "scemrd/grid_function.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace scemrd {

/// Per-component max_j |values(j, i)|.
inline Eigen::VectorXd max_norm(const GridFunction& g) {
    if (g.empty()) {
        throw std::invalid_argument("max_norm: empty grid function");
    }
    return g.values().cwiseAbs().colwise().maxCoeff().transpose();
}

/// Max over the domain and over components.
inline double vector_max_norm(const GridFunction& g) { return max_norm(g).maxCoeff(); }

/// Per component, max over the coarse nodes of |fine - coarse|. Every coarse
/// node must also be a fine node.
inline Eigen::VectorXd double_mesh_diff(const GridFunction& coarse, const GridFunction& fine) {
    if (coarse.empty() || fine.empty()) {
        throw std::invalid_argument("double_mesh_diff: empty grid function");
    }
    if (coarse.components() != fine.components()) {
        throw std::invalid_argument("double_mesh_diff: component counts differ");
    }
    const auto& xc = coarse.grid();
    const auto& xf = fine.grid();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(coarse.components());
    std::size_t f = 0;
    for (std::size_t j = 0; j < xc.size(); ++j) {
        const double tol = 1e-12 * std::max(1.0, std::abs(xc[j]));
        while (f < xf.size() && xf[f] < xc[j] - tol) {
            ++f;
        }
        if (f == xf.size() || std::abs(xf[f] - xc[j]) > tol) {
            throw std::invalid_argument("double_mesh_diff: fine grid does not contain coarse node " +
                                        std::to_string(xc[j]));
        }
        const auto jc = static_cast<Eigen::Index>(j);
        const auto jf = static_cast<Eigen::Index>(f);
        d = d.cwiseMax((fine.values().row(jf) - coarse.values().row(jc)).cwiseAbs().transpose());
    }
    return d;
}

/// Orders below this D value are reported as undefined.
inline constexpr double kOrderNoiseFloor = 1e-15;

/// log2(d_coarse / d_fine), or nothing when either value is at the noise floor.
inline std::optional<double> convergence_order(double d_coarse, double d_fine) {
    if (!(d_coarse > kOrderNoiseFloor) || !(d_fine > kOrderNoiseFloor)) {
        return std::nullopt;
    }
    return std::log2(d_coarse / d_fine);
}

/// Double-mesh sweep results. Index e runs over eps_list, k over n_list.
struct ErrorReport {
    std::vector<double> eps_list;
    std::vector<std::size_t> n_list;
    std::size_t components = 0;
    /// D^N_{eps,i}; empty when a required solve failed.
    std::vector<std::vector<std::optional<Eigen::VectorXd>>> per_eps;
    /// D^N_i = max over eps of the available cells.
    std::vector<std::optional<Eigen::VectorXd>> d_n;
    /// D^{2M}_i for M = n_list.back(); feeds the last order cell only.
    std::optional<Eigen::VectorXd> d_tail;
    /// p^N_i = log2(D^N_i / D^{2N}_i) for every N in n_list.
    std::vector<std::vector<std::optional<double>>> order;
    /// Messages of failed solves, in sweep order.
    std::vector<std::string> failures;
};

using SweepSolver = std::function<GridFunction(double eps, std::size_t n)>;

/// Runs `solver` over eps_list x (n_list, 2M, 4M), M = n_list.back(), and tabulates
/// D^N_{eps,i}, D^N_i and p^N_i. Cells are independent and may be evaluated
/// by up to `jobs` threads; the report does not depend on `jobs`.
inline ErrorReport convergence_table(const SweepSolver& solver, const std::vector<double>& eps_list,
                                     const std::vector<std::size_t>& n_list, std::size_t jobs = 1) {
    if (eps_list.empty() || n_list.empty()) {
        throw std::invalid_argument("convergence_table: eps and N lists must be nonempty");
    }
    for (std::size_t k = 1; k < n_list.size(); ++k) {
        if (n_list[k] != 2 * n_list[k - 1]) {
            throw std::invalid_argument("convergence_table: N list must be a doubling chain");
        }
    }
    if (n_list.front() == 0) {
        throw std::invalid_argument("convergence_table: N must be positive");
    }

    // Solve levels: n_list followed by 2M and 4M.
    std::vector<std::size_t> levels = n_list;
    levels.push_back(2 * n_list.back());
    levels.push_back(4 * n_list.back());
    const std::size_t ne = eps_list.size();
    const std::size_t nl = levels.size();

    struct Cell {
        std::optional<GridFunction> value;
        std::string error;
    };
    std::vector<Cell> cells(ne * nl);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            try {
                cells[c].value = solver(eps_list[c / nl], levels[c % nl]);
            } catch (const std::exception& ex) {
                cells[c].error = ex.what();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, cells.size()));
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

    ErrorReport rep;
    rep.eps_list = eps_list;
    rep.n_list = n_list;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].value) {
            rep.components = static_cast<std::size_t>(cells[c].value->components());
            break;
        }
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!cells[c].value) {
            char tag[64];
            std::snprintf(tag, sizeof tag, "%.10g", eps_list[c / nl]);
            rep.failures.push_back(std::string("eps=") + tag +
                                   " N=" + std::to_string(levels[c % nl]) + ": " + cells[c].error);
        }
    }

    // Column k of D compares levels k and k + 1; the extra column is d_tail.
    const std::size_t nd = n_list.size() + 1;
    std::vector<std::optional<Eigen::VectorXd>> d(nd);
    rep.per_eps.assign(ne, std::vector<std::optional<Eigen::VectorXd>>(n_list.size()));
    for (std::size_t e = 0; e < ne; ++e) {
        for (std::size_t k = 0; k < nd; ++k) {
            const auto& coarse = cells[e * nl + k].value;
            const auto& fine = cells[e * nl + k + 1].value;
            if (!coarse || !fine) {
                continue;
            }
            Eigen::VectorXd diff = double_mesh_diff(*coarse, *fine);
            d[k] = d[k] ? Eigen::VectorXd(d[k]->cwiseMax(diff)) : diff;
            if (k < n_list.size()) {
                rep.per_eps[e][k] = std::move(diff);
            }
        }
    }
    rep.d_tail = d.back();
    rep.d_n.assign(d.begin(), d.end() - 1);
    rep.order.assign(n_list.size(), std::vector<std::optional<double>>(rep.components));
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        if (!d[k] || !d[k + 1]) {
            continue;
        }
        for (std::size_t i = 0; i < rep.components; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            rep.order[k][i] = convergence_order((*d[k])(ii), (*d[k + 1])(ii));
        }
    }
    return rep;
}

namespace detail {

struct RealEigenSystem {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vectors;
    Eigen::PartialPivLU<Eigen::MatrixXd> vectors_lu;
};

inline RealEigenSystem real_positive_eigensystem(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("exact oracle: matrix must be square and nonempty");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) {
        throw std::invalid_argument("exact oracle: eigendecomposition failed");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    RealEigenSystem out;
    out.lambda = es.eigenvalues().real();
    if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument("exact oracle: spectrum is not real");
    }
    if (out.lambda.minCoeff() <= 0.0) {
        throw std::invalid_argument("exact oracle: spectrum is not positive");
    }
    out.vectors = es.eigenvectors().real();
    out.vectors_lu = Eigen::PartialPivLU<Eigen::MatrixXd>(out.vectors);
    if (!(out.vectors_lu.rcond() > 1e-10)) {
        throw std::invalid_argument("exact oracle: matrix is not diagonalizable");
    }
    return out;
}

}  // namespace detail

/// Closed-form solution of -eps y'' + A y = f, y(0) = y(1) = 0, for constant
/// A (real positive spectrum, diagonalizable) and constant f. Each decoupled
/// mode is (g/l) [1 - cosh(k (x - 1/2)) / cosh(k/2)], k = sqrt(l/eps),
/// evaluated as (g/l) [1 - (e^{k(x-1)} + e^{-kx}) / (1 + e^{-k})].
inline std::function<Eigen::VectorXd(double)> exact_constant_system(const Eigen::MatrixXd& a,
                                                                    const Eigen::VectorXd& f, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("exact oracle: eps must be positive");
    }
    if (f.size() != a.rows()) {
        throw std::invalid_argument("exact oracle: forcing size mismatch");
    }
    const auto es = detail::real_positive_eigensystem(a);
    const Eigen::VectorXd g = es.vectors_lu.solve(f);
    const Eigen::VectorXd k = (es.lambda / eps).cwiseSqrt();
    return [g, k, lambda = es.lambda, p = es.vectors](double x) {
        Eigen::VectorXd z(g.size());
        for (Eigen::Index m = 0; m < g.size(); ++m) {
            const double km = k(m);
            const double ratio = (std::exp(km * (x - 1.0)) + std::exp(-km * x)) / (1.0 + std::exp(-km));
            z(m) = g(m) / lambda(m) * (1.0 - ratio);
        }
        return Eigen::VectorXd(p * z);
    };
}

/// Closed form for affine forcing f0 + f1 x and arbitrary boundary vectors:
/// y = A^{-1}(f0 + f1 x) + P z with each mode z solving -eps z'' + l z = 0,
/// z = w0 sinh(k(1-x))/sinh(k) + w1 sinh(kx)/sinh(k).
inline std::function<Eigen::VectorXd(double)> exact_affine_system(const Eigen::MatrixXd& a,
                                                                  const Eigen::VectorXd& f0,
                                                                  const Eigen::VectorXd& f1, double eps,
                                                                  const Eigen::VectorXd& y0,
                                                                  const Eigen::VectorXd& y1) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("exact oracle: eps must be positive");
    }
    const auto n = a.rows();
    if (f0.size() != n || f1.size() != n || y0.size() != n || y1.size() != n) {
        throw std::invalid_argument("exact oracle: vector size mismatch");
    }
    const auto es = detail::real_positive_eigensystem(a);
    const Eigen::PartialPivLU<Eigen::MatrixXd> alu(a);
    const Eigen::VectorXd c0 = alu.solve(f0);
    const Eigen::VectorXd c1 = alu.solve(f1);
    const Eigen::VectorXd w0 = es.vectors_lu.solve(y0 - c0);
    const Eigen::VectorXd w1 = es.vectors_lu.solve(y1 - c0 - c1);
    const Eigen::VectorXd k = (es.lambda / eps).cwiseSqrt();
    // sinh(k s) / sinh(k) without overflow.
    auto shape = [](double km, double s) {
        return std::exp(-km * (1.0 - s)) * std::expm1(-2.0 * km * s) / std::expm1(-2.0 * km);
    };
    return [=, p = es.vectors](double x) {
        Eigen::VectorXd z(n);
        for (Eigen::Index m = 0; m < n; ++m) {
            z(m) = w0(m) * shape(k(m), 1.0 - x) + w1(m) * shape(k(m), x);
        }
        return Eigen::VectorXd(c0 + c1 * x + p * z);
    };
}

}  // namespace scemrd
