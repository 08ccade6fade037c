#pragma once

#include "scemrd/grid_function.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace scemrd {

/// A real-valued coefficient or forcing term on [0, 1].
class ScalarField {
public:
    ScalarField() : fn_([](double) { return 0.0; }) {}
    ScalarField(std::function<double(double)> fn) : fn_(std::move(fn)) {}  // NOLINT(implicit)
    ScalarField(double value) : fn_([value](double) { return value; }) {}  // NOLINT(implicit)

    double operator()(double x) const { return fn_(x); }

private:
    std::function<double(double)> fn_;
};

/// The coupled system
///
///     -diag(diffusion) y''(x) + A(x) y(x) = f(x),   x in (0, 1),
///     y(0) = left_bc,  y(1) = right_bc.
///
/// `coeff` is stored row-major, so coeff[i*n + j] is a_ij.
class ReactionDiffusionSystem {
public:
    ReactionDiffusionSystem(std::size_t n,
                            std::vector<ScalarField> coeff,
                            std::vector<ScalarField> forcing,
                            std::vector<double> diffusion,
                            Eigen::VectorXd left_bc,
                            Eigen::VectorXd right_bc)
        : n_(n),
          coeff_(std::move(coeff)),
          forcing_(std::move(forcing)),
          diffusion_(std::move(diffusion)),
          left_bc_(std::move(left_bc)),
          right_bc_(std::move(right_bc)) {
        if (n_ < 2) {
            throw std::invalid_argument("ReactionDiffusionSystem: need at least two components");
        }
        if (coeff_.size() != n_ * n_ || forcing_.size() != n_ || diffusion_.size() != n_ ||
            static_cast<std::size_t>(left_bc_.size()) != n_ ||
            static_cast<std::size_t>(right_bc_.size()) != n_) {
            throw std::invalid_argument("ReactionDiffusionSystem: dimension mismatch");
        }
        for (double d : diffusion_) {
            if (!(d > 0.0) || !std::isfinite(d)) {
                throw std::invalid_argument("ReactionDiffusionSystem: diffusion entries must be positive");
            }
        }
    }

    /// Constant-coefficient convenience constructor with zero boundary values.
    static ReactionDiffusionSystem constant(const Eigen::MatrixXd& a, const Eigen::VectorXd& f,
                                            std::vector<double> diffusion) {
        const auto n = static_cast<std::size_t>(a.rows());
        if (a.cols() != a.rows() || static_cast<std::size_t>(f.size()) != n) {
            throw std::invalid_argument("ReactionDiffusionSystem::constant: dimension mismatch");
        }
        std::vector<ScalarField> coeff;
        coeff.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                coeff.emplace_back(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
        std::vector<ScalarField> forcing;
        for (std::size_t i = 0; i < n; ++i) {
            forcing.emplace_back(f(static_cast<Eigen::Index>(i)));
        }
        return {n, std::move(coeff), std::move(forcing), std::move(diffusion),
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
    }

    std::size_t size() const noexcept { return n_; }
    const std::vector<double>& diffusion() const noexcept { return diffusion_; }
    const Eigen::VectorXd& left_bc() const noexcept { return left_bc_; }
    const Eigen::VectorXd& right_bc() const noexcept { return right_bc_; }

    double coeff(std::size_t i, std::size_t j, double x) const { return coeff_[i * n_ + j](x); }
    double forcing(std::size_t i, double x) const { return forcing_[i](x); }

    Eigen::MatrixXd matrix_at(double x) const {
        const auto n = static_cast<Eigen::Index>(n_);
        Eigen::MatrixXd a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                a(i, j) = coeff_[static_cast<std::size_t>(i * n + j)](x);
            }
        }
        return a;
    }

    Eigen::VectorXd forcing_at(double x) const {
        Eigen::VectorXd f(static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            f(static_cast<Eigen::Index>(i)) = forcing_[i](x);
        }
        return f;
    }

    /// Same coefficients and data, new diffusion vector.
    ReactionDiffusionSystem with_diffusion(std::vector<double> diffusion) const {
        return {n_, coeff_, forcing_, std::move(diffusion), left_bc_, right_bc_};
    }

private:
    std::size_t n_;
    std::vector<ScalarField> coeff_;
    std::vector<ScalarField> forcing_;
    std::vector<double> diffusion_;
    Eigen::VectorXd left_bc_;
    Eigen::VectorXd right_bc_;
};

struct AssumptionReport {
    bool diagonally_dominant = false;
    bool offdiag_nonpositive = false;
    /// Minimum row sum of A(x) over the sample grid.
    double delta = 0.0;
    std::size_t sample_count = 0;

    bool holds() const noexcept { return diagonally_dominant && offdiag_nonpositive; }
};

/// Checks strict diagonal dominance and non-positive off-diagonals of A(x) on
/// `samples` equally spaced points of [0, 1] (both endpoints included).
inline AssumptionReport validate_assumptions(const ReactionDiffusionSystem& sys,
                                             std::size_t samples = 1001) {
    if (samples < 2) {
        throw std::invalid_argument("validate_assumptions: need at least two samples");
    }
    AssumptionReport report;
    report.diagonally_dominant = true;
    report.offdiag_nonpositive = true;
    report.delta = std::numeric_limits<double>::infinity();
    report.sample_count = samples;

    const std::size_t n = sys.size();
    for (double x : uniform_grid(samples)) {
        for (std::size_t i = 0; i < n; ++i) {
            double off = 0.0;
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double a = sys.coeff(i, j, x);
                row += a;
                if (j == i) {
                    continue;
                }
                off += std::abs(a);
                if (a > 0.0) {
                    report.offdiag_nonpositive = false;
                }
            }
            if (!(sys.coeff(i, i, x) > off)) {
                report.diagonally_dominant = false;
            }
            report.delta = std::min(report.delta, row);
        }
    }
    return report;
}

/// max over [0,1] and components of |f_i(x)|, sampled.
inline double forcing_norm(const ReactionDiffusionSystem& sys, std::size_t samples = 1001) {
    double m = 0.0;
    for (double x : uniform_grid(samples)) {
        m = std::max(m, sys.forcing_at(x).cwiseAbs().maxCoeff());
    }
    return m;
}

/// (1/delta) ||f|| + ||y(0)|| + ||y(1)|| in the maximum norm.
inline double stability_bound(const ReactionDiffusionSystem& sys, const AssumptionReport& report,
                              double sample_f_norm) {
    if (!(report.delta > 0.0)) {
        throw std::invalid_argument("stability_bound: delta must be positive");
    }
    const double left = sys.left_bc().size() ? sys.left_bc().cwiseAbs().maxCoeff() : 0.0;
    const double right = sys.right_bc().size() ? sys.right_bc().cwiseAbs().maxCoeff() : 0.0;
    return sample_f_norm / report.delta + left + right;
}

/// Discrete a-posteriori check of the maximum principle on the candidate's own
/// grid: if the boundary values and -diag(d) y'' + A y (central differences)
/// are >= -tol, the candidate must be >= -tol everywhere. A failed hypothesis
/// makes the check pass vacuously.
///
/// The sign/dominance assumptions on A are the caller's precondition; they are
/// not re-validated here.
inline bool check_max_principle(const ReactionDiffusionSystem& sys, const GridFunction& candidate,
                                double tol) {
    const auto& x = candidate.grid();
    const auto& y = candidate.values();
    if (x.size() < 3) {
        throw std::invalid_argument("check_max_principle: need at least three grid points");
    }
    if (static_cast<std::size_t>(candidate.components()) != sys.size()) {
        throw std::invalid_argument("check_max_principle: component count mismatch");
    }
    constexpr double kCover = 1e-12;
    if (std::abs(x.front()) > kCover || std::abs(x.back() - 1.0) > kCover) {
        throw std::invalid_argument("check_max_principle: grid must cover [0, 1]");
    }

    const auto n = static_cast<Eigen::Index>(sys.size());
    const auto last = static_cast<Eigen::Index>(x.size() - 1);
    bool hypothesis = y.row(0).minCoeff() >= -tol && y.row(last).minCoeff() >= -tol;

    for (Eigen::Index j = 1; hypothesis && j < last; ++j) {
        const double hm = x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j - 1)];
        const double hp = x[static_cast<std::size_t>(j + 1)] - x[static_cast<std::size_t>(j)];
        const Eigen::MatrixXd a = sys.matrix_at(x[static_cast<std::size_t>(j)]);
        const Eigen::VectorXd yj = y.row(j).transpose();
        const Eigen::VectorXd ay = a * yj;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d2 = 2.0 * ((y(j + 1, i) - y(j, i)) / hp - (y(j, i) - y(j - 1, i)) / hm) / (hp + hm);
            const double ly = -sys.diffusion()[static_cast<std::size_t>(i)] * d2 + ay(i);
            if (ly < -tol) {
                hypothesis = false;
                break;
            }
        }
    }
    if (!hypothesis) {
        return true;
    }
    return y.minCoeff() >= -tol;
}

}  // namespace scemrd
