#pragma once

#include "scemrd/banded_lu.hpp"
#include "scemrd/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scemrd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Two-point boundary-value problem u' = rhs(t, u) on [a, b] with
/// bc(u(a), u(b)) = 0. The Jacobian callbacks are optional; finite
/// differences are used when they are empty.
struct FirstOrderBvp {
    std::size_t dim = 0;
    std::function<Vector(double, const Vector&)> rhs;
    std::function<Vector(const Vector&, const Vector&)> bc;
    double a = 0.0;
    double b = 1.0;

    /// d rhs / du, dim x dim.
    std::function<Matrix(double, const Vector&)> rhs_jacobian;
    /// (d bc / du(a), d bc / du(b)), each dim x dim.
    std::function<std::pair<Matrix, Matrix>(const Vector&, const Vector&)> bc_jacobian;
};

/// Strictly increasing node vector t_0 = a < ... < t_N = b.
class Mesh {
public:
    explicit Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2) {
            throw std::invalid_argument("Mesh: need at least two nodes");
        }
        for (std::size_t k = 1; k < nodes_.size(); ++k) {
            if (!(nodes_[k] > nodes_[k - 1])) {
                throw std::invalid_argument("Mesh: nodes must be strictly increasing");
            }
        }
    }

    static Mesh uniform(double a, double b, std::size_t points) {
        if (points < 2 || !(b > a)) {
            throw std::invalid_argument("Mesh::uniform: need b > a and at least two points");
        }
        std::vector<double> t(points);
        const double n = static_cast<double>(points - 1);
        for (std::size_t k = 0; k < points; ++k) {
            t[k] = a + (b - a) * (static_cast<double>(k) / n);
        }
        t.front() = a;
        t.back() = b;
        return Mesh(std::move(t));
    }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    std::size_t points() const noexcept { return nodes_.size(); }
    std::size_t intervals() const noexcept { return nodes_.size() - 1; }
    double front() const noexcept { return nodes_.front(); }
    double back() const noexcept { return nodes_.back(); }

private:
    std::vector<double> nodes_;
};

struct SolverConfig {
    double residual_tol = 1e-6;
    /// Newton stops once ||step||_inf / (1 + ||u||_inf) falls below this.
    double newton_tol = 1e-10;
    int max_newton = 50;
    std::size_t max_mesh_points = 100000;
    std::size_t initial_mesh_points = 1000;
    /// Initial iterate; empty means the constant vector of ones.
    std::function<Vector(double)> initial_guess;
    /// When false the initial mesh is used as is and no residual control is applied.
    bool adapt = true;
};

/// Cubic Hermite (C1) collocation solution on a mesh. Between nodes the
/// interpolant is the per-subinterval three-stage Lobatto IIIa polynomial.
class CollocationSolution {
public:
    CollocationSolution(Mesh mesh, Matrix node_values, Matrix node_slopes, double max_residual,
                        int newton_iterations, int refinements)
        : mesh_(std::move(mesh)),
          values_(std::move(node_values)),
          slopes_(std::move(node_slopes)),
          max_residual_(max_residual),
          newton_iterations_(newton_iterations),
          refinements_(refinements) {}

    const Mesh& mesh() const noexcept { return mesh_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    /// Column k holds u(t_k).
    const Matrix& node_values() const noexcept { return values_; }
    /// Column k holds rhs(t_k, u(t_k)).
    const Matrix& node_slopes() const noexcept { return slopes_; }
    double max_residual() const noexcept { return max_residual_; }
    int newton_iterations() const noexcept { return newton_iterations_; }
    int refinements() const noexcept { return refinements_; }
    double a() const noexcept { return mesh_.front(); }
    double b() const noexcept { return mesh_.back(); }

    /// Interpolant value at t in [a, b].
    Vector operator()(double t) const {
        Vector out(values_.rows());
        interpolate(t, out, nullptr);
        return out;
    }

    /// Interpolant derivative at t in [a, b].
    Vector derivative(double t) const {
        Vector v(values_.rows());
        Vector d(values_.rows());
        interpolate(t, v, &d);
        return d;
    }

    /// Row p holds the interpolant at points[p].
    Matrix evaluate(std::span<const double> points) const {
        Matrix out(static_cast<Eigen::Index>(points.size()), values_.rows());
        Vector v(values_.rows());
        for (std::size_t p = 0; p < points.size(); ++p) {
            interpolate(points[p], v, nullptr);
            out.row(static_cast<Eigen::Index>(p)) = v.transpose();
        }
        return out;
    }

private:
    void interpolate(double t, Vector& value, Vector* slope) const {
        const auto& x = mesh_.nodes();
        if (!(t >= x.front() && t <= x.back())) {
            throw std::out_of_range("CollocationSolution: point " + std::to_string(t) +
                                    " outside [" + std::to_string(x.front()) + ", " +
                                    std::to_string(x.back()) + "]");
        }
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = static_cast<std::size_t>(it - x.begin());
        i = i == 0 ? 0 : i - 1;
        if (i >= x.size() - 1) {
            i = x.size() - 2;
        }
        const auto ci = static_cast<Eigen::Index>(i);
        if (t == x[i] || t == x[i + 1]) {
            const Eigen::Index k = t == x[i] ? ci : ci + 1;
            value = values_.col(k);
            if (slope) {
                *slope = slopes_.col(k);
            }
            return;
        }
        const double h = x[i + 1] - x[i];
        const double s = (t - x[i]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        value = (2 * s3 - 3 * s2 + 1) * values_.col(ci) + (-2 * s3 + 3 * s2) * values_.col(ci + 1) +
                h * ((s3 - 2 * s2 + s) * slopes_.col(ci) + (s3 - s2) * slopes_.col(ci + 1));
        if (slope) {
            *slope = (6 * s2 - 6 * s) / h * (values_.col(ci) - values_.col(ci + 1)) +
                     (3 * s2 - 4 * s + 1) * slopes_.col(ci) + (3 * s2 - 2 * s) * slopes_.col(ci + 1);
        }
    }

    Mesh mesh_;
    Matrix values_;
    Matrix slopes_;
    double max_residual_;
    int newton_iterations_;
    int refinements_;
};

namespace detail {

inline Matrix fd_rhs_jacobian(const FirstOrderBvp& bvp, double t, const Vector& u, const Vector& fu) {
    (void)fu;
    const auto n = static_cast<Eigen::Index>(bvp.dim);
    Matrix j(n, n);
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    Vector up = u;
    for (Eigen::Index c = 0; c < n; ++c) {
        const double step = base * std::max(1.0, std::abs(u(c)));
        up(c) = u(c) + step;
        const Vector fp = bvp.rhs(t, up);
        up(c) = u(c) - step;
        const Vector fm = bvp.rhs(t, up);
        up(c) = u(c);
        j.col(c) = (fp - fm) / (2 * step);
    }
    return j;
}

inline std::pair<Matrix, Matrix> bc_jacobian(const FirstOrderBvp& bvp, const Vector& ua, const Vector& ub) {
    if (bvp.bc_jacobian) {
        return bvp.bc_jacobian(ua, ub);
    }
    const auto n = static_cast<Eigen::Index>(bvp.dim);
    Matrix ja(n, n);
    Matrix jb(n, n);
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    Vector pa = ua;
    Vector pb = ub;
    for (Eigen::Index c = 0; c < n; ++c) {
        const double sa = base * std::max(1.0, std::abs(ua(c)));
        pa(c) = ua(c) + sa;
        const Vector fa = bvp.bc(pa, ub);
        pa(c) = ua(c) - sa;
        const Vector ga = bvp.bc(pa, ub);
        pa(c) = ua(c);
        ja.col(c) = (fa - ga) / (2 * sa);

        const double sb = base * std::max(1.0, std::abs(ub(c)));
        pb(c) = ub(c) + sb;
        const Vector fb = bvp.bc(ua, pb);
        pb(c) = ub(c) - sb;
        const Vector gb = bvp.bc(ua, pb);
        pb(c) = ub(c);
        jb.col(c) = (fb - gb) / (2 * sb);
    }
    return {ja, jb};
}

struct BoundaryRows {
    std::vector<Eigen::Index> left;
    std::vector<Eigen::Index> right;
    bool separated = true;
};

inline BoundaryRows classify_boundary_rows(const Matrix& ja, const Matrix& jb) {
    BoundaryRows rows;
    for (Eigen::Index r = 0; r < ja.rows(); ++r) {
        const bool uses_left = (ja.row(r).array() != 0.0).any();
        const bool uses_right = (jb.row(r).array() != 0.0).any();
        if (uses_left && uses_right) {
            rows.separated = false;
        }
        if (uses_right && !uses_left) {
            rows.right.push_back(r);
        } else {
            rows.left.push_back(r);
        }
    }
    return rows;
}

struct CoupledBoundary {};

/// Global collocation system on a fixed mesh.
class CollocationSystem {
public:
    CollocationSystem(const FirstOrderBvp& bvp, const std::vector<double>& t) : bvp_(bvp), t_(t) {}

    Matrix slopes(const Matrix& y) const {
        Matrix f(y.rows(), y.cols());
        for (Eigen::Index k = 0; k < y.cols(); ++k) {
            f.col(k) = bvp_.rhs(t_[static_cast<std::size_t>(k)], y.col(k));
        }
        return f;
    }

    Matrix rhs_jacobian(double t, const Vector& u, const Vector& fu) const {
        return bvp_.rhs_jacobian ? bvp_.rhs_jacobian(t, u) : fd_rhs_jacobian(bvp_, t, u, fu);
    }

    /// Collocation defects (dim x N) followed by the boundary residual.
    std::pair<Matrix, Vector> residual(const Matrix& y) const {
        const Matrix f = slopes(y);
        const Eigen::Index nint = y.cols() - 1;
        Matrix phi(y.rows(), nint);
        for (Eigen::Index i = 0; i < nint; ++i) {
            const double h = t_[static_cast<std::size_t>(i + 1)] - t_[static_cast<std::size_t>(i)];
            const double tm = t_[static_cast<std::size_t>(i)] + 0.5 * h;
            const Vector ym = 0.5 * (y.col(i) + y.col(i + 1)) - (h / 8) * (f.col(i + 1) - f.col(i));
            const Vector fm = bvp_.rhs(tm, ym);
            phi.col(i) = y.col(i + 1) - y.col(i) - (h / 6) * (f.col(i) + 4 * fm + f.col(i + 1));
        }
        return {phi, bvp_.bc(y.col(0), y.col(nint))};
    }

    /// Newton step for the current iterate: solves J * step = -F.
    /// Throws CoupledBoundary if a boundary row touches both ends.
    Matrix newton_step(const Matrix& y, const Matrix& phi, const Vector& bcres) const {
        const auto n = static_cast<std::size_t>(y.rows());
        const auto nint = static_cast<std::size_t>(y.cols() - 1);
        const auto [ja, jb] = bc_jacobian(bvp_, y.col(0), y.col(static_cast<Eigen::Index>(nint)));
        const BoundaryRows rows = classify_boundary_rows(ja, jb);
        if (!rows.separated) {
            throw CoupledBoundary{};
        }
        const std::size_t p = rows.left.size();
        const std::size_t size = n * (nint + 1);
        BandedMatrix jac(size, n - 1 + p, 2 * n - 1 - std::min(p, 2 * n - 1));
        Vector rhs(static_cast<Eigen::Index>(size));

        for (std::size_t r = 0; r < p; ++r) {
            const Eigen::Index br = rows.left[r];
            rhs(static_cast<Eigen::Index>(r)) = -bcres(br);
            jac.add_block(r, 0, ja.row(br));
        }

        const Matrix f = slopes(y);
        const Matrix eye = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Matrix ji = rhs_jacobian(t_[0], y.col(0), f.col(0));
        for (std::size_t i = 0; i < nint; ++i) {
            const auto ci = static_cast<Eigen::Index>(i);
            const double h = t_[i + 1] - t_[i];
            const double tm = t_[i] + 0.5 * h;
            const Vector ym = 0.5 * (y.col(ci) + y.col(ci + 1)) - (h / 8) * (f.col(ci + 1) - f.col(ci));
            const Vector fm = bvp_.rhs(tm, ym);
            const Matrix jm = rhs_jacobian(tm, ym, fm);
            const Matrix jn = rhs_jacobian(t_[i + 1], y.col(ci + 1), f.col(ci + 1));
            const Matrix dleft = -eye - (h / 6) * (ji + 4 * jm * (0.5 * eye + (h / 8) * ji));
            const Matrix dright = eye - (h / 6) * (jn + 4 * jm * (0.5 * eye - (h / 8) * jn));
            const std::size_t row0 = p + i * n;
            jac.add_block(row0, i * n, dleft);
            jac.add_block(row0, (i + 1) * n, dright);
            rhs.segment(static_cast<Eigen::Index>(row0), static_cast<Eigen::Index>(n)) = -phi.col(ci);
            ji = jn;
        }

        const std::size_t rrow0 = p + nint * n;
        for (std::size_t k = 0; k < rows.right.size(); ++k) {
            const Eigen::Index br = rows.right[k];
            rhs(static_cast<Eigen::Index>(rrow0 + k)) = -bcres(br);
            jac.add_block(rrow0 + k, nint * n, jb.row(br));
        }

        Vector step;
        try {
            step = BandedLU(std::move(jac)).solve(rhs);
        } catch (const std::runtime_error& e) {
            throw NewtonDivergence(std::string("collocation Jacobian is singular: ") + e.what());
        }
        return Eigen::Map<const Matrix>(step.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(nint + 1));
    }

private:
    const FirstOrderBvp& bvp_;
    const std::vector<double>& t_;
};

inline double sum_squares(const Matrix& phi, const Vector& bcres) {
    return phi.squaredNorm() + bcres.squaredNorm();
}

/// Damped Newton on a fixed mesh. Returns the converged nodal values.
inline Matrix newton_solve(const FirstOrderBvp& bvp, const std::vector<double>& t, Matrix y,
                           const SolverConfig& cfg, int& iterations) {
    const CollocationSystem sys(bvp, t);
    auto [phi, bcres] = sys.residual(y);
    double fnorm = sum_squares(phi, bcres);
    for (int it = 1; it <= cfg.max_newton; ++it) {
        iterations = it;
        const Matrix step = sys.newton_step(y, phi, bcres);
        const double scale = 1.0 + y.cwiseAbs().maxCoeff();
        const double step_norm = step.cwiseAbs().maxCoeff() / scale;

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 10; ++halving) {
            const Matrix trial = y + lambda * step;
            auto [tphi, tbc] = sys.residual(trial);
            const double tnorm = sum_squares(tphi, tbc);
            if (std::isfinite(tnorm) && (tnorm <= fnorm || lambda * step_norm <= cfg.newton_tol)) {
                y = trial;
                phi = std::move(tphi);
                bcres = std::move(tbc);
                fnorm = tnorm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            throw NewtonDivergence("damped Newton found no decreasing step at iteration " +
                                   std::to_string(it));
        }
        if (lambda * step_norm <= cfg.newton_tol) {
            return y;
        }
    }
    throw NewtonDivergence("Newton did not converge within " + std::to_string(cfg.max_newton) +
                           " iterations");
}

// 5-point Gauss-Legendre on [0, 1].
inline constexpr std::array<double, 5> kGaussNodes = {
    0.0469100770306680, 0.2307653449471585, 0.5, 0.7692346550528415, 0.9530899229693320};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.1184634425280945, 0.2393143352496832, 0.2844444444444444, 0.2393143352496832,
    0.1184634425280945};

inline std::vector<double> interval_residuals(const FirstOrderBvp& bvp, const CollocationSolution& sol) {
    const auto& t = sol.mesh().nodes();
    std::vector<double> res(sol.mesh().intervals());
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double h = t[i + 1] - t[i];
        double acc = 0.0;
        for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
            const double tq = t[i] + kGaussNodes[q] * h;
            const Vector s = sol(tq);
            const Vector ds = sol.derivative(tq);
            const Vector f = bvp.rhs(tq, s);
            const double r = ((ds - f).array().abs() / (1.0 + f.array().abs())).maxCoeff();
            acc += kGaussWeights[q] * r * r;
        }
        res[i] = std::sqrt(acc);
    }
    return res;
}

inline FirstOrderBvp augment_coupled(const FirstOrderBvp& bvp) {
    const auto n = static_cast<Eigen::Index>(bvp.dim);
    FirstOrderBvp aug;
    aug.dim = 2 * bvp.dim;
    aug.a = bvp.a;
    aug.b = bvp.b;
    aug.rhs = [bvp, n](double t, const Vector& z) {
        Vector out = Vector::Zero(2 * n);
        out.head(n) = bvp.rhs(t, z.head(n));
        return out;
    };
    aug.rhs_jacobian = [bvp, n](double t, const Vector& z) {
        Matrix j = Matrix::Zero(2 * n, 2 * n);
        const Vector u = z.head(n);
        j.topLeftCorner(n, n) = bvp.rhs_jacobian ? bvp.rhs_jacobian(t, u)
                                                 : fd_rhs_jacobian(bvp, t, u, bvp.rhs(t, u));
        return j;
    };
    // z = (u, w) with w' = 0 carrying u(a) to the right end.
    aug.bc = [bvp, n](const Vector& za, const Vector& zb) {
        Vector out(2 * n);
        out.head(n) = za.tail(n) - za.head(n);
        out.tail(n) = bvp.bc(zb.tail(n), zb.head(n));
        return out;
    };
    aug.bc_jacobian = [bvp, n](const Vector& za, const Vector& zb) {
        (void)za;
        const auto [ba, bb] = bc_jacobian(bvp, zb.tail(n), zb.head(n));
        Matrix ja = Matrix::Zero(2 * n, 2 * n);
        Matrix jb = Matrix::Zero(2 * n, 2 * n);
        ja.topLeftCorner(n, n) = -Matrix::Identity(n, n);
        ja.topRightCorner(n, n) = Matrix::Identity(n, n);
        jb.bottomLeftCorner(n, n) = bb;
        jb.bottomRightCorner(n, n) = ba;
        return std::pair<Matrix, Matrix>{ja, jb};
    };
    return aug;
}

inline void check_problem(const FirstOrderBvp& bvp, const SolverConfig& cfg) {
    if (bvp.dim == 0 || !bvp.rhs || !bvp.bc) {
        throw std::invalid_argument("FirstOrderBvp: dim, rhs and bc are required");
    }
    if (!(bvp.b > bvp.a) || !std::isfinite(bvp.a) || !std::isfinite(bvp.b)) {
        throw std::invalid_argument("FirstOrderBvp: interval must satisfy a < b");
    }
    if (!(cfg.residual_tol > 0) || !(cfg.newton_tol > 0) || cfg.max_newton <= 0 ||
        cfg.max_mesh_points < 2 || cfg.initial_mesh_points < 2) {
        throw std::invalid_argument("SolverConfig: tolerances and counts must be positive");
    }
}

}  // namespace detail

/// Per-subinterval scaled residual ||u'(t) - rhs(t, u(t))|| of the interpolant,
/// RMS over 5-point Gauss quadrature, with componentwise scaling 1 / (1 + |rhs|).
inline std::vector<double> estimate_residual(const FirstOrderBvp& bvp, const CollocationSolution& sol) {
    return detail::interval_residuals(bvp, sol);
}

/// Solves the BVP on a given starting mesh with three-stage Lobatto IIIa
/// collocation. With cfg.adapt the mesh is refined by halving every
/// subinterval whose residual exceeds cfg.residual_tol.
inline CollocationSolution solve(const FirstOrderBvp& bvp, const Mesh& start, const SolverConfig& cfg) {
    detail::check_problem(bvp, cfg);
    if (start.front() != bvp.a || start.back() != bvp.b) {
        throw std::invalid_argument("solve: mesh endpoints must match the interval");
    }
    const auto n = static_cast<Eigen::Index>(bvp.dim);
    auto guess = [&](double t) -> Vector {
        if (!cfg.initial_guess) {
            return Vector::Ones(n);
        }
        Vector g = cfg.initial_guess(t);
        if (g.size() != n) {
            throw std::invalid_argument("solve: initial guess has wrong dimension");
        }
        return g;
    };

    auto solve_augmented = [&]() {
        const FirstOrderBvp aug = detail::augment_coupled(bvp);
        SolverConfig acfg = cfg;
        const Vector ua = guess(bvp.a);
        acfg.initial_guess = [guess, ua, n](double t) {
            Vector z(2 * n);
            z.head(n) = guess(t);
            z.tail(n) = ua;
            return z;
        };
        const CollocationSolution full = solve(aug, start, acfg);
        return CollocationSolution(full.mesh(), full.node_values().topRows(n),
                                   full.node_slopes().topRows(n), full.max_residual(),
                                   full.newton_iterations(), full.refinements());
    };

    {
        const Vector ga = guess(bvp.a);
        const Vector gb = guess(bvp.b);
        if (bvp.bc(ga, gb).size() != n || bvp.rhs(bvp.a, ga).size() != n) {
            throw std::invalid_argument("FirstOrderBvp: rhs and bc must return dim components");
        }
        const auto [ja, jb] = detail::bc_jacobian(bvp, ga, gb);
        if (ja.rows() != n || ja.cols() != n || jb.rows() != n || jb.cols() != n) {
            throw std::invalid_argument("FirstOrderBvp: bc jacobian must be dim x dim");
        }
        if (!detail::classify_boundary_rows(ja, jb).separated) {
            return solve_augmented();
        }
    }

    std::vector<double> t = start.nodes();
    Matrix y(n, static_cast<Eigen::Index>(t.size()));
    for (std::size_t k = 0; k < t.size(); ++k) {
        y.col(static_cast<Eigen::Index>(k)) = guess(t[k]);
    }

    int total_newton = 0;
    int refinements = 0;
    for (;;) {
        int iterations = 0;
        try {
            y = detail::newton_solve(bvp, t, std::move(y), cfg, iterations);
        } catch (const detail::CoupledBoundary&) {
            return solve_augmented();
        }
        total_newton += iterations;
        const detail::CollocationSystem sys(bvp, t);
        Matrix f = sys.slopes(y);
        CollocationSolution sol(Mesh(t), y, std::move(f), 0.0, total_newton, refinements);
        const std::vector<double> res = detail::interval_residuals(bvp, sol);
        const double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
        if (!cfg.adapt || worst <= cfg.residual_tol) {
            return CollocationSolution(sol.mesh(), sol.node_values(), sol.node_slopes(), worst,
                                       total_newton, refinements);
        }

        std::vector<double> refined;
        refined.reserve(2 * t.size());
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            refined.push_back(t[i]);
            if (res[i] > cfg.residual_tol) {
                refined.push_back(t[i] + 0.5 * (t[i + 1] - t[i]));
            }
        }
        refined.push_back(t.back());
        if (refined.size() > cfg.max_mesh_points) {
            throw MeshOverflow("residual " + std::to_string(worst) + " above tolerance " +
                               std::to_string(cfg.residual_tol) + " with " + std::to_string(t.size()) +
                               " points; refinement would exceed " + std::to_string(cfg.max_mesh_points));
        }
        Matrix next(n, static_cast<Eigen::Index>(refined.size()));
        for (std::size_t k = 0; k < refined.size(); ++k) {
            next.col(static_cast<Eigen::Index>(k)) = sol(refined[k]);
        }
        t = std::move(refined);
        y = std::move(next);
        ++refinements;
    }
}

/// Solves on a uniform starting mesh of cfg.initial_mesh_points points.
inline CollocationSolution solve(const FirstOrderBvp& bvp, const SolverConfig& cfg = {}) {
    detail::check_problem(bvp, cfg);
    return solve(bvp, Mesh::uniform(bvp.a, bvp.b, cfg.initial_mesh_points), cfg);
}

/// Interpolant values at `points` (row p for points[p]).
inline Matrix evaluate(const CollocationSolution& sol, std::span<const double> points) {
    return sol.evaluate(points);
}

}  // namespace scemrd
