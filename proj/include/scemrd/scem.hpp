#pragma once

#include "scemrd/collocation.hpp"
#include "scemrd/errors.hpp"
#include "scemrd/system_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scemrd {

enum class Side { Left, Right };

/// Right-hand side used in the stretched complementary equations.
enum class LayerForcing {
    /// -Psi'' + A Psi = 0: Psi is the pure layer correction, and the
    /// composite is y_out + (Psi_L + Psi_R) / 2.
    Homogeneous,
    /// -Psi'' + A Psi = f: the forcing is carried into the layer equations.
    /// On symmetric data (y_out + Psi) / 2 is then the composite.
    Carried,
};

/// Which components receive boundary-layer corrections, and the common
/// perturbation parameter they share.
struct DiffusionPattern {
    double epsilon = 1.0;
    std::vector<std::size_t> layered;
    std::vector<std::size_t> unit;
};

/// All entries equal: every component is layered. Otherwise entries must be
/// 1 or one common value below 1; only the latter are layered. Two distinct
/// sub-unit parameters (nested sublayers) are rejected.
inline DiffusionPattern classify_diffusion(const ReactionDiffusionSystem& sys) {
    const auto& d = sys.diffusion();
    DiffusionPattern pat;
    bool all_equal = true;
    for (double v : d) {
        all_equal = all_equal && v == d.front();
    }
    if (all_equal) {
        pat.epsilon = d.front();
        for (std::size_t i = 0; i < d.size(); ++i) {
            pat.layered.push_back(i);
        }
        return pat;
    }
    std::optional<double> eps;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 1.0) {
            pat.unit.push_back(i);
            continue;
        }
        if (eps && *eps != d[i]) {
            throw UnsupportedProblem("unequal sub-unit diffusion parameters are not supported");
        }
        eps = d[i];
        pat.layered.push_back(i);
    }
    if (!(*eps < 1.0)) {
        throw UnsupportedProblem("mixed diffusion requires the non-unit parameter to be below 1");
    }
    pat.epsilon = *eps;
    return pat;
}

namespace detail {

inline Matrix submatrix(const Matrix& a, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                a(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    return out;
}

inline Vector subvector(const Vector& v, const std::vector<std::size_t>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
}

inline constexpr double kMaxCondition = 1e14;

inline Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& a, double x) {
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) {
        throw SingularReducedMatrix("reduced matrix is numerically singular at x = " + std::to_string(x));
    }
    return lu;
}

/// Second-order system -u'' + M(x) u = g(x) recast as interleaved (u_k, u_k').
/// `coord` maps the BVP variable to the physical coordinate where M and g
/// are evaluated.
template <typename MFn, typename GFn, typename CoordFn>
FirstOrderBvp second_order_bvp(std::size_t m, MFn mfn, GFn gfn, CoordFn coord, double a, double b,
                               Vector left_values, Vector right_values) {
    const auto mm = static_cast<Eigen::Index>(m);
    FirstOrderBvp bvp;
    bvp.dim = 2 * m;
    bvp.a = a;
    bvp.b = b;
    bvp.rhs = [=](double t, const Vector& z) {
        const double x = coord(t);
        const Matrix mat = mfn(x);
        const Vector g = gfn(x);
        Vector u(mm);
        for (Eigen::Index k = 0; k < mm; ++k) {
            u(k) = z(2 * k);
        }
        const Vector acc = mat * u - g;
        Vector out(2 * mm);
        for (Eigen::Index k = 0; k < mm; ++k) {
            out(2 * k) = z(2 * k + 1);
            out(2 * k + 1) = acc(k);
        }
        return out;
    };
    bvp.rhs_jacobian = [=](double t, const Vector&) {
        const Matrix mat = mfn(coord(t));
        Matrix j = Matrix::Zero(2 * mm, 2 * mm);
        for (Eigen::Index k = 0; k < mm; ++k) {
            j(2 * k, 2 * k + 1) = 1.0;
            for (Eigen::Index l = 0; l < mm; ++l) {
                j(2 * k + 1, 2 * l) = mat(k, l);
            }
        }
        return j;
    };
    bvp.bc = [=](const Vector& za, const Vector& zb) {
        Vector r(2 * mm);
        for (Eigen::Index k = 0; k < mm; ++k) {
            r(2 * k) = za(2 * k) - left_values(k);
            r(2 * k + 1) = zb(2 * k) - right_values(k);
        }
        return r;
    };
    bvp.bc_jacobian = [=](const Vector&, const Vector&) {
        Matrix ja = Matrix::Zero(2 * mm, 2 * mm);
        Matrix jb = Matrix::Zero(2 * mm, 2 * mm);
        for (Eigen::Index k = 0; k < mm; ++k) {
            ja(2 * k, 2 * k) = 1.0;
            jb(2 * k + 1, 2 * k) = 1.0;
        }
        return std::pair<Matrix, Matrix>{ja, jb};
    };
    return bvp;
}

}  // namespace detail

/// The reduced (eps = 0) solution. Layered components satisfy the algebraic
/// rows of A(x) y = f(x); unit-diffusion components, if any, come from the
/// reduced second-order problem solved on [0, 1].
class OuterSolution {
public:
    OuterSolution(std::shared_ptr<const ReactionDiffusionSystem> sys, DiffusionPattern pattern,
                  std::optional<CollocationSolution> unit_solution)
        : sys_(std::move(sys)), pattern_(std::move(pattern)), unit_(std::move(unit_solution)) {}

    Vector operator()(double x) const {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::out_of_range("OuterSolution: x outside [0, 1]");
        }
        const Matrix a = sys_->matrix_at(x);
        const Vector f = sys_->forcing_at(x);
        if (pattern_.unit.empty()) {
            return detail::checked_lu(a, x).solve(f);
        }
        const auto& s = pattern_.layered;
        const auto& u = pattern_.unit;
        Vector yu(static_cast<Eigen::Index>(u.size()));
        const Vector z = (*unit_)(x);
        for (std::size_t k = 0; k < u.size(); ++k) {
            yu(static_cast<Eigen::Index>(k)) = z(static_cast<Eigen::Index>(2 * k));
        }
        const Vector ys = detail::checked_lu(detail::submatrix(a, s, s), x)
                              .solve(detail::subvector(f, s) - detail::submatrix(a, s, u) * yu);
        Vector y(static_cast<Eigen::Index>(sys_->size()));
        for (std::size_t k = 0; k < s.size(); ++k) {
            y(static_cast<Eigen::Index>(s[k])) = ys(static_cast<Eigen::Index>(k));
        }
        for (std::size_t k = 0; k < u.size(); ++k) {
            y(static_cast<Eigen::Index>(u[k])) = yu(static_cast<Eigen::Index>(k));
        }
        return y;
    }

    std::size_t size() const noexcept { return sys_->size(); }
    const DiffusionPattern& pattern() const noexcept { return pattern_; }
    const ReactionDiffusionSystem& system() const noexcept { return *sys_; }
    std::shared_ptr<const ReactionDiffusionSystem> system_ptr() const noexcept { return sys_; }

private:
    std::shared_ptr<const ReactionDiffusionSystem> sys_;
    DiffusionPattern pattern_;
    std::optional<CollocationSolution> unit_;
};

/// Reduced problem. In the all-layered case this is the pointwise solve
/// A(x) y = f(x), evaluated lazily; `cfg` is only used when unit-diffusion
/// components need the reduced boundary-value solve.
inline OuterSolution solve_reduced(const ReactionDiffusionSystem& sys, const SolverConfig& cfg = {}) {
    auto shared = std::make_shared<const ReactionDiffusionSystem>(sys);
    DiffusionPattern pat = classify_diffusion(sys);
    if (pat.unit.empty()) {
        return OuterSolution(std::move(shared), std::move(pat), std::nullopt);
    }
    const auto s = pat.layered;
    const auto u = pat.unit;
    auto schur = [shared, s, u](double x) {
        const Matrix a = shared->matrix_at(x);
        const auto lu = detail::checked_lu(detail::submatrix(a, s, s), x);
        return Matrix(detail::submatrix(a, u, u) - detail::submatrix(a, u, s) * lu.solve(detail::submatrix(a, s, u)));
    };
    auto reduced_forcing = [shared, s, u](double x) {
        const Matrix a = shared->matrix_at(x);
        const Vector f = shared->forcing_at(x);
        const auto lu = detail::checked_lu(detail::submatrix(a, s, s), x);
        return Vector(detail::subvector(f, u) - detail::submatrix(a, u, s) * lu.solve(detail::subvector(f, s)));
    };
    FirstOrderBvp bvp = detail::second_order_bvp(
        u.size(), schur, reduced_forcing, [](double t) { return t; }, 0.0, 1.0,
        detail::subvector(sys.left_bc(), u), detail::subvector(sys.right_bc(), u));
    return OuterSolution(std::move(shared), std::move(pat), solve(bvp, cfg));
}

/// Complementary problem in a stretched variable, recast first-order with
/// interleaved unknowns (Psi_1, Psi_1', ..., Psi_m, Psi_m') over the layered
/// components.
struct LayerProblem {
    Side side = Side::Left;
    double epsilon = 1.0;
    /// [0, 1/sqrt(eps)] for Left, [-1/sqrt(eps), 0] for Right.
    double a = 0.0;
    double b = 1.0;
    FirstOrderBvp bvp;
    std::vector<std::size_t> components;
    /// Psi at the stretched image of the side's own endpoint.
    Vector physical_end_values;
    /// Psi at the opposite stretched endpoint.
    Vector far_end_values;
};

inline double stretched_length(double epsilon) { return 1.0 / std::sqrt(epsilon); }

/// Builds the left or right complementary problem. Boundary data is
/// bc - y_out at x = 0 and x = 1, mapped to the stretched endpoints;
/// coefficients are evaluated at the physical coordinate recovered from the
/// stretched one.
inline LayerProblem build_layer_problem(const ReactionDiffusionSystem& sys, const OuterSolution& outer,
                                        Side side, LayerForcing forcing = LayerForcing::Homogeneous) {
    const DiffusionPattern pat = classify_diffusion(sys);
    const double eps = pat.epsilon;
    const double len = stretched_length(eps);
    const double root = std::sqrt(eps);
    const auto s = pat.layered;
    const auto u = pat.unit;
    auto shared = std::make_shared<const ReactionDiffusionSystem>(sys);

    LayerProblem lp;
    lp.side = side;
    lp.epsilon = eps;
    lp.components = s;
    lp.a = side == Side::Left ? 0.0 : -len;
    lp.b = side == Side::Left ? len : 0.0;

    const Vector at0 = detail::subvector(Vector(sys.left_bc() - outer(0.0)), s);
    const Vector at1 = detail::subvector(Vector(sys.right_bc() - outer(1.0)), s);
    lp.physical_end_values = side == Side::Left ? at0 : at1;
    lp.far_end_values = side == Side::Left ? at1 : at0;

    auto mfn = [shared, s](double x) { return detail::submatrix(shared->matrix_at(x), s, s); };
    std::function<Vector(double)> gfn;
    if (forcing == LayerForcing::Homogeneous) {
        const auto m = static_cast<Eigen::Index>(s.size());
        gfn = [m](double) { return Vector(Vector::Zero(m)); };
    } else {
        gfn = [shared, outer, s, u](double x) {
            const Vector f = detail::subvector(shared->forcing_at(x), s);
            if (u.empty()) {
                return f;
            }
            const Matrix a = shared->matrix_at(x);
            return Vector(f - detail::submatrix(a, s, u) * detail::subvector(outer(x), u));
        };
    }
    std::function<double(double)> coord;
    if (side == Side::Left) {
        coord = [root](double t) { return std::clamp(root * t, 0.0, 1.0); };
    } else {
        coord = [root](double t) { return std::clamp(1.0 + root * t, 0.0, 1.0); };
    }
    lp.bvp = detail::second_order_bvp(s.size(), mfn, gfn, coord, lp.a, lp.b, at0, at1);
    return lp;
}

/// Uniformly valid first-iteration composite
///     y(x) = y_out(x) + [Psi_L(x / sqrt(eps)) + Psi_R((x - 1) / sqrt(eps))] / 2
/// on the layered components, y_out elsewhere.
class HybridApproximation {
public:
    HybridApproximation(OuterSolution outer, CollocationSolution left, CollocationSolution right,
                        double epsilon)
        : outer_(std::move(outer)), left_(std::move(left)), right_(std::move(right)),
          epsilon_(epsilon), length_(stretched_length(epsilon)) {
        const double slack = 1e-12 * length_;
        const std::size_t want = 2 * outer_.pattern().layered.size();
        if (left_.dim() != want || right_.dim() != want) {
            throw std::invalid_argument("assemble_composite: layer dimension does not match the layered components");
        }
        if (left_.a() != 0.0 || std::abs(left_.b() - length_) > slack || right_.b() != 0.0 ||
            std::abs(right_.a() + length_) > slack) {
            throw std::invalid_argument("assemble_composite: layer intervals do not match eps = " +
                                        std::to_string(epsilon));
        }
    }

    Vector operator()(double x) const {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::out_of_range("HybridApproximation: x outside [0, 1]");
        }
        Vector y = outer_(x);
        const double tl = std::min(x * length_, left_.b());
        const double tr = std::max((x - 1.0) * length_, right_.a());
        const Vector pl = left_(tl);
        const Vector pr = right_(tr);
        const auto& s = outer_.pattern().layered;
        for (std::size_t k = 0; k < s.size(); ++k) {
            const auto row = static_cast<Eigen::Index>(2 * k);
            y(static_cast<Eigen::Index>(s[k])) += 0.5 * (pl(row) + pr(row));
        }
        return y;
    }

    /// Row p holds the composite at xs[p].
    Matrix evaluate(std::span<const double> xs) const {
        Matrix out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(outer_.size()));
        for (std::size_t p = 0; p < xs.size(); ++p) {
            out.row(static_cast<Eigen::Index>(p)) = (*this)(xs[p]).transpose();
        }
        return out;
    }

    const OuterSolution& outer() const noexcept { return outer_; }
    const CollocationSolution& left_layer() const noexcept { return left_; }
    const CollocationSolution& right_layer() const noexcept { return right_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t size() const noexcept { return outer_.size(); }

private:
    OuterSolution outer_;
    CollocationSolution left_;
    CollocationSolution right_;
    double epsilon_;
    double length_;
};

inline HybridApproximation assemble_composite(OuterSolution outer, CollocationSolution left,
                                              CollocationSolution right, double eps) {
    return {std::move(outer), std::move(left), std::move(right), eps};
}

struct HybridOptions {
    SolverConfig solver;
    /// Throw AssumptionViolation when A(x) fails the sign/dominance checks;
    /// otherwise the report is kept on the result and solving proceeds.
    bool strict_assumptions = true;
    std::size_t assumption_samples = 1001;
};

struct HybridResult {
    HybridApproximation approximation;
    AssumptionReport assumptions;
};

/// Reduced solve, both layer solves, and the composite.
inline HybridResult hybrid_solve_checked(const ReactionDiffusionSystem& sys, const HybridOptions& opts) {
    AssumptionReport report = validate_assumptions(sys, opts.assumption_samples);
    if (opts.strict_assumptions && !report.holds()) {
        throw AssumptionViolation(std::string("A(x) violates ") +
                                  (report.diagonally_dominant ? "" : "strict diagonal dominance ") +
                                  (report.offdiag_nonpositive ? "" : "off-diagonal sign condition"));
    }
    OuterSolution outer = solve_reduced(sys, opts.solver);
    const LayerProblem left = build_layer_problem(sys, outer, Side::Left);
    const LayerProblem right = build_layer_problem(sys, outer, Side::Right);
    CollocationSolution ls = solve(left.bvp, opts.solver);
    CollocationSolution rs = solve(right.bvp, opts.solver);
    return {assemble_composite(std::move(outer), std::move(ls), std::move(rs), left.epsilon), report};
}

inline HybridApproximation hybrid_solve(const ReactionDiffusionSystem& sys, const SolverConfig& cfg = {}) {
    HybridOptions opts;
    opts.solver = cfg;
    return hybrid_solve_checked(sys, opts).approximation;
}

}  // namespace scemrd
