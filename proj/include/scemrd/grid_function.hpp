#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace scemrd {

/// Values of an n-component function sampled on a strictly increasing grid.
/// Row j of `values` holds the components at `grid[j]`.
class GridFunction {
public:
    GridFunction() = default;

    GridFunction(std::vector<double> grid, Eigen::MatrixXd values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (static_cast<Eigen::Index>(grid_.size()) != values_.rows()) {
            throw std::invalid_argument("GridFunction: grid and value rows differ");
        }
        for (std::size_t j = 1; j < grid_.size(); ++j) {
            if (!(grid_[j] > grid_[j - 1])) {
                throw std::invalid_argument("GridFunction: grid not strictly increasing");
            }
        }
    }

    /// Samples `fn` (returning an n-vector) at every grid point.
    template <typename Fn>
    static GridFunction sample(std::vector<double> grid, Fn&& fn) {
        if (grid.empty()) {
            return GridFunction(std::move(grid), Eigen::MatrixXd(0, 0));
        }
        Eigen::VectorXd first = fn(grid.front());
        Eigen::MatrixXd values(static_cast<Eigen::Index>(grid.size()), first.size());
        values.row(0) = first.transpose();
        for (std::size_t j = 1; j < grid.size(); ++j) {
            values.row(static_cast<Eigen::Index>(j)) = fn(grid[j]).transpose();
        }
        return GridFunction(std::move(grid), std::move(values));
    }

    const std::vector<double>& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.size(); }
    bool empty() const noexcept { return grid_.empty(); }
    Eigen::Index components() const noexcept { return values_.cols(); }

private:
    std::vector<double> grid_;
    Eigen::MatrixXd values_;
};

/// `count` equally spaced points on [lo, hi], endpoints included exactly.
inline std::vector<double> uniform_grid(std::size_t count, double lo = 0.0, double hi = 1.0) {
    if (count < 2) {
        throw std::invalid_argument("uniform_grid: need at least two points");
    }
    std::vector<double> g(count);
    const double n = static_cast<double>(count - 1);
    for (std::size_t j = 0; j < count; ++j) {
        g[j] = lo + (hi - lo) * (static_cast<double>(j) / n);
    }
    g.back() = hi;
    return g;
}

}  // namespace scemrd
