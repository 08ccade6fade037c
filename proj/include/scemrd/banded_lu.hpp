#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace scemrd {

/// Square band matrix with `lower` sub- and `upper` super-diagonals, stored
/// row-wise with `lower` extra super-diagonals reserved for pivoting fill-in.
class BandedMatrix {
public:
    BandedMatrix(std::size_t size, std::size_t lower, std::size_t upper)
        : size_(size), lower_(lower), upper_(upper), width_(2 * lower + upper + 1),
          data_(size * (2 * lower + upper + 1), 0.0) {}

    std::size_t size() const noexcept { return size_; }
    std::size_t lower() const noexcept { return lower_; }
    std::size_t upper() const noexcept { return upper_; }

    bool in_band(std::size_t r, std::size_t c) const noexcept {
        return c + lower_ >= r && c <= r + upper_ + lower_;
    }

    double& at(std::size_t r, std::size_t c) {
        if (r >= size_ || c >= size_ || !in_band(r, c)) {
            throw std::out_of_range("BandedMatrix: entry outside band");
        }
        return data_[r * width_ + (c + lower_ - r)];
    }

    double at(std::size_t r, std::size_t c) const {
        if (r >= size_ || c >= size_ || !in_band(r, c)) {
            return 0.0;
        }
        return data_[r * width_ + (c + lower_ - r)];
    }

    void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

    /// Adds a dense block with top-left corner (r0, c0).
    void add_block(std::size_t r0, std::size_t c0, const Eigen::MatrixXd& block) {
        for (Eigen::Index i = 0; i < block.rows(); ++i) {
            for (Eigen::Index j = 0; j < block.cols(); ++j) {
                if (block(i, j) != 0.0) {
                    at(r0 + static_cast<std::size_t>(i), c0 + static_cast<std::size_t>(j)) += block(i, j);
                }
            }
        }
    }

    Eigen::MatrixXd to_dense() const {
        const auto n = static_cast<Eigen::Index>(size_);
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t r = 0; r < size_; ++r) {
            const std::size_t lo = r > lower_ ? r - lower_ : 0;
            const std::size_t hi = std::min(size_ - 1, r + upper_);
            for (std::size_t c = lo; c <= hi; ++c) {
                d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = at(r, c);
            }
        }
        return d;
    }

private:
    friend class BandedLU;

    std::size_t size_;
    std::size_t lower_;
    std::size_t upper_;
    std::size_t width_;
    std::vector<double> data_;
};

/// Gaussian elimination with partial (row) pivoting on a BandedMatrix.
/// Factorization is O(size * lower * (lower + upper)).
class BandedLU {
public:
    explicit BandedLU(BandedMatrix m) : lu_(std::move(m)), pivots_(lu_.size()) { factor(); }

    std::size_t size() const noexcept { return lu_.size(); }

    /// Solves A x = b in place.
    void solve_in_place(std::span<double> b) const {
        const std::size_t n = lu_.size();
        if (b.size() != n) {
            throw std::invalid_argument("BandedLU: right-hand side size mismatch");
        }
        const std::size_t kl = lu_.lower_;
        const std::size_t reach = lu_.lower_ + lu_.upper_;
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(b[k], b[pivots_[k]]);
            const std::size_t rend = std::min(n, k + kl + 1);
            for (std::size_t r = k + 1; r < rend; ++r) {
                b[r] -= lu_.at(r, k) * b[k];
            }
        }
        for (std::size_t k = n; k-- > 0;) {
            double s = b[k];
            const std::size_t cend = std::min(n, k + reach + 1);
            for (std::size_t c = k + 1; c < cend; ++c) {
                s -= lu_.at(k, c) * b[c];
            }
            b[k] = s / lu_.at(k, k);
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x = b;
        solve_in_place(std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
        return x;
    }

private:
    void factor() {
        const std::size_t n = lu_.size();
        const std::size_t kl = lu_.lower_;
        const std::size_t reach = lu_.lower_ + lu_.upper_;
        double scale = 0.0;
        for (double v : lu_.data_) {
            scale = std::max(scale, std::abs(v));
        }
        const double tiny = scale * 1e-300 + 1e-300;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t rend = std::min(n, k + kl + 1);
            std::size_t p = k;
            double best = std::abs(lu_.at(k, k));
            for (std::size_t r = k + 1; r < rend; ++r) {
                const double v = std::abs(lu_.at(r, k));
                if (v > best) {
                    best = v;
                    p = r;
                }
            }
            if (!(best > tiny)) {
                throw std::runtime_error("BandedLU: matrix is singular");
            }
            pivots_[k] = p;
            const std::size_t cend = std::min(n, k + reach + 1);
            if (p != k) {
                for (std::size_t c = k; c < cend; ++c) {
                    std::swap(lu_.at(k, c), lu_.at(p, c));
                }
            }
            const double pivot = lu_.at(k, k);
            for (std::size_t r = k + 1; r < rend; ++r) {
                double& lrk = lu_.at(r, k);
                if (lrk == 0.0) {
                    continue;
                }
                lrk /= pivot;
                const double m = lrk;
                for (std::size_t c = k + 1; c < cend; ++c) {
                    lu_.at(r, c) -= m * lu_.at(k, c);
                }
            }
        }
    }

    BandedMatrix lu_;
    std::vector<std::size_t> pivots_;
};

}  // namespace scemrd
