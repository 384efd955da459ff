#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "evoblock/sparse_matrix.hpp"

namespace evoblock {

/// Factorised (I - a A) for one adjacency slice. Applying the resolvent
/// (I - a A)^{-1} or its transpose costs two sparse triangular solves; the
/// inverse itself is never formed.
class Resolvent {
public:
    Resolvent(const SparseMatrix& a, double weight);
    ~Resolvent();
    Resolvent(Resolvent&&) noexcept;
    Resolvent& operator=(Resolvent&&) noexcept;

    Index size() const noexcept { return n_; }
    double weight() const noexcept { return weight_; }

    void solve(std::span<const double> rhs, std::span<double> out) const;
    void solve_transpose(std::span<const double> rhs, std::span<double> out) const;

    /// (I - aA)^{-1} X, column by column.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
    /// (I - aA)^{-T} X.
    Eigen::MatrixXd solve_transpose(const Eigen::MatrixXd& rhs) const;
    /// X (I - aA)^{-1}, i.e. the row-side action.
    Eigen::MatrixXd right_solve(const Eigen::MatrixXd& lhs) const;

private:
    struct Impl;
    Index n_;
    double weight_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace evoblock
