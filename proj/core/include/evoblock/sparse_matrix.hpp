#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "evoblock/linear_operator.hpp"

namespace evoblock {

using Index = std::int64_t;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed-sparse-row real matrix in canonical form: column indices are
/// strictly increasing within each row and no explicit zeros are stored.
/// Immutable after construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(Index nrows, Index ncols);

    /// Builds a matrix from unordered entries. Duplicates are summed; entries
    /// that sum to exactly zero are dropped.
    static SparseMatrix from_triplets(Index nrows, Index ncols, std::vector<Triplet> entries);
    static SparseMatrix identity(Index n);
    /// Takes ownership of already-canonical CSR arrays; validated.
    static SparseMatrix from_csr(Index nrows, Index ncols, std::vector<Index> row_offsets,
                                 std::vector<Index> col_indices, std::vector<double> values);

    Index rows() const noexcept { return nrows_; }
    Index cols() const noexcept { return ncols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    bool square() const noexcept { return nrows_ == ncols_; }

    std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
    std::span<const Index> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Stored value at (i, j) or zero. O(log nnz(row)).
    double at(Index i, Index j) const;

    SparseMatrix transpose() const;
    SparseMatrix scaled(double factor) const;
    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    bool is_symmetric(double tol = 0.0) const;
    bool has_zero_diagonal() const;

    Eigen::MatrixXd to_dense() const;
    Eigen::SparseMatrix<double, Eigen::RowMajor> to_eigen() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    Index nrows_ = 0;
    Index ncols_ = 0;
    std::vector<Index> row_offsets_{0};
    std::vector<Index> col_indices_;
    std::vector<double> values_;
};

/// Entrywise sum of matrices of equal shape.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);

/// y = A x, accumulated in row order.
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

/// y = A^T x without forming the transpose.
std::vector<double> spmv_t(const SparseMatrix& a, std::span<const double> x);
void spmv_t(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

struct PowerIterationOptions {
    double tol = 1e-8;
    int max_iter = 10000;
};

/// Perron root of a square nonnegative matrix by power iteration on A + I
/// from the all-ones vector. The shift makes the iteration aperiodic (bipartite
/// and cyclic graphs) without changing which eigenvalue dominates. The matrix
/// is split into strongly connected components first and the largest
/// component radius returned, so nilpotent and other reducible inputs
/// converge too. Returns 0 for the zero matrix. Throws ConvergenceError
/// carrying the last iterate.
double spectral_radius(const SparseMatrix& a, PowerIterationOptions opts = {});
/// Same iteration on an operator known only by its action. No component split
/// is possible, so defective dominant eigenvalues (e.g. nilpotent operators)
/// converge slowly.
double spectral_radius(const LinearOperator& op, PowerIterationOptions opts = {});

/// A with row r and column r cleared.
SparseMatrix remove_node_edges(const SparseMatrix& a, Index r);

/// LinearOperator view of a square SparseMatrix (the matrix must outlive it).
class MatrixOperator final : public LinearOperator {
public:
    explicit MatrixOperator(const SparseMatrix& a);

    std::size_t size() const override { return static_cast<std::size_t>(a_.rows()); }
    void apply(std::span<const double> x, std::span<double> y) const override { spmv(a_, x, y); }
    void apply_transpose(std::span<const double> x, std::span<double> y) const override { spmv_t(a_, x, y); }

private:
    const SparseMatrix& a_;
};

}  // namespace evoblock
