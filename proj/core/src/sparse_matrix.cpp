#include "evoblock/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evoblock/errors.hpp"

namespace evoblock {

void ScaledOperator::apply(std::span<const double> x, std::span<double> y) const {
    op_.apply(x, y);
    for (double& v : y) v *= scale_;
}

void ScaledOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
    op_.apply_transpose(x, y);
    for (double& v : y) v *= scale_;
}

void IdentityMinus::apply(std::span<const double> x, std::span<double> y) const {
    op_.apply(x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - y[i];
}

void IdentityMinus::apply_transpose(std::span<const double> x, std::span<double> y) const {
    op_.apply_transpose(x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - y[i];
}

SparseMatrix::SparseMatrix(Index nrows, Index ncols)
    : nrows_(nrows), ncols_(ncols), row_offsets_(static_cast<std::size_t>(nrows) + 1, 0) {
    if (nrows < 0 || ncols < 0) throw InvalidArgument("SparseMatrix: negative dimension");
}

SparseMatrix SparseMatrix::from_triplets(Index nrows, Index ncols, std::vector<Triplet> entries) {
    SparseMatrix m(nrows, ncols);
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
            throw InvalidArgument("SparseMatrix: entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                  ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
        if (!std::isfinite(t.value)) throw InvalidArgument("SparseMatrix: non-finite entry");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    m.col_indices_.reserve(entries.size());
    m.values_.reserve(entries.size());
    std::size_t k = 0;
    for (Index i = 0; i < nrows; ++i) {
        while (k < entries.size() && entries[k].row == i) {
            const Index col = entries[k].col;
            double sum = 0.0;
            while (k < entries.size() && entries[k].row == i && entries[k].col == col) sum += entries[k++].value;
            if (sum != 0.0) {
                m.col_indices_.push_back(col);
                m.values_.push_back(sum);
            }
        }
        m.row_offsets_[static_cast<std::size_t>(i) + 1] = static_cast<Index>(m.values_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
    SparseMatrix m(n, n);
    m.col_indices_.resize(static_cast<std::size_t>(n));
    m.values_.assign(static_cast<std::size_t>(n), 1.0);
    for (Index i = 0; i < n; ++i) {
        m.col_indices_[static_cast<std::size_t>(i)] = i;
        m.row_offsets_[static_cast<std::size_t>(i) + 1] = i + 1;
    }
    return m;
}

SparseMatrix SparseMatrix::from_csr(Index nrows, Index ncols, std::vector<Index> row_offsets,
                                    std::vector<Index> col_indices, std::vector<double> values) {
    if (row_offsets.size() != static_cast<std::size_t>(nrows) + 1 || row_offsets.front() != 0 ||
        static_cast<std::size_t>(row_offsets.back()) != col_indices.size() || col_indices.size() != values.size())
        throw InvalidArgument("SparseMatrix::from_csr: inconsistent array lengths");
    for (Index i = 0; i < nrows; ++i) {
        const auto b = row_offsets[static_cast<std::size_t>(i)], e = row_offsets[static_cast<std::size_t>(i) + 1];
        if (e < b) throw InvalidArgument("SparseMatrix::from_csr: row offsets decrease");
        for (Index k = b; k < e; ++k) {
            const Index c = col_indices[static_cast<std::size_t>(k)];
            if (c < 0 || c >= ncols) throw InvalidArgument("SparseMatrix::from_csr: column out of range");
            if (k > b && c <= col_indices[static_cast<std::size_t>(k) - 1])
                throw InvalidArgument("SparseMatrix::from_csr: columns not strictly increasing");
        }
    }
    SparseMatrix m(nrows, ncols);
    m.row_offsets_ = std::move(row_offsets);
    m.col_indices_ = std::move(col_indices);
    m.values_ = std::move(values);
    return m;
}

double SparseMatrix::at(Index i, Index j) const {
    if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_) throw InvalidArgument("SparseMatrix::at: index out of range");
    const auto first = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(i)];
    const auto last = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(i) + 1];
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(ncols_, nrows_);
    std::vector<Index> counts(static_cast<std::size_t>(ncols_) + 1, 0);
    for (Index c : col_indices_) ++counts[static_cast<std::size_t>(c) + 1];
    for (std::size_t c = 0; c < static_cast<std::size_t>(ncols_); ++c) counts[c + 1] += counts[c];
    t.row_offsets_ = counts;
    t.col_indices_.resize(col_indices_.size());
    t.values_.resize(values_.size());
    // Rows are visited in increasing order, so the transposed rows come out sorted.
    for (Index i = 0; i < nrows_; ++i) {
        for (Index k = row_offsets_[static_cast<std::size_t>(i)]; k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
            const auto dst = static_cast<std::size_t>(counts[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])]++);
            t.col_indices_[dst] = i;
            t.values_[dst] = values_[static_cast<std::size_t>(k)];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
    if (factor == 0.0) return SparseMatrix(nrows_, ncols_);
    SparseMatrix m = *this;
    for (double& v : m.values_) v *= factor;
    return m;
}

std::vector<double> SparseMatrix::row_sums() const {
    std::vector<double> s(static_cast<std::size_t>(nrows_), 0.0);
    for (Index i = 0; i < nrows_; ++i)
        for (Index k = row_offsets_[static_cast<std::size_t>(i)]; k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k)
            s[static_cast<std::size_t>(i)] += values_[static_cast<std::size_t>(k)];
    return s;
}

std::vector<double> SparseMatrix::col_sums() const {
    std::vector<double> s(static_cast<std::size_t>(ncols_), 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) s[static_cast<std::size_t>(col_indices_[k])] += values_[k];
    return s;
}

bool SparseMatrix::is_symmetric(double tol) const {
    if (!square()) return false;
    const SparseMatrix t = transpose();
    if (t.row_offsets_ != row_offsets_ || t.col_indices_ != col_indices_) return false;
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (std::abs(values_[k] - t.values_[k]) > tol) return false;
    return true;
}

bool SparseMatrix::has_zero_diagonal() const {
    for (Index i = 0; i < std::min(nrows_, ncols_); ++i)
        if (at(i, i) != 0.0) return false;
    return true;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nrows_, ncols_);
    for (Index i = 0; i < nrows_; ++i)
        for (Index k = row_offsets_[static_cast<std::size_t>(i)]; k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k)
            d(i, col_indices_[static_cast<std::size_t>(k)]) = values_[static_cast<std::size_t>(k)];
    return d;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> SparseMatrix::to_eigen() const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(values_.size());
    for (Index i = 0; i < nrows_; ++i)
        for (Index k = row_offsets_[static_cast<std::size_t>(i)]; k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k)
            trips.emplace_back(i, col_indices_[static_cast<std::size_t>(k)], values_[static_cast<std::size_t>(k)]);
    Eigen::SparseMatrix<double, Eigen::RowMajor> e(nrows_, ncols_);
    e.setFromTriplets(trips.begin(), trips.end());
    return e;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("add: shape mismatch");
    std::vector<Triplet> t;
    t.reserve(a.nnz() + b.nnz());
    for (const SparseMatrix* m : {&a, &b}) {
        const auto ro = m->row_offsets();
        const auto ci = m->col_indices();
        const auto v = m->values();
        for (Index i = 0; i < m->rows(); ++i)
            for (Index k = ro[static_cast<std::size_t>(i)]; k < ro[static_cast<std::size_t>(i) + 1]; ++k)
                t.push_back({i, ci[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(k)]});
    }
    return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != static_cast<std::size_t>(a.cols()) || y.size() != static_cast<std::size_t>(a.rows()))
        throw DimensionError("spmv: expected x of length " + std::to_string(a.cols()) + ", got " +
                             std::to_string(x.size()));
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto v = a.values();
    for (std::size_t i = 0; i < y.size(); ++i) {
        double sum = 0.0;
        for (Index k = ro[i]; k < ro[i + 1]; ++k)
            sum += v[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])];
        y[i] = sum;
    }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(a.rows()));
    spmv(a, x, y);
    return y;
}

void spmv_t(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != static_cast<std::size_t>(a.rows()) || y.size() != static_cast<std::size_t>(a.cols()))
        throw DimensionError("spmv_t: expected x of length " + std::to_string(a.rows()) + ", got " +
                             std::to_string(x.size()));
    std::fill(y.begin(), y.end(), 0.0);
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto v = a.values();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (Index k = ro[i]; k < ro[i + 1]; ++k)
            y[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])] += v[static_cast<std::size_t>(k)] * xi;
    }
}

std::vector<double> spmv_t(const SparseMatrix& a, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(a.cols()));
    spmv_t(a, x, y);
    return y;
}

namespace {

// Power iteration on (A + I) with infinity-norm scaling. Stops on either the
// stabilised norm ratio or on the Collatz-Wielandt bracket
//   min_i (Ax)_i / x_i <= rho(A) <= max_i (Ax)_i / x_i,
// which is valid for any positive x and nonnegative A.
template <typename Apply>
double perron_root(std::size_t n, Apply&& apply, const PowerIterationOptions& opts) {
    if (opts.tol <= 0.0) throw InvalidArgument("spectral_radius: tol must be positive");
    if (n == 0) return 0.0;
    std::vector<double> x(n, 1.0), ax(n);
    double previous = -1.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        apply(x, ax);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ratio = ax[i] / x[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            ax[i] += x[i];
            norm = std::max(norm, ax[i]);
        }
        if (hi == 0.0) return 0.0;
        if (!std::isfinite(norm)) throw NumericalError("spectral_radius: overflow in power iteration");
        const double estimate = norm - 1.0;  // x has unit infinity norm
        for (std::size_t i = 0; i < n; ++i) x[i] = ax[i] / norm;
        const double scale = std::max(std::abs(estimate), 1.0);
        if (hi - lo <= opts.tol * scale) return 0.5 * (hi + lo);
        if (previous >= 0.0 && std::abs(estimate - previous) <= opts.tol * scale) return estimate;
        previous = estimate;
    }
    throw ConvergenceError("spectral_radius: no convergence in " + std::to_string(opts.max_iter) + " iterations",
                           x, previous);
}

}  // namespace

namespace {

// Strongly connected components (iterative Tarjan); comp[i] is the component
// of node i, numbered in reverse topological order.
std::vector<Index> strong_components(const SparseMatrix& a, Index& count) {
    const auto n = static_cast<std::size_t>(a.rows());
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    constexpr Index unset = -1;
    std::vector<Index> index(n, unset), low(n, 0), comp(n, unset), stack;
    std::vector<std::pair<std::size_t, Index>> frames;  // node, next edge position
    Index next = 0;
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        frames.emplace_back(root, ro[root]);
        index[root] = low[root] = next++;
        stack.push_back(static_cast<Index>(root));
        while (!frames.empty()) {
            auto& [v, k] = frames.back();
            if (k < ro[v + 1]) {
                const auto w = static_cast<std::size_t>(ci[static_cast<std::size_t>(k++)]);
                if (index[w] == unset) {
                    index[w] = low[w] = next++;
                    stack.push_back(static_cast<Index>(w));
                    frames.emplace_back(w, ro[w]);
                } else if (comp[w] == unset) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                Index w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    comp[static_cast<std::size_t>(w)] = count;
                } while (static_cast<std::size_t>(w) != done);
                ++count;
            }
        }
    }
    return comp;
}

}  // namespace

double spectral_radius(const SparseMatrix& a, PowerIterationOptions opts) {
    if (!a.square()) throw InvalidArgument("spectral_radius: matrix is not square");
    for (double v : a.values())
        if (v < 0.0) throw InvalidArgument("spectral_radius: matrix has negative entries");
    if (a.nnz() == 0) return 0.0;

    // rho(A) is the largest radius over the irreducible diagonal blocks of the
    // Frobenius normal form. On each block A + I is primitive, so the power
    // iteration converges geometrically; on a reducible A it can stall.
    Index count = 0;
    const auto comp = strong_components(a, count);
    std::vector<std::vector<Index>> members(static_cast<std::size_t>(count));
    for (Index i = 0; i < a.rows(); ++i) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])].push_back(i);

    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto vals = a.values();
    std::vector<Index> local(static_cast<std::size_t>(a.rows()), 0);
    double rho = 0.0;
    for (const auto& nodes : members) {
        const Index c = comp[static_cast<std::size_t>(nodes.front())];
        std::vector<Triplet> t;
        double max_row = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) local[static_cast<std::size_t>(nodes[k])] = static_cast<Index>(k);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto i = static_cast<std::size_t>(nodes[k]);
            double row = 0.0;
            for (Index e = ro[i]; e < ro[i + 1]; ++e) {
                const auto j = static_cast<std::size_t>(ci[static_cast<std::size_t>(e)]);
                if (comp[j] != c) continue;
                t.push_back({static_cast<Index>(k), local[j], vals[static_cast<std::size_t>(e)]});
                row += vals[static_cast<std::size_t>(e)];
            }
            max_row = std::max(max_row, row);
        }
        // The largest row sum bounds the block radius from above.
        if (t.empty() || max_row <= rho) continue;
        const auto n = static_cast<Index>(nodes.size());
        const auto block = SparseMatrix::from_triplets(n, n, std::move(t));
        rho = std::max(rho, perron_root(static_cast<std::size_t>(n),
                                        [&](std::span<const double> x, std::span<double> y) { spmv(block, x, y); },
                                        opts));
    }
    return rho;
}

double spectral_radius(const LinearOperator& op, PowerIterationOptions opts) {
    return perron_root(op.size(), [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); }, opts);
}

SparseMatrix remove_node_edges(const SparseMatrix& a, Index r) {
    if (!a.square()) throw InvalidArgument("remove_node_edges: matrix is not square");
    if (r < 0 || r >= a.rows())
        throw InvalidArgument("remove_node_edges: node " + std::to_string(r) + " outside [0, " +
                              std::to_string(a.rows()) + ")");
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto v = a.values();
    std::vector<Index> offsets(ro.size(), 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(a.nnz());
    vals.reserve(a.nnz());
    for (Index i = 0; i < a.rows(); ++i) {
        if (i != r) {
            for (Index k = ro[static_cast<std::size_t>(i)]; k < ro[static_cast<std::size_t>(i) + 1]; ++k) {
                if (ci[static_cast<std::size_t>(k)] == r) continue;
                cols.push_back(ci[static_cast<std::size_t>(k)]);
                vals.push_back(v[static_cast<std::size_t>(k)]);
            }
        }
        offsets[static_cast<std::size_t>(i) + 1] = static_cast<Index>(cols.size());
    }
    return SparseMatrix::from_csr(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

MatrixOperator::MatrixOperator(const SparseMatrix& a) : a_(a) {
    if (!a.square()) throw InvalidArgument("MatrixOperator: matrix is not square");
}

}  // namespace evoblock
