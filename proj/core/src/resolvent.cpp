#include "evoblock/resolvent.hpp"

#include <Eigen/SparseLU>

#include "evoblock/errors.hpp"

namespace evoblock {

struct Resolvent::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

Resolvent::Resolvent(const SparseMatrix& a, double weight) : n_(a.rows()), weight_(weight) {
    if (!a.square()) throw InvalidArgument("Resolvent: matrix is not square");
    if (weight == 0.0 || a.nnz() == 0) return;  // identity

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(a.nnz() + static_cast<std::size_t>(n_));
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto v = a.values();
    for (Index i = 0; i < n_; ++i) {
        t.emplace_back(i, i, 1.0);
        for (Index k = ro[static_cast<std::size_t>(i)]; k < ro[static_cast<std::size_t>(i) + 1]; ++k)
            t.emplace_back(i, ci[static_cast<std::size_t>(k)], -weight * v[static_cast<std::size_t>(k)]);
    }
    Eigen::SparseMatrix<double> m(n_, n_);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();

    impl_ = std::make_unique<Impl>();
    impl_->lu.analyzePattern(m);
    impl_->lu.factorize(m);
    if (impl_->lu.info() != Eigen::Success)
        throw NumericalError("Resolvent: I - aA is singular (" + impl_->lu.lastErrorMessage() + ")");
}

Resolvent::~Resolvent() = default;
Resolvent::Resolvent(Resolvent&&) noexcept = default;
Resolvent& Resolvent::operator=(Resolvent&&) noexcept = default;

void Resolvent::solve(std::span<const double> rhs, std::span<double> out) const {
    if (rhs.size() != static_cast<std::size_t>(n_) || out.size() != rhs.size())
        throw DimensionError("Resolvent::solve: size mismatch");
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
    Eigen::Map<Eigen::VectorXd> x(out.data(), n_);
    if (!impl_) {
        x = b;
        return;
    }
    x = impl_->lu.solve(b);
}

void Resolvent::solve_transpose(std::span<const double> rhs, std::span<double> out) const {
    if (rhs.size() != static_cast<std::size_t>(n_) || out.size() != rhs.size())
        throw DimensionError("Resolvent::solve_transpose: size mismatch");
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
    Eigen::Map<Eigen::VectorXd> x(out.data(), n_);
    if (!impl_) {
        x = b;
        return;
    }
    x = impl_->lu.transpose().solve(b);
}

Eigen::MatrixXd Resolvent::solve(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != n_) throw DimensionError("Resolvent::solve: size mismatch");
    if (!impl_) return rhs;
    return impl_->lu.solve(rhs);
}

Eigen::MatrixXd Resolvent::solve_transpose(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != n_) throw DimensionError("Resolvent::solve_transpose: size mismatch");
    if (!impl_) return rhs;
    return impl_->lu.transpose().solve(rhs);
}

Eigen::MatrixXd Resolvent::right_solve(const Eigen::MatrixXd& lhs) const {
    if (lhs.cols() != n_) throw DimensionError("Resolvent::right_solve: size mismatch");
    if (!impl_) return lhs;
    return solve_transpose(Eigen::MatrixXd(lhs.transpose())).transpose();
}

}  // namespace evoblock
