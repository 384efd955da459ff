#include "evoblock/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "evoblock/errors.hpp"

namespace evoblock {

std::string_view to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::Direct: return "direct";
        case SolveMethod::Splitting: return "splitting";
        case SolveMethod::Lsqr: return "lsqr";
    }
    return "unknown";
}

namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

SolveOutcome solve_splitting(const LinearOperator& g, std::span<const double> v, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw InvalidArgument("solve_splitting: tol must be positive");
    if (v.size() != g.size()) throw DimensionError("solve_splitting: right-hand side has wrong length");

    std::vector<double> x(v.begin(), v.end()), next(v.size());
    for (std::size_t it = 1; it <= max_iter; ++it) {
        g.apply(x, next);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] += v[i];
            diff = std::max(diff, std::abs(next[i] - x[i]));
            scale = std::max(scale, std::abs(next[i]));
        }
        x.swap(next);
        if (!std::isfinite(diff)) throw NumericalError("solve_splitting: iteration diverged (is rho(G) < 1?)");
        const double rel = diff == 0.0 ? 0.0 : diff / scale;
        if (rel <= tol) return {std::move(x), it, rel, SolveMethod::Splitting};
    }
    throw ConvergenceError("solve_splitting: no convergence in " + std::to_string(max_iter) + " iterations", x);
}

SolveOutcome solve_lsqr(const LinearOperator& a, std::span<const double> v, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw InvalidArgument("solve_lsqr: tol must be positive");
    const std::size_t n = a.size();
    if (v.size() != n) throw DimensionError("solve_lsqr: right-hand side has wrong length");

    std::vector<double> x(n, 0.0);
    const double beta1 = norm2(v);
    if (beta1 == 0.0) return {std::move(x), 0, 0.0, SolveMethod::Lsqr};

    // Golub-Kahan: beta u = v, alpha p = A^T u, then alternate.
    std::vector<double> u(v.begin(), v.end()), p(n), w(n), tmp(n);
    for (double& e : u) e /= beta1;
    a.apply_transpose(u, p);
    double alpha = norm2(p);
    if (alpha == 0.0) return {std::move(x), 0, beta1, SolveMethod::Lsqr};
    for (double& e : p) e /= alpha;
    w = p;

    double phibar = beta1, rhobar = alpha;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        a.apply(p, tmp);
        for (std::size_t i = 0; i < n; ++i) u[i] = tmp[i] - alpha * u[i];
        const double beta = norm2(u);
        if (beta > 0.0) {
            for (double& e : u) e /= beta;
            a.apply_transpose(u, tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] -= beta * p[i];
            alpha = norm2(tmp);
            if (alpha > 0.0)
                for (std::size_t i = 0; i < n; ++i) p[i] = tmp[i] / alpha;
        } else {
            alpha = 0.0;
        }

        // Givens rotation eliminating the subdiagonal beta of C_{l+1,l}.
        const double rho = std::hypot(rhobar, beta);
        const double c = rhobar / rho;
        const double s = beta / rho;
        const double theta = s * alpha;
        rhobar = -c * alpha;
        const double phi = c * phibar;
        phibar = s * phibar;

        for (std::size_t i = 0; i < n; ++i) {
            x[i] += (phi / rho) * w[i];
            w[i] = p[i] - (theta / rho) * w[i];
        }

        const double residual = std::abs(phibar);
        if (!std::isfinite(residual)) throw NumericalError("solve_lsqr: non-finite residual");
        if (residual <= tol * beta1 || beta == 0.0 || alpha == 0.0)
            return {std::move(x), it, residual / beta1, SolveMethod::Lsqr};
    }
    throw ConvergenceError("solve_lsqr: no convergence in " + std::to_string(max_iter) + " iterations", x,
                           std::abs(phibar) / beta1);
}

namespace {

SolveOutcome direct_impl(const SparseMatrix& b, std::span<const double> v, std::size_t cap, bool transpose) {
    if (!b.square()) throw InvalidArgument("solve_direct: operator is not square");
    const auto n = static_cast<std::size_t>(b.rows());
    if (n > cap) throw InvalidArgument("solve_direct: dimension " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    if (v.size() != n) throw DimensionError("solve_direct: right-hand side has wrong length");

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(b.nnz() + n);
    const auto ro = b.row_offsets();
    const auto ci = b.col_indices();
    const auto vals = b.values();
    for (std::size_t i = 0; i < n; ++i) {
        t.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
        for (Index k = ro[i]; k < ro[i + 1]; ++k)
            t.emplace_back(static_cast<int>(i), static_cast<int>(ci[static_cast<std::size_t>(k)]),
                           -vals[static_cast<std::size_t>(k)]);
    }
    Eigen::SparseMatrix<double> m(static_cast<Index>(n), static_cast<Index>(n));
    m.setFromTriplets(t.begin(), t.end());
    if (transpose) m = Eigen::SparseMatrix<double>(m.transpose());
    m.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw NumericalError("solve_direct: I - B is singular: " + lu.lastErrorMessage());

    Eigen::Map<const Eigen::VectorXd> rhs(v.data(), static_cast<Index>(n));
    Eigen::VectorXd sol = lu.solve(rhs);
    const double residual = (m * sol - rhs).lpNorm<Eigen::Infinity>();
    return {std::vector<double>(sol.data(), sol.data() + sol.size()), 1, residual, SolveMethod::Direct};
}

}  // namespace

SolveOutcome solve_direct(const SparseMatrix& b, std::span<const double> v, std::size_t cap) {
    return direct_impl(b, v, cap, false);
}

SolveOutcome solve_direct_transpose(const SparseMatrix& b, std::span<const double> v, std::size_t cap) {
    return direct_impl(b, v, cap, true);
}

}  // namespace evoblock
