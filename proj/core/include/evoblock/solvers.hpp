#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "evoblock/block_operator.hpp"
#include "evoblock/linear_operator.hpp"
#include "evoblock/sparse_matrix.hpp"

namespace evoblock {

enum class SolveMethod { Direct, Splitting, Lsqr };

std::string_view to_string(SolveMethod m);

struct SolveOutcome {
    std::vector<double> x;
    std::size_t iterations = 0;
    double residual_estimate = 0.0;
    SolveMethod method = SolveMethod::Direct;
};

/// Fixed-point iteration x <- G x + v for (I - G) x = v, started from x = v.
/// Converges for any G >= 0 with rho(G) < 1 (a regular splitting of I - G).
/// Stops when ||x_new - x_old||_inf <= tol * ||x_new||_inf; the residual
/// estimate reported is that relative step. Throws ConvergenceError with the
/// last iterate after `max_iter` sweeps.
SolveOutcome solve_splitting(const LinearOperator& g, std::span<const double> v, double tol, std::size_t max_iter);

/// LSQR (Golub-Kahan bidiagonalisation with Givens QR of the bidiagonal) for
/// min ||A x - v||_2, A given by its action and transpose action. Stops when
/// the estimated residual norm drops below tol * ||v||. v = 0 returns x = 0
/// after zero iterations; a zero bidiagonalisation vector ends the run early
/// with the current (exact in exact arithmetic) iterate.
SolveOutcome solve_lsqr(const LinearOperator& a, std::span<const double> v, double tol, std::size_t max_iter);

/// Sparse LU with partial pivoting on I - B for an explicitly assembled B.
/// Throws InvalidArgument above `cap` unknowns and NumericalError if singular.
SolveOutcome solve_direct(const SparseMatrix& b, std::span<const double> v, std::size_t cap = kDefaultDenseCap);

/// Same as solve_direct on the transposed system (I - B)^T x = v.
SolveOutcome solve_direct_transpose(const SparseMatrix& b, std::span<const double> v,
                                    std::size_t cap = kDefaultDenseCap);

}  // namespace evoblock
