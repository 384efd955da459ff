#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "evoblock/linear_operator.hpp"

namespace evoblock {

using Block2 = Eigen::Matrix2d;
using BlockVectors = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Recurrence data of the nonsymmetric block Lanczos process for a pair of
/// N x 2 starting blocks X (left) and Y (right).
///
/// The process builds biorthogonal bases P_1, P_2, ... (right Krylov space of
/// B from Y) and Q_1, Q_2, ... (left Krylov space from X) with Q_i^T P_j =
/// delta_ij I_2 and
///
///     B   [P_1 .. P_l] = [P_1 .. P_l] J_l     + P_{l+1} Gamma_l E_l^T
///     B^T [Q_1 .. Q_l] = [Q_1 .. Q_l] J_l^T   + Q_{l+1} Delta_l E_l^T
///
/// where J_l is block tridiagonal with Omega_k on the diagonal, Gamma_k below
/// and Delta_k^T above. The starting blocks are normalised through X^T Y =
/// left0 * right0, so X^T f(B) Y ~= left0 * E_1^T f(J_l) E_1 * right0.
struct QuadratureState {
    std::vector<Block2> omegas;
    std::vector<Block2> gammas;
    std::vector<Block2> deltas;

    BlockVectors p_prev, p_cur;
    BlockVectors q_prev, q_cur;
    Block2 left0 = Block2::Identity();
    Block2 right0 = Block2::Identity();

    /// The Krylov space became invariant; the Gauss rule at `steps()` is exact.
    bool exhausted = false;
    /// A rank-deficient coupling block stopped the recurrence; Omega of the
    /// last step is still valid.
    bool breakdown = false;

    bool keep_basis = false;
    /// Project every new pair of blocks against all stored ones (two passes).
    /// Implies keep_basis; costs O(l N) per step.
    bool rebiorthogonalize = false;
    std::vector<BlockVectors> p_basis, q_basis;

    /// Starts from X = [x1 x2] and Y = [y1 y2]. Throws BreakdownError when
    /// X^T Y is numerically singular.
    static QuadratureState init(const BlockVectors& x, const BlockVectors& y, bool keep_basis = false,
                                bool rebiorthogonalize = false);

    std::size_t steps() const noexcept { return omegas.size(); }

    /// J_l (2l x 2l) from the first l steps.
    Eigen::MatrixXd jacobi(std::size_t ell) const;
    /// J~_{l+1}: J_l extended by sqrt(2) Delta_l^T, sqrt(2) Gamma_l and Omega_{l+1}.
    Eigen::MatrixXd anti_jacobi(std::size_t ell) const;
    /// Maps a rule on the normalised blocks back to X^T f(B) Y.
    Block2 to_target(const Block2& rule) const { return left0 * rule * right0; }
};

/// Smallest singular value below this fraction of ||S|| ||R|| counts as a
/// serious breakdown of the coupling block S^T R.
inline constexpr double kBreakdownThreshold = 1e-12;

/// Advances the recurrence by one block step: computes Omega_k and, unless the
/// space is exhausted or breaks down, Gamma_k, Delta_k and the next blocks.
/// Throws BreakdownError if called on a state that already stopped.
QuadratureState& block_lanczos_step(QuadratureState& state, const LinearOperator& op);

/// Gauss rule E_1^T (I - J_l)^{-1} E_1 on the normalised blocks.
Block2 gauss_rule(const QuadratureState& state, std::size_t ell);

/// Anti-Gauss rule E_1^T (I - J~_{l+1})^{-1} E_1; needs l + 1 steps.
Block2 anti_gauss_rule(const QuadratureState& state, std::size_t ell);

struct BilinearEstimate {
    double value = 0.0;          ///< u^T (I - B)^{-1} v
    std::size_t ell = 0;         ///< Gauss rule size used
    double rel_distance = 0.0;   ///< ||G - H||_max / ||F||_max at stop
    bool exact = false;          ///< Krylov space exhausted
};

struct QuadratureOptions {
    bool rebiorthogonalize = true;
    /// Consecutive rule sizes that must meet the tolerance, with the averaged
    /// rule unchanged to the same tolerance between them, before stopping.
    std::size_t confirmations = 2;
    /// After a breakdown, retry this many times with a different dense
    /// augmentation vector before giving up.
    std::size_t restarts = 2;
};

/// u^T (I - B)^{-1} v from the average of paired block Gauss and anti-Gauss
/// rules, with both starting vectors augmented by the normalised all-ones
/// vector (other dense positive vectors on restarts). Iterates until ||G_l - H_{l+1}||_max / ||F_l||_max <= rel_tol and
/// the (1,1) entries of G_l and H_{l+1} agree to rel_tol as well, on
/// `confirmations` consecutive sizes.
/// Throws BreakdownError or ConvergenceError (after max_ell rules) instead of
/// returning an unconverged value; the linear-system back ends are the
/// fallback in both cases.
BilinearEstimate bilinear_form(const LinearOperator& op, std::span<const double> u, std::span<const double> v,
                               double rel_tol, std::size_t max_ell, const QuadratureOptions& opts = {});

}  // namespace evoblock
