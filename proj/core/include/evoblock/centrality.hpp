#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "evoblock/block_operator.hpp"
#include "evoblock/temporal_network.hpp"

namespace evoblock {

/// Walk downweight `a` (needs a * max_k rho(A_k) < 1), age decay rate `b`
/// per unit time, and whether running matrices are reported divided by their
/// spectral norm.
struct CentralityParams {
    double a = 0.0;
    double b = 0.0;
    bool normalize = false;
};

enum class Direction { Broadcast, Receive };
enum class Backend { Recursion, Direct, Splitting, Lsqr, Quadrature };

std::string_view to_string(Direction d);
std::string_view to_string(Backend b);
Direction parse_direction(std::string_view s);
Backend parse_backend(std::string_view s);

/// Tolerances and budgets shared by the block back ends.
struct SolverSettings {
    double tol = 1e-3;                  ///< splitting: relative step; lsqr: relative residual
    std::size_t max_iter = 100000;
    double quad_rel_tol = 1e-3;         ///< Gauss/anti-Gauss relative distance
    std::size_t max_ell = 200;
    std::size_t dense_cap = kDefaultDenseCap;
};

/// Per-node scores with a deterministic ranking (descending score, ties by
/// ascending node id) and the provenance of how they were computed.
struct CentralityReport {
    std::vector<double> scores;
    std::vector<Index> ranking;
    std::string method;
    std::string backend;
    CentralityParams params;
    double rho_star = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;

    /// 1-based rank of `node`.
    std::size_t rank_of(Index node) const;
};

/// Node ids sorted by descending score, ties broken by ascending id.
std::vector<Index> rank_scores(const std::vector<double>& scores);

/// Largest supported node count for dense n x n communicability matrices.
inline constexpr Index kMaxDenseNodes = 5000;

/// Ordered resolvent product (I - aA_i)^{-1} ... (I - aA_j)^{-1} for 1-based
/// slices i <= j, built by sparse solves against the identity.
Eigen::MatrixXd dyn_comm(const TemporalNetwork& net, double a, std::size_t i, std::size_t j);

/// Row sums (broadcast) and column sums (receive) of a communicability matrix.
std::pair<std::vector<double>, std::vector<double>> broadcast_receive(const Eigen::MatrixXd& q);

/// Running communicability S^[j] from S^[j] = (I + e^{-b dt_j} S^[j-1]) (I - aA_j)^{-1} - I
/// with S^[0] = 0; j = 0 means j = M. Without `normalize` an overflow raises
/// NumericalError; with it the recursion carries a separate log-scale and the
/// result is S^[j] / ||S^[j]||_2. `observer`, if set, sees every S^[k], k <= j
/// (normalised the same way).
Eigen::MatrixXd running_comm_recursive(const TemporalNetwork& net, const CentralityParams& params, std::size_t j = 0,
                                       const std::function<void(std::size_t, const Eigen::MatrixXd&)>& observer = {});

/// Closed form sum_i (1 - e^{-b dt_i}) e^{-b (t_j - t_i)} Q^[i,j] - I with
/// dt_1 = infinity. Independent of the recursion; used to check it.
Eigen::MatrixXd lemma_expansion(const TemporalNetwork& net, const CentralityParams& params, std::size_t j = 0);

/// Row (broadcast) or column (receive) sums of S^[j] computed through one
/// linear solve with I - B, B the block operator with alpha = a and
/// beta_l = e^{-b dt_l}. Backend::Recursion falls back to the dense recursion.
CentralityReport running_scores_block(const TemporalNetwork& net, const CentralityParams& params, std::size_t j,
                                      Direction direction, Backend backend, const SolverSettings& settings = {});

struct BetweennessValue {
    double value = 0.0;
    std::size_t vacuous_pairs = 0;  ///< pairs with Q_ij = 0, counted as 0
};

/// Relative drop in pairwise communicability when node r's edges vanish from
/// every slice, normalised by (n-1)^2 - (n-1). Products are rescaled on the
/// fly so long chains cannot overflow.
BetweennessValue nodal_betweenness(const TemporalNetwork& net, double a, Index r);
std::vector<BetweennessValue> nodal_betweenness_all(const TemporalNetwork& net, double a);

/// Same drop when slice q (1-based) is skipped, summed over all i != j.
BetweennessValue temporal_betweenness(const TemporalNetwork& net, double a, std::size_t q);
std::vector<BetweennessValue> temporal_betweenness_all(const TemporalNetwork& net, double a);

/// Betweenness from the (1, M) block of (I - B)^{-1} for the full and the
/// edited block operators, assembled and inverted densely. Desk-scale oracle.
double nodal_betweenness_block(const TemporalNetwork& net, double a, Index r, std::size_t cap = 2000);
double temporal_betweenness_block(const TemporalNetwork& net, double a, std::size_t q, std::size_t cap = 2000);

/// Max entrywise deviation between the blocks of (I - B)^{-1} and
/// beta^[i+1,j] prod_{l=i..j} (I - alpha A_l)^{-1} (zero below the diagonal).
double theorem_block_check(const TemporalNetwork& net, double alpha, const std::vector<double>& betas,
                           std::size_t cap = 2000);

/// Marginal node centrality from the supra-centrality operator with Katz
/// layers M_k = (I - alpha A_k)^{-1}: joint scores are the row (broadcast) or
/// column (receive) sums of (I - ahat M)^{-1} with ahat = ahat_factor / rho(M),
/// and a node's marginal score is the sum of its joint scores over layers.
CentralityReport supra_marginal_centrality(const TemporalNetwork& net, double alpha, double eps, double ahat_factor,
                                           Direction direction = Direction::Broadcast, double tol = 1e-12);

/// First j slices of a network (1-based j).
TemporalNetwork prefix(const TemporalNetwork& net, std::size_t j);

}  // namespace evoblock
