#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "evoblock/linear_operator.hpp"
#include "evoblock/resolvent.hpp"
#include "evoblock/sparse_matrix.hpp"
#include "evoblock/temporal_network.hpp"

namespace evoblock {

/// Which slice sequence the block operator is built from.
struct FullNetwork {};
/// Every slice with the edges of one node removed (0-based node id).
struct NodeDeleted {
    Index node;
};
/// One slice (1-based) dropped and the chain relinked, giving M - 1 blocks.
struct TimeDeleted {
    std::size_t slice;
};
using BlockVariant = std::variant<FullNetwork, NodeDeleted, TimeDeleted>;

/// Inter-slice weights beta_l = exp(-b (t_l - t_{l-1})), l = 2..M.
std::vector<double> decay_betas(const TemporalNetwork& net, double b);
/// beta_l = 1 for every link.
std::vector<double> unit_betas(std::size_t steps);

/// Matrix-free Mn x Mn upper block-bidiagonal operator
///
///     [ alpha A1   beta2 I                     ]
///     [          alpha A2   beta3 I            ]
///     [                     ...      betaM I   ]
///     [                              alpha AM  ]
///
/// Node k of block s is stored at index s * n + k.
class BlockOperator final : public LinearOperator {
public:
    /// `max_radius`, when given, is trusted as max_k rho(A_k) of the *full*
    /// network; otherwise it is estimated. Construction fails unless
    /// alpha * max_radius * (1 + 1e-6) < 1.
    BlockOperator(const TemporalNetwork& net, double alpha, std::vector<double> betas,
                  BlockVariant variant = FullNetwork{}, std::optional<double> max_radius = std::nullopt);

    std::size_t size() const override { return blocks() * static_cast<std::size_t>(n_); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

    Index block_size() const noexcept { return n_; }
    std::size_t blocks() const noexcept { return slices_.size(); }
    double alpha() const noexcept { return alpha_; }
    double max_radius() const noexcept { return max_radius_; }
    /// Superdiagonal weights; betas()[k] couples block k to block k + 1.
    const std::vector<double>& betas() const noexcept { return betas_; }
    /// Unscaled slice sitting in diagonal block k (0-based).
    const SparseMatrix& slice(std::size_t k) const { return slices_.at(k); }
    const BlockVariant& variant() const noexcept { return variant_; }

private:
    Index n_;
    double alpha_;
    double max_radius_;
    std::vector<SparseMatrix> slices_;
    std::vector<double> betas_;
    BlockVariant variant_;
};

inline constexpr std::size_t kDefaultDenseCap = 20000;

/// Explicit sparse form of the block operator; fails when Mn exceeds `cap`.
SparseMatrix dense_assemble(const BlockOperator& op, std::size_t cap = kDefaultDenseCap);

/// Layer matrices along the diagonal of the supra-centrality operator.
struct AdjacencyLayers {};
struct KatzLayers {
    double alpha;
};
using LayerKind = std::variant<AdjacencyLayers, KatzLayers>;

/// Matrix-free supra-centrality operator: eps * M_k on the diagonal blocks and
/// identities on both the first super- and subdiagonal. For Katz layers
/// M_k = (I - alpha A_k)^{-1} is applied through a sparse factorisation.
class SupraOperator final : public LinearOperator {
public:
    SupraOperator(const TemporalNetwork& net, double eps, LayerKind kind);

    std::size_t size() const override { return slices_.size() * static_cast<std::size_t>(n_); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

    Index block_size() const noexcept { return n_; }
    std::size_t blocks() const noexcept { return slices_.size(); }
    double eps() const noexcept { return eps_; }
    const LayerKind& kind() const noexcept { return kind_; }

private:
    void apply_impl(std::span<const double> x, std::span<double> y, bool transpose) const;

    Index n_;
    double eps_;
    LayerKind kind_;
    std::vector<SparseMatrix> slices_;
    std::vector<Resolvent> resolvents_;
};

}  // namespace evoblock
