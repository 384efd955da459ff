#include "evoblock/block_operator.hpp"

#include <cmath>
#include <string>

#include "evoblock/errors.hpp"

namespace evoblock {

std::vector<double> decay_betas(const TemporalNetwork& net, double b) {
    if (b < 0.0) throw InvalidArgument("decay_betas: b must be nonnegative");
    std::vector<double> betas;
    betas.reserve(net.steps() - 1);
    for (std::size_t k = 1; k < net.steps(); ++k) betas.push_back(std::exp(-b * net.gap(k)));
    return betas;
}

std::vector<double> unit_betas(std::size_t steps) { return std::vector<double>(steps > 0 ? steps - 1 : 0, 1.0); }

namespace {

void check_alpha(double alpha, double radius) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be finite and nonnegative");
    if (alpha * radius * (1.0 + 1e-6) >= 1.0)
        throw InvalidArgument("alpha = " + std::to_string(alpha) + " violates alpha < 1/max rho(A_k) = " +
                              std::to_string(radius > 0 ? 1.0 / radius : INFINITY));
}

}  // namespace

BlockOperator::BlockOperator(const TemporalNetwork& net, double alpha, std::vector<double> betas,
                             BlockVariant variant, std::optional<double> max_radius)
    : n_(net.nodes()), alpha_(alpha), variant_(variant) {
    const std::size_t m = net.steps();
    if (betas.size() != m - 1)
        throw InvalidArgument("BlockOperator: expected " + std::to_string(m - 1) + " betas, got " +
                              std::to_string(betas.size()));
    for (double b : betas)
        if (!(b > 0.0 && b <= 1.0)) throw InvalidArgument("BlockOperator: betas must lie in (0, 1]");

    max_radius_ = max_radius ? *max_radius : net.max_spectral_radius();
    check_alpha(alpha, max_radius_);

    if (const auto* nd = std::get_if<NodeDeleted>(&variant_)) {
        slices_.reserve(m);
        for (const auto& s : net.slices()) slices_.push_back(remove_node_edges(s, nd->node));
        betas_ = std::move(betas);
    } else if (const auto* td = std::get_if<TimeDeleted>(&variant_)) {
        const std::size_t q = td->slice;
        if (q < 1 || q > m) throw InvalidArgument("BlockOperator: deleted slice " + std::to_string(q) + " outside [1, M]");
        if (m < 2) throw InvalidArgument("BlockOperator: cannot delete the only slice");
        for (std::size_t k = 0; k < m; ++k)
            if (k + 1 != q) slices_.push_back(net.slice(k));
        // betas[k] links slice k to k+1 (0-based). Dropping an interior slice
        // merges its two links into one covering the combined gap.
        const std::size_t drop = q - 1;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (k + 1 == drop && drop + 1 < m)
                betas_.push_back(betas[k] * betas[k + 1]);
            else if (k != drop && k + 1 != drop)
                betas_.push_back(betas[k]);
        }
    } else {
        slices_ = net.slices();
        betas_ = std::move(betas);
    }
    if (betas_.size() + 1 != slices_.size()) throw Error("BlockOperator: internal beta bookkeeping failed");
}

void BlockOperator::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size())
        throw DimensionError("block_apply: expected vectors of length " + std::to_string(size()));
    const auto n = static_cast<std::size_t>(n_);
    for (std::size_t k = 0; k < slices_.size(); ++k) {
        auto yk = y.subspan(k * n, n);
        spmv(slices_[k], x.subspan(k * n, n), yk);
        for (double& v : yk) v *= alpha_;
        if (k + 1 < slices_.size()) {
            const double beta = betas_[k];
            const auto xnext = x.subspan((k + 1) * n, n);
            for (std::size_t i = 0; i < n; ++i) yk[i] += beta * xnext[i];
        }
    }
}

void BlockOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size())
        throw DimensionError("block_apply_t: expected vectors of length " + std::to_string(size()));
    const auto n = static_cast<std::size_t>(n_);
    for (std::size_t k = 0; k < slices_.size(); ++k) {
        auto yk = y.subspan(k * n, n);
        spmv_t(slices_[k], x.subspan(k * n, n), yk);
        for (double& v : yk) v *= alpha_;
        if (k > 0) {
            const double beta = betas_[k - 1];
            const auto xprev = x.subspan((k - 1) * n, n);
            for (std::size_t i = 0; i < n; ++i) yk[i] += beta * xprev[i];
        }
    }
}

SparseMatrix dense_assemble(const BlockOperator& op, std::size_t cap) {
    const std::size_t dim = op.size();
    if (dim > cap)
        throw InvalidArgument("dense_assemble: dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
    const Index n = op.block_size();
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < op.blocks(); ++k) {
        const auto& s = op.slice(k);
        const auto ro = s.row_offsets();
        const auto ci = s.col_indices();
        const auto v = s.values();
        const Index off = static_cast<Index>(k) * n;
        if (op.alpha() != 0.0)
            for (Index i = 0; i < n; ++i)
                for (Index e = ro[static_cast<std::size_t>(i)]; e < ro[static_cast<std::size_t>(i) + 1]; ++e)
                    t.push_back({off + i, off + ci[static_cast<std::size_t>(e)], op.alpha() * v[static_cast<std::size_t>(e)]});
        if (k + 1 < op.blocks())
            for (Index i = 0; i < n; ++i) t.push_back({off + i, off + n + i, op.betas()[k]});
    }
    const auto d = static_cast<Index>(dim);
    return SparseMatrix::from_triplets(d, d, std::move(t));
}

SupraOperator::SupraOperator(const TemporalNetwork& net, double eps, LayerKind kind)
    : n_(net.nodes()), eps_(eps), kind_(kind), slices_(net.slices()) {
    if (!std::isfinite(eps)) throw InvalidArgument("SupraOperator: eps must be finite");
    if (const auto* katz = std::get_if<KatzLayers>(&kind_)) {
        check_alpha(katz->alpha, net.max_spectral_radius());
        resolvents_.reserve(slices_.size());
        for (const auto& s : slices_) resolvents_.emplace_back(s, katz->alpha);
    }
}

void SupraOperator::apply_impl(std::span<const double> x, std::span<double> y, bool transpose) const {
    if (x.size() != size() || y.size() != size())
        throw DimensionError("supra_apply: expected vectors of length " + std::to_string(size()));
    const auto n = static_cast<std::size_t>(n_);
    const std::size_t m = slices_.size();
    for (std::size_t k = 0; k < m; ++k) {
        const auto xk = x.subspan(k * n, n);
        auto yk = y.subspan(k * n, n);
        if (resolvents_.empty()) {
            transpose ? spmv_t(slices_[k], xk, yk) : spmv(slices_[k], xk, yk);
        } else {
            transpose ? resolvents_[k].solve_transpose(xk, yk) : resolvents_[k].solve(xk, yk);
        }
        for (double& v : yk) v *= eps_;
        // Identity couplings are symmetric, so the transpose only flips the layers.
        if (k > 0)
            for (std::size_t i = 0; i < n; ++i) yk[i] += x[(k - 1) * n + i];
        if (k + 1 < m)
            for (std::size_t i = 0; i < n; ++i) yk[i] += x[(k + 1) * n + i];
    }
}

void SupraOperator::apply(std::span<const double> x, std::span<double> y) const { apply_impl(x, y, false); }

void SupraOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
    apply_impl(x, y, true);
}

}  // namespace evoblock
