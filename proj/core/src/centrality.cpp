#include "evoblock/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "evoblock/errors.hpp"
#include "evoblock/quadrature.hpp"
#include "evoblock/resolvent.hpp"
#include "evoblock/solvers.hpp"

namespace evoblock {

std::string_view to_string(Direction d) { return d == Direction::Broadcast ? "broadcast" : "receive"; }

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::Recursion: return "recursion";
        case Backend::Direct: return "direct";
        case Backend::Splitting: return "splitting";
        case Backend::Lsqr: return "lsqr";
        case Backend::Quadrature: return "quadrature";
    }
    return "unknown";
}

Direction parse_direction(std::string_view s) {
    if (s == "broadcast") return Direction::Broadcast;
    if (s == "receive") return Direction::Receive;
    throw InvalidArgument("unknown direction '" + std::string(s) + "' (expected broadcast or receive)");
}

Backend parse_backend(std::string_view s) {
    if (s == "recursion" || s == "original") return Backend::Recursion;
    if (s == "direct") return Backend::Direct;
    if (s == "splitting") return Backend::Splitting;
    if (s == "lsqr") return Backend::Lsqr;
    if (s == "quadrature") return Backend::Quadrature;
    throw InvalidArgument("unknown backend '" + std::string(s) +
                          "' (expected recursion, direct, splitting, lsqr or quadrature)");
}

std::size_t CentralityReport::rank_of(Index node) const {
    const auto it = std::find(ranking.begin(), ranking.end(), node);
    if (it == ranking.end()) throw InvalidArgument("rank_of: node " + std::to_string(node) + " not ranked");
    return static_cast<std::size_t>(it - ranking.begin()) + 1;
}

std::vector<Index> rank_scores(const std::vector<double>& scores) {
    std::vector<Index> order(scores.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
        return scores[static_cast<std::size_t>(x)] > scores[static_cast<std::size_t>(y)];
    });
    return order;
}

TemporalNetwork prefix(const TemporalNetwork& net, std::size_t j) {
    if (j < 1 || j > net.steps())
        throw InvalidArgument("slice index " + std::to_string(j) + " outside [1, " + std::to_string(net.steps()) + "]");
    if (j == net.steps()) return net;
    std::vector<double> times(net.times().begin(), net.times().begin() + static_cast<std::ptrdiff_t>(j));
    std::vector<SparseMatrix> slices(net.slices().begin(), net.slices().begin() + static_cast<std::ptrdiff_t>(j));
    return TemporalNetwork(net.nodes(), std::move(times), std::move(slices), net.labels());
}

namespace {

double checked_radius(const TemporalNetwork& net, double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("a must be finite and nonnegative");
    const double rho = net.max_spectral_radius();
    if (a * rho * (1.0 + 1e-6) >= 1.0)
        throw InvalidArgument("a = " + std::to_string(a) + " violates a < 1/rho* = " +
                              std::to_string(rho > 0 ? 1.0 / rho : INFINITY));
    return rho;
}

void check_dense(const TemporalNetwork& net) {
    if (net.nodes() > kMaxDenseNodes)
        throw InvalidArgument("dense n x n communicability limited to n <= " + std::to_string(kMaxDenseNodes));
}

std::size_t resolve_j(const TemporalNetwork& net, std::size_t j) {
    if (j == 0) j = net.steps();
    if (j < 1 || j > net.steps())
        throw InvalidArgument("slice index " + std::to_string(j) + " outside [1, " + std::to_string(net.steps()) + "]");
    return j;
}

/// e^{-b dt_k} for the 1-based slice k, with dt_1 = infinity.
double decay(const TemporalNetwork& net, double b, std::size_t k) {
    if (k == 1) return 0.0;
    return std::exp(-b * net.gap(k - 1));
}

/// Largest singular value by power iteration on S^T S.
double spectral_norm(const Eigen::MatrixXd& s) {
    if (s.size() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(s.cols()) / std::sqrt(static_cast<double>(s.cols()));
    double lambda = 0.0;
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd w = s.transpose() * (s * v);
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        if (std::abs(next - lambda) <= 1e-14 * next) return std::sqrt(next);
        lambda = next;
    }
    return std::sqrt(lambda);
}

Eigen::MatrixXd normalized(Eigen::MatrixXd s) {
    const double nrm = spectral_norm(s);
    if (nrm > 0.0) s /= nrm;
    return s;
}

/// A product of resolvents held as scale * exp(log_scale).
struct ScaledProduct {
    Eigen::MatrixXd m;
    double log_scale = 0.0;
};

/// R_first R_{first+1} ... R_last over the given factorizations, each step
/// renormalised by its max entry.
ScaledProduct scaled_product(const std::vector<const Resolvent*>& chain, Index n) {
    ScaledProduct p{Eigen::MatrixXd::Identity(n, n), 0.0};
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        p.m = (*it)->solve(p.m);
        const double mx = p.m.cwiseAbs().maxCoeff();
        if (!(mx > 0.0) || !std::isfinite(mx)) throw NumericalError("resolvent product lost all mass");
        p.m /= mx;
        p.log_scale += std::log(mx);
    }
    return p;
}

/// Sum over the selected pairs of (Q_ij - Qbar_ij) / Q_ij.
BetweennessValue relative_drop(const ScaledProduct& q, const ScaledProduct& qbar, Index skip) {
    const Index n = q.m.rows();
    const double ratio_scale = std::exp(qbar.log_scale - q.log_scale);
    BetweennessValue out;
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (i == skip) continue;
        for (Index j = 0; j < n; ++j) {
            if (j == i || j == skip) continue;
            const double qij = q.m(i, j);
            if (qij == 0.0) {
                ++out.vacuous_pairs;
                continue;
            }
            sum += 1.0 - ratio_scale * qbar.m(i, j) / qij;
        }
    }
    const double nm1 = static_cast<double>(n - 1);
    out.value = sum / (nm1 * nm1 - nm1);
    return out;
}

void require_three_nodes(const TemporalNetwork& net) {
    if (net.nodes() < 3) throw InvalidArgument("betweenness needs at least 3 nodes");
}

std::vector<Resolvent> factor_all(const std::vector<SparseMatrix>& slices, double a) {
    std::vector<Resolvent> out;
    out.reserve(slices.size());
    for (const auto& s : slices) out.emplace_back(s, a);
    return out;
}

std::vector<const Resolvent*> pointers(const std::vector<Resolvent>& rs, std::size_t skip = SIZE_MAX) {
    std::vector<const Resolvent*> out;
    for (std::size_t k = 0; k < rs.size(); ++k)
        if (k != skip) out.push_back(&rs[k]);
    return out;
}

CentralityReport make_report(std::vector<double> scores, std::string method, Backend backend,
                             const CentralityParams& params, double rho) {
    CentralityReport r;
    r.ranking = rank_scores(scores);
    r.scores = std::move(scores);
    r.method = std::move(method);
    r.backend = std::string(to_string(backend));
    r.params = params;
    r.rho_star = rho;
    return r;
}

Eigen::MatrixXd dense_inverse_of_identity_minus(const BlockOperator& op, std::size_t cap) {
    const Eigen::MatrixXd b = dense_assemble(op, cap).to_dense();
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(b.rows(), b.cols()) - b;
    return m.partialPivLu().inverse();
}

ScaledProduct unscaled(Eigen::MatrixXd m) { return {std::move(m), 0.0}; }

}  // namespace

Eigen::MatrixXd dyn_comm(const TemporalNetwork& net, double a, std::size_t i, std::size_t j) {
    check_dense(net);
    checked_radius(net, a);
    if (i < 1 || j < i || j > net.steps())
        throw InvalidArgument("dyn_comm: need 1 <= i <= j <= M, got i = " + std::to_string(i) +
                              ", j = " + std::to_string(j));
    const Index n = net.nodes();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t s = j; s >= i; --s) {
        p = Resolvent(net.slice(s - 1), a).solve(p);
        if (!p.allFinite()) throw NumericalError("dyn_comm: product overflowed");
    }
    return p;
}

std::pair<std::vector<double>, std::vector<double>> broadcast_receive(const Eigen::MatrixXd& q) {
    const Eigen::VectorXd rows = q.rowwise().sum();
    const Eigen::VectorXd cols = q.colwise().sum().transpose();
    return {std::vector<double>(rows.data(), rows.data() + rows.size()),
            std::vector<double>(cols.data(), cols.data() + cols.size())};
}

Eigen::MatrixXd running_comm_recursive(const TemporalNetwork& net, const CentralityParams& params, std::size_t j,
                                       const std::function<void(std::size_t, const Eigen::MatrixXd&)>& observer) {
    check_dense(net);
    checked_radius(net, params.a);
    if (!(params.b >= 0.0)) throw InvalidArgument("b must be nonnegative");
    j = resolve_j(net, j);
    const Index n = net.nodes();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    // Track T = S + I = sigma * that, with log(sigma) kept separately when
    // normalising so that long or dense sequences cannot overflow.
    Eigen::MatrixXd that = eye;
    double log_sigma = 0.0;
    auto current = [&]() -> Eigen::MatrixXd {
        if (!params.normalize) return that - eye;
        return normalized(that - std::exp(-log_sigma) * eye);
    };

    for (std::size_t k = 1; k <= j; ++k) {
        const double c = decay(net, params.b, k);
        const Resolvent r(net.slice(k - 1), params.a);
        Eigen::MatrixXd lhs = c * that;
        lhs.diagonal().array() += (1.0 - c) * std::exp(-log_sigma);
        that = r.right_solve(lhs);
        if (params.normalize) {
            const double mx = that.cwiseAbs().maxCoeff();
            if (mx > 0.0 && std::isfinite(mx)) {
                that /= mx;
                log_sigma += std::log(mx);
            }
        }
        if (!that.allFinite())
            throw NumericalError("running communicability overflowed at slice " + std::to_string(k) +
                                 "; enable normalisation");
        if (observer) observer(k, current());
    }
    return current();
}

Eigen::MatrixXd lemma_expansion(const TemporalNetwork& net, const CentralityParams& params, std::size_t j) {
    check_dense(net);
    checked_radius(net, params.a);
    j = resolve_j(net, j);
    const Index n = net.nodes();
    const auto& t = net.times();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = j; i >= 1; --i) {
        q = Resolvent(net.slice(i - 1), params.a).solve(q);  // q = Q^[i,j]
        const double w = (1.0 - decay(net, params.b, i)) * std::exp(-params.b * (t[j - 1] - t[i - 1]));
        s += w * q;
    }
    s -= Eigen::MatrixXd::Identity(n, n);
    if (!s.allFinite()) throw NumericalError("lemma_expansion overflowed");
    return params.normalize ? normalized(std::move(s)) : s;
}

CentralityReport running_scores_block(const TemporalNetwork& full, const CentralityParams& params, std::size_t j,
                                      Direction direction, Backend backend, const SolverSettings& settings) {
    j = resolve_j(full, j);
    const double rho = checked_radius(full, params.a);
    if (!(params.b >= 0.0)) throw InvalidArgument("b must be nonnegative");
    const std::string method = "running-" + std::string(to_string(direction));

    if (backend == Backend::Recursion) {
        const auto s = running_comm_recursive(full, params, j);
        auto [rows, cols] = broadcast_receive(s);
        auto rep = make_report(direction == Direction::Broadcast ? std::move(rows) : std::move(cols), method, backend,
                               params, rho);
        rep.iterations = j;
        return rep;
    }

    // Blocks after j never reach e_j (forward) or block j (backward), so the
    // solve only needs slices 1..j.
    const TemporalNetwork net = prefix(full, j);
    const auto betas = decay_betas(net, params.b);
    const BlockOperator op(net, params.a, betas, FullNetwork{}, rho);
    const auto n = static_cast<std::size_t>(net.nodes());
    const std::size_t m = net.steps();
    std::vector<double> d(m, 1.0);
    for (std::size_t k = 1; k < m; ++k) d[k] = 1.0 - betas[k - 1];

    std::vector<double> scores(n, 0.0);
    std::size_t iterations = 0;
    double residual = 0.0;

    if (backend == Backend::Quadrature) {
        std::vector<double> u(op.size(), 0.0), v(op.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(u.begin(), u.end(), 0.0);
            std::fill(v.begin(), v.end(), 0.0);
            if (direction == Direction::Broadcast) {
                for (std::size_t k = 0; k < m; ++k) u[k * n + i] = d[k];
                std::fill(v.begin() + static_cast<std::ptrdiff_t>((m - 1) * n), v.end(), 1.0);
            } else {
                for (std::size_t k = 0; k < m; ++k)
                    std::fill(u.begin() + static_cast<std::ptrdiff_t>(k * n),
                              u.begin() + static_cast<std::ptrdiff_t>((k + 1) * n), d[k]);
                v[(m - 1) * n + i] = 1.0;
            }
            const auto est = bilinear_form(op, u, v, settings.quad_rel_tol, settings.max_ell);
            scores[i] = est.value - 1.0;
            iterations = std::max(iterations, est.ell);
            residual = std::max(residual, est.rel_distance);
        }
    } else {
        std::vector<double> rhs(op.size(), 0.0);
        if (direction == Direction::Broadcast)
            std::fill(rhs.begin() + static_cast<std::ptrdiff_t>((m - 1) * n), rhs.end(), 1.0);
        else
            for (std::size_t k = 0; k < m; ++k)
                std::fill(rhs.begin() + static_cast<std::ptrdiff_t>(k * n),
                          rhs.begin() + static_cast<std::ptrdiff_t>((k + 1) * n), d[k]);

        const TransposedOperator opt(op);
        const LinearOperator& g = direction == Direction::Broadcast ? static_cast<const LinearOperator&>(op) : opt;
        SolveOutcome out;
        switch (backend) {
            case Backend::Direct: {
                const auto bs = dense_assemble(op, settings.dense_cap);
                out = direction == Direction::Broadcast ? solve_direct(bs, rhs, settings.dense_cap)
                                                        : solve_direct_transpose(bs, rhs, settings.dense_cap);
                break;
            }
            case Backend::Splitting: out = solve_splitting(g, rhs, settings.tol, settings.max_iter); break;
            case Backend::Lsqr: out = solve_lsqr(IdentityMinus(g), rhs, settings.tol, settings.max_iter); break;
            default: throw InvalidArgument("unsupported backend");
        }
        iterations = out.iterations;
        residual = out.residual_estimate;
        if (direction == Direction::Broadcast) {
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t i = 0; i < n; ++i) scores[i] += d[k] * out.x[k * n + i];
            for (double& s : scores) s -= 1.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) scores[i] = out.x[(m - 1) * n + i] - 1.0;
        }
    }

    for (double s : scores)
        if (!std::isfinite(s)) throw NumericalError("running scores are not finite");
    auto rep = make_report(std::move(scores), method, backend, params, rho);
    rep.iterations = iterations;
    rep.residual = residual;
    return rep;
}

BetweennessValue nodal_betweenness(const TemporalNetwork& net, double a, Index r) {
    require_three_nodes(net);
    check_dense(net);
    checked_radius(net, a);
    if (r < 0 || r >= net.nodes()) throw InvalidArgument("nodal_betweenness: node " + std::to_string(r) + " out of range");
    const auto rs = factor_all(net.slices(), a);
    const auto q = scaled_product(pointers(rs), net.nodes());
    std::vector<SparseMatrix> cut;
    for (const auto& s : net.slices()) cut.push_back(remove_node_edges(s, r));
    const auto qbar = scaled_product(pointers(factor_all(cut, a)), net.nodes());
    return relative_drop(q, qbar, r);
}

std::vector<BetweennessValue> nodal_betweenness_all(const TemporalNetwork& net, double a) {
    require_three_nodes(net);
    check_dense(net);
    checked_radius(net, a);
    const auto rs = factor_all(net.slices(), a);
    const auto q = scaled_product(pointers(rs), net.nodes());
    std::vector<BetweennessValue> out;
    out.reserve(static_cast<std::size_t>(net.nodes()));
    for (Index r = 0; r < net.nodes(); ++r) {
        std::vector<SparseMatrix> cut;
        for (const auto& s : net.slices()) cut.push_back(remove_node_edges(s, r));
        const auto qbar = scaled_product(pointers(factor_all(cut, a)), net.nodes());
        out.push_back(relative_drop(q, qbar, r));
    }
    return out;
}

BetweennessValue temporal_betweenness(const TemporalNetwork& net, double a, std::size_t q) {
    require_three_nodes(net);
    check_dense(net);
    checked_radius(net, a);
    if (q < 1 || q > net.steps())
        throw InvalidArgument("temporal_betweenness: slice " + std::to_string(q) + " outside [1, M]");
    const auto rs = factor_all(net.slices(), a);
    return relative_drop(scaled_product(pointers(rs), net.nodes()),
                         scaled_product(pointers(rs, q - 1), net.nodes()), -1);
}

std::vector<BetweennessValue> temporal_betweenness_all(const TemporalNetwork& net, double a) {
    require_three_nodes(net);
    check_dense(net);
    checked_radius(net, a);
    const auto rs = factor_all(net.slices(), a);
    const auto full = scaled_product(pointers(rs), net.nodes());
    std::vector<BetweennessValue> out;
    for (std::size_t q = 0; q < net.steps(); ++q)
        out.push_back(relative_drop(full, scaled_product(pointers(rs, q), net.nodes()), -1));
    return out;
}

double nodal_betweenness_block(const TemporalNetwork& net, double a, Index r, std::size_t cap) {
    require_three_nodes(net);
    const Index n = net.nodes();
    const auto betas = unit_betas(net.steps());
    const auto f = dense_inverse_of_identity_minus(BlockOperator(net, a, betas), cap);
    const auto fbar = dense_inverse_of_identity_minus(BlockOperator(net, a, betas, NodeDeleted{r}), cap);
    const Index last = static_cast<Index>(net.steps() - 1) * n;
    return relative_drop(unscaled(f.block(0, last, n, n)), unscaled(fbar.block(0, last, n, n)), r).value;
}

double temporal_betweenness_block(const TemporalNetwork& net, double a, std::size_t q, std::size_t cap) {
    require_three_nodes(net);
    const Index n = net.nodes();
    const auto betas = unit_betas(net.steps());
    const auto f = dense_inverse_of_identity_minus(BlockOperator(net, a, betas), cap);
    const Index last = static_cast<Index>(net.steps() - 1) * n;
    Eigen::MatrixXd qhat = Eigen::MatrixXd::Identity(n, n);
    if (net.steps() > 1) {
        const auto fhat = dense_inverse_of_identity_minus(BlockOperator(net, a, betas, TimeDeleted{q}), cap);
        qhat = fhat.block(0, last - n, n, n);
    } else if (q != 1) {
        throw InvalidArgument("temporal_betweenness_block: slice out of range");
    }
    return relative_drop(unscaled(f.block(0, last, n, n)), unscaled(qhat), -1).value;
}

double theorem_block_check(const TemporalNetwork& net, double alpha, const std::vector<double>& betas,
                           std::size_t cap) {
    const BlockOperator op(net, alpha, betas);
    const Eigen::MatrixXd f = dense_inverse_of_identity_minus(op, cap);
    const Index n = net.nodes();
    const std::size_t m = net.steps();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    std::vector<Eigen::MatrixXd> r;
    for (const auto& s : net.slices()) r.push_back((eye - alpha * s.to_dense()).partialPivLu().inverse());

    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j)
            worst = std::max(worst, f.block(static_cast<Index>(i) * n, static_cast<Index>(j) * n, n, n)
                                        .cwiseAbs()
                                        .maxCoeff());
        Eigen::MatrixXd prod = r[i];
        double beta = 1.0;
        for (std::size_t j = i; j < m; ++j) {
            if (j > i) {
                prod = prod * r[j];
                beta *= betas[j - 1];
            }
            const auto blk = f.block(static_cast<Index>(i) * n, static_cast<Index>(j) * n, n, n);
            worst = std::max(worst, (blk - beta * prod).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

CentralityReport supra_marginal_centrality(const TemporalNetwork& net, double alpha, double eps, double ahat_factor,
                                           Direction direction, double tol) {
    const double rho_star = checked_radius(net, alpha);
    if (!(ahat_factor > 0.0 && ahat_factor < 1.0)) throw InvalidArgument("ahat_factor must lie in (0, 1)");
    if (!(eps >= 0.0)) throw InvalidArgument("eps must be nonnegative");
    const SupraOperator op(net, eps, KatzLayers{alpha});
    const double rho = spectral_radius(op, {1e-10, 100000});
    if (!(rho > 0.0)) throw NumericalError("supra-centrality operator has zero spectral radius");
    const double ahat = ahat_factor / rho;

    const TransposedOperator opt(op);
    const LinearOperator& g = direction == Direction::Broadcast ? static_cast<const LinearOperator&>(op) : opt;
    const ScaledOperator scaled(g, ahat);
    const std::vector<double> ones(op.size(), 1.0);
    const auto out = solve_splitting(scaled, ones, tol, 1000000);

    const auto n = static_cast<std::size_t>(net.nodes());
    std::vector<double> marginal(n, 0.0);
    for (std::size_t k = 0; k < net.steps(); ++k)
        for (std::size_t i = 0; i < n; ++i) marginal[i] += out.x[k * n + i];

    auto rep = make_report(std::move(marginal), "supra-marginal-" + std::string(to_string(direction)),
                           Backend::Splitting, CentralityParams{alpha, 0.0, false}, rho_star);
    rep.iterations = out.iterations;
    rep.residual = out.residual_estimate;
    return rep;
}

}  // namespace evoblock
