#include "evoblock/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/SparseCore>

#include "evoblock/errors.hpp"

namespace evoblock {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void check_nodes(Index n) {
    if (n < 2) throw InvalidArgument("generators need n >= 2, got " + std::to_string(n));
}

void check_steps(std::size_t m) {
    if (m < 1) throw InvalidArgument("generators need M >= 1");
}

void add_undirected(std::vector<Triplet>& t, Index i, Index j) {
    t.push_back({i, j, 1.0});
    t.push_back({j, i, 1.0});
}

std::vector<double> unit_times(std::size_t m) {
    std::vector<double> times(m);
    for (std::size_t k = 0; k < m; ++k) times[k] = static_cast<double>(k + 1);
    return times;
}

}  // namespace

SparseMatrix gen_erdos_renyi(Index n, double p, std::uint64_t seed) {
    check_nodes(n);
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("gen_erdos_renyi: p must lie in [0, 1]");
    Rng rng(seed);
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) add_undirected(t, i, j);
    return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix gen_pref(Index n, Index d, std::uint64_t seed) {
    check_nodes(n);
    if (d < 1) throw InvalidArgument("gen_pref: d must be at least 1");
    Rng rng(seed);
    std::vector<Triplet> t;
    // Every edge endpoint appears once here, so a uniform pick from it is a
    // degree-proportional pick of a node.
    std::vector<Index> ends;
    const Index core = std::min(n, d + 1);
    for (Index i = 0; i < core; ++i)
        for (Index j = i + 1; j < core; ++j) {
            add_undirected(t, i, j);
            ends.push_back(i);
            ends.push_back(j);
        }
    for (Index v = core; v < n; ++v) {
        std::set<Index> targets;
        while (static_cast<Index>(targets.size()) < d)
            targets.insert(ends[static_cast<std::size_t>(rng.below(ends.size()))]);
        for (Index u : targets) {
            add_undirected(t, u, v);
            ends.push_back(u);
            ends.push_back(v);
        }
    }
    return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix gen_renga(Index n, double lambda, std::uint64_t seed) {
    check_nodes(n);
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("gen_renga: lambda must lie in (0, 1)");
    Rng rng(seed);
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (rng.bernoulli(std::pow(lambda, static_cast<double>(j - i - 1)))) add_undirected(t, i, j);
    return SparseMatrix::from_triplets(n, n, t);
}

TemporalNetwork gen_pref_sequence(Index n, Index d, std::size_t steps, std::uint64_t seed) {
    check_steps(steps);
    std::vector<SparseMatrix> slices;
    for (std::size_t k = 0; k < steps; ++k) slices.push_back(gen_pref(n, d, derive_seed(seed, k)));
    return TemporalNetwork(n, unit_times(steps), std::move(slices));
}

TemporalNetwork gen_renga_sequence(Index n, double lambda, std::size_t steps, std::uint64_t seed) {
    check_steps(steps);
    std::vector<SparseMatrix> slices;
    for (std::size_t k = 0; k < steps; ++k) slices.push_back(gen_renga(n, lambda, derive_seed(seed, k)));
    return TemporalNetwork(n, unit_times(steps), std::move(slices));
}

TemporalNetwork gen_triadic_sequence(const SparseMatrix& a1, std::size_t steps, double omega, double delta, double eps,
                                     std::uint64_t seed) {
    check_steps(steps);
    const Index n = a1.rows();
    check_nodes(n);
    if (!a1.square() || !a1.is_symmetric() || !a1.has_zero_diagonal())
        throw InvalidArgument("gen_triadic_sequence: A1 must be symmetric with zero diagonal");
    if (!(omega >= 0.0 && omega <= 1.0)) throw InvalidArgument("gen_triadic_sequence: omega must lie in [0, 1]");
    if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("gen_triadic_sequence: delta must lie in [0, 1)");
    if (!(eps >= 0.0) || eps * static_cast<double>(n - 2) >= 1.0 - delta)
        throw InvalidArgument("gen_triadic_sequence: need 0 <= eps (n - 2) < 1 - delta");

    std::vector<SparseMatrix> slices{a1};
    Rng rng(seed);
    for (std::size_t k = 1; k < steps; ++k) {
        const auto cur = slices.back().to_eigen();
        using ColMajor = Eigen::SparseMatrix<double>;
        const ColMajor sq = ColMajor(cur) * ColMajor(cur);
        const Eigen::MatrixXd paths = Eigen::MatrixXd(sq);
        const Eigen::MatrixXd adj = slices.back().to_dense();
        std::vector<Triplet> t;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) {
                const bool present = adj(i, j) != 0.0;
                const double p = present ? 1.0 - omega : std::clamp(delta + eps * paths(i, j), 0.0, 1.0);
                if (rng.bernoulli(p)) add_undirected(t, i, j);
            }
        slices.push_back(SparseMatrix::from_triplets(n, n, t));
    }
    return TemporalNetwork(n, unit_times(steps), std::move(slices));
}

TemporalNetwork gen_triadic_preset(Index n, double density, std::size_t steps, std::uint64_t seed) {
    check_nodes(n);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    return gen_triadic_sequence(gen_erdos_renyi(n, density, derive_seed(seed, 0)), steps, 20.0 / n2, 20.0 / n2,
                                5.0 / n2, derive_seed(seed, 1));
}

TemporalNetwork gen_agenda_setter(const AgendaSetterOptions& opts, std::uint64_t seed) {
    const Index n = opts.n;
    check_nodes(n);
    check_steps(opts.steps);
    const double p = opts.edge_prob < 0.0 ? 4.0 / static_cast<double>(n) : opts.edge_prob;
    if (!(p <= 1.0)) throw InvalidArgument("gen_agenda_setter: edge probability must lie in [0, 1]");
    if (opts.chains < 0) throw InvalidArgument("gen_agenda_setter: chains must be nonnegative");

    Rng rng(seed);
    std::vector<std::vector<Triplet>> edges(opts.steps);
    for (std::size_t k = 0; k < opts.steps; ++k)
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (i != j && rng.bernoulli(p) && i != 0) edges[k].push_back({i, j, 1.0});

    for (int c = 0; c < opts.chains; ++c) {
        Index from = 0;
        for (std::size_t k = 0; k < opts.steps; ++k) {
            const auto to = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
            if (to != from) edges[k].push_back({from, to, 1.0});
            from = to;
        }
    }

    std::vector<SparseMatrix> slices;
    for (auto& e : edges) {
        std::sort(e.begin(), e.end(), [](const Triplet& x, const Triplet& y) {
            return x.row != y.row ? x.row < y.row : x.col < y.col;
        });
        e.erase(std::unique(e.begin(), e.end(),
                            [](const Triplet& x, const Triplet& y) { return x.row == y.row && x.col == y.col; }),
                e.end());
        slices.push_back(SparseMatrix::from_triplets(n, n, e));
    }
    return TemporalNetwork(n, unit_times(opts.steps), std::move(slices));
}

std::string GeneratorSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "kind=" << kind << ";n=" << n << ";M=" << steps << ";seed=" << seed;
    if (kind == "erdos_renyi") os << ";p=" << p;
    if (kind == "pref") os << ";d=" << d;
    if (kind == "renga") os << ";lambda=" << lambda;
    if (kind == "triadic") os << ";density=" << p << ";omega=" << omega << ";delta=" << delta << ";eps=" << eps;
    return os.str();
}

TemporalNetwork generate(const GeneratorSpec& spec) {
    if (spec.kind == "erdos_renyi") {
        check_steps(spec.steps);
        std::vector<SparseMatrix> slices;
        for (std::size_t k = 0; k < spec.steps; ++k)
            slices.push_back(gen_erdos_renyi(spec.n, spec.p, derive_seed(spec.seed, k)));
        return TemporalNetwork(spec.n, unit_times(spec.steps), std::move(slices));
    }
    if (spec.kind == "pref") return gen_pref_sequence(spec.n, spec.d, spec.steps, spec.seed);
    if (spec.kind == "renga") return gen_renga_sequence(spec.n, spec.lambda, spec.steps, spec.seed);
    if (spec.kind == "triadic") {
        if (spec.omega < 0.0 && spec.delta < 0.0 && spec.eps < 0.0)
            return gen_triadic_preset(spec.n, spec.p, spec.steps, spec.seed);
        if (spec.omega < 0.0 || spec.delta < 0.0 || spec.eps < 0.0)
            throw InvalidArgument("triadic: give all of omega, delta, eps or none of them");
        return gen_triadic_sequence(gen_erdos_renyi(spec.n, spec.p, derive_seed(spec.seed, 0)), spec.steps, spec.omega,
                                    spec.delta, spec.eps, derive_seed(spec.seed, 1));
    }
    if (spec.kind == "agenda_setter") {
        AgendaSetterOptions o;
        o.n = spec.n;
        o.steps = spec.steps;
        return gen_agenda_setter(o, spec.seed);
    }
    throw InvalidArgument("unknown generator kind '" + spec.kind + "'");
}

}  // namespace evoblock
