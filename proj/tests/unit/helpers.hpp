#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "evoblock/generators.hpp"
#include "evoblock/temporal_network.hpp"

namespace evoblock::test {

/// Random slices with edge probability p; symmetric slices when `undirected`.
inline TemporalNetwork random_network(Rng& rng, Index n, std::size_t m, double p, bool undirected,
                                      bool random_times = false) {
    std::vector<std::vector<std::pair<Index, Index>>> edges(m);
    for (auto& e : edges)
        for (Index i = 0; i < n; ++i)
            for (Index j = undirected ? i + 1 : 0; j < n; ++j) {
                if (i == j || !rng.bernoulli(p)) continue;
                e.emplace_back(i, j);
                if (undirected) e.emplace_back(j, i);
            }
    std::vector<double> times;
    if (random_times) {
        double t = rng.uniform();
        for (std::size_t k = 0; k < m; ++k) {
            times.push_back(t);
            t += 0.25 + 2.0 * rng.uniform();
        }
    }
    return TemporalNetwork::from_edge_lists(n, edges, times);
}

inline Eigen::MatrixXd dense_resolvent(const SparseMatrix& a, double alpha) {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    return (eye - alpha * a.to_dense()).inverse();
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

inline double max_abs(const std::vector<double>& x) {
    double d = 0.0;
    for (double v : x) d = std::max(d, std::abs(v));
    return d;
}

inline std::vector<Index> random_permutation(Rng& rng, Index n) {
    std::vector<Index> p(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

}  // namespace evoblock::test
