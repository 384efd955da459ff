#include "evoblock/temporal_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evoblock/errors.hpp"

namespace evoblock {

TemporalNetwork::TemporalNetwork(Index n, std::vector<double> times, std::vector<SparseMatrix> slices,
                                 std::vector<std::string> labels)
    : n_(n), times_(std::move(times)), slices_(std::move(slices)), labels_(std::move(labels)) {
    if (n_ < 1) throw InvalidArgument("TemporalNetwork: need at least one node");
    if (slices_.empty()) throw InvalidArgument("TemporalNetwork: need at least one slice");
    if (times_.size() != slices_.size())
        throw InvalidArgument("TemporalNetwork: " + std::to_string(times_.size()) + " times for " +
                              std::to_string(slices_.size()) + " slices");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1])) throw InvalidArgument("TemporalNetwork: times must be strictly increasing");
    for (std::size_t k = 0; k < slices_.size(); ++k) {
        const auto& s = slices_[k];
        if (s.rows() != n_ || s.cols() != n_)
            throw InvalidArgument("TemporalNetwork: slice " + std::to_string(k) + " is not " + std::to_string(n_) +
                                  "x" + std::to_string(n_));
        if (!s.has_zero_diagonal()) throw InvalidArgument("TemporalNetwork: slice " + std::to_string(k) + " has a self loop");
        for (double v : s.values())
            if (v != 1.0) throw InvalidArgument("TemporalNetwork: slices must be unweighted (0/1)");
    }
    if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(n_))
        throw InvalidArgument("TemporalNetwork: label count does not match node count");
}

TemporalNetwork TemporalNetwork::from_edge_lists(Index n, const std::vector<std::vector<std::pair<Index, Index>>>& edges,
                                                 std::vector<double> times) {
    std::vector<SparseMatrix> slices;
    slices.reserve(edges.size());
    for (const auto& list : edges) {
        std::vector<std::pair<Index, Index>> e;
        e.reserve(list.size());
        for (auto [i, j] : list)
            if (i != j) e.emplace_back(i, j);
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        std::vector<Triplet> t;
        t.reserve(e.size());
        for (auto [i, j] : e) t.push_back({i, j, 1.0});
        slices.push_back(SparseMatrix::from_triplets(n, n, std::move(t)));
    }
    if (times.empty()) {
        times.resize(slices.size());
        for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<double>(k + 1);
    }
    return TemporalNetwork(n, std::move(times), std::move(slices));
}

double TemporalNetwork::gap(std::size_t k) const {
    if (k >= times_.size()) throw InvalidArgument("TemporalNetwork::gap: step out of range");
    if (k == 0) return std::numeric_limits<double>::infinity();
    return times_[k] - times_[k - 1];
}

double TemporalNetwork::max_spectral_radius(PowerIterationOptions opts) const {
    double rho = 0.0;
    for (const auto& s : slices_) rho = std::max(rho, spectral_radius(s, opts));
    return rho;
}

TemporalNetwork TemporalNetwork::permuted(const std::vector<Index>& perm) const {
    if (perm.size() != static_cast<std::size_t>(n_)) throw InvalidArgument("permuted: permutation has wrong length");
    std::vector<SparseMatrix> out;
    out.reserve(slices_.size());
    for (const auto& s : slices_) {
        std::vector<Triplet> t;
        t.reserve(s.nnz());
        const auto ro = s.row_offsets();
        const auto ci = s.col_indices();
        for (Index i = 0; i < n_; ++i)
            for (Index k = ro[static_cast<std::size_t>(i)]; k < ro[static_cast<std::size_t>(i) + 1]; ++k)
                t.push_back({perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])], 1.0});
        out.push_back(SparseMatrix::from_triplets(n_, n_, std::move(t)));
    }
    std::vector<std::string> labels;
    if (!labels_.empty()) {
        labels.resize(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i) labels[static_cast<std::size_t>(perm[i])] = labels_[i];
    }
    return TemporalNetwork(n_, times_, std::move(out), std::move(labels));
}

IngestResult ingest_events(const std::vector<EventRecord>& events, const IngestOptions& opts) {
    if (!(opts.window > 0.0)) throw InvalidArgument("ingest_events: window must be positive");
    if (!(opts.t_end > opts.t_begin)) throw InvalidArgument("ingest_events: span end must exceed span begin");

    Index n = 0;
    for (const auto& e : events) {
        if (e.src < 0 || e.dst < 0) throw InvalidArgument("ingest_events: negative node id");
        if (e.duration < 0.0 || !std::isfinite(e.duration) || !std::isfinite(e.start))
            throw InvalidArgument("ingest_events: duration must be finite and nonnegative");
        n = std::max({n, e.src + 1, e.dst + 1});
    }
    if (opts.nodes) {
        if (*opts.nodes < n) throw InvalidArgument("ingest_events: node id exceeds declared node count");
        n = *opts.nodes;
    }
    if (n == 0) throw InvalidArgument("ingest_events: cannot infer node count from an empty event list");

    const auto windows = static_cast<std::size_t>(std::ceil((opts.t_end - opts.t_begin) / opts.window));
    std::vector<std::vector<std::pair<Index, Index>>> edges(windows);
    std::size_t skipped = 0;

    for (const auto& e : events) {
        const double stop = e.start + e.duration;
        const bool outside = e.duration > 0.0 ? (stop <= opts.t_begin || e.start >= opts.t_end)
                                              : (e.start < opts.t_begin || e.start >= opts.t_end);
        if (outside || e.src == e.dst) {
            ++skipped;
            continue;
        }
        const double lo = std::max(e.start, opts.t_begin) - opts.t_begin;
        const double hi = std::min(stop, opts.t_end) - opts.t_begin;
        auto first = static_cast<std::size_t>(std::floor(lo / opts.window));
        auto last = first;
        if (e.duration > 0.0) {
            // windows whose interior meets (start, stop)
            last = static_cast<std::size_t>(std::ceil(hi / opts.window));
            last = last == 0 ? 0 : last - 1;
        }
        last = std::min(last, windows - 1);
        for (std::size_t k = first; k <= last; ++k) {
            edges[k].emplace_back(e.src, e.dst);
            if (opts.symmetric) edges[k].emplace_back(e.dst, e.src);
        }
    }

    auto net = TemporalNetwork::from_edge_lists(n, edges);
    bool empty = true;
    for (const auto& s : net.slices()) empty = empty && s.nnz() == 0;
    return IngestResult{std::move(net), skipped, empty};
}

TemporalNetwork reverse_time(const TemporalNetwork& net) {
    const auto& t = net.times();
    const std::size_t m = t.size();
    std::vector<double> times(m);
    std::vector<SparseMatrix> slices(net.slices().rbegin(), net.slices().rend());
    // t'_k = -t_{M+1-k}: negation is exact, so the gaps are the old ones read
    // backwards bit for bit and reversing twice restores the network exactly.
    for (std::size_t k = 0; k < m; ++k) times[k] = -t[m - 1 - k];
    return TemporalNetwork(net.nodes(), std::move(times), std::move(slices), net.labels());
}

SparseMatrix aggregate(const TemporalNetwork& net) {
    SparseMatrix sum(net.nodes(), net.nodes());
    for (const auto& s : net.slices()) sum = add(sum, s);
    return sum;
}

}  // namespace evoblock
