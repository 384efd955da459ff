#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evoblock/sparse_matrix.hpp"

namespace evoblock {

/// Fixed node set observed through M time-ordered unweighted adjacency slices.
///
/// Invariants (checked on construction): M >= 1, times strictly increasing,
/// every slice n x n with zero diagonal and all stored values equal to 1.
class TemporalNetwork {
public:
    TemporalNetwork(Index n, std::vector<double> times, std::vector<SparseMatrix> slices,
                    std::vector<std::string> labels = {});

    /// Builds slices from edge lists; duplicate edges collapse and self loops
    /// are dropped. Times default to 1, 2, ..., M.
    static TemporalNetwork from_edge_lists(Index n, const std::vector<std::vector<std::pair<Index, Index>>>& edges,
                                           std::vector<double> times = {});

    Index nodes() const noexcept { return n_; }
    std::size_t steps() const noexcept { return slices_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<SparseMatrix>& slices() const noexcept { return slices_; }
    const SparseMatrix& slice(std::size_t k) const { return slices_.at(k); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Gap before step k (0-based); the first gap is +infinity.
    double gap(std::size_t k) const;

    /// Largest spectral radius over the slices.
    double max_spectral_radius(PowerIterationOptions opts = {}) const;

    /// Applies a node relabelling: node i becomes perm[i] in every slice.
    TemporalNetwork permuted(const std::vector<Index>& perm) const;

    friend bool operator==(const TemporalNetwork&, const TemporalNetwork&) = default;

private:
    Index n_;
    std::vector<double> times_;
    std::vector<SparseMatrix> slices_;
    std::vector<std::string> labels_;
};

/// One logged interaction: src talks to dst from `start` for `duration` seconds.
struct EventRecord {
    Index src;
    Index dst;
    double start;
    double duration;
};

struct IngestOptions {
    double window = 1800.0;
    double t_begin = 0.0;
    double t_end = 0.0;
    bool symmetric = true;
    /// Node count; inferred as max id + 1 when absent.
    std::optional<Index> nodes;
};

struct IngestResult {
    TemporalNetwork network;
    std::size_t skipped_events = 0;  ///< events entirely outside the span, or self loops
    bool all_empty = false;          ///< every slice has no edges
};

/// Bins events into windows [t_begin + k w, t_begin + (k+1) w). An event
/// occupies every window its closed interval [start, start + duration] meets;
/// a zero-length event counts in the window holding its start and an event
/// that ends exactly on a boundary does not spill into the next window.
/// Slice k gets time k + 1, so consecutive gaps are 1.
IngestResult ingest_events(const std::vector<EventRecord>& events, const IngestOptions& opts);

/// Slices in reverse order at times -t_M < ... < -t_1, so the gap sequence is
/// the old one read backwards and reversing twice is the identity.
TemporalNetwork reverse_time(const TemporalNetwork& net);

/// Entrywise sum of all slices (edge counts).
SparseMatrix aggregate(const TemporalNetwork& net);

}  // namespace evoblock
