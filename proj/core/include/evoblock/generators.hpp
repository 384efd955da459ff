#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "evoblock/sparse_matrix.hpp"
#include "evoblock/temporal_network.hpp"

namespace evoblock {

/// Deterministic 64-bit stream. Draws are defined by this header alone, so a
/// seed reproduces the same graphs on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on {0, ..., bound - 1}; bound > 0.
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Seed for sub-stream `index` of `seed` (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Undirected G(n, p): each unordered pair independently with probability p.
SparseMatrix gen_erdos_renyi(Index n, double p, std::uint64_t seed);

/// One preferential-attachment graph: a (d+1)-clique seed, then each new node
/// attaches d distinct edges to earlier nodes with probability proportional
/// to their current degree.
SparseMatrix gen_pref(Index n, Index d, std::uint64_t seed);

/// One range-dependent graph: edge {i, j} with probability lambda^{|i-j|-1}.
SparseMatrix gen_renga(Index n, double lambda, std::uint64_t seed);

/// M independent samples of the corresponding static model, times 1..M.
TemporalNetwork gen_pref_sequence(Index n, Index d, std::size_t steps, std::uint64_t seed);
TemporalNetwork gen_renga_sequence(Index n, double lambda, std::size_t steps, std::uint64_t seed);

/// Triadic-closure Markov chain started at `a1`: existing edges die with
/// probability omega, absent pairs {i, j} are born with probability
/// delta + eps * (A^2)_ij (clamped to [0, 1]).
TemporalNetwork gen_triadic_sequence(const SparseMatrix& a1, std::size_t steps, double omega, double delta, double eps,
                                     std::uint64_t seed);

/// Triadic chain from G(n, density) with omega = delta = 20/n^2, eps = 5/n^2.
TemporalNetwork gen_triadic_preset(Index n, double density, std::size_t steps, std::uint64_t seed);

struct AgendaSetterOptions {
    Index n = 200;
    std::size_t steps = 4;
    double edge_prob = -1.0;  ///< negative means 4 / n
    int chains = 16;
};

/// Directed random slices in which node 0 loses its own out-edges and instead
/// starts `chains` planted walks 0 -> n2 -> n3 -> ... one hop per slice.
TemporalNetwork gen_agenda_setter(const AgendaSetterOptions& opts, std::uint64_t seed);

/// Serializable generator description used by the command-line tools.
struct GeneratorSpec {
    std::string kind = "pref";  ///< erdos_renyi | pref | renga | triadic | agenda_setter
    Index n = 200;
    std::size_t steps = 10;
    double p = 0.1;       ///< erdos_renyi edge probability, triadic initial density
    Index d = 4;          ///< pref attachment count
    double lambda = 0.5;  ///< renga decay
    double omega = -1.0;  ///< triadic rates; negative means the 20/n^2, 20/n^2, 5/n^2 preset
    double delta = -1.0;
    double eps = -1.0;
    std::uint64_t seed = 1;

    std::string describe() const;
};

TemporalNetwork generate(const GeneratorSpec& spec);

}  // namespace evoblock
