#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evoblock/centrality.hpp"
#include "evoblock/generators.hpp"
#include "evoblock/io.hpp"

namespace evoblock {

/// Where the network comes from: an event file, a snapshot file or a
/// generator. Exactly one of `input` and `generator` must be set.
struct InputConfig {
    std::optional<std::filesystem::path> input;
    std::optional<GeneratorSpec> generator;
    double window = 1800.0;     ///< event binning width
    bool reverse_time = false;
};

struct RunConfig {
    InputConfig source;
    double a_factor = 0.9;  ///< a = a_factor / rho*
    double b = 1.0;
    double eps = 2.718281828459045;
    Backend backend = Backend::Direct;
    Direction direction = Direction::Broadcast;
    std::size_t slice_j = 0;  ///< 0 means the last slice
    bool normalize = false;
    SolverSettings solver;
    std::filesystem::path out;
    ReportFormat format = ReportFormat::Csv;
    std::optional<std::filesystem::path> scatter;
    std::vector<Index> flagged;  ///< nodes whose ranks cmd_compare reports
};

/// Builds the network described by `source`. Event files are recognised by
/// their `src,dst,start,duration` header and binned into `window`-wide slices.
TemporalNetwork load_network(const InputConfig& source);

/// a = factor / rho*, or the factor itself when every slice is empty.
double resolve_a(const TemporalNetwork& net, double a_factor);

void cmd_generate(const GeneratorSpec& spec, const std::filesystem::path& out);

CentralityReport cmd_centrality(const RunConfig& config);

struct Comparison {
    CentralityReport block;
    CentralityReport supra;
};

/// Block-formulation running scores and supra-centrality marginal scores on
/// the same network with matched a.
Comparison cmd_compare(const RunConfig& config);

struct BenchConfig {
    std::string kind = "pref";
    std::vector<std::pair<Index, std::size_t>> grid{{200, 10}};
    std::vector<Backend> backends{Backend::Quadrature, Backend::Direct, Backend::Splitting, Backend::Lsqr};
    double a_factor = 0.9;
    double b = 1.0;
    SolverSettings solver;
    std::uint64_t seed = 1;
    GeneratorSpec base;  ///< kind-specific parameters; n, M and seed come from the grid
    /// Run grid points concurrently. Timings then compete for cores and are noisy.
    bool parallel = false;
};

struct BenchCell {
    Index n = 0;
    std::size_t steps = 0;
    Backend backend = Backend::Recursion;
    double seconds = 0.0;
    double error = 0.0;  ///< max-abs deviation from the recursion scores; NaN on failure
    std::string note;
};

/// Times every backend on every grid point against the recursion baseline.
std::vector<BenchCell> run_bench(const BenchConfig& config);

/// One row per grid point: n, M, original time, then time and error per backend.
void write_bench_csv(std::ostream& out, const BenchConfig& config, const std::vector<BenchCell>& cells);

}  // namespace evoblock
