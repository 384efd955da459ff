#include "evoblock/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>

#include "evoblock/errors.hpp"

namespace evoblock {

namespace {

bool is_event_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line.rfind("src,dst,start,duration", 0) == 0;
}

TemporalNetwork load_events(const std::filesystem::path& path, double window) {
    const auto events = read_events_csv(path);
    if (events.empty()) throw IoError(path.string() + ": no events");
    IngestOptions opts;
    opts.window = window;
    opts.t_begin = std::numeric_limits<double>::infinity();
    opts.t_end = -std::numeric_limits<double>::infinity();
    Index n = 0;
    for (const auto& e : events) {
        opts.t_begin = std::min(opts.t_begin, e.start);
        // A zero-length event at the very end still needs a window of its own.
        const double stop = e.duration > 0.0 ? e.start + e.duration
                                             : std::nextafter(e.start, std::numeric_limits<double>::infinity());
        opts.t_end = std::max(opts.t_end, stop);
        n = std::max({n, e.src + 1, e.dst + 1});
    }
    opts.nodes = n;
    return ingest_events(events, opts).network;
}

template <typename F>
double seconds_of(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TemporalNetwork load_network(const InputConfig& source) {
    if (source.input.has_value() == source.generator.has_value())
        throw InvalidArgument("exactly one of an input file and a generator must be given");
    TemporalNetwork net = source.generator ? generate(*source.generator)
                          : is_event_file(*source.input) ? load_events(*source.input, source.window)
                                                         : read_snapshots(*source.input);
    return source.reverse_time ? reverse_time(net) : net;
}

double resolve_a(const TemporalNetwork& net, double a_factor) {
    if (!(a_factor >= 0.0 && a_factor < 1.0)) throw InvalidArgument("a-factor must lie in [0, 1)");
    const double rho = net.max_spectral_radius();
    return rho > 0.0 ? a_factor / rho : a_factor;
}

void cmd_generate(const GeneratorSpec& spec, const std::filesystem::path& out) {
    const auto net = generate(spec);
    write_snapshots(out, net, {{"generator", spec.kind}, {"seed", std::to_string(spec.seed)}, {"spec", spec.describe()}});
}

CentralityReport cmd_centrality(const RunConfig& config) {
    const auto net = load_network(config.source);
    const CentralityParams params{resolve_a(net, config.a_factor), config.b, config.normalize};
    auto report = running_scores_block(net, params, config.slice_j, config.direction, config.backend, config.solver);
    if (!config.out.empty()) {
        Metadata extra{{"a_factor", format_double(config.a_factor)},
                       {"direction", std::string(to_string(config.direction))},
                       {"slice_j", std::to_string(config.slice_j == 0 ? net.steps() : config.slice_j)},
                       {"n", std::to_string(net.nodes())},
                       {"M", std::to_string(net.steps())},
                       {"reverse_time", config.source.reverse_time ? "true" : "false"}};
        if (config.source.generator) extra.emplace_back("generator", config.source.generator->describe());
        if (config.source.input) extra.emplace_back("input", config.source.input->string());
        write_report(config.out, report, config.format, extra);
    }
    if (config.scatter) write_scatter(*config.scatter, aggregate_out_degree(net), report.scores);
    return report;
}

Comparison cmd_compare(const RunConfig& config) {
    const auto net = load_network(config.source);
    const double a = resolve_a(net, config.a_factor);
    Comparison c{running_scores_block(net, {a, config.b, config.normalize}, config.slice_j, config.direction,
                                      config.backend, config.solver),
                 supra_marginal_centrality(net, a, config.eps, 0.9, config.direction)};
    if (!config.out.empty()) {
        std::ofstream out(config.out);
        if (!out) throw IoError("cannot open '" + config.out.string() + "' for writing");
        for (const auto& [k, v] : report_metadata(c.block)) out << "# block_" << k << ": " << v << '\n';
        out << "# supra_eps: " << format_double(config.eps) << '\n';
        out << "# supra_iterations: " << c.supra.iterations << '\n';
        for (Index r : config.flagged)
            out << "# node " << r << ": block rank " << c.block.rank_of(r) << ", supra rank " << c.supra.rank_of(r)
                << '\n';
        std::vector<std::size_t> br(c.block.scores.size()), sr(br.size());
        for (std::size_t p = 0; p < br.size(); ++p) {
            br[static_cast<std::size_t>(c.block.ranking[p])] = p + 1;
            sr[static_cast<std::size_t>(c.supra.ranking[p])] = p + 1;
        }
        out << "node_id,block_score,block_rank,supra_score,supra_rank\n";
        for (std::size_t i = 0; i < br.size(); ++i)
            out << i << ',' << format_double(c.block.scores[i]) << ',' << br[i] << ','
                << format_double(c.supra.scores[i]) << ',' << sr[i] << '\n';
        if (!out) throw IoError("write to '" + config.out.string() + "' failed");
    }
    return c;
}

namespace {

std::vector<BenchCell> bench_point(const BenchConfig& config, Index n, std::size_t m) {
    std::vector<BenchCell> cells;
    {
        GeneratorSpec spec = config.base;
        spec.kind = config.kind;
        spec.n = n;
        spec.steps = m;
        spec.seed = config.seed;
        const auto net = generate(spec);
        const CentralityParams params{resolve_a(net, config.a_factor), config.b, false};

        CentralityReport baseline;
        BenchCell base{n, m, Backend::Recursion, 0.0, 0.0, ""};
        base.seconds = seconds_of(
            [&] { baseline = running_scores_block(net, params, 0, Direction::Broadcast, Backend::Recursion); });
        cells.push_back(base);

        for (Backend be : config.backends) {
            if (be == Backend::Recursion) continue;
            BenchCell cell{n, m, be, 0.0, 0.0, ""};
            try {
                CentralityReport r;
                cell.seconds = seconds_of(
                    [&] { r = running_scores_block(net, params, 0, Direction::Broadcast, be, config.solver); });
                double err = 0.0;
                for (std::size_t i = 0; i < r.scores.size(); ++i)
                    err = std::max(err, std::abs(r.scores[i] - baseline.scores[i]));
                cell.error = err;
            } catch (const Error& e) {
                cell.seconds = std::numeric_limits<double>::quiet_NaN();
                cell.error = std::numeric_limits<double>::quiet_NaN();
                cell.note = e.what();
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace

std::vector<BenchCell> run_bench(const BenchConfig& config) {
    std::vector<std::vector<BenchCell>> points(config.grid.size());
    if (config.parallel) {
        std::vector<std::future<std::vector<BenchCell>>> jobs;
        for (const auto& [n, m] : config.grid)
            jobs.push_back(std::async(std::launch::async, bench_point, std::cref(config), n, m));
        for (std::size_t k = 0; k < jobs.size(); ++k) points[k] = jobs[k].get();
    } else {
        for (std::size_t k = 0; k < config.grid.size(); ++k)
            points[k] = bench_point(config, config.grid[k].first, config.grid[k].second);
    }
    std::vector<BenchCell> cells;
    for (auto& p : points) cells.insert(cells.end(), p.begin(), p.end());
    return cells;
}

void write_bench_csv(std::ostream& out, const BenchConfig& config, const std::vector<BenchCell>& cells) {
    auto num = [](double x) { return std::isnan(x) ? std::string("NaN") : format_double(x); };
    out << "n,M,original_time";
    for (Backend be : config.backends)
        if (be != Backend::Recursion) out << ',' << to_string(be) << "_time," << to_string(be) << "_err";
    out << '\n';
    for (const auto& c : cells) {
        if (c.backend == Backend::Recursion) {
            if (&c != cells.data()) out << '\n';
            out << c.n << ',' << c.steps << ',' << num(c.seconds);
        } else {
            out << ',' << num(c.seconds) << ',' << num(c.error);
        }
    }
    if (!cells.empty()) out << '\n';
}

}  // namespace evoblock
