// Command-line front end: generate, centrality, compare, bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evoblock/commands.hpp"
#include "evoblock/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Options {
    evoblock::GeneratorSpec gen;
    std::string generate_kind;
    std::string input;
    double window = 1800.0;
    bool reverse = false;
    double a_factor = 0.9;
    double b = 1.0;
    double eps = 2.718281828459045;
    std::string backend = "direct";
    std::string direction = "broadcast";
    double tol = 1e-3;
    double quad_tol = 1e-3;
    std::size_t max_iter = 100000;
    std::size_t max_ell = 200;
    std::size_t slice_j = 0;
    bool normalize = false;
    std::string out;
    std::string format = "csv";
    std::string scatter;
    std::vector<evoblock::Index> flagged;
    std::vector<std::string> grid{"200x10"};
    std::vector<std::string> backends{"quadrature", "direct", "splitting", "lsqr"};
    bool parallel = false;
};

void add_generator_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--n", o.gen.n, "node count");
    cmd->add_option("--steps,-M", o.gen.steps, "slice count");
    cmd->add_option("--p", o.gen.p, "Erdos-Renyi probability / triadic initial density");
    cmd->add_option("--d", o.gen.d, "preferential-attachment edges per new node");
    cmd->add_option("--lambda", o.gen.lambda, "range-dependent decay");
    cmd->add_option("--omega", o.gen.omega, "triadic death rate");
    cmd->add_option("--delta", o.gen.delta, "triadic base birth rate");
    cmd->add_option("--triadic-eps", o.gen.eps, "triadic closure gain");
    cmd->add_option("--seed", o.gen.seed, "random seed");
}

void add_run_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--input", o.input, "event CSV or snapshot CSV");
    cmd->add_option("--generate", o.generate_kind, "generator kind instead of --input")
        ->check(CLI::IsMember({"erdos_renyi", "pref", "renga", "triadic", "agenda_setter"}));
    cmd->add_option("--window", o.window, "event binning window width");
    cmd->add_flag("--reverse-time", o.reverse, "reverse the slice order");
    cmd->add_option("--a-factor", o.a_factor, "a = factor / rho*");
    cmd->add_option("--b", o.b, "age decay rate");
    cmd->add_option("--eps", o.eps, "supra-centrality coupling");
    cmd->add_option("--backend", o.backend, "recursion|direct|splitting|lsqr|quadrature");
    cmd->add_option("--direction", o.direction, "broadcast|receive");
    cmd->add_option("--tol", o.tol, "iterative solver tolerance");
    cmd->add_option("--quad-tol", o.quad_tol, "quadrature relative distance");
    cmd->add_option("--max-iter", o.max_iter, "iteration budget");
    cmd->add_option("--max-ell", o.max_ell, "quadrature block-step budget");
    cmd->add_option("--slice-j", o.slice_j, "1-based slice (default: last)");
    cmd->add_flag("--normalize", o.normalize, "divide the recursion result by its 2-norm");
    cmd->add_option("--out", o.out, "report path");
    cmd->add_option("--format", o.format, "csv|json");
    add_generator_flags(cmd, o);
}

evoblock::RunConfig to_run_config(Options& o) {
    evoblock::RunConfig c;
    if (!o.input.empty()) c.source.input = o.input;
    if (!o.generate_kind.empty()) {
        o.gen.kind = o.generate_kind;
        c.source.generator = o.gen;
    }
    c.source.window = o.window;
    c.source.reverse_time = o.reverse;
    c.a_factor = o.a_factor;
    c.b = o.b;
    c.eps = o.eps;
    c.backend = evoblock::parse_backend(o.backend);
    c.direction = evoblock::parse_direction(o.direction);
    c.slice_j = o.slice_j;
    c.normalize = o.normalize;
    c.solver.tol = o.tol;
    c.solver.quad_rel_tol = o.quad_tol;
    c.solver.max_iter = o.max_iter;
    c.solver.max_ell = o.max_ell;
    c.out = o.out;
    c.format = evoblock::parse_format(o.format);
    if (!o.scatter.empty()) c.scatter = o.scatter;
    c.flagged = o.flagged;
    return c;
}

std::pair<evoblock::Index, std::size_t> parse_cell(const std::string& s) {
    std::istringstream in(s);
    evoblock::Index n = 0;
    std::size_t m = 0;
    char x = 0;
    if (!(in >> n >> x >> m) || x != 'x' || !in.eof()) throw evoblock::InvalidArgument("grid cell '" + s + "' is not NxM");
    return {n, m};
}

void print_top(const evoblock::CentralityReport& r, std::size_t k) {
    for (std::size_t p = 0; p < std::min(k, r.ranking.size()); ++p) {
        const auto i = static_cast<std::size_t>(r.ranking[p]);
        std::cout << p + 1 << '\t' << i << '\t' << evoblock::format_double(r.scores[i]) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-respecting walk centrality for evolving networks"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "write a synthetic network as snapshot CSV plus JSON sidecar");
    gen->add_option("kind", o.gen.kind, "generator kind")
        ->required()
        ->check(CLI::IsMember({"erdos_renyi", "pref", "renga", "triadic", "agenda_setter"}));
    add_generator_flags(gen, o);
    gen->add_option("--out", o.out, "snapshot path")->required();

    auto* cen = app.add_subcommand("centrality", "running broadcast or receive scores");
    add_run_flags(cen, o);
    cen->add_option("--scatter", o.scatter, "also write aggregate out-degree vs score");

    auto* cmp = app.add_subcommand("compare", "block scores against supra-centrality marginal scores");
    add_run_flags(cmp, o);
    cmp->add_option("--flag", o.flagged, "node ids whose ranks are reported");

    auto* bench = app.add_subcommand("bench", "time backends against the recursion baseline");
    bench->add_option("--kind", o.gen.kind, "generator kind");
    bench->add_option("--grid", o.grid, "cells as NxM");
    bench->add_option("--backends", o.backends, "backends to time");
    bench->add_option("--a-factor", o.a_factor, "a = factor / rho*");
    bench->add_option("--b", o.b, "age decay rate");
    bench->add_option("--tol", o.tol, "iterative solver tolerance");
    bench->add_option("--quad-tol", o.quad_tol, "quadrature relative distance");
    bench->add_option("--out", o.out, "CSV path (default: stdout)");
    bench->add_option("--p", o.gen.p, "Erdos-Renyi probability / triadic initial density");
    bench->add_option("--d", o.gen.d, "preferential-attachment edges per new node");
    bench->add_option("--lambda", o.gen.lambda, "range-dependent decay");
    bench->add_option("--seed", o.gen.seed, "random seed");
    bench->add_option("--max-iter", o.max_iter, "iteration budget for splitting and LSQR");
    bench->add_option("--max-ell", o.max_ell, "largest Gauss rule for quadrature");
    bench->add_flag("--parallel", o.parallel, "run grid points concurrently (noisy timings)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (gen->parsed()) {
            evoblock::cmd_generate(o.gen, o.out);
        } else if (cen->parsed()) {
            const auto report = evoblock::cmd_centrality(to_run_config(o));
            if (o.out.empty()) print_top(report, 10);
        } else if (cmp->parsed()) {
            const auto c = evoblock::cmd_compare(to_run_config(o));
            for (auto r : o.flagged)
                std::cout << "node " << r << ": block rank " << c.block.rank_of(r) << ", supra rank "
                          << c.supra.rank_of(r) << '\n';
        } else if (bench->parsed()) {
            evoblock::BenchConfig cfg;
            cfg.kind = o.gen.kind;
            cfg.base = o.gen;
            cfg.seed = o.gen.seed;
            cfg.grid.clear();
            for (const auto& s : o.grid) cfg.grid.push_back(parse_cell(s));
            cfg.backends.clear();
            for (const auto& s : o.backends) cfg.backends.push_back(evoblock::parse_backend(s));
            cfg.a_factor = o.a_factor;
            cfg.b = o.b;
            cfg.solver.tol = o.tol;
            cfg.solver.quad_rel_tol = o.quad_tol;
            cfg.solver.max_iter = o.max_iter;
            cfg.solver.max_ell = o.max_ell;
            cfg.parallel = o.parallel;
            const auto cells = evoblock::run_bench(cfg);
            if (o.out.empty()) {
                evoblock::write_bench_csv(std::cout, cfg, cells);
            } else {
                std::ofstream f(o.out);
                if (!f) throw evoblock::IoError("cannot open '" + o.out + "' for writing");
                evoblock::write_bench_csv(f, cfg, cells);
            }
            for (const auto& c : cells)
                if (!c.note.empty())
                    std::cerr << "n=" << c.n << " M=" << c.steps << " " << evoblock::to_string(c.backend) << ": "
                              << c.note << '\n';
        }
    } catch (const evoblock::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const evoblock::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const evoblock::DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const evoblock::Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
