// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evoblock/block_operator.hpp"
#include "evoblock/centrality.hpp"
#include "evoblock/commands.hpp"
#include "evoblock/errors.hpp"
#include "evoblock/generators.hpp"
#include "evoblock/quadrature.hpp"
#include "evoblock/solvers.hpp"

using namespace evoblock;

namespace {

using Clock = std::chrono::steady_clock;

// Betweenness ranges are checked up to rounding in the ratio sums.
constexpr double kRangeSlack = 1e-12;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

TemporalNetwork random_network(Rng& rng, Index n, std::size_t m, double p, bool undirected, bool random_times) {
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

double alpha_for(const TemporalNetwork& net, double factor) {
    const double rho = net.max_spectral_radius();
    return rho > 0.0 ? factor / rho : factor;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

double max_abs(const std::vector<double>& x) {
    double d = 0.0;
    for (double v : x) d = std::max(d, std::abs(v));
    return d;
}

std::vector<Index> random_permutation(Rng& rng, Index n) {
    std::vector<Index> p(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

Outcome theorem_identity() {
    Outcome out;
    Rng rng(1001);
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = random_network(rng, static_cast<Index>(2 + rng.below(9)), 1 + rng.below(5), 0.35,
                                        trial % 2 == 0, false);
        const double alpha = alpha_for(net, 0.99 * rng.uniform());
        std::vector<double> betas;
        for (std::size_t k = 1; k < net.steps(); ++k) betas.push_back(1.0 - rng.uniform());
        worst = std::max(worst, theorem_block_check(net, alpha, betas));
    }
    const double t = seconds_since(t0);
    out.require(worst <= 1e-10, "max deviation " + fmt("%.2e", worst) + " <= 1e-10");
    out.require(t < 10.0, "time " + fmt("%.2f", t) + " s < 10 s");
    return out;
}

Outcome lemma_equivalence() {
    Outcome out;
    Rng rng(1002);
    const double bs[] = {0.0, 0.1, 1.0, 10.0};
    double worst = 0.0, worst_collapse = 0.0;
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = random_network(rng, static_cast<Index>(2 + rng.below(49)), 1 + rng.below(8), 0.08,
                                        trial % 2 == 0, trial % 3 != 0);
        const CentralityParams p{alpha_for(net, 0.9 * rng.uniform()), bs[trial % 4], false};
        const Eigen::MatrixXd r = running_comm_recursive(net, p);
        worst = std::max(worst, (r - lemma_expansion(net, p)).cwiseAbs().maxCoeff());
        if (p.b == 0.0) {
            const Eigen::MatrixXd q = dyn_comm(net, p.a, 1, net.steps());
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q.rows(), q.cols());
            worst_collapse = std::max(worst_collapse, (r - (q - eye)).cwiseAbs().maxCoeff());
        }
    }
    const double t = seconds_since(t0);
    out.require(worst <= 1e-11, "recursion vs expansion " + fmt("%.2e", worst) + " <= 1e-11");
    out.require(worst_collapse <= 1e-11, "b=0 collapse " + fmt("%.2e", worst_collapse) + " <= 1e-11");
    out.require(t < 30.0, "time " + fmt("%.2f", t) + " s < 30 s");
    return out;
}

Outcome backend_equivalence() {
    Outcome out;
    const auto t0 = Clock::now();
    const auto net = gen_pref_sequence(200, 4, 10, 2024);
    const CentralityParams p{resolve_a(net, 0.9), 1.0, false};
    const auto oracle = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Recursion);
    const double scale = max_abs(oracle.scores);

    struct Case {
        Backend backend;
        double tol;
        double bound;
    };
    for (const Case c : {Case{Backend::Direct, 0.0, 1e-11}, Case{Backend::Splitting, 1e-3, 5e-3},
                         Case{Backend::Lsqr, 1e-10, 1e-8}}) {
        SolverSettings s;
        if (c.tol > 0.0) s.tol = c.tol;
        const auto rep = running_scores_block(net, p, 0, Direction::Broadcast, c.backend, s);
        const double err = max_abs_diff(rep.scores, oracle.scores);
        out.require(err <= c.bound, std::string(to_string(c.backend)) + " abs " + fmt("%.2e", err) + " <= " +
                                        fmt("%.0e", c.bound) + " (rel " + fmt("%.1e", err / scale) + ")");
    }
    SolverSettings tight;
    tight.tol = 1e-13;
    bool same = true;
    for (auto be : {Backend::Direct, Backend::Splitting, Backend::Lsqr})
        same = same && running_scores_block(net, p, 0, Direction::Broadcast, be, tight).ranking == oracle.ranking;
    out.require(same, "tight-tolerance rankings identical");
    const double t = seconds_since(t0);
    out.require(t < 60.0, "time " + fmt("%.2f", t) + " s < 60 s, max score " + fmt("%.3g", scale));
    return out;
}

Outcome quadrature_path() {
    Outcome out;
    const auto t0 = Clock::now();
    SolverSettings s;
    s.quad_rel_tol = 1e-3;

    const auto net = gen_pref_sequence(100, 4, 5, 77);
    const CentralityParams p{resolve_a(net, 0.9), 1.0, false};
    const auto exact = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Direct);
    try {
        const auto rep = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Quadrature, s);
        double rel = 0.0;
        for (std::size_t i = 0; i < rep.scores.size(); ++i)
            rel = std::max(rel, std::abs(rep.scores[i] - exact.scores[i]) / std::abs(exact.scores[i]));
        const double err = max_abs_diff(rep.scores, exact.scores);
        out.require(err <= 1e-2, "pref abs " + fmt("%.2e", err) + " <= 1e-2 (rel " + fmt("%.1e", rel) +
                                     ", max score " + fmt("%.3g", max_abs(exact.scores)) + ")");
    } catch (const Error& e) {
        out.require(false, std::string("pref quadrature failed: ") + e.what());
    }

    // Ultra-sparse triadic chains: every node either converges to the direct
    // value or raises; at least one node must exercise the failure path.
    std::size_t signalled = 0, wrong = 0, total = 0;
    for (std::size_t steps : {5UL, 30UL}) {
        const auto tri = gen_triadic_preset(100, 0.01, steps, 88);
        const CentralityParams tp{resolve_a(tri, 0.9), 1.0, false};
        const BlockOperator op(tri, tp.a, decay_betas(tri, tp.b));
        const auto n = static_cast<std::size_t>(tri.nodes());
        std::vector<double> v(op.size(), 0.0);
        std::fill(v.end() - static_cast<std::ptrdiff_t>(n), v.end(), 1.0);
        const auto direct = solve_direct(dense_assemble(op), v).x;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> u(op.size(), 0.0);
            u[i] = 1.0;
            ++total;
            try {
                const double est = bilinear_form(op, u, v, 1e-3, 200).value;
                if (std::abs(est - direct[i]) > 1e-2 * std::max(1.0, std::abs(direct[i]))) ++wrong;
            } catch (const BreakdownError&) {
                ++signalled;
            } catch (const ConvergenceError&) {
                ++signalled;
            }
        }
    }
    out.require(wrong == 0, "triadic wrong answers " + std::to_string(wrong) + "/" + std::to_string(total));
    out.require(signalled > 0, "triadic signalled failures " + std::to_string(signalled) + "/" + std::to_string(total));
    const double t = seconds_since(t0);
    out.require(t < 120.0, "time " + fmt("%.2f", t) + " s < 120 s");
    return out;
}

Outcome betweenness_equivalence() {
    Outcome out;
    Rng rng(1005);
    double worst = 0.0, nb_lo = 0.0, nb_hi = 0.0, tb_lo = 0.0, tb_hi = 0.0;
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 30; ++trial) {
        const auto net = random_network(rng, static_cast<Index>(3 + rng.below(10)), 1 + rng.below(4), 0.25,
                                        trial % 2 == 0, false);
        const double a = alpha_for(net, 0.9 * rng.uniform());
        const auto nb = nodal_betweenness_all(net, a);
        for (Index r = 0; r < net.nodes(); ++r) {
            const double v = nb[static_cast<std::size_t>(r)].value;
            worst = std::max(worst, std::abs(v - nodal_betweenness_block(net, a, r)));
            nb_lo = std::min(nb_lo, v);
            nb_hi = std::max(nb_hi, v);
        }
        const auto tb = temporal_betweenness_all(net, a);
        for (std::size_t q = 1; q <= net.steps(); ++q) {
            const double v = tb[q - 1].value;
            worst = std::max(worst, std::abs(v - temporal_betweenness_block(net, a, q)));
            tb_lo = std::min(tb_lo, v);
            tb_hi = std::max(tb_hi, v);
        }
    }
    const double t = seconds_since(t0);
    out.require(worst <= 1e-9, "products vs block forms " + fmt("%.2e", worst) + " <= 1e-9");
    out.require(nb_lo >= -kRangeSlack && nb_hi <= 1.0 + kRangeSlack, "NB in [" + fmt("%.3g", nb_lo) + ", " + fmt("%.3g", nb_hi) + "]");
    out.require(tb_lo >= -kRangeSlack && tb_hi <= 1.0 + kRangeSlack, "TB in [" + fmt("%.3g", tb_lo) + ", " + fmt("%.3g", tb_hi) + "]");
    out.require(t < 60.0, "time " + fmt("%.2f", t) + " s < 60 s");
    return out;
}

Outcome time_arrow() {
    Outcome out;
    const auto t0 = Clock::now();
    const AgendaSetterOptions opts;
    const std::size_t top = static_cast<std::size_t>(opts.n) / 10;
    int forward_first = 0, supra_outside = 0;
    std::vector<std::size_t> reversed_ranks;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto net = gen_agenda_setter(opts, seed);
        const CentralityParams p{resolve_a(net, 0.9), 1.0, false};
        const auto fwd = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Direct);
        if (fwd.rank_of(0) == 1) ++forward_first;
        const auto rev = running_scores_block(reverse_time(net), p, 0, Direction::Broadcast, Backend::Direct);
        reversed_ranks.push_back(rev.rank_of(0));
        const auto supra = supra_marginal_centrality(net, p.a, std::exp(1.0), 0.9);
        if (supra.rank_of(0) > top) ++supra_outside;
    }
    std::sort(reversed_ranks.begin(), reversed_ranks.end());
    const double median = 0.5 * static_cast<double>(reversed_ranks[24] + reversed_ranks[25]);
    const double t = seconds_since(t0);
    out.require(forward_first >= 40, "rank 1 forward in " + std::to_string(forward_first) + "/50 (need 40)");
    out.require(median > static_cast<double>(top),
                "median reversed rank " + fmt("%.1f", median) + " > " + std::to_string(top));
    out.require(supra_outside >= 40, "supra outside top 10% in " + std::to_string(supra_outside) + "/50 (need 40)");
    out.require(t < 300.0, "time " + fmt("%.2f", t) + " s < 300 s");
    return out;
}

double best_time(int repeats, const std::function<void()>& f) {
    double best = INFINITY;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

Outcome scaling_trend() {
    Outcome out;
    const auto t0 = Clock::now();
    SolverSettings s;
    s.tol = 1e-3;
    std::vector<double> split, rec;
    for (Index n : {200, 400, 800}) {
        const auto net = gen_pref_sequence(n, 4, 10, 4242);
        const CentralityParams p{resolve_a(net, 0.9), 1.0, false};
        split.push_back(best_time(3, [&] { running_scores_block(net, p, 0, Direction::Broadcast, Backend::Splitting, s); }));
        rec.push_back(best_time(2, [&] { running_scores_block(net, p, 0, Direction::Broadcast, Backend::Recursion); }));
    }
    for (std::size_t k = 1; k < split.size(); ++k) {
        const double fs = split[k] / split[k - 1];
        const double fr = rec[k] / rec[k - 1];
        out.require(fs <= 6.0, "splitting x" + fmt("%.2f", fs));
        out.require(fr >= 6.0, "recursion x" + fmt("%.2f", fr));
    }
    out.require(true, "splitting s " + fmt("%.3g", split[0]) + "/" + fmt("%.3g", split[1]) + "/" + fmt("%.3g", split[2]) +
                          ", recursion s " + fmt("%.3g", rec[0]) + "/" + fmt("%.3g", rec[1]) + "/" +
                          fmt("%.3g", rec[2]));
    const double t = seconds_since(t0);
    out.require(t < 300.0, "time " + fmt("%.2f", t) + " s < 300 s");
    return out;
}

Outcome property_suite() {
    Outcome out;
    const auto t0 = Clock::now();
    constexpr int kTrials = 100;
    Rng rng(1008);
    auto small_net = [&](bool undirected) {
        return random_network(rng, static_cast<Index>(4 + rng.below(12)), 1 + rng.below(5), 0.2, undirected, true);
    };

    int fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto net = small_net(t % 2 == 0);
        const auto perm = random_permutation(rng, net.nodes());
        const CentralityParams p{alpha_for(net, 0.9 * rng.uniform()), rng.uniform() * 2.0, false};
        const auto a = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Direct);
        const auto b = running_scores_block(net.permuted(perm), p, 0, Direction::Broadcast, Backend::Direct);
        const double tol = 1e-12 * std::max(1.0, max_abs(a.scores));
        for (std::size_t i = 0; i < a.scores.size(); ++i)
            if (std::abs(b.scores[static_cast<std::size_t>(perm[i])] - a.scores[i]) > tol) {
                ++fails;
                break;
            }
    }
    out.require(fails == 0, "permutation " + std::to_string(kTrials - fails) + "/" + std::to_string(kTrials));

    fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto net = small_net(t % 2 == 0);
        const double lo = 0.9 * rng.uniform(), hi = lo + (0.95 - lo) * rng.uniform();
        const double b = rng.uniform() * 2.0;
        const auto s0 = running_scores_block(net, {alpha_for(net, lo), b, false}, 0, Direction::Broadcast, Backend::Direct);
        const auto s1 = running_scores_block(net, {alpha_for(net, hi), b, false}, 0, Direction::Broadcast, Backend::Direct);
        for (std::size_t i = 0; i < s0.scores.size(); ++i)
            if (s1.scores[i] < s0.scores[i] - 1e-12 * std::max(1.0, s0.scores[i])) {
                ++fails;
                break;
            }
    }
    out.require(fails == 0, "monotone in a " + std::to_string(kTrials - fails) + "/" + std::to_string(kTrials));

    int nb_fails = 0, tb_fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto net = small_net(t % 2 == 0);
        const double a = alpha_for(net, 0.9 * rng.uniform());
        for (const auto& v : nodal_betweenness_all(net, a))
            if (v.value < -kRangeSlack || v.value > 1.0 + kRangeSlack) {
                ++nb_fails;
                break;
            }
        for (const auto& v : temporal_betweenness_all(net, a))
            if (v.value < -kRangeSlack || v.value > 1.0 + kRangeSlack) {
                ++tb_fails;
                break;
            }
    }
    out.require(nb_fails == 0, "NB range " + std::to_string(kTrials - nb_fails) + "/" + std::to_string(kTrials));
    out.require(tb_fails == 0, "TB range " + std::to_string(kTrials - tb_fails) + "/" + std::to_string(kTrials));

    fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        auto net = small_net(t % 2 == 0);
        while (net.steps() < 2) net = small_net(t % 2 == 0);
        const double a = alpha_for(net, 0.9 * rng.uniform());
        const std::size_t k = 2 + rng.below(net.steps() - 1);
        const std::size_t i = 1 + rng.below(k - 1);
        const Eigen::MatrixXd whole = dyn_comm(net, a, i, k);
        const Eigen::MatrixXd split = dyn_comm(net, a, i, k - 1) * dyn_comm(net, a, k, k);
        if ((whole - split).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, whole.cwiseAbs().maxCoeff())) ++fails;
    }
    out.require(fails == 0, "semigroup " + std::to_string(kTrials - fails) + "/" + std::to_string(kTrials));

    fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto net = small_net(t % 2 == 0);
        std::vector<double> betas;
        for (std::size_t k = 1; k < net.steps(); ++k) betas.push_back(rng.uniform());
        const BlockOperator op(net, alpha_for(net, 0.9 * rng.uniform()), betas);
        std::vector<double> x(op.size()), y(op.size()), bx(op.size()), bty(op.size());
        for (double& v : x) v = rng.uniform() - 0.5;
        for (double& v : y) v = rng.uniform() - 0.5;
        op.apply(x, bx);
        op.apply_transpose(y, bty);
        double lhs = 0.0, rhs = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            lhs += bx[i] * y[i];
            rhs += x[i] * bty[i];
            mag += std::abs(bx[i] * y[i]);
        }
        if (std::abs(lhs - rhs) > 1e-13 * std::max(1.0, mag)) ++fails;
    }
    out.require(fails == 0, "adjoint " + std::to_string(kTrials - fails) + "/" + std::to_string(kTrials));

    fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto net = small_net(t % 2 == 0);
        const CentralityParams p{alpha_for(net, 0.95 * rng.uniform()), rng.uniform() * 3.0, false};
        const auto dir = t % 2 == 0 ? Direction::Broadcast : Direction::Receive;
        const auto be = t % 3 == 0 ? Backend::Splitting : (t % 3 == 1 ? Backend::Lsqr : Backend::Direct);
        SolverSettings s;
        s.tol = 1e-10;
        const auto rep = running_scores_block(net, p, 0, dir, be, s);
        const double floor = -1e-10 * std::max(1.0, max_abs(rep.scores));
        if (*std::min_element(rep.scores.begin(), rep.scores.end()) < floor) ++fails;
    }
    out.require(fails == 0, "nonnegative " + std::to_string(kTrials - fails) + "/" + std::to_string(kTrials));

    fails = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto net = small_net(t % 2 == 0);
        const CentralityParams p{alpha_for(net, 0.9 * rng.uniform()), rng.uniform(), false};
        const auto rep = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Direct);
        const double c = std::exp(10.0 * (rng.uniform() - 0.5));
        std::vector<double> scaled = rep.scores;
        for (double& v : scaled) v *= c;
        if (rank_scores(scaled) != rep.ranking) ++fails;
    }
    out.require(fails == 0, "scaling invariance " + std::to_string(kTrials - fails) + "/" + std::to_string(kTrials));

    const double t = seconds_since(t0);
    out.require(t < 120.0, "time " + fmt("%.2f", t) + " s < 120 s");
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"block resolvent identity", theorem_identity},
        {"recursion vs closed form", lemma_equivalence},
        {"backend equivalence", backend_equivalence},
        {"quadrature path", quadrature_path},
        {"betweenness block forms", betweenness_equivalence},
        {"time-arrow experiment", time_arrow},
        {"scaling trend", scaling_trend},
        {"property suite", property_suite},
    };
    int failed = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("threw: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
