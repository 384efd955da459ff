#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "evoblock/centrality.hpp"
#include "evoblock/errors.hpp"
#include "evoblock/generators.hpp"
#include "helpers.hpp"

using namespace evoblock;

namespace {

// X -> Y in slice 1, Y -> Z in slice 2.
TemporalNetwork relay() { return TemporalNetwork::from_edge_lists(3, {{{0, 1}}, {{1, 2}}}); }

double safe_alpha(const TemporalNetwork& net, double factor) {
    const double rho = net.max_spectral_radius();
    return rho > 0.0 ? factor / rho : factor;
}

std::vector<double> row_sums(const Eigen::MatrixXd& m) {
    const Eigen::VectorXd r = m.rowwise().sum();
    return {r.data(), r.data() + r.size()};
}

std::vector<double> col_sums(const Eigen::MatrixXd& m) {
    const Eigen::VectorXd c = m.colwise().sum().transpose();
    return {c.data(), c.data() + c.size()};
}

}  // namespace

TEST_CASE("dyn_comm on the relay network respects the time arrow") {
    const double a = 0.3;
    const auto net = relay();
    const Eigen::MatrixXd q = dyn_comm(net, a, 1, 2);
    CHECK(q(0, 2) == doctest::Approx(a * a));
    CHECK(q(0, 1) == doctest::Approx(a));
    CHECK(q(1, 2) == doctest::Approx(a));
    CHECK(q(2, 0) == 0.0);
    const Eigen::MatrixXd back = dyn_comm(reverse_time(net), a, 1, 2);
    CHECK(back(0, 2) == 0.0);
    const auto [bc, rc] = broadcast_receive(q);
    const auto [bc_rev, rc_rev] = broadcast_receive(back);
    CHECK(bc[0] == doctest::Approx(1.0 + a + a * a));
    CHECK(bc_rev[0] == doctest::Approx(1.0 + a));
    CHECK(bc[0] > bc_rev[0]);
    CHECK(rc[2] == doctest::Approx(1.0 + a + a * a));
    CHECK_THROWS_AS(dyn_comm(net, a, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(dyn_comm(net, a, 1, 3), InvalidArgument);
}

TEST_CASE("running communicability on the relay network by hand") {
    const double a = 0.3, b = 0.7;
    const auto net = relay();
    const CentralityParams p{a, b, false};
    const Eigen::MatrixXd s = running_comm_recursive(net, p);
    // S1 = R1 - I = a E_xy; S2 = (I + c S1) R2 - I with R2 = I + a E_yz.
    const double c = std::exp(-b);
    CHECK(s(0, 1) == doctest::Approx(c * a));
    CHECK(s(1, 2) == doctest::Approx(a));
    CHECK(s(0, 2) == doctest::Approx(c * a * a));
    CHECK(s(0, 0) == doctest::Approx(0.0));
    std::size_t seen = 0;
    running_comm_recursive(net, p, 0, [&](std::size_t k, const Eigen::MatrixXd&) { seen = std::max(seen, k); });
    CHECK(seen == 2);
    const Eigen::MatrixXd s1 = running_comm_recursive(net, p, 1);
    CHECK(s1(0, 1) == doctest::Approx(a));
}

TEST_CASE("recursion matches the closed-form expansion") {
    Rng rng(301);
    for (double b : {0.0, 0.1, 1.0, 10.0}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto net = test::random_network(rng, static_cast<Index>(3 + rng.below(20)), 1 + rng.below(6), 0.15,
                                                  trial % 2 == 0, trial % 3 == 0);
            const CentralityParams p{safe_alpha(net, 0.9 * rng.uniform()), b, false};
            const Eigen::MatrixXd r = running_comm_recursive(net, p);
            const Eigen::MatrixXd l = lemma_expansion(net, p);
            CHECK((r - l).cwiseAbs().maxCoeff() <= 1e-11 * std::max(1.0, r.cwiseAbs().maxCoeff()));
            if (b == 0.0) {
                const Eigen::MatrixXd q = dyn_comm(net, p.a, 1, net.steps());
                CHECK((r - (q - Eigen::MatrixXd::Identity(q.rows(), q.cols()))).cwiseAbs().maxCoeff() <= 1e-11);
            }
        }
    }
}

TEST_CASE("normalised running communicability has unit spectral norm") {
    Rng rng(303);
    const auto net = test::random_network(rng, 15, 4, 0.2, false);
    const CentralityParams raw{safe_alpha(net, 0.9), 0.5, false};
    CentralityParams norm = raw;
    norm.normalize = true;
    const Eigen::MatrixXd s = running_comm_recursive(net, raw);
    const Eigen::MatrixXd sn = running_comm_recursive(net, norm);
    const double two_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(s).singularValues()(0);
    CHECK((sn - s / two_norm).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(rank_scores(row_sums(sn)) == rank_scores(row_sums(s)));
    CHECK((lemma_expansion(net, norm) - sn).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("block back ends agree with the recursion") {
    Rng rng(305);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = test::random_network(rng, 25, 1 + rng.below(5), 0.12, trial % 2 == 0);
        const CentralityParams p{safe_alpha(net, 0.85), 0.5 + rng.uniform(), false};
        const std::size_t j = 1 + rng.below(net.steps());
        const Eigen::MatrixXd s = running_comm_recursive(net, p, j);
        SolverSettings tight;
        tight.tol = 1e-13;
        tight.quad_rel_tol = 1e-10;
        for (auto dir : {Direction::Broadcast, Direction::Receive}) {
            const auto oracle = dir == Direction::Broadcast ? row_sums(s) : col_sums(s);
            const double scale = std::max(1.0, test::max_abs(oracle));
            for (auto be : {Backend::Recursion, Backend::Direct, Backend::Splitting, Backend::Lsqr}) {
                const auto rep = running_scores_block(net, p, j, dir, be, tight);
                CHECK(test::max_abs_diff(rep.scores, oracle) <= 1e-9 * scale);
                CHECK(rep.backend == to_string(be));
            }
            try {
                const auto rep = running_scores_block(net, p, j, dir, Backend::Quadrature, tight);
                CHECK(test::max_abs_diff(rep.scores, oracle) <= 1e-6 * scale);
            } catch (const BreakdownError&) {
                // Signalled failure is acceptable on tiny sparse instances.
            }
        }
    }
}

TEST_CASE("rank_scores orders by score with ascending-id ties") {
    CHECK(rank_scores({1.0, 3.0, 3.0, 2.0}) == std::vector<Index>{1, 2, 3, 0});
    CentralityReport r;
    r.ranking = {2, 0, 1};
    CHECK(r.rank_of(2) == 1);
    CHECK(r.rank_of(1) == 3);
    CHECK_THROWS_AS(r.rank_of(5), InvalidArgument);
}

TEST_CASE("ranking is invariant under positive scaling") {
    Rng rng(307);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s(20);
        for (double& v : s) v = std::floor(rng.uniform() * 8.0);  // plenty of ties
        const double c = std::exp(20.0 * (rng.uniform() - 0.5));
        std::vector<double> scaled = s;
        for (double& v : scaled) v *= c;
        CHECK(rank_scores(s) == rank_scores(scaled));
    }
}

TEST_CASE("nodal and temporal betweenness on the relay network") {
    const double a = 0.3;
    const auto net = relay();
    const auto nb = nodal_betweenness(net, a, 1);
    // Only (X, Z) avoids Y and has Q > 0; removing Y kills it. (Z, X) is vacuous.
    CHECK(nb.value == doctest::Approx(0.5));
    CHECK(nb.vacuous_pairs == 1);
    CHECK(nodal_betweenness(net, a, 0).value == doctest::Approx(0.0));
    const auto tb = temporal_betweenness_all(net, a);
    CHECK(tb[0].value == doctest::Approx(1.0));
    CHECK(tb[1].value == doctest::Approx(1.0));
    CHECK(tb[0].vacuous_pairs == 3);
    CHECK(nodal_betweenness_block(net, a, 1) == doctest::Approx(nb.value).epsilon(1e-12));
    CHECK(temporal_betweenness_block(net, a, 1) == doctest::Approx(tb[0].value).epsilon(1e-12));
    CHECK_THROWS_AS(nodal_betweenness(net, a, 3), InvalidArgument);
    CHECK_THROWS_AS(temporal_betweenness(net, a, 0), InvalidArgument);
    CHECK_THROWS_AS(nodal_betweenness(TemporalNetwork::from_edge_lists(2, {{{0, 1}}}), a, 0), InvalidArgument);
}

TEST_CASE("betweenness resolvent products match the block forms") {
    Rng rng(309);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = test::random_network(rng, static_cast<Index>(3 + rng.below(8)), 1 + rng.below(4), 0.3,
                                              trial % 2 == 0);
        const double a = safe_alpha(net, 0.9 * rng.uniform());
        const auto nb = nodal_betweenness_all(net, a);
        for (Index r = 0; r < net.nodes(); ++r) {
            CHECK(nb[static_cast<std::size_t>(r)].value == doctest::Approx(nodal_betweenness_block(net, a, r)).epsilon(1e-9));
            CHECK(nb[static_cast<std::size_t>(r)].value >= -1e-12);
            CHECK(nb[static_cast<std::size_t>(r)].value <= 1.0 + 1e-12);
        }
        const auto tb = temporal_betweenness_all(net, a);
        for (std::size_t q = 1; q <= net.steps(); ++q) {
            CHECK(tb[q - 1].value == doctest::Approx(temporal_betweenness_block(net, a, q)).epsilon(1e-9));
            CHECK(tb[q - 1].value == doctest::Approx(temporal_betweenness(net, a, q).value));
            CHECK(tb[q - 1].value >= -1e-12);
        }
    }
}

TEST_CASE("theorem_block_check is tiny on random instances") {
    Rng rng(311);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = test::random_network(rng, 6, 1 + rng.below(4), 0.4, false);
        std::vector<double> betas;
        for (std::size_t k = 1; k < net.steps(); ++k) betas.push_back(0.05 + 0.95 * rng.uniform());
        CHECK(theorem_block_check(net, safe_alpha(net, 0.9), betas) <= 1e-10);
    }
}

TEST_CASE("scores are permutation equivariant") {
    Rng rng(313);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = test::random_network(rng, 12, 3, 0.2, false);
        const auto perm = test::random_permutation(rng, 12);
        const auto pnet = net.permuted(perm);
        const CentralityParams p{safe_alpha(net, 0.8), 1.0, false};
        const auto a = running_scores_block(net, p, 0, Direction::Broadcast, Backend::Direct);
        const auto b = running_scores_block(pnet, p, 0, Direction::Broadcast, Backend::Direct);
        for (std::size_t i = 0; i < 12; ++i)
            CHECK(b.scores[static_cast<std::size_t>(perm[i])] == doctest::Approx(a.scores[i]).epsilon(1e-12));
    }
}

TEST_CASE("broadcast scores are nondecreasing in a") {
    Rng rng(315);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = test::random_network(rng, 15, 3, 0.15, trial % 2 == 0);
        const double bound = safe_alpha(net, 1.0);
        std::vector<double> prev(15, -INFINITY);
        for (double f : {0.0, 0.2, 0.5, 0.8, 0.95}) {
            const auto rep = running_scores_block(net, {f * bound, 1.0, false}, 0, Direction::Broadcast, Backend::Direct);
            for (std::size_t i = 0; i < 15; ++i) CHECK(rep.scores[i] >= prev[i] - 1e-12);
            prev = rep.scores;
        }
    }
}

TEST_CASE("supra marginal centrality matches a dense oracle") {
    Rng rng(317);
    const auto net = test::random_network(rng, 8, 3, 0.3, false);
    const double alpha = safe_alpha(net, 0.9);
    const double eps = std::exp(1.0);
    const auto rep = supra_marginal_centrality(net, alpha, eps, 0.9);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(24, 24);
    for (Index k = 0; k < 3; ++k) {
        m.block(8 * k, 8 * k, 8, 8) = eps * test::dense_resolvent(net.slice(static_cast<std::size_t>(k)), alpha);
        if (k > 0) {
            m.block(8 * k, 8 * (k - 1), 8, 8).setIdentity();
            m.block(8 * (k - 1), 8 * k, 8, 8).setIdentity();
        }
    }
    const double rho = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::MatrixXd f = (Eigen::MatrixXd::Identity(24, 24) - (0.9 / rho) * m).inverse();
    const Eigen::VectorXd joint = f.rowwise().sum();
    for (Index i = 0; i < 8; ++i) {
        const double marginal = joint(i) + joint(8 + i) + joint(16 + i);
        CHECK(rep.scores[static_cast<std::size_t>(i)] == doctest::Approx(marginal).epsilon(1e-8));
    }
    CHECK(rep.method.find("supra") != std::string::npos);
}

TEST_CASE("parameter validation") {
    const auto net = relay();
    // The relay slices are nilpotent, so any a is admissible there.
    CHECK_NOTHROW(running_comm_recursive(net, {1.5, 0.0, false}));
    const auto cycle = TemporalNetwork::from_edge_lists(2, {{{0, 1}, {1, 0}}});
    CHECK_THROWS_AS(running_comm_recursive(cycle, {1.0, 0.0, false}), InvalidArgument);
    CHECK_THROWS_AS(running_comm_recursive(net, {0.5, -1.0, false}), InvalidArgument);
    CHECK_THROWS_AS(running_comm_recursive(net, {0.5, 0.0, false}, 3), InvalidArgument);
    CHECK(parse_backend("original") == Backend::Recursion);
    CHECK(parse_backend("lsqr") == Backend::Lsqr);
    CHECK(parse_direction("receive") == Direction::Receive);
    CHECK_THROWS_AS(parse_backend("magic"), InvalidArgument);
    CHECK_THROWS_AS(parse_direction("sideways"), InvalidArgument);
    CHECK(prefix(net, 1).steps() == 1);
    CHECK_THROWS_AS(prefix(net, 0), InvalidArgument);
}
