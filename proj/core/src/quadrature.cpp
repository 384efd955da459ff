#include "evoblock/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "evoblock/errors.hpp"

namespace evoblock {

namespace {

// Balanced split M = L R of a 2x2 block via its SVD: L = W S^{1/2},
// R = S^{1/2} Z^T. Returns false when M is numerically rank deficient
// relative to `scale`.
bool split_coupling(const Block2& m, double scale, Block2& left, Block2& right) {
    Eigen::JacobiSVD<Block2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector2d s = svd.singularValues();
    if (!(s(1) > kBreakdownThreshold * scale) || !std::isfinite(s(0))) return false;
    const Eigen::Vector2d root = s.cwiseSqrt();
    left = svd.matrixU() * root.asDiagonal();
    right = root.asDiagonal() * svd.matrixV().transpose();
    return true;
}

BlockVectors apply_block(const LinearOperator& op, const BlockVectors& x, bool transpose) {
    BlockVectors y(x.rows(), 2);
    for (int c = 0; c < 2; ++c) {
        std::span<const double> in(x.col(c).data(), static_cast<std::size_t>(x.rows()));
        std::span<double> out(y.col(c).data(), static_cast<std::size_t>(y.rows()));
        transpose ? op.apply_transpose(in, out) : op.apply(in, out);
    }
    return y;
}

Block2 leading_resolvent_block(const Eigen::MatrixXd& j, const char* which) {
    const auto dim = j.rows();
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(dim, dim) - j;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    if (!(lu.rcond() > 1e-15)) throw NumericalError(std::string(which) + ": I - J is singular");
    const Eigen::MatrixXd e1 = Eigen::MatrixXd::Identity(dim, 2);
    const Eigen::MatrixXd z = lu.solve(e1);
    return z.topRows<2>();
}

}  // namespace

QuadratureState QuadratureState::init(const BlockVectors& x, const BlockVectors& y, bool keep_basis,
                                      bool rebiorthogonalize) {
    if (x.rows() != y.rows() || x.rows() == 0) throw DimensionError("QuadratureState::init: block size mismatch");
    QuadratureState s;
    s.keep_basis = keep_basis || rebiorthogonalize;
    s.rebiorthogonalize = rebiorthogonalize;
    const Block2 m = x.transpose() * y;
    Block2 left, right;
    if (!split_coupling(m, x.norm() * y.norm(), left, right))
        throw BreakdownError("block Lanczos: starting blocks X^T Y are numerically singular");
    s.left0 = left;
    s.right0 = right;
    s.p_cur = y * right.inverse();
    s.q_cur = x * left.transpose().inverse();
    s.p_prev = BlockVectors::Zero(x.rows(), 2);
    s.q_prev = BlockVectors::Zero(x.rows(), 2);
    if (s.keep_basis) {
        s.p_basis.push_back(s.p_cur);
        s.q_basis.push_back(s.q_cur);
    }
    return s;
}

Eigen::MatrixXd QuadratureState::jacobi(std::size_t ell) const {
    if (ell == 0 || ell > omegas.size()) throw InvalidArgument("jacobi: rule size exceeds completed steps");
    const auto dim = static_cast<Eigen::Index>(2 * ell);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < ell; ++k) {
        const auto o = static_cast<Eigen::Index>(2 * k);
        j.block<2, 2>(o, o) = omegas[k];
        if (k + 1 < ell) {
            j.block<2, 2>(o + 2, o) = gammas[k];
            j.block<2, 2>(o, o + 2) = deltas[k].transpose();
        }
    }
    return j;
}

Eigen::MatrixXd QuadratureState::anti_jacobi(std::size_t ell) const {
    if (ell == 0 || ell + 1 > omegas.size() || ell > gammas.size())
        throw InvalidArgument("anti_jacobi: needs l + 1 completed steps");
    const auto dim = static_cast<Eigen::Index>(2 * (ell + 1));
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
    j.topLeftCorner(dim - 2, dim - 2) = jacobi(ell);
    const auto o = dim - 4;
    const double r2 = std::sqrt(2.0);
    j.block<2, 2>(o + 2, o) = r2 * gammas[ell - 1];
    j.block<2, 2>(o, o + 2) = r2 * deltas[ell - 1].transpose();
    j.block<2, 2>(o + 2, o + 2) = omegas[ell];
    return j;
}

QuadratureState& block_lanczos_step(QuadratureState& s, const LinearOperator& op) {
    if (s.breakdown) throw BreakdownError("block Lanczos: recurrence already broke down");
    if (s.exhausted) throw InvalidArgument("block Lanczos: Krylov space already exhausted");
    if (static_cast<std::size_t>(s.p_cur.rows()) != op.size())
        throw DimensionError("block Lanczos: operator size does not match the starting blocks");

    const BlockVectors bp = apply_block(op, s.p_cur, false);
    const BlockVectors btq = apply_block(op, s.q_cur, true);
    const Block2 omega = s.q_cur.transpose() * bp;
    s.omegas.push_back(omega);

    BlockVectors r = bp - s.p_cur * omega;
    BlockVectors t = btq - s.q_cur * omega.transpose();
    if (!s.gammas.empty()) {
        r -= s.p_prev * s.deltas.back().transpose();
        t -= s.q_prev * s.gammas.back().transpose();
    }
    if (s.rebiorthogonalize) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < s.p_basis.size(); ++k) {
                r -= s.p_basis[k] * (s.q_basis[k].transpose() * r);
                t -= s.q_basis[k] * (s.p_basis[k].transpose() * t);
            }
    }

    const double rn = r.norm(), tn = t.norm();
    const double tiny = 1e-13;
    if (rn <= tiny * std::max(bp.norm(), s.p_cur.norm()) || tn <= tiny * std::max(btq.norm(), s.q_cur.norm())) {
        s.exhausted = true;
        return s;
    }

    Block2 delta_t, gamma;
    if (!split_coupling(t.transpose() * r, rn * tn, delta_t, gamma)) {
        s.breakdown = true;
        return s;
    }
    s.gammas.push_back(gamma);
    s.deltas.push_back(delta_t.transpose());

    s.p_prev = std::move(s.p_cur);
    s.q_prev = std::move(s.q_cur);
    s.p_cur = r * gamma.inverse();
    s.q_cur = t * delta_t.transpose().inverse();
    if (s.keep_basis) {
        s.p_basis.push_back(s.p_cur);
        s.q_basis.push_back(s.q_cur);
    }
    return s;
}

Block2 gauss_rule(const QuadratureState& s, std::size_t ell) {
    return leading_resolvent_block(s.jacobi(ell), "gauss_rule");
}

Block2 anti_gauss_rule(const QuadratureState& s, std::size_t ell) {
    return leading_resolvent_block(s.anti_jacobi(ell), "anti_gauss_rule");
}

namespace {

/// Dense positive augmentation vector: all ones for the first attempt, then
/// deterministic values in [0.5, 1.5) so a restart sees a different space.
Eigen::VectorXd augmentation(Eigen::Index n, std::size_t attempt) {
    Eigen::VectorXd w(n);
    if (attempt == 0) {
        w.setOnes();
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            std::uint64_t z = static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL + attempt * 0xD1B54A32D192ED03ULL;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            z ^= z >> 31;
            w(i) = 0.5 + static_cast<double>(z >> 11) * 0x1.0p-53;
        }
    }
    return w / w.norm();
}

struct Attempt {
    std::optional<BilinearEstimate> estimate;
    std::size_t breakdown_step = 0;
};

Attempt run_rules(const LinearOperator& op, const BlockVectors& x, const BlockVectors& y, double scale, double rel_tol,
                  std::size_t max_ell, const QuadratureOptions& opts) {
    QuadratureState state = QuadratureState::init(x, y, false, opts.rebiorthogonalize);
    std::size_t agreed = 0;
    double last_f = 0.0;
    block_lanczos_step(state, op);
    for (std::size_t ell = 1; ell <= max_ell; ++ell) {
        if (state.exhausted) {
            const Block2 g = state.to_target(gauss_rule(state, state.steps()));
            return {BilinearEstimate{scale * g(0, 0), state.steps(), 0.0, true}, 0};
        }
        if (state.breakdown) return {std::nullopt, state.steps()};
        block_lanczos_step(state, op);  // provides Omega_{l+1}
        if (state.exhausted && state.steps() == ell + 1 && state.gammas.size() < ell + 1) {
            // Invariant space reached at l+1: the larger Gauss rule is exact.
            const Block2 g = state.to_target(gauss_rule(state, ell + 1));
            return {BilinearEstimate{scale * g(0, 0), ell + 1, 0.0, true}, 0};
        }
        const Block2 g = state.to_target(gauss_rule(state, ell));
        const Block2 h = state.to_target(anti_gauss_rule(state, ell));
        const Block2 f = 0.5 * (g + h);
        const double fmax = f.cwiseAbs().maxCoeff();
        const double block_dist = (g - h).cwiseAbs().maxCoeff() / (fmax > 0 ? fmax : 1.0);
        // The block criterion is dominated by the large augmentation entry, so
        // the entry actually returned must agree on its own as well.
        const double entry = std::abs(f(0, 0));
        const double entry_dist = std::abs(g(0, 0) - h(0, 0)) / (entry > 0 ? entry : 1.0);
        const double dist = std::max(block_dist, entry_dist);
        if (!std::isfinite(dist)) throw NumericalError("bilinear_form: non-finite quadrature rule");
        // A confirmation also needs the averaged rule to have settled since
        // the previous size; coincidental G/H agreement does not persist.
        const bool settled = agreed == 0 || std::abs(f(0, 0) - last_f) <= rel_tol * entry;
        agreed = dist <= rel_tol ? (settled ? agreed + 1 : 1) : 0;
        last_f = f(0, 0);
        if (agreed >= std::max<std::size_t>(opts.confirmations, 1))
            return {BilinearEstimate{scale * f(0, 0), ell, dist, false}, 0};
    }
    throw ConvergenceError("bilinear_form: Gauss/anti-Gauss rules did not agree within " + std::to_string(max_ell) +
                               " steps; use a linear-system back end",
                           {});
}

}  // namespace

BilinearEstimate bilinear_form(const LinearOperator& op, std::span<const double> u, std::span<const double> v,
                               double rel_tol, std::size_t max_ell, const QuadratureOptions& opts) {
    if (!(rel_tol > 0.0)) throw InvalidArgument("bilinear_form: rel_tol must be positive");
    const auto n = static_cast<Eigen::Index>(op.size());
    if (u.size() != op.size() || v.size() != op.size()) throw DimensionError("bilinear_form: vector length mismatch");

    Eigen::Map<const Eigen::VectorXd> um(u.data(), n), vm(v.data(), n);
    const double un = um.norm(), vn = vm.norm();
    if (un == 0.0 || vn == 0.0) return {0.0, 0, 0.0, true};

    if (n == 1) {
        double b = 0.0, one = 1.0;
        op.apply(std::span<const double>(&one, 1), std::span<double>(&b, 1));
        return {u[0] * v[0] / (1.0 - b), 1, 0.0, true};
    }

    std::string steps;
    for (std::size_t attempt = 0; attempt <= opts.restarts; ++attempt) {
        const Eigen::VectorXd w = augmentation(n, attempt);
        BlockVectors x(n, 2), y(n, 2);
        x.col(0) = um / un;
        y.col(0) = vm / vn;
        x.col(1) = w;
        y.col(1) = w;
        Attempt a;
        try {
            a = run_rules(op, x, y, un * vn, rel_tol, max_ell, opts);
        } catch (const BreakdownError&) {
            a.breakdown_step = 0;  // X^T Y itself is singular for this augmentation
        }
        if (a.estimate) return *a.estimate;
        steps += (steps.empty() ? "" : ", ") + std::to_string(a.breakdown_step);
    }
    throw BreakdownError("bilinear_form: block Lanczos breakdown (at step " + steps +
                         " of each attempt); use a linear-system back end");
}

}  // namespace evoblock
