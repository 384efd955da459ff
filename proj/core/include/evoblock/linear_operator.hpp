#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evoblock {

/// Square real operator known only through its action and the action of its
/// transpose. Implementations must be safe to apply concurrently.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t size() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    virtual void apply_transpose(std::span<const double> x, std::span<double> y) const = 0;

    std::vector<double> operator()(std::span<const double> x) const {
        std::vector<double> y(size());
        apply(x, y);
        return y;
    }
};

/// c * G for a wrapped operator G.
class ScaledOperator final : public LinearOperator {
public:
    ScaledOperator(const LinearOperator& op, double scale) : op_(op), scale_(scale) {}

    std::size_t size() const override { return op_.size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

private:
    const LinearOperator& op_;
    double scale_;
};

/// I - G for a wrapped operator G; the system matrix handed to LSQR.
class IdentityMinus final : public LinearOperator {
public:
    explicit IdentityMinus(const LinearOperator& op) : op_(op) {}

    std::size_t size() const override { return op_.size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

private:
    const LinearOperator& op_;
};

/// G^T for a wrapped operator G.
class TransposedOperator final : public LinearOperator {
public:
    explicit TransposedOperator(const LinearOperator& op) : op_(op) {}

    std::size_t size() const override { return op_.size(); }
    void apply(std::span<const double> x, std::span<double> y) const override { op_.apply_transpose(x, y); }
    void apply_transpose(std::span<const double> x, std::span<double> y) const override { op_.apply(x, y); }

private:
    const LinearOperator& op_;
};

}  // namespace evoblock
