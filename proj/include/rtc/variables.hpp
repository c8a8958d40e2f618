#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "rtc/extended_value.hpp"

namespace rtc {

enum class VarKind : std::uint8_t {
    Inflow,    ///< q_in(step, link); exists for entry links only
    Outflow,   ///< q_out(step, link)
    SlackY,    ///< balance slack y(step) of the freeway objective
    Epigraph,  ///< auxiliary scalar bounding a quadratic penalty
};

/// Identity of one scalar decision variable. Dense column numbers are
/// assigned when a program is assembled, not here.
struct VarIndex {
    VarKind kind = VarKind::Outflow;
    int link = 0;  ///< link id; 0 for variables not attached to a link
    int step = 0;  ///< 1-based time step; 0 for scalars

    auto operator<=>(const VarIndex&) const = default;
};

std::string to_string(const VarIndex& v);

/// Sparse linear expression sum(coef * var) + constant. Zero coefficients are
/// never stored; a +infinity constant marks a vacuous row that must not be
/// emitted into any program.
class AffineExpr {
public:
    AffineExpr() = default;
    explicit AffineExpr(double constant) : constant_(constant) {}

    static AffineExpr vacuous() {
        AffineExpr e;
        e.constant_ = ExtendedValue::infinity();
        return e;
    }

    void add(const VarIndex& v, double coef) {
        if (coef == 0.0) return;
        auto [it, fresh] = terms_.try_emplace(v, coef);
        if (!fresh) {
            it->second += coef;
            if (it->second == 0.0) terms_.erase(it);
        }
    }
    void add_constant(double c) { constant_ = constant_ + c; }

    const std::map<VarIndex, double>& terms() const { return terms_; }
    ExtendedValue constant() const { return constant_; }
    bool is_vacuous() const { return !constant_.is_finite(); }
    bool has_variables() const { return !terms_.empty(); }

    /// Drop terms with |coef| <= eps.
    void prune(double eps) {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = std::abs(it->second) <= eps ? terms_.erase(it) : std::next(it);
    }

    /// Evaluate with a value lookup; vacuous rows evaluate to -infinity-like
    /// "always satisfied", so callers should check is_vacuous() first.
    double evaluate(const std::function<double(const VarIndex&)>& value) const {
        double acc = constant_.value();
        for (const auto& [v, c] : terms_) acc += c * value(v);
        return acc;
    }

private:
    std::map<VarIndex, double> terms_;
    ExtendedValue constant_{0.0};
};

}  // namespace rtc
