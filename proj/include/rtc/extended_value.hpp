#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rtc {

/// Extended real used for cumulative vehicle counts: either a finite value
/// (veh) or +infinity, the "no information" sentinel of value conditions.
/// +infinity absorbs min-combination; constraint rows whose solution side is
/// infinite are vacuous and must never be emitted.
class ExtendedValue {
public:
    constexpr ExtendedValue() : value_(0.0), finite_(true) {}
    constexpr ExtendedValue(double v) : value_(v), finite_(true) {}

    static constexpr ExtendedValue infinity() {
        ExtendedValue e;
        e.finite_ = false;
        e.value_ = std::numeric_limits<double>::infinity();
        return e;
    }

    constexpr bool is_finite() const { return finite_; }

    /// Finite value; calling on +infinity is a programming error.
    constexpr double value() const { return value_; }

    friend ExtendedValue min(ExtendedValue a, ExtendedValue b) {
        if (!a.finite_) return b;
        if (!b.finite_) return a;
        return ExtendedValue(std::min(a.value_, b.value_));
    }

    friend ExtendedValue operator+(ExtendedValue a, double c) {
        return a.finite_ ? ExtendedValue(a.value_ + c) : infinity();
    }

    friend bool operator==(ExtendedValue a, ExtendedValue b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }

    friend std::ostream& operator<<(std::ostream& os, ExtendedValue v) {
        if (v.finite_) return os << v.value_;
        return os << "+inf";
    }

private:
    double value_;
    bool finite_;
};

}  // namespace rtc
