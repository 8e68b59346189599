#pragma once
#include <cmath>
#include <limits>
#include <utility>

namespace deconv {

// Nonnegative quantity carried as log(value) so super-smooth noise terms
// (e.g. Delta(m) ~ exp(sigma^2 (pi m)^2)) survive far past double range.
// When constructed from a linear value the exact double is kept alongside.
struct LogValue {
    double log_value = -std::numeric_limits<double>::infinity();
    double linear_cache = std::numeric_limits<double>::quiet_NaN();

    static LogValue from_linear(double v) {
        LogValue out;
        out.log_value = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
        out.linear_cache = v;
        return out;
    }
    static LogValue from_log(double lv) {
        LogValue out;
        out.log_value = lv;
        return out;
    }

    // Linear value; overflows to +inf when log_value > ~709.
    double value() const {
        if (!std::isnan(linear_cache)) return linear_cache;
        return std::exp(log_value);
    }
    bool representable() const { return log_value < 709.0; }

    bool operator<(const LogValue& o) const { return log_value < o.log_value; }
    bool operator<=(const LogValue& o) const { return log_value <= o.log_value; }
};

inline LogValue log_add(LogValue a, LogValue b) {
    if (a.log_value < b.log_value) std::swap(a, b);
    if (std::isinf(b.log_value) && b.log_value < 0) return a;
    return LogValue::from_log(a.log_value + std::log1p(std::exp(b.log_value - a.log_value)));
}

} // namespace deconv
