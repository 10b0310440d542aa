#pragma once

#include <cmath>
#include <limits>

#include "fpfilter/expansion.hpp"

namespace fpfilter {

/// Closed interval of binary64 values. Arithmetic rounds outward: after an
/// inexact operation the endpoint moves one float step away from the
/// rounded result, in the direction of the rounding error when it is known
/// and in both directions otherwise. Under round-to-nearest with gradual
/// underflow one step always covers the exact result (near zero the step is
/// u_S, which absorbs underflow).
struct interval
{
    double lo;
    double hi;

    static interval point(double x) { return {x, x}; }

    bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    /// max(|lo|, |hi|)
    double magnitude() const { return std::fmax(std::fabs(lo), std::fabs(hi)); }
};

namespace detail {

inline double step_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double step_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

inline double sum_down(double a, double b)
{
    const auto [s, err] = two_sum(a, b);
    return err < 0 ? step_down(s) : s;
}

inline double sum_up(double a, double b)
{
    const auto [s, err] = two_sum(a, b);
    return err > 0 ? step_up(s) : s;
}

struct product_bounds
{
    double lo;
    double hi;
};

inline product_bounds product_range(double a, double b)
{
    const two_result p = two_product(a, b);
    if (product_is_error_free(a, b, p)) {
        return {p.tail < 0 ? step_down(p.head) : p.head, p.tail > 0 ? step_up(p.head) : p.head};
    }
    return {step_down(p.head), step_up(p.head)};
}

} // namespace detail

inline interval operator+(const interval& a, const interval& b)
{
    return {detail::sum_down(a.lo, b.lo), detail::sum_up(a.hi, b.hi)};
}

inline interval operator-(const interval& a, const interval& b)
{
    return {detail::sum_down(a.lo, -b.hi), detail::sum_up(a.hi, -b.lo)};
}

inline interval operator*(const interval& a, const interval& b)
{
    const detail::product_bounds c[4] = {
        detail::product_range(a.lo, b.lo),
        detail::product_range(a.lo, b.hi),
        detail::product_range(a.hi, b.lo),
        detail::product_range(a.hi, b.hi),
    };
    double lo = c[0].lo;
    double hi = c[0].hi;
    for (const auto& r : c) {
        if (std::isnan(r.lo) || std::isnan(r.hi)) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {nan, nan};
        }
        lo = std::fmin(lo, r.lo);
        hi = std::fmax(hi, r.hi);
    }
    return {lo, hi};
}

/// Upper bound of a + b for nonnegative a, b.
inline double add_up(double a, double b) { return detail::sum_up(a, b); }

/// Upper bound of a * b for nonnegative a, b.
inline double mul_up(double a, double b) { return detail::product_range(a, b).hi; }

} // namespace fpfilter
