#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "fpfilter/expression.hpp"
#include "fpfilter/fpn_model.hpp"
#include "fpfilter/outcome.hpp"

namespace fpfilter {

/// head = fl(a op b), head + tail = a op b exactly.
struct two_result
{
    double head;
    double tail;
};

inline two_result two_sum(double a, double b)
{
    const double x = a + b;
    const double b_virtual = x - a;
    const double a_virtual = x - b_virtual;
    const double b_round = b - b_virtual;
    const double a_round = a - a_virtual;
    return {x, a_round + b_round};
}

inline two_result two_diff(double a, double b)
{
    const double x = a - b;
    const double b_virtual = a - x;
    const double a_virtual = x + b_virtual;
    const double b_round = b_virtual - b;
    const double a_round = a - a_virtual;
    return {x, a_round + b_round};
}

/// Requires |a| >= |b| (or a == 0).
inline two_result fast_two_sum(double a, double b)
{
    const double x = a + b;
    return {x, b - (x - a)};
}

/// Veltkamp split into two 26-bit halves. Overflows for |a| > ~2^996.
inline two_result split(double a)
{
    constexpr double splitter = 134217729.0; // 2^27 + 1
    const double c = splitter * a;
    const double big = c - a;
    const double hi = c - big;
    return {hi, a - hi};
}

inline two_result two_product_dekker(double a, double b)
{
    const double x = a * b;
    const auto [ahi, alo] = split(a);
    const auto [bhi, blo] = split(b);
    const double err1 = x - (ahi * bhi);
    const double err2 = err1 - (alo * bhi);
    const double err3 = err2 - (ahi * blo);
    return {x, (alo * blo) - err3};
}

inline two_result two_product_fma(double a, double b)
{
    const double x = a * b;
    return {x, std::fma(a, b, -x)};
}

/// Error-free product. Uses a fused multiply-add when the platform provides
/// a fast one, Dekker's algorithm otherwise; both agree whenever the tail is
/// representable (see product_is_error_free).
inline two_result two_product(double a, double b)
{
#ifdef FP_FAST_FMA
    return two_product_fma(a, b);
#else
    return two_product_dekker(a, b);
#endif
}

/// Smallest |a*b| for which the tail of two_product is guaranteed exact.
inline constexpr double product_tail_threshold = 0x1p-968;

/// True when the result of two_product(a, b) is an exact decomposition:
/// either a factor is zero, or head/tail are finite and the product is far
/// enough from the underflow range.
inline bool product_is_error_free(double a, double b, const two_result& r)
{
    if (a == 0 || b == 0) {
        return true;
    }
    return std::isfinite(r.head) && std::isfinite(r.tail) && std::fabs(r.head) >= product_tail_threshold;
}

/// Nonoverlapping components in increasing order of magnitude whose exact
/// sum is the represented value. Zero is the single component {0}.
using expansion = std::vector<double>;

/// Nonoverlapping in the sense of the lowest set bit of each larger
/// component lying above the highest set bit of the next smaller one,
/// with components strictly increasing in magnitude (zeros skipped).
bool is_valid_expansion(std::span<const double> e);

/// Exact value of the expansion.
dyadic expansion_value(std::span<const double> e);

/// The following return nullopt on a range failure (overflow, or a product
/// whose error term falls into the underflow range).
std::optional<expansion> expansion_sum(std::span<const double> e, std::span<const double> f);
std::optional<expansion> expansion_difference(std::span<const double> e, std::span<const double> f);
std::optional<expansion> expansion_scale(std::span<const double> e, double b);
std::optional<expansion> expansion_product(std::span<const double> e, std::span<const double> f);

/// Renormalises to a shorter expansion with the same value.
expansion expansion_compress(std::span<const double> e);

/// Sign of the most significant nonzero component.
sign expansion_sign(std::span<const double> e);

/// Exact sign of the polynomial by evaluating the tree over expansions.
/// Uncertain on non-finite inputs or any range failure.
filter_outcome exact_sign_expansion(const expr& e, std::span<const double> inputs);

/// Exact value as an expansion, nullopt on range failure.
std::optional<expansion> evaluate_expansion(const expr& e, std::span<const double> inputs);

} // namespace fpfilter
