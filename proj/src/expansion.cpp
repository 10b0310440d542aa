#include "fpfilter/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

namespace fpfilter {

namespace {

bool all_finite(std::span<const double> e)
{
    return std::all_of(e.begin(), e.end(), [](double x) { return std::isfinite(x); });
}

// Exponent of the lowest and highest set bits of a nonzero finite double.
int lowest_bit(double x)
{
    int exp = 0;
    const double f = std::frexp(std::fabs(x), &exp);
    auto m = static_cast<std::uint64_t>(std::ldexp(f, 53));
    return exp - 53 + std::countr_zero(m);
}

int highest_bit(double x)
{
    int exp = 0;
    std::frexp(std::fabs(x), &exp);
    return exp - 1;
}

expansion finish(expansion h)
{
    if (h.empty()) {
        h.push_back(0.0);
    }
    return h;
}

// Shewchuk's GROW-EXPANSION with zero elimination.
expansion grow(std::span<const double> e, double b)
{
    expansion h;
    h.reserve(e.size() + 1);
    double q = b;
    for (double x : e) {
        const auto [sum, err] = two_sum(q, x);
        q = sum;
        if (err != 0) {
            h.push_back(err);
        }
    }
    if (q != 0) {
        h.push_back(q);
    }
    return h;
}

} // namespace

bool is_valid_expansion(std::span<const double> e)
{
    if (e.empty() || !all_finite(e)) {
        return false;
    }
    if (e.size() == 1) {
        return true;
    }
    double previous = 0;
    for (double x : e) {
        if (x == 0) {
            return false;
        }
        if (previous != 0) {
            if (std::fabs(previous) >= std::fabs(x) || highest_bit(previous) >= lowest_bit(x)) {
                return false;
            }
        }
        previous = x;
    }
    return true;
}

dyadic expansion_value(std::span<const double> e)
{
    dyadic sum;
    for (double x : e) {
        sum += dyadic::from_double(x);
    }
    return sum;
}

std::optional<expansion> expansion_sum(std::span<const double> e, std::span<const double> f)
{
    expansion h(e.begin(), e.end());
    for (double b : f) {
        if (b != 0) {
            h = grow(h, b);
        }
    }
    if (!all_finite(h)) {
        return std::nullopt;
    }
    return expansion_compress(h);
}

std::optional<expansion> expansion_difference(std::span<const double> e, std::span<const double> f)
{
    expansion negated(f.size());
    std::transform(f.begin(), f.end(), negated.begin(), [](double x) { return -x; });
    return expansion_sum(e, negated);
}

std::optional<expansion> expansion_scale(std::span<const double> e, double b)
{
    // Shewchuk's SCALE-EXPANSION with zero elimination.
    expansion h;
    if (b == 0) {
        return expansion{0.0};
    }
    h.reserve(2 * e.size());
    bool first = true;
    double q = 0;
    for (double x : e) {
        if (x == 0) {
            continue;
        }
        const two_result p = two_product(x, b);
        if (!product_is_error_free(x, b, p)) {
            return std::nullopt;
        }
        if (first) {
            q = p.head;
            if (p.tail != 0) {
                h.push_back(p.tail);
            }
            first = false;
            continue;
        }
        const auto [sum, err] = two_sum(q, p.tail);
        if (err != 0) {
            h.push_back(err);
        }
        const auto [sum2, err2] = fast_two_sum(p.head, sum);
        if (err2 != 0) {
            h.push_back(err2);
        }
        q = sum2;
    }
    if (q != 0) {
        h.push_back(q);
    }
    if (!all_finite(h)) {
        return std::nullopt;
    }
    return finish(std::move(h));
}

std::optional<expansion> expansion_product(std::span<const double> e, std::span<const double> f)
{
    expansion acc{0.0};
    for (double b : f) {
        if (b == 0) {
            continue;
        }
        auto scaled = expansion_scale(e, b);
        if (!scaled) {
            return std::nullopt;
        }
        auto next = expansion_sum(acc, *scaled);
        if (!next) {
            return std::nullopt;
        }
        acc = std::move(*next);
    }
    return acc;
}

expansion expansion_compress(std::span<const double> e)
{
    // Shewchuk's COMPRESS.
    if (e.empty()) {
        return {0.0};
    }
    std::vector<double> g(e.size());
    std::size_t bottom = e.size() - 1;
    double q = e[bottom];
    for (std::size_t i = e.size() - 1; i-- > 0;) {
        const auto [sum, err] = fast_two_sum(q, e[i]);
        if (err != 0) {
            g[bottom--] = sum;
            q = err;
        } else {
            q = sum;
        }
    }
    expansion h;
    h.reserve(e.size());
    for (std::size_t i = bottom + 1; i < e.size(); ++i) {
        const auto [sum, err] = fast_two_sum(g[i], q);
        if (err != 0) {
            h.push_back(err);
        }
        q = sum;
    }
    if (q != 0 || h.empty()) {
        h.push_back(q);
    }
    return h;
}

sign expansion_sign(std::span<const double> e)
{
    for (auto it = e.rbegin(); it != e.rend(); ++it) {
        if (*it != 0) {
            return sign_of(*it);
        }
    }
    return sign::zero;
}

std::optional<expansion> evaluate_expansion(const expr& e, std::span<const double> inputs)
{
    switch (e.kind()) {
    case node_kind::constant:
        return expansion{e.value()};
    case node_kind::input: {
        const double x = inputs[static_cast<std::size_t>(e.index() - 1)];
        if (!std::isfinite(x)) {
            return std::nullopt;
        }
        return expansion{x};
    }
    default:
        break;
    }
    auto l = evaluate_expansion(e.left(), inputs);
    if (!l) {
        return std::nullopt;
    }
    auto r = evaluate_expansion(e.right(), inputs);
    if (!r) {
        return std::nullopt;
    }
    switch (e.kind()) {
    case node_kind::sum:
        return expansion_sum(*l, *r);
    case node_kind::difference:
        return expansion_difference(*l, *r);
    default:
        return expansion_product(*l, *r);
    }
}

filter_outcome exact_sign_expansion(const expr& e, std::span<const double> inputs)
{
    const auto value = evaluate_expansion(e, inputs);
    if (!value) {
        return filter_outcome::uncertain();
    }
    return filter_outcome::certain(expansion_sign(*value));
}

} // namespace fpfilter
