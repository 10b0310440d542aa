#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "fpfilter/error_bounds.hpp"
#include "fpfilter/oracle.hpp"
#include "fpfilter/program.hpp"

namespace fpfilter::harness {

struct invariant_counts
{
    std::uint64_t samples = 0;
    /// Samples skipped because a multiplication underflowed (rules without
    /// protection only).
    std::uint64_t underflow_skipped = 0;
    std::uint64_t checks = 0;
    std::uint64_t magnitude_violations = 0; // |q~| <= m
    std::uint64_t error_violations = 0;     // |q~ - q| <= a(eps) m
    std::uint64_t exactness_violations = 0; // q~ == q or m >= u_N
    std::uint64_t eps_max_checks = 0;
    std::uint64_t eps_max_violations = 0;
    /// Pairs outside the lexicographic rule's coefficient hypothesis; the
    /// derivation compares them by exact evaluation instead.
    std::uint64_t eps_max_outside_hypothesis = 0;

    std::uint64_t violations() const
    {
        return magnitude_violations + error_violations + exactness_violations + eps_max_violations;
    }
    void merge(const invariant_counts& o);
};

/// Checks the error-bound invariants at every subexpression of `e` for one
/// input vector at a time. The error inequality is decided exactly.
class invariant_checker
{
public:
    invariant_checker(const expr& e, bool ufp);

    void check(std::span<const double> inputs, invariant_counts& counts);

    /// Every pair of a-polynomials compared while deriving `e`, checked
    /// against exact evaluation at eps.
    static void check_eps_max_pairs(const expr& e, bool ufp, invariant_counts& counts);

private:
    struct node_check
    {
        std::uint32_t value_slot;
        std::uint32_t exact_slot;
        std::uint32_t magnitude_slot;
        mpz_class a_mantissa;
        std::int64_t a_exponent;
    };

    bool error_within(const node_check& n, double approx, double magnitude);

    bool m_ufp;
    double m_u_normal;
    program m_float;
    exact_evaluator m_exact;
    std::vector<node_check> m_nodes;
    std::vector<std::uint32_t> m_products;
    std::vector<double> m_slots;
    mpz_class m_lhs;
    mpz_class m_rhs;
    mpz_class m_tmp;
};

/// Flags inputs for which some product in p~, or in the non-protected
/// magnitudes m1 and m2 of its top operands, turns nonzero finite factors
/// into zero or a subnormal.
class underflow_detector
{
public:
    explicit underflow_detector(const expr& e);

    bool underflows(std::span<const double> inputs);

private:
    program m_program;
    std::vector<std::uint32_t> m_products;
    std::vector<double> m_slots;
};

/// True if `product` of nonzero finite factors a and b underflowed.
inline bool product_underflow(double a, double b, double product)
{
    return a != 0 && b != 0 && std::isfinite(a) && std::isfinite(b) &&
           (product == 0 || std::fpclassify(product) == FP_SUBNORMAL);
}

} // namespace fpfilter::harness
