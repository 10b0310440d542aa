#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "fpfilter/expression.hpp"
#include "fpfilter/fpn_model.hpp"
#include "fpfilter/interval.hpp"
#include "fpfilter/program.hpp"

namespace fpfilter {

/// Polynomial in epsilon without constant term: coefficients()[k] is the
/// coefficient of eps^(k+1). Trailing zeros are trimmed, so the zero
/// polynomial has no coefficients.
class eps_poly
{
public:
    eps_poly() = default;
    explicit eps_poly(std::vector<mpz_class> coefficients);
    eps_poly(std::initializer_list<long> coefficients);

    /// The polynomial eps.
    static eps_poly epsilon() { return eps_poly{1}; }

    const std::vector<mpz_class>& coefficients() const { return m_coeffs; }
    bool is_zero() const { return m_coeffs.empty(); }
    /// Highest power of eps with a nonzero coefficient (0 for zero).
    std::size_t degree() const { return m_coeffs.size(); }

    /// Exact value at eps = 2^-precision.
    dyadic evaluate(const fpn_params& params) const;

    /// (1 + eps) * this
    eps_poly times_one_plus_eps() const;

    friend eps_poly operator+(const eps_poly& a, const eps_poly& b);
    friend eps_poly operator*(const eps_poly& a, const eps_poly& b);
    friend bool operator==(const eps_poly& a, const eps_poly& b) { return a.m_coeffs == b.m_coeffs; }

    /// e.g. "3*eps - 94906250*eps^2"
    std::string to_string() const;

private:
    void trim();

    std::vector<mpz_class> m_coeffs;
};

/// phi = 2 * floor((-1 + sqrt(4/eps + 45)) / 4), with an exact integer
/// square root.
std::int64_t phi(const fpn_params& params = fpn_params::binary64());

/// Larger of two polynomials at eps by lexicographic comparison of the
/// coefficients, linear term first. Valid only when every coefficient is
/// smaller than 1/eps in magnitude; throws derivation_error otherwise.
eps_poly eps_poly_max(const eps_poly& a1, const eps_poly& a2, const fpn_params& params = fpn_params::binary64());

/// Larger of two polynomials at eps. Uses the lexicographic rule when its
/// hypothesis holds and exact evaluation at eps otherwise.
eps_poly eps_poly_max_at(const eps_poly& a1, const eps_poly& a2, const fpn_params& params = fpn_params::binary64());

/// (1 + eps) * max(a1, a2) + eps
eps_poly eps_poly_combine_sum(const eps_poly& a1, const eps_poly& a2,
                              const fpn_params& params = fpn_params::binary64());
/// (1 + eps) * (a1 + a2 + a1 * a2) + eps
eps_poly eps_poly_combine_product(const eps_poly& a1, const eps_poly& a2);

enum class magnitude_kind
{
    abs_of,
    constant,
    sum,
    product,
};

enum class constant_role
{
    literal,
    u_normal,
    u_subnormal,
};

/// Runtime half of an error bound: an expression over |.| of floating-point
/// subexpressions, nonnegative constants, and rounded + and *.
class magnitude_expr
{
public:
    static magnitude_expr abs_of(expr e);
    static magnitude_expr constant(double value, constant_role role = constant_role::literal);
    static magnitude_expr sum(magnitude_expr l, magnitude_expr r);
    static magnitude_expr product(magnitude_expr l, magnitude_expr r);

    magnitude_kind kind() const;
    const expr& operand() const;
    double value() const;
    constant_role role() const;
    const magnitude_expr& left() const;
    const magnitude_expr& right() const;

    /// Floating-point evaluation, same rounding model as eval_naive.
    double evaluate(std::span<const double> inputs) const;
    /// Evaluation with the underflow detector of eval_checked.
    checked_value evaluate_checked(std::span<const double> inputs) const;
    /// Appends the computation to `p` and returns the result slot.
    std::uint32_t compile(program& p) const;

    /// Upper bound over a box of inputs (see staticize).
    double upper_bound(std::span<const interval> bounds) const;

    std::string to_string() const;

    friend bool operator==(const magnitude_expr& a, const magnitude_expr& b);

private:
    struct node;
    explicit magnitude_expr(std::shared_ptr<const node> n);

    std::shared_ptr<const node> m_node;
};

/// (a, m) with the invariants |q~| <= m and |q~ - q| <= a(eps) * m, unless m
/// is infinite or NaN. With `ufp` set they hold even when multiplications
/// underflow; otherwise only for underflow-free evaluations.
struct error_bound
{
    eps_poly a;
    magnitude_expr m;
    bool ufp = false;
};

class rule_set;

/// Gives rules access to recursive derivation over the active rule set.
class derivation_context
{
public:
    derivation_context(const rule_set& rules, const fpn_params& params)
        : m_rules(rules)
        , m_params(params)
    {}

    error_bound derive(const expr& e) const;
    const fpn_params& params() const { return m_params; }
    bool ufp() const;

private:
    const rule_set& m_rules;
    fpn_params m_params;
};

/// One error-bound rule: a structural applicability test and the bound it
/// produces. Custom rules implement this interface.
class error_bound_rule
{
public:
    virtual ~error_bound_rule() = default;
    virtual std::string name() const = 0;
    virtual bool applicable(const expr& e) const = 0;
    virtual error_bound bound(const expr& e, const derivation_context& ctx) const = 0;
};

/// Ordered rules; derivation applies the first applicable one.
class rule_set
{
public:
    rule_set(std::vector<std::shared_ptr<const error_bound_rule>> rules, bool ufp)
        : m_rules(std::move(rules))
        , m_ufp(ufp)
    {}

    const std::vector<std::shared_ptr<const error_bound_rule>>& rules() const { return m_rules; }
    bool ufp() const { return m_ufp; }

private:
    std::vector<std::shared_ptr<const error_bound_rule>> m_rules;
    bool m_ufp;
};

/// Rules R1..R7 (constants, inputs, atom +/- atom, atom * atom,
/// (atom +/- atom) * (atom +/- atom), general +/-, general *), or their
/// underflow-protected variants. Atoms are inputs and constants.
rule_set default_rules(bool ufp);

namespace rules {

std::shared_ptr<const error_bound_rule> constant_leaf();
std::shared_ptr<const error_bound_rule> input_leaf();
std::shared_ptr<const error_bound_rule> atom_sum();
std::shared_ptr<const error_bound_rule> atom_product(bool ufp);
std::shared_ptr<const error_bound_rule> atom_pair_product(bool ufp);
std::shared_ptr<const error_bound_rule> general_sum();
std::shared_ptr<const error_bound_rule> general_product(bool ufp);

/// Treats every input as the nearest-rounding of an unknown real:
/// _k -> (eps, |_k|).
std::shared_ptr<const error_bound_rule> rounded_input();

} // namespace rules

error_bound derive(const expr& e, bool ufp, const fpn_params& params = fpn_params::binary64());
error_bound derive(const expr& e, const rule_set& rules, const fpn_params& params = fpn_params::binary64());

/// Constants of the semi-static filter for a maximal error polynomial:
/// a3 is the smallest member of F strictly greater than a_max/(1 - eps),
/// a4 the smallest member of F with a4 >= a3 (1 + eps)^2.
struct filter_constants
{
    double a3;
    double a4;
};

filter_constants compute_constants(const eps_poly& a_max, const fpn_params& params = fpn_params::binary64());

/// Upper bound of m over the box `bounds` (one interval per input) using
/// outward-rounded interval arithmetic. Throws invalid_bounds_error for NaN
/// or inverted bounds.
double staticize(const magnitude_expr& m, std::span<const interval> bounds);

/// Interval evaluation of the floating-point realisation over a box; the
/// result encloses both the exact and the rounded value for every point.
interval evaluate_interval(const expr& e, std::span<const interval> bounds);

} // namespace fpfilter
