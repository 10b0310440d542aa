#include "fpfilter/error_bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fpfilter/errors.hpp"

namespace fpfilter {

// ---------------------------------------------------------------------------
// eps_poly

eps_poly::eps_poly(std::vector<mpz_class> coefficients)
    : m_coeffs(std::move(coefficients))
{
    trim();
}

eps_poly::eps_poly(std::initializer_list<long> coefficients)
{
    for (long c : coefficients) {
        m_coeffs.emplace_back(c);
    }
    trim();
}

void eps_poly::trim()
{
    while (!m_coeffs.empty() && sgn(m_coeffs.back()) == 0) {
        m_coeffs.pop_back();
    }
}

dyadic eps_poly::evaluate(const fpn_params& params) const
{
    dyadic sum;
    for (std::size_t k = 0; k < m_coeffs.size(); ++k) {
        const auto power = -static_cast<std::int64_t>(params.precision) * static_cast<std::int64_t>(k + 1);
        sum += dyadic::from_integer(m_coeffs[k], power);
    }
    return sum;
}

eps_poly eps_poly::times_one_plus_eps() const
{
    if (m_coeffs.empty()) {
        return {};
    }
    std::vector<mpz_class> out(m_coeffs.size() + 1);
    for (std::size_t k = 0; k < m_coeffs.size(); ++k) {
        out[k] += m_coeffs[k];
        out[k + 1] += m_coeffs[k];
    }
    return eps_poly(std::move(out));
}

eps_poly operator+(const eps_poly& a, const eps_poly& b)
{
    std::vector<mpz_class> out(std::max(a.m_coeffs.size(), b.m_coeffs.size()));
    for (std::size_t k = 0; k < a.m_coeffs.size(); ++k) {
        out[k] += a.m_coeffs[k];
    }
    for (std::size_t k = 0; k < b.m_coeffs.size(); ++k) {
        out[k] += b.m_coeffs[k];
    }
    return eps_poly(std::move(out));
}

eps_poly operator*(const eps_poly& a, const eps_poly& b)
{
    if (a.is_zero() || b.is_zero()) {
        return {};
    }
    // eps^(i+1) * eps^(j+1) = eps^(i+j+2), i.e. index i + j + 1.
    std::vector<mpz_class> out(a.m_coeffs.size() + b.m_coeffs.size());
    for (std::size_t i = 0; i < a.m_coeffs.size(); ++i) {
        for (std::size_t j = 0; j < b.m_coeffs.size(); ++j) {
            out[i + j + 1] += a.m_coeffs[i] * b.m_coeffs[j];
        }
    }
    return eps_poly(std::move(out));
}

std::string eps_poly::to_string() const
{
    if (m_coeffs.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < m_coeffs.size(); ++k) {
        const mpz_class& c = m_coeffs[k];
        if (sgn(c) == 0) {
            continue;
        }
        mpz_class magnitude = c;
        if (sgn(c) < 0) {
            magnitude = -c;
        }
        if (first) {
            os << (sgn(c) < 0 ? "-" : "");
        } else {
            os << (sgn(c) < 0 ? " - " : " + ");
        }
        first = false;
        os << magnitude.get_str() << "*eps";
        if (k > 0) {
            os << "^" << (k + 1);
        }
    }
    return os.str();
}

std::int64_t phi(const fpn_params& params)
{
    if (params.precision < 2) {
        throw derivation_error("phi: precision must be at least 2");
    }
    // 4 / eps + 45 = 2^(p + 2) + 45
    mpz_class n;
    mpz_ui_pow_ui(n.get_mpz_t(), 2, static_cast<unsigned long>(params.precision + 2));
    n += 45;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
    // floor((sqrt(n) - 1) / 4) == floor((isqrt(n) - 1) / 4)
    mpz_class q;
    mpz_class shifted = root - 1;
    mpz_fdiv_q_ui(q.get_mpz_t(), shifted.get_mpz_t(), 4);
    return 2 * q.get_si();
}

namespace {

bool coefficients_below(const eps_poly& a, const mpz_class& limit)
{
    return std::all_of(a.coefficients().begin(), a.coefficients().end(), [&](const mpz_class& c) {
        return abs(c) < limit;
    });
}

mpz_class inverse_epsilon(const fpn_params& params)
{
    mpz_class limit;
    mpz_ui_pow_ui(limit.get_mpz_t(), 2, static_cast<unsigned long>(params.precision));
    return limit;
}

const eps_poly& lexicographic_max(const eps_poly& a1, const eps_poly& a2)
{
    const auto& c1 = a1.coefficients();
    const auto& c2 = a2.coefficients();
    const std::size_t n = std::max(c1.size(), c2.size());
    const mpz_class zero;
    for (std::size_t k = 0; k < n; ++k) {
        const mpz_class& x = k < c1.size() ? c1[k] : zero;
        const mpz_class& y = k < c2.size() ? c2[k] : zero;
        if (x != y) {
            return x > y ? a1 : a2;
        }
    }
    return a1;
}

} // namespace

eps_poly eps_poly_max(const eps_poly& a1, const eps_poly& a2, const fpn_params& params)
{
    const mpz_class limit = inverse_epsilon(params);
    if (!coefficients_below(a1, limit) || !coefficients_below(a2, limit)) {
        throw derivation_error("eps_poly_max: coefficient not below 1/eps, lexicographic comparison is not valid");
    }
    return lexicographic_max(a1, a2);
}

eps_poly eps_poly_max_at(const eps_poly& a1, const eps_poly& a2, const fpn_params& params)
{
    // With |c| < 1/(4 eps) the first differing coefficient dominates all
    // higher-order terms, so lexicographic order equals order at eps.
    const mpz_class limit = inverse_epsilon(params) / 4;
    if (coefficients_below(a1, limit) && coefficients_below(a2, limit)) {
        return lexicographic_max(a1, a2);
    }
    return a1.evaluate(params) >= a2.evaluate(params) ? a1 : a2;
}

eps_poly eps_poly_combine_sum(const eps_poly& a1, const eps_poly& a2, const fpn_params& params)
{
    return eps_poly_max_at(a1, a2, params).times_one_plus_eps() + eps_poly::epsilon();
}

eps_poly eps_poly_combine_product(const eps_poly& a1, const eps_poly& a2)
{
    return (a1 + a2 + a1 * a2).times_one_plus_eps() + eps_poly::epsilon();
}

// ---------------------------------------------------------------------------
// magnitude_expr

struct magnitude_expr::node
{
    magnitude_kind kind = magnitude_kind::constant;
    expr operand;
    double value = 0.0;
    constant_role role = constant_role::literal;
    std::vector<magnitude_expr> children;
};

magnitude_expr::magnitude_expr(std::shared_ptr<const node> n)
    : m_node(std::move(n))
{}

magnitude_expr magnitude_expr::abs_of(expr e)
{
    auto n = std::make_shared<node>();
    n->kind = magnitude_kind::abs_of;
    n->operand = std::move(e);
    return magnitude_expr(std::move(n));
}

magnitude_expr magnitude_expr::constant(double value, constant_role role)
{
    auto n = std::make_shared<node>();
    n->kind = magnitude_kind::constant;
    n->value = value;
    n->role = role;
    return magnitude_expr(std::move(n));
}

magnitude_expr magnitude_expr::sum(magnitude_expr l, magnitude_expr r)
{
    auto n = std::make_shared<node>();
    n->kind = magnitude_kind::sum;
    n->children = {std::move(l), std::move(r)};
    return magnitude_expr(std::move(n));
}

magnitude_expr magnitude_expr::product(magnitude_expr l, magnitude_expr r)
{
    auto n = std::make_shared<node>();
    n->kind = magnitude_kind::product;
    n->children = {std::move(l), std::move(r)};
    return magnitude_expr(std::move(n));
}

magnitude_kind magnitude_expr::kind() const { return m_node->kind; }
const expr& magnitude_expr::operand() const { return m_node->operand; }
double magnitude_expr::value() const { return m_node->value; }
constant_role magnitude_expr::role() const { return m_node->role; }

const magnitude_expr& magnitude_expr::left() const
{
    return m_node->children[0];
}

const magnitude_expr& magnitude_expr::right() const
{
    return m_node->children[1];
}

double magnitude_expr::evaluate(std::span<const double> inputs) const
{
    switch (kind()) {
    case magnitude_kind::abs_of:
        return std::fabs(eval_naive(operand(), inputs));
    case magnitude_kind::constant:
        return value();
    case magnitude_kind::sum:
        return left().evaluate(inputs) + right().evaluate(inputs);
    case magnitude_kind::product:
        return left().evaluate(inputs) * right().evaluate(inputs);
    }
    return 0.0;
}

checked_value magnitude_expr::evaluate_checked(std::span<const double> inputs) const
{
    switch (kind()) {
    case magnitude_kind::abs_of: {
        const checked_value v = eval_checked(operand(), inputs);
        return {std::fabs(v.value), v.underflow};
    }
    case magnitude_kind::constant:
        return {value(), false};
    default:
        break;
    }
    const checked_value l = left().evaluate_checked(inputs);
    const checked_value r = right().evaluate_checked(inputs);
    if (kind() == magnitude_kind::sum) {
        return {l.value + r.value, l.underflow || r.underflow};
    }
    const double v = l.value * r.value;
    const bool underflow = l.value != 0 && r.value != 0 && std::isfinite(l.value) && std::isfinite(r.value) &&
                           (v == 0 || std::fpclassify(v) == FP_SUBNORMAL);
    return {v, l.underflow || r.underflow || underflow};
}

std::uint32_t magnitude_expr::compile(program& p) const
{
    switch (kind()) {
    case magnitude_kind::abs_of:
        return p.add_abs(p.add_expr(operand()));
    case magnitude_kind::constant:
        return p.add_constant(value());
    case magnitude_kind::sum:
        return p.add_binary(opcode::add, left().compile(p), right().compile(p));
    case magnitude_kind::product:
        return p.add_binary(opcode::mul, left().compile(p), right().compile(p));
    }
    return 0;
}

double magnitude_expr::upper_bound(std::span<const interval> bounds) const
{
    switch (kind()) {
    case magnitude_kind::abs_of: {
        const interval range = evaluate_interval(operand(), bounds);
        if (!range.is_finite()) {
            return HUGE_VAL;
        }
        return range.magnitude();
    }
    case magnitude_kind::constant:
        return value();
    case magnitude_kind::sum:
        return add_up(left().upper_bound(bounds), right().upper_bound(bounds));
    case magnitude_kind::product:
        return mul_up(left().upper_bound(bounds), right().upper_bound(bounds));
    }
    return HUGE_VAL;
}

namespace {

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_magnitude(const magnitude_expr& m, std::string& out, bool inside_product)
{
    switch (m.kind()) {
    case magnitude_kind::abs_of:
        out += "|" + to_string(m.operand()) + "|";
        return;
    case magnitude_kind::constant:
        switch (m.role()) {
        case constant_role::u_normal: out += "u_N"; return;
        case constant_role::u_subnormal: out += "u_S"; return;
        case constant_role::literal: out += format_double(m.value()); return;
        }
        return;
    case magnitude_kind::sum:
        if (inside_product) {
            out += "(";
        }
        write_magnitude(m.left(), out, false);
        out += " + ";
        write_magnitude(m.right(), out, false);
        if (inside_product) {
            out += ")";
        }
        return;
    case magnitude_kind::product:
        write_magnitude(m.left(), out, true);
        out += " * ";
        write_magnitude(m.right(), out, true);
        return;
    }
}

} // namespace

std::string magnitude_expr::to_string() const
{
    std::string out;
    write_magnitude(*this, out, false);
    return out;
}

bool operator==(const magnitude_expr& a, const magnitude_expr& b)
{
    if (a.m_node == b.m_node) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case magnitude_kind::abs_of:
        return a.operand() == b.operand();
    case magnitude_kind::constant:
        return a.role() == b.role() && a.value() == b.value();
    default:
        return a.left() == b.left() && a.right() == b.right();
    }
}

// ---------------------------------------------------------------------------
// rules

namespace {

magnitude_expr with_u_normal(magnitude_expr m, bool ufp, const fpn_params& params)
{
    if (!ufp) {
        return m;
    }
    return magnitude_expr::sum(std::move(m), magnitude_expr::constant(params.u_normal(), constant_role::u_normal));
}

class constant_leaf_rule final : public error_bound_rule
{
public:
    std::string name() const override { return "constant"; }
    bool applicable(const expr& e) const override { return e.kind() == node_kind::constant; }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        return {{}, magnitude_expr::constant(std::fabs(e.value())), ctx.ufp()};
    }
};

class input_leaf_rule final : public error_bound_rule
{
public:
    std::string name() const override { return "input"; }
    bool applicable(const expr& e) const override { return e.kind() == node_kind::input; }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        return {{}, magnitude_expr::abs_of(e), ctx.ufp()};
    }
};

class atom_sum_rule final : public error_bound_rule
{
public:
    std::string name() const override { return "atom-sum"; }
    bool applicable(const expr& e) const override { return is_atom_pair_sum(e); }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        return {eps_poly::epsilon(), magnitude_expr::abs_of(e), ctx.ufp()};
    }
};

class atom_product_rule final : public error_bound_rule
{
public:
    explicit atom_product_rule(bool ufp)
        : m_ufp(ufp)
    {}
    std::string name() const override { return m_ufp ? "atom-product-ufp" : "atom-product"; }
    bool applicable(const expr& e) const override
    {
        return e.kind() == node_kind::product && is_atom(e.left()) && is_atom(e.right());
    }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        return {eps_poly::epsilon(), with_u_normal(magnitude_expr::abs_of(e), m_ufp, ctx.params()), ctx.ufp()};
    }

private:
    bool m_ufp;
};

class atom_pair_product_rule final : public error_bound_rule
{
public:
    explicit atom_pair_product_rule(bool ufp)
        : m_ufp(ufp)
    {}
    std::string name() const override { return m_ufp ? "atom-pair-product-ufp" : "atom-pair-product"; }
    bool applicable(const expr& e) const override
    {
        return e.kind() == node_kind::product && is_atom_pair_sum(e.left()) && is_atom_pair_sum(e.right());
    }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        // 3 eps - (phi - 14) eps^2
        eps_poly a(std::vector<mpz_class>{mpz_class(3), mpz_class(-(phi(ctx.params()) - 14))});
        return {std::move(a), with_u_normal(magnitude_expr::abs_of(e), m_ufp, ctx.params()), ctx.ufp()};
    }

private:
    bool m_ufp;
};

class general_sum_rule final : public error_bound_rule
{
public:
    std::string name() const override { return "sum"; }
    bool applicable(const expr& e) const override { return e.is_additive(); }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        error_bound l = ctx.derive(e.left());
        error_bound r = ctx.derive(e.right());
        return {eps_poly_combine_sum(l.a, r.a, ctx.params()), magnitude_expr::sum(std::move(l.m), std::move(r.m)),
                ctx.ufp()};
    }
};

class general_product_rule final : public error_bound_rule
{
public:
    explicit general_product_rule(bool ufp)
        : m_ufp(ufp)
    {}
    std::string name() const override { return m_ufp ? "product-ufp" : "product"; }
    bool applicable(const expr& e) const override { return e.kind() == node_kind::product; }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        error_bound l = ctx.derive(e.left());
        error_bound r = ctx.derive(e.right());
        return {eps_poly_combine_product(l.a, r.a),
                with_u_normal(magnitude_expr::product(std::move(l.m), std::move(r.m)), m_ufp, ctx.params()),
                ctx.ufp()};
    }

private:
    bool m_ufp;
};

class rounded_input_rule final : public error_bound_rule
{
public:
    std::string name() const override { return "rounded-input"; }
    bool applicable(const expr& e) const override { return e.kind() == node_kind::input; }
    error_bound bound(const expr& e, const derivation_context& ctx) const override
    {
        return {eps_poly::epsilon(), magnitude_expr::abs_of(e), ctx.ufp()};
    }
};

} // namespace

namespace rules {

std::shared_ptr<const error_bound_rule> constant_leaf() { return std::make_shared<constant_leaf_rule>(); }
std::shared_ptr<const error_bound_rule> input_leaf() { return std::make_shared<input_leaf_rule>(); }
std::shared_ptr<const error_bound_rule> atom_sum() { return std::make_shared<atom_sum_rule>(); }
std::shared_ptr<const error_bound_rule> atom_product(bool ufp) { return std::make_shared<atom_product_rule>(ufp); }
std::shared_ptr<const error_bound_rule> atom_pair_product(bool ufp)
{
    return std::make_shared<atom_pair_product_rule>(ufp);
}
std::shared_ptr<const error_bound_rule> general_sum() { return std::make_shared<general_sum_rule>(); }
std::shared_ptr<const error_bound_rule> general_product(bool ufp)
{
    return std::make_shared<general_product_rule>(ufp);
}
std::shared_ptr<const error_bound_rule> rounded_input() { return std::make_shared<rounded_input_rule>(); }

} // namespace rules

rule_set default_rules(bool ufp)
{
    return rule_set({rules::constant_leaf(), rules::input_leaf(), rules::atom_sum(), rules::atom_product(ufp),
                     rules::atom_pair_product(ufp), rules::general_sum(), rules::general_product(ufp)},
                    ufp);
}

bool derivation_context::ufp() const { return m_rules.ufp(); }

error_bound derivation_context::derive(const expr& e) const
{
    for (const auto& rule : m_rules.rules()) {
        if (rule->applicable(e)) {
            return rule->bound(e, *this);
        }
    }
    throw derivation_error("no error-bound rule applies to '" + to_string(e) + "'");
}

error_bound derive(const expr& e, bool ufp, const fpn_params& params)
{
    return derive(e, default_rules(ufp), params);
}

error_bound derive(const expr& e, const rule_set& rules, const fpn_params& params)
{
    return derivation_context(rules, params).derive(e);
}

// ---------------------------------------------------------------------------
// constants

filter_constants compute_constants(const eps_poly& a_max, const fpn_params& params)
{
    if (params.precision > 53 || params.e_min < -1022 || params.e_max > 1023) {
        throw derivation_error("compute_constants: the number system must embed into binary64");
    }
    const dyadic a = a_max.evaluate(params);
    const dyadic eps = dyadic::power_of_two(-params.precision);
    const dyadic one = dyadic::power_of_two(0);
    const dyadic one_minus_eps = one - eps;

    auto a3 = round_up(a, params);
    // a3 > a / (1 - eps)  <=>  a3 (1 - eps) > a
    while (a3 && !(*a3 * one_minus_eps > a)) {
        a3 = next_up(*a3, params);
    }
    if (!a3) {
        throw derivation_error("compute_constants: a3 overflows the number system");
    }
    const dyadic one_plus_eps = one + eps;
    const auto a4 = round_up(*a3 * one_plus_eps * one_plus_eps, params);
    if (!a4) {
        throw derivation_error("compute_constants: a4 overflows the number system");
    }
    return {a3->to_double(), a4->to_double()};
}

// ---------------------------------------------------------------------------
// interval evaluation and staticisation

interval evaluate_interval(const expr& e, std::span<const interval> bounds)
{
    switch (e.kind()) {
    case node_kind::constant:
        return interval::point(e.value());
    case node_kind::input:
        return bounds[static_cast<std::size_t>(e.index() - 1)];
    case node_kind::sum:
        return evaluate_interval(e.left(), bounds) + evaluate_interval(e.right(), bounds);
    case node_kind::difference:
        return evaluate_interval(e.left(), bounds) - evaluate_interval(e.right(), bounds);
    case node_kind::product:
        return evaluate_interval(e.left(), bounds) * evaluate_interval(e.right(), bounds);
    }
    return {};
}

double staticize(const magnitude_expr& m, std::span<const interval> bounds)
{
    for (const interval& b : bounds) {
        if (std::isnan(b.lo) || std::isnan(b.hi)) {
            throw invalid_bounds_error("staticize: NaN bound");
        }
        if (b.lo > b.hi) {
            throw invalid_bounds_error("staticize: lower bound exceeds upper bound");
        }
    }
    return m.upper_bound(bounds);
}

} // namespace fpfilter
