#include "fpfilter/filters.hpp"

#include <cmath>
#include <limits>

#include "fpfilter/errors.hpp"
#include "fpfilter/expansion.hpp"
#include "fpfilter/oracle.hpp"

namespace fpfilter {

namespace {

bool all_finite(std::span<const double> inputs)
{
    for (double x : inputs) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

double atom_value(const expr& atom, std::span<const double> inputs)
{
    return atom.kind() == node_kind::constant ? atom.value() : inputs[static_cast<std::size_t>(atom.index() - 1)];
}

struct split_bounds
{
    error_bound left;
    error_bound right;
    eps_poly a_max;
};

split_bounds derive_split(const top_split& split, const rule_set& rules, const fpn_params& params)
{
    const derivation_context ctx(rules, params);
    error_bound l = ctx.derive(split.left);
    error_bound r = ctx.derive(split.right);
    eps_poly a = eps_poly_max_at(l.a, r.a, params);
    return {std::move(l), std::move(r), std::move(a)};
}

} // namespace

// ---------------------------------------------------------------------------

semi_static_filter::semi_static_filter(const expr& e, bool ufp, const fpn_params& params)
    : m_expr(e)
    , m_ufp(ufp)
{
    build(default_rules(ufp), params);
}

semi_static_filter::semi_static_filter(const expr& e, const rule_set& rules, const fpn_params& params)
    : m_expr(e)
    , m_ufp(rules.ufp())
{
    build(rules, params);
}

void semi_static_filter::build(const rule_set& rules, const fpn_params& params)
{
    m_u_s = params.u_subnormal();
    if (m_expr.is_leaf()) {
        m_root = root_kind::leaf;
        return;
    }
    if (m_expr.kind() == node_kind::product) {
        m_root = root_kind::product;
        m_factors.push_back(std::make_shared<semi_static_filter>(m_expr.left(), rules, params));
        m_factors.push_back(std::make_shared<semi_static_filter>(m_expr.right(), rules, params));
        return;
    }
    m_root = root_kind::additive;
    const auto split = top_decomposition(m_expr);
    auto bounds = derive_split(*split, rules, params);
    m_constants = compute_constants(bounds.a_max, params);
    m_value_slot = m_program.add_expr(m_expr);
    if (bounds.a_max.is_zero()) {
        // exact operands, one rounding: the sign of p~ is the exact sign
        m_root = root_kind::exact_operands;
    }
    const magnitude_expr m = magnitude_expr::sum(bounds.left.m, bounds.right.m);
    const std::uint32_t m_slot = m.compile(m_program);
    const std::uint32_t a4_slot = m_program.add_constant(m_constants.a4);
    m_bound_slot = m_program.add_binary(opcode::mul, a4_slot, m_slot);
    if (m_ufp) {
        m_bound_slot = m_program.add_binary(opcode::add, m_bound_slot, m_program.add_constant(m_u_s));
    }
    m_left = std::move(bounds.left);
    m_right = std::move(bounds.right);
    m_a_max = std::move(bounds.a_max);
}

filter_outcome semi_static_filter::apply(std::span<const double> inputs) const
{
    switch (m_root) {
    case root_kind::exact_operands: {
        slot_buffer buffer(m_program.size());
        m_program.run(inputs, buffer.data());
        const double p = buffer.data()[m_value_slot];
        return std::isfinite(p) ? filter_outcome::certain(sign_of(p)) : filter_outcome::uncertain();
    }
    case root_kind::additive: {
        slot_buffer buffer(m_program.size());
        double* slots = buffer.data();
        m_program.run(inputs, slots);
        const double p = slots[m_value_slot];
        const double e = slots[m_bound_slot];
        const bool zero_clause = !m_ufp & (e == 0);
        if ((std::fabs(p) > e) | zero_clause) {
            return filter_outcome::certain(sign_of(p));
        }
        return filter_outcome::uncertain();
    }
    case root_kind::product: {
        const filter_outcome l = m_factors[0]->apply(inputs);
        if (l.is_certain() && l.value() == sign::zero) {
            return l;
        }
        const filter_outcome r = m_factors[1]->apply(inputs);
        if (r.is_certain() && r.value() == sign::zero) {
            return r;
        }
        if (!l.is_certain() || !r.is_certain()) {
            return filter_outcome::uncertain();
        }
        return filter_outcome::certain(l.value() * r.value());
    }
    case root_kind::leaf:
        break;
    }
    const double v = m_expr.kind() == node_kind::constant ? m_expr.value() : atom_value(m_expr, inputs);
    if (!std::isfinite(v)) {
        return filter_outcome::uncertain();
    }
    return filter_outcome::certain(sign_of(v));
}

double semi_static_filter::error_bound_value(std::span<const double> inputs) const
{
    if (m_root != root_kind::additive && m_root != root_kind::exact_operands) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    slot_buffer buffer(m_program.size());
    m_program.run(inputs, buffer.data());
    return buffer.data()[m_bound_slot];
}

std::string semi_static_filter::name() const { return m_ufp ? "semi-static-ufp" : "semi-static"; }

// ---------------------------------------------------------------------------

zero_filter::zero_filter(expr e)
    : m_expr(std::move(e))
{}

namespace {

bool certified_zero(const expr& e, std::span<const double> inputs)
{
    switch (e.kind()) {
    case node_kind::constant:
        return e.value() == 0;
    case node_kind::input:
        return false;
    case node_kind::sum:
    case node_kind::difference:
        if (is_atom(e.left()) && is_atom(e.right())) {
            const double a = atom_value(e.left(), inputs);
            const double b = atom_value(e.right(), inputs);
            return (e.kind() == node_kind::sum ? a + b : a - b) == 0;
        }
        return certified_zero(e.left(), inputs) && certified_zero(e.right(), inputs);
    case node_kind::product:
        return certified_zero(e.left(), inputs) || certified_zero(e.right(), inputs);
    }
    return false;
}

} // namespace

filter_outcome zero_filter::apply(std::span<const double> inputs) const
{
    return certified_zero(m_expr, inputs) ? filter_outcome::certain(sign::zero) : filter_outcome::uncertain();
}

// ---------------------------------------------------------------------------

interval_filter::interval_filter(const expr& e)
    : m_result(m_program.add_expr(e))
{}

namespace {

void run_intervals(const program& p, std::span<const double> inputs, interval* slots)
{
    const auto& code = p.code();
    for (std::size_t i = 0; i < code.size(); ++i) {
        const instruction& in = code[i];
        switch (in.op) {
        case opcode::input: slots[i] = interval::point(inputs[in.a]); break;
        case opcode::constant: slots[i] = interval::point(in.value); break;
        case opcode::add: slots[i] = slots[in.a] + slots[in.b]; break;
        case opcode::sub: slots[i] = slots[in.a] - slots[in.b]; break;
        case opcode::mul: slots[i] = slots[in.a] * slots[in.b]; break;
        case opcode::abs: {
            const interval x = slots[in.a];
            slots[i] = x.lo >= 0 ? x : x.hi <= 0 ? interval{-x.hi, -x.lo} : interval{0.0, x.magnitude()};
            break;
        }
        }
    }
}

} // namespace

std::vector<interval> interval_filter::evaluate(std::span<const double> inputs) const
{
    std::vector<interval> slots(m_program.size());
    run_intervals(m_program, inputs, slots.data());
    return slots;
}

filter_outcome interval_filter::apply(std::span<const double> inputs) const
{
    constexpr std::size_t local_size = 256;
    std::array<interval, local_size> local;
    std::vector<interval> heap;
    interval* slots = local.data();
    if (m_program.size() > local_size) {
        heap.resize(m_program.size());
        slots = heap.data();
    }
    run_intervals(m_program, inputs, slots);
    const interval r = slots[m_result];
    if (!r.is_finite()) {
        return filter_outcome::uncertain();
    }
    if (r.lo > 0) {
        return filter_outcome::certain(sign::positive);
    }
    if (r.hi < 0) {
        return filter_outcome::certain(sign::negative);
    }
    if (r.lo == 0 && r.hi == 0) {
        return filter_outcome::certain(sign::zero);
    }
    return filter_outcome::uncertain();
}

// ---------------------------------------------------------------------------

namespace {

bool is_atom_difference(const expr& e)
{
    return e.kind() == node_kind::difference && is_atom(e.left()) && is_atom(e.right());
}

} // namespace

translation_filter::translation_filter(const expr& e)
{
    bool ok = true;
    auto rewrite = [&](auto&& self, const expr& node) -> expr {
        if (is_atom_difference(node)) {
            m_pairs.push_back({node.left(), node.right()});
            return expr::input(static_cast<int>(m_pairs.size()));
        }
        if (node.kind() == node_kind::constant) {
            return node;
        }
        if (node.kind() == node_kind::input) {
            ok = false;
            return node;
        }
        expr l = self(self, node.left());
        expr r = self(self, node.right());
        switch (node.kind()) {
        case node_kind::sum: return l + r;
        case node_kind::difference: return l - r;
        default: return l * r;
        }
    };
    m_translated = rewrite(rewrite, e);
    m_applicable = ok && !m_pairs.empty();
}

filter_outcome translation_filter::apply(std::span<const double> inputs) const
{
    if (!m_applicable) {
        return filter_outcome::uncertain();
    }
    slot_buffer buffer(m_pairs.size());
    double* diffs = buffer.data();
    for (std::size_t k = 0; k < m_pairs.size(); ++k) {
        const two_result d = two_diff(atom_value(m_pairs[k].left, inputs), atom_value(m_pairs[k].right, inputs));
        if (!std::isfinite(d.head) || d.tail != 0) {
            return filter_outcome::uncertain();
        }
        diffs[k] = d.head;
    }
    return exact_sign_expansion(m_translated, std::span<const double>(diffs, m_pairs.size()));
}

// ---------------------------------------------------------------------------

static_filter::static_filter(const expr& e, std::vector<interval> bounds, bool ufp, const fpn_params& params)
    : m_expr(e)
    , m_ufp(ufp)
    , m_magnitude(magnitude_expr::constant(0.0))
    , m_a4(0.0)
    , m_u_s(params.u_subnormal())
    , m_value_slot(m_program.add_expr(e))
{
    const auto split = top_decomposition(e);
    if (!split) {
        throw derivation_error("static filter needs a sum or difference at the root");
    }
    auto derived = derive_split(*split, default_rules(ufp), params);
    m_a4 = compute_constants(derived.a_max, params).a4;
    m_magnitude = magnitude_expr::sum(derived.left.m, derived.right.m);
    set_bounds(std::move(bounds));
}

void static_filter::set_bounds(std::vector<interval> bounds)
{
    if (bounds.size() != static_cast<std::size_t>(m_expr.arity())) {
        throw invalid_bounds_error("static filter: expected " + std::to_string(m_expr.arity()) + " bounds, got " +
                                   std::to_string(bounds.size()));
    }
    for (const interval& b : bounds) {
        if (!b.is_finite()) {
            throw invalid_bounds_error("static filter: bounds must be finite");
        }
    }
    double bound = m_a4 * staticize(m_magnitude, bounds);
    if (m_ufp) {
        bound += m_u_s;
    }
    m_bounds = std::move(bounds);
    m_bound = bound;
}

filter_outcome static_filter::apply(std::span<const double> inputs) const
{
    for (std::size_t i = 0; i < m_bounds.size(); ++i) {
        if (!m_bounds[i].contains(inputs[i])) {
            return filter_outcome::uncertain();
        }
    }
    slot_buffer buffer(m_program.size());
    double* slots = buffer.data();
    m_program.run(inputs, slots);
    const double p = slots[m_value_slot];
    const bool zero_clause = !m_ufp & (m_bound == 0);
    if ((std::fabs(p) > m_bound) | zero_clause) {
        return filter_outcome::certain(sign_of(p));
    }
    return filter_outcome::uncertain();
}

std::string static_filter::name() const { return m_ufp ? "static-ufp" : "static"; }

namespace {

std::vector<interval> symmetric_bounds(const std::vector<double>& magnitudes)
{
    std::vector<interval> out;
    out.reserve(magnitudes.size());
    for (double m : magnitudes) {
        out.push_back({-std::fabs(m), std::fabs(m)});
    }
    return out;
}

} // namespace

almost_static_filter::almost_static_filter(const expr& e, std::vector<double> initial_magnitudes, bool ufp,
                                           const fpn_params& params)
    : static_filter(e, symmetric_bounds(initial_magnitudes), ufp, params)
    , m_magnitudes(std::move(initial_magnitudes))
{
    for (double& m : m_magnitudes) {
        m = std::fabs(m);
    }
}

bool almost_static_filter::update(std::span<const double> inputs)
{
    bool grown = false;
    for (std::size_t i = 0; i < m_magnitudes.size() && i < inputs.size(); ++i) {
        const double x = std::fabs(inputs[i]);
        if (std::isfinite(x) && x > m_magnitudes[i]) {
            m_magnitudes[i] = x;
            grown = true;
        }
    }
    if (grown) {
        set_bounds(symmetric_bounds(m_magnitudes));
    }
    return grown;
}

std::string almost_static_filter::name() const { return "almost-" + static_filter::name(); }

// ---------------------------------------------------------------------------

filter_outcome expansion_exact_stage::apply(std::span<const double> inputs) const
{
    return exact_sign_expansion(m_expr, inputs);
}

filter_outcome dyadic_exact_stage::apply(std::span<const double> inputs) const
{
    if (!all_finite(inputs)) {
        return filter_outcome::uncertain();
    }
    return filter_outcome::certain(oracle_sign(m_expr, inputs));
}

} // namespace fpfilter
