#include "invariants.hpp"

#include <algorithm>
#include <unordered_set>

namespace fpfilter::harness {

void invariant_counts::merge(const invariant_counts& o)
{
    samples += o.samples;
    underflow_skipped += o.underflow_skipped;
    checks += o.checks;
    magnitude_violations += o.magnitude_violations;
    error_violations += o.error_violations;
    exactness_violations += o.exactness_violations;
    eps_max_checks += o.eps_max_checks;
    eps_max_violations += o.eps_max_violations;
    eps_max_outside_hypothesis += o.eps_max_outside_hypothesis;
}

namespace {

void collect_nodes(const expr& e, std::unordered_set<const void*>& seen, std::vector<expr>& out)
{
    if (!seen.insert(e.id()).second) {
        return;
    }
    if (!e.is_leaf()) {
        collect_nodes(e.left(), seen, out);
        collect_nodes(e.right(), seen, out);
    }
    out.push_back(e);
}

std::vector<std::uint32_t> product_slots(const program& p)
{
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.code()[i].op == opcode::mul) {
            out.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return out;
}

bool any_underflow(const program& p, const std::vector<std::uint32_t>& products, const double* slots)
{
    for (std::uint32_t i : products) {
        const instruction& in = p.code()[i];
        if (product_underflow(slots[in.a], slots[in.b], slots[i])) {
            return true;
        }
    }
    return false;
}

} // namespace

invariant_checker::invariant_checker(const expr& e, bool ufp)
    : m_ufp(ufp)
    , m_u_normal(fpn_params::binary64().u_normal())
    , m_exact(e)
{
    m_float.add_expr(e);
    std::unordered_set<const void*> seen;
    std::vector<expr> nodes;
    collect_nodes(e, seen, nodes);
    for (const expr& node : nodes) {
        const error_bound b = derive(node, ufp);
        const dyadic a = b.a.evaluate(fpn_params::binary64());
        node_check c{*m_float.slot_of(node), *m_exact.code().slot_of(node), b.m.compile(m_float),
                     a.signed_mantissa(), a.exponent()};
        m_nodes.push_back(std::move(c));
    }
    m_products = product_slots(m_float);
    m_slots.resize(m_float.size());
}

bool invariant_checker::error_within(const node_check& n, double approx, double magnitude)
{
    // lhs = |approx - exact| * 2^el
    int e_approx = 0;
    const double f = std::frexp(approx, &e_approx);
    mpz_set_d(m_tmp.get_mpz_t(), std::ldexp(f, 53));
    std::int64_t ea = static_cast<std::int64_t>(e_approx) - 53;
    const mpz_class& q = m_exact.mantissa(n.exact_slot);
    std::int64_t eq = m_exact.exponent(n.exact_slot);
    std::int64_t el = 0;
    if (sgn(m_tmp) == 0) {
        m_lhs = q;
        el = eq;
    } else if (sgn(q) == 0) {
        m_lhs = m_tmp;
        el = ea;
    } else if (ea >= eq) {
        mpz_mul_2exp(m_lhs.get_mpz_t(), m_tmp.get_mpz_t(), static_cast<mp_bitcnt_t>(ea - eq));
        m_lhs -= q;
        el = eq;
    } else {
        mpz_mul_2exp(m_lhs.get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(eq - ea));
        mpz_sub(m_lhs.get_mpz_t(), m_tmp.get_mpz_t(), m_lhs.get_mpz_t());
        el = ea;
    }
    mpz_abs(m_lhs.get_mpz_t(), m_lhs.get_mpz_t());
    if (sgn(m_lhs) == 0) {
        return true;
    }
    // rhs = a(eps) * magnitude * 2^er
    int e_mag = 0;
    const double g = std::frexp(magnitude, &e_mag);
    mpz_set_d(m_tmp.get_mpz_t(), std::ldexp(g, 53));
    mpz_mul(m_rhs.get_mpz_t(), m_tmp.get_mpz_t(), n.a_mantissa.get_mpz_t());
    if (sgn(m_rhs) == 0) {
        return false;
    }
    const std::int64_t er = n.a_exponent + static_cast<std::int64_t>(e_mag) - 53;
    if (el >= er) {
        mpz_mul_2exp(m_lhs.get_mpz_t(), m_lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(el - er));
    } else {
        mpz_mul_2exp(m_rhs.get_mpz_t(), m_rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(er - el));
    }
    return m_lhs <= m_rhs;
}

void invariant_checker::check(std::span<const double> inputs, invariant_counts& counts)
{
    ++counts.samples;
    m_float.run(inputs, m_slots.data());
    if (!m_ufp && any_underflow(m_float, m_products, m_slots.data())) {
        ++counts.underflow_skipped;
        return;
    }
    m_exact.run(inputs);
    for (const node_check& n : m_nodes) {
        const double approx = m_slots[n.value_slot];
        const double m = m_slots[n.magnitude_slot];
        ++counts.checks;
        if (!std::isfinite(m)) {
            continue; // the invariants only constrain finite magnitudes
        }
        if (!(std::fabs(approx) <= m)) {
            ++counts.magnitude_violations;
            continue;
        }
        if (!error_within(n, approx, m)) {
            ++counts.error_violations;
        }
        if (m_ufp) {
            const bool exact = m_exact.value_at(n.exact_slot) == dyadic::from_double(approx);
            if (!exact && !(m >= m_u_normal)) {
                ++counts.exactness_violations;
            }
        }
    }
}

void invariant_checker::check_eps_max_pairs(const expr& e, bool ufp, invariant_counts& counts)
{
    const fpn_params params = fpn_params::binary64();
    std::unordered_set<const void*> seen;
    std::vector<expr> nodes;
    collect_nodes(e, seen, nodes);
    mpz_class limit;
    mpz_ui_pow_ui(limit.get_mpz_t(), 2, static_cast<unsigned long>(params.precision));
    for (const expr& node : nodes) {
        if (!node.is_additive() || is_atom_pair_sum(node)) {
            continue;
        }
        const eps_poly a1 = derive(node.left(), ufp).a;
        const eps_poly a2 = derive(node.right(), ufp).a;
        const dyadic v1 = a1.evaluate(params);
        const dyadic v2 = a2.evaluate(params);
        const dyadic exact_max = v1 >= v2 ? v1 : v2;
        ++counts.eps_max_checks;
        const auto within = [&](const eps_poly& a) {
            return std::all_of(a.coefficients().begin(), a.coefficients().end(),
                               [&](const mpz_class& c) { return abs(c) < limit; });
        };
        if (within(a1) && within(a2)) {
            if (eps_poly_max(a1, a2, params).evaluate(params) != exact_max) {
                ++counts.eps_max_violations;
            }
        } else {
            ++counts.eps_max_outside_hypothesis;
        }
        if (eps_poly_max_at(a1, a2, params).evaluate(params) != exact_max) {
            ++counts.eps_max_violations;
        }
    }
}

underflow_detector::underflow_detector(const expr& e)
{
    m_program.add_expr(e);
    if (const auto split = top_decomposition(e)) {
        derive(split->left, false).m.compile(m_program);
        derive(split->right, false).m.compile(m_program);
    }
    m_products = product_slots(m_program);
    m_slots.resize(m_program.size());
}

bool underflow_detector::underflows(std::span<const double> inputs)
{
    m_program.run(inputs, m_slots.data());
    return any_underflow(m_program, m_products, m_slots.data());
}

} // namespace fpfilter::harness
