#include "fpfilter/oracle.hpp"

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "fpfilter/errors.hpp"
#include "fpfilter/program.hpp"

namespace fpfilter {

namespace {

void check_inputs(const expr& e, std::span<const double> inputs)
{
    if (inputs.size() < static_cast<std::size_t>(e.arity())) {
        throw std::invalid_argument("oracle: fewer inputs than the expression arity");
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(e.arity()); ++i) {
        if (!std::isfinite(inputs[i])) {
            throw invalid_input_error("oracle: input _" + std::to_string(i + 1) + " is not finite");
        }
    }
}

dyadic evaluate(const expr& e, std::span<const double> inputs)
{
    switch (e.kind()) {
    case node_kind::constant:
        return dyadic::from_double(e.value());
    case node_kind::input:
        return dyadic::from_double(inputs[static_cast<std::size_t>(e.index() - 1)]);
    case node_kind::sum:
        return evaluate(e.left(), inputs) + evaluate(e.right(), inputs);
    case node_kind::difference:
        return evaluate(e.left(), inputs) - evaluate(e.right(), inputs);
    case node_kind::product:
        return evaluate(e.left(), inputs) * evaluate(e.right(), inputs);
    }
    return {};
}

} // namespace

exact_evaluator::exact_evaluator(const expr& e)
    : m_keep(e)
{
    m_result = m_program.add_expr(e);
    m_mantissa.resize(m_program.size());
    m_exponent.resize(m_program.size());
}

void exact_evaluator::run(std::span<const double> inputs)
{
    const auto& code = m_program.code();
    for (std::size_t i = 0; i < code.size(); ++i) {
        const instruction& in = code[i];
        switch (in.op) {
        case opcode::input: load(i, inputs[in.a]); break;
        case opcode::constant: load(i, in.value); break;
        case opcode::add: add(i, in.a, in.b, false); break;
        case opcode::sub: add(i, in.a, in.b, true); break;
        case opcode::mul:
            mpz_mul(m_mantissa[i].get_mpz_t(), m_mantissa[in.a].get_mpz_t(), m_mantissa[in.b].get_mpz_t());
            m_exponent[i] = m_exponent[in.a] + m_exponent[in.b];
            break;
        case opcode::abs:
            mpz_abs(m_mantissa[i].get_mpz_t(), m_mantissa[in.a].get_mpz_t());
            m_exponent[i] = m_exponent[in.a];
            break;
        }
    }
}

void exact_evaluator::load(std::size_t i, double x)
{
    int e = 0;
    const double f = std::frexp(x, &e); // x = f * 2^e, 0.5 <= |f| < 1
    mpz_set_d(m_mantissa[i].get_mpz_t(), std::ldexp(f, 53));
    m_exponent[i] = static_cast<std::int64_t>(e) - 53;
}

void exact_evaluator::add(std::size_t i, std::uint32_t a, std::uint32_t b, bool subtract)
{
    mpz_class& r = m_mantissa[i];
    const mpz_class& x = m_mantissa[a];
    const mpz_class& y = m_mantissa[b];
    if (sgn(y) == 0) {
        r = x;
        m_exponent[i] = m_exponent[a];
        return;
    }
    if (sgn(x) == 0) {
        if (subtract) {
            mpz_neg(r.get_mpz_t(), y.get_mpz_t());
        } else {
            r = y;
        }
        m_exponent[i] = m_exponent[b];
        return;
    }
    const std::int64_t ex = m_exponent[a];
    const std::int64_t ey = m_exponent[b];
    const mpz_class& hi = ex >= ey ? x : y;
    mpz_mul_2exp(m_scratch.get_mpz_t(), hi.get_mpz_t(), static_cast<mp_bitcnt_t>(ex >= ey ? ex - ey : ey - ex));
    if (ex >= ey) {
        if (subtract) {
            mpz_sub(r.get_mpz_t(), m_scratch.get_mpz_t(), y.get_mpz_t());
        } else {
            mpz_add(r.get_mpz_t(), m_scratch.get_mpz_t(), y.get_mpz_t());
        }
    } else {
        if (subtract) {
            mpz_sub(r.get_mpz_t(), x.get_mpz_t(), m_scratch.get_mpz_t());
        } else {
            mpz_add(r.get_mpz_t(), x.get_mpz_t(), m_scratch.get_mpz_t());
        }
    }
    m_exponent[i] = std::min(ex, ey);
}

namespace {

exact_evaluator& evaluator_for(const expr& e)
{
    thread_local std::unordered_map<const void*, exact_evaluator> cache;
    auto it = cache.find(e.id());
    if (it == cache.end()) {
        if (cache.size() > 64) {
            cache.clear();
        }
        it = cache.emplace(e.id(), exact_evaluator(e)).first;
    }
    return it->second;
}

} // namespace

dyadic oracle_value(const expr& e, std::span<const double> inputs)
{
    check_inputs(e, inputs);
    return evaluate(e, inputs);
}

sign oracle_sign(const expr& e, std::span<const double> inputs)
{
    check_inputs(e, inputs);
    exact_evaluator& ev = evaluator_for(e);
    ev.run(inputs);
    return ev.sign_at(ev.result_slot());
}

} // namespace fpfilter
